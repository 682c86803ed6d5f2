// weylforge: evaluate curvature identities on catalog metrics.
//
//   weylforge verify --manifolds all --identities bochner2.teo-sbf --points 20 --seed 42
//   weylforge list identities

#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "weylforge/suite.hpp"

using namespace weylforge;

namespace {

std::vector<std::string> split_commas(const std::vector<std::string>& in) {
  std::vector<std::string> out;
  for (const auto& s : in) {
    std::size_t start = 0;
    while (start <= s.size()) {
      const std::size_t end = s.find(',', start);
      const std::string part = s.substr(start, end == std::string::npos ? std::string::npos : end - start);
      if (!part.empty()) out.push_back(part);
      if (end == std::string::npos) break;
      start = end + 1;
    }
  }
  return out;
}

std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
  std::map<std::string, double> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("--tol expects id=value, got '" + item + "'");
    try {
      std::size_t used = 0;
      const double v = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
      out[item.substr(0, eq)] = v;
    } catch (const std::logic_error&) {
      throw ConfigError("--tol value is not a number in '" + item + "'");
    }
  }
  return out;
}

int parse_jet_order(const std::string& s) {
  if (s == "auto") return 0;
  try {
    std::size_t used = 0;
    const int k = std::stoi(s, &used);
    if (used == s.size()) return k;
  } catch (const std::logic_error&) {
  }
  throw ConfigError("--jet-order must be auto or an integer 2..8");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pointwise checks of Weyl curvature identities on explicit metrics"};
  app.require_subcommand(1);

  std::vector<std::string> manifolds{"all"}, identities{"all"}, tolerances;
  std::string jet_order = "auto", out_path;
  RunConfig cfg;

  auto* verify = app.add_subcommand("verify", "Evaluate identities at seeded sample points");
  verify->add_option("--manifolds", manifolds, "Catalog names (comma separated) or all");
  verify->add_option("--identities", identities, "Identity ids (comma separated) or all");
  verify->add_option("--points", cfg.points, "Sample points per manifold");
  verify->add_option("--seed", cfg.seed, "Sampling seed");
  verify->add_option("--jet-order", jet_order, "auto or 2..8");
  verify->add_option("--tol", tolerances, "Tolerance override id=value (repeatable)");
  verify->add_option("--format", cfg.format, "json, csv or text");
  verify->add_option("--out", out_path, "Write the report here instead of stdout");
  verify->add_option("--metric-scale", cfg.metric_scale, "Evaluate every chart with the metric multiplied by this");
  verify->add_flag("--deterministic", cfg.deterministic, "Omit the timestamp");

  auto* list = app.add_subcommand("list", "List catalog manifolds or registered identities");
  std::string what;
  list->add_option("what", what, "manifolds or identities")->required()->check(CLI::IsMember({"manifolds", "identities"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      std::cout << (what == "manifolds" ? manifold_listing() : identity_listing());
      return 0;
    }
    cfg.manifolds = split_commas(manifolds);
    cfg.identities = split_commas(identities);
    cfg.tolerance_overrides = parse_tolerances(split_commas(tolerances));
    cfg.jet_order = parse_jet_order(jet_order);
    if (!out_path.empty()) cfg.output_path = out_path;

    const Report rep = run_suite(cfg);
    const std::string text = render(rep);
    if (cfg.output_path) {
      std::ofstream f(*cfg.output_path, std::ios::binary);
      if (!f) {
        std::cerr << "error: cannot open " << *cfg.output_path << " for writing\n";
        return 2;
      }
      f << text;
    } else {
      std::cout << text;
    }
    for (const auto& d : rep.diagnostics) std::cerr << "diagnostic: " << d << '\n';
    if (rep.exit_code != 0) {
      for (const auto& s : rep.summary)
        if (s.fail > 0 || !s.negative_expectation_met)
          std::cerr << "failing: " << s.identity_id << " (fail " << s.fail
                    << (s.negative_expectation_met ? "" : ", negative control not met") << ")\n";
    }
    return rep.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
