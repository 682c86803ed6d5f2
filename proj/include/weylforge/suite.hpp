#pragma once

// Batch runner: sample points per chart, evaluate the registry, build the report.

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "weylforge/chart.hpp"
#include "weylforge/geometry.hpp"
#include "weylforge/identities.hpp"

namespace weylforge {

inline constexpr const char* kVersion = "1.0.0";

class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// xoshiro256** seeded through splitmix64.
class Xoshiro256 {
public:
  explicit Xoshiro256(std::uint64_t seed) {
    for (auto& w : s_) w = splitmix64(seed);
  }
  static Xoshiro256 from_state(const std::array<std::uint64_t, 4>& s) {
    Xoshiro256 r(0);
    for (std::size_t i = 0; i < 4; ++i) r.s_[i] = s[i];
    return r;
  }
  std::uint64_t next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  static std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4]{};
};

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Sample point `index` of a chart; depends only on (seed, chart name, index).
inline Point sample_point(const MetricChart& chart, std::uint64_t seed, int index) {
  std::uint64_t mix = seed;
  const std::uint64_t a = Xoshiro256::splitmix64(mix) ^ fnv1a(chart.name);
  std::uint64_t b = a + static_cast<std::uint64_t>(index) * 0x9e3779b97f4a7c15ULL;
  Xoshiro256 rng(Xoshiro256::splitmix64(b));
  Point p{};
  for (std::size_t d = 0; d < 4; ++d) p[d] = chart.sample_box.lo[d] + (chart.sample_box.hi[d] - chart.sample_box.lo[d]) * rng.uniform();
  return p;
}

struct RunConfig {
  std::vector<std::string> manifolds{"all"};
  std::vector<std::string> identities{"all"};
  int points = 20;
  std::uint64_t seed = 42;
  std::map<std::string, double> tolerance_overrides;
  int jet_order = 0;  // 0 = auto
  std::string format = "json";
  std::optional<std::string> output_path;
  bool deterministic = false;
  double metric_scale = 1.0;  // evaluates every chart with g -> metric_scale * g
  int threads = 0;            // 0 = WEYL_FORGE_THREADS or hardware
};

struct CheckResult {
  std::string identity_id;
  std::string manifold;
  int point_index = 0;
  Point point{};
  double residual_abs = 0.0, scale = 0.0, residual_rel = 0.0, tolerance = 0.0;
  Status status = Status::not_applicable;
  int jet_order = 0;
  std::string message;
};

struct IdentitySummary {
  std::string identity_id;
  int pass = 0, fail = 0, not_applicable = 0, expected_fail = 0, unexpected_pass = 0;
  double max_rel = 0.0;  // over applicable, non-control evaluations
  bool negative_expectation_met = true;
};

struct Report {
  RunConfig config;
  std::vector<std::string> manifolds, identities;  // resolved
  std::vector<CheckResult> results;
  std::vector<IdentitySummary> summary;
  std::vector<std::string> diagnostics;
  std::string timestamp;
  int exit_code = 0;

  const IdentitySummary* find_summary(const std::string& id) const {
    for (const auto& s : summary)
      if (s.identity_id == id) return &s;
    return nullptr;
  }
};

inline std::string join(const std::vector<std::string>& v, const std::string& sep = ", ") {
  std::string out;
  for (const auto& s : v) out += (out.empty() ? "" : sep) + s;
  return out;
}

namespace suite_detail {

inline bool is_all(const std::vector<std::string>& v) { return v.empty() || (v.size() == 1 && v[0] == "all"); }

inline std::vector<std::string> resolve_manifolds(const std::vector<std::string>& req) {
  const auto valid = catalog_names();
  if (is_all(req)) return valid;
  std::vector<std::string> out;
  for (const auto& n : req) {
    if (std::find(valid.begin(), valid.end(), n) == valid.end())
      throw ConfigError("unknown manifold '" + n + "'; valid manifolds: " + join(valid));
    if (std::find(out.begin(), out.end(), n) == out.end()) out.push_back(n);
  }
  return out;
}

inline std::vector<const Identity*> resolve_identities(const std::vector<std::string>& req) {
  std::vector<const Identity*> out;
  if (is_all(req)) {
    for (const auto& e : registry())
      if (e.in_scope()) out.push_back(&e);
    return out;
  }
  for (const auto& id : req) {
    const Identity* e = find_identity(id);
    if (!e) throw ConfigError("unknown identity '" + id + "'; valid identities: " + join(identity_ids()));
    if (!e->in_scope()) throw ConfigError("identity '" + id + "' is out-of-scope(global) and has no pointwise check");
    if (std::find(out.begin(), out.end(), e) == out.end()) out.push_back(e);
  }
  return out;
}

inline int thread_count(int requested, std::size_t tasks) {
  int n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("WEYL_FORGE_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  if (requested > 0) n = requested;
  return std::max(1, std::min(n, static_cast<int>(tasks)));
}

inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace suite_detail

/// Jet order used for a set of identities; hypothesis gates need nabla W.
inline int auto_jet_order(const std::vector<const Identity*>& ids) {
  int k = required_jet_order(1);
  for (const auto* e : ids) k = std::max(k, e->jet_order());
  return k;
}

inline double tolerance_for(const Identity& id, const RunConfig& cfg) {
  const auto it = cfg.tolerance_overrides.find(id.id);
  return it != cfg.tolerance_overrides.end() ? it->second : id.default_tolerance();
}

inline void validate(const RunConfig& cfg) {
  if (cfg.points < 1) throw ConfigError("--points must be >= 1");
  if (cfg.jet_order != 0 && (cfg.jet_order < 2 || cfg.jet_order > kMaxJetOrder))
    throw ConfigError("--jet-order must be auto or 2..8");
  if (cfg.format != "json" && cfg.format != "csv" && cfg.format != "text")
    throw ConfigError("--format must be json, csv or text");
  if (!(cfg.metric_scale > 0.0) || !std::isfinite(cfg.metric_scale)) throw ConfigError("metric scale must be positive");
  for (const auto& [id, tol] : cfg.tolerance_overrides) {
    if (!find_identity(id)) throw ConfigError("unknown identity '" + id + "' in --tol; valid identities: " + join(identity_ids()));
    if (!(tol > 0.0) || !std::isfinite(tol)) throw ConfigError("tolerance for '" + id + "' must be positive");
  }
}

/// Evaluates all selected identities at all sample points. Throws ConfigError on bad input.
inline Report run_suite(const RunConfig& cfg) {
  validate(cfg);
  Report rep;
  rep.config = cfg;
  rep.manifolds = suite_detail::resolve_manifolds(cfg.manifolds);
  const auto ids = suite_detail::resolve_identities(cfg.identities);
  for (const auto* e : ids) rep.identities.push_back(e->id);

  int depth = 1, lap = -1;
  for (const auto* e : ids) {
    depth = std::max(depth, e->depth);
    lap = std::max(lap, e->laplacian_level);
  }
  const int need = auto_jet_order(ids);
  if (cfg.jet_order != 0 && cfg.jet_order < need)
    throw ConfigError("--jet-order " + std::to_string(cfg.jet_order) + " is below the " + std::to_string(need) +
                      " required by the selected identities");
  const int order = cfg.jet_order == 0 ? need : cfg.jet_order;

  std::vector<MetricChart> charts;
  for (const auto& n : rep.manifolds) {
    MetricChart c = chart_by_name(n);
    charts.push_back(cfg.metric_scale == 1.0 ? c : scaled(c, cfg.metric_scale));
  }

  struct Task {
    std::size_t chart;
    int index;
    Point p;
    std::vector<CheckResult> rows;
  };
  std::vector<Task> tasks;
  for (std::size_t m = 0; m < charts.size(); ++m)
    for (int i = 0; i < cfg.points; ++i) tasks.push_back({m, i, sample_point(charts[m], cfg.seed, i), {}});

  auto work = [&](Task& t) {
    const MetricChart& chart = charts[t.chart];
    auto row = [&](const std::string& id) {
      CheckResult r;
      r.identity_id = id;
      r.manifold = chart.name;
      r.point_index = t.index;
      r.point = t.p;
      r.jet_order = order;
      return r;
    };
    try {
      CurvatureRequest req;
      req.depth = depth;
      req.laplacian_level = lap;
      req.jet_order = order;
      const CurvaturePoint cp = curvature_at(chart, t.p, req);
      const Hypotheses h = measure_hypotheses(cp);
      const auto mismatch = declaration_mismatches(chart.declared, h);
      if (!mismatch.empty()) {
        CheckResult r = row("gates.declared");
        r.status = Status::fail;
        r.message = "declared but not measured: " + join(mismatch);
        t.rows.push_back(r);
      }
      for (const auto* e : ids) {
        CheckResult r = row(e->id);
        r.tolerance = tolerance_for(*e, cfg);
        try {
          const Evaluation ev = evaluate(*e, cp, h, chart.declared.negative_control, r.tolerance);
          r.residual_abs = ev.residual.abs;
          r.scale = ev.residual.scale;
          r.residual_rel = ev.rel;
          r.status = ev.status;
        } catch (const std::exception& ex) {
          r.status = Status::fail;
          r.message = ex.what();
        }
        t.rows.push_back(r);
      }
    } catch (const std::exception& ex) {
      for (const auto* e : ids) {
        CheckResult r = row(e->id);
        r.tolerance = tolerance_for(*e, cfg);
        r.status = Status::fail;
        r.message = ex.what();
        t.rows.push_back(r);
      }
    }
  };

  const int nthreads = suite_detail::thread_count(cfg.threads, tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) work(tasks[i]);
  };
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (auto& t : tasks)
    for (auto& r : t.rows) rep.results.push_back(std::move(r));
  std::stable_sort(rep.results.begin(), rep.results.end(), [](const CheckResult& a, const CheckResult& b) {
    if (a.identity_id != b.identity_id) return a.identity_id < b.identity_id;
    if (a.manifold != b.manifold) return a.manifold < b.manifold;
    return a.point_index < b.point_index;
  });

  // Summary, negative-control expectations and exit code.
  std::map<std::string, IdentitySummary> sums;
  std::map<std::pair<std::string, std::string>, std::pair<int, int>> control;  // (id, manifold) -> (expected, total)
  bool failed = false;
  for (auto& r : rep.results) {
    auto& s = sums[r.identity_id];
    s.identity_id = r.identity_id;
    for (double* v : {&r.residual_abs, &r.scale, &r.residual_rel})
      if (!std::isfinite(*v)) {
        rep.diagnostics.push_back("non-finite value in " + r.identity_id + " on " + r.manifold + " point " +
                                  std::to_string(r.point_index));
        *v = 0.0;
        r.status = Status::fail;
      }
    switch (r.status) {
      case Status::pass: ++s.pass; break;
      case Status::fail: ++s.fail; failed = true; break;
      case Status::not_applicable: ++s.not_applicable; break;
      case Status::expected_fail: ++s.expected_fail; break;
      case Status::unexpected_pass: ++s.unexpected_pass; break;
    }
    if (r.status == Status::pass || r.status == Status::fail) s.max_rel = std::max(s.max_rel, r.residual_rel);
    if (r.status == Status::expected_fail || r.status == Status::unexpected_pass) {
      auto& c = control[{r.identity_id, r.manifold}];
      c.second += 1;
      if (r.status == Status::expected_fail) c.first += 1;
    }
  }
  for (const auto& [key, c] : control)
    if (c.first < kNegativeControlFraction * c.second) {
      sums[key.first].negative_expectation_met = false;
      failed = true;
    }
  for (auto& [id, s] : sums) rep.summary.push_back(s);
  if (!rep.diagnostics.empty()) failed = true;
  rep.exit_code = failed ? 1 : 0;
  if (!cfg.deterministic) rep.timestamp = suite_detail::utc_timestamp();
  return rep;
}

// Report writers

inline nlohmann::ordered_json to_json_value(const Report& rep) {
  using nlohmann::ordered_json;
  const RunConfig& c = rep.config;
  ordered_json cfg;
  cfg["manifolds"] = rep.manifolds;
  cfg["identities"] = rep.identities;
  cfg["points_per_manifold"] = c.points;
  cfg["seed"] = c.seed;
  ordered_json tol = ordered_json::object();
  for (const auto& [k, v] : c.tolerance_overrides) tol[k] = v;
  cfg["tolerance_overrides"] = tol;
  if (c.jet_order == 0)
    cfg["jet_order"] = "auto";
  else
    cfg["jet_order"] = c.jet_order;
  cfg["metric_scale"] = c.metric_scale;
  cfg["deterministic"] = c.deterministic;

  ordered_json env;
  env["engine"] = "weylforge";
  env["version"] = kVersion;
  env["compiler"] = __VERSION__;
  env["cxx_standard"] = static_cast<long>(__cplusplus);
  if (!rep.timestamp.empty()) env["timestamp"] = rep.timestamp;

  ordered_json results = ordered_json::array();
  for (const auto& r : rep.results) {
    ordered_json j;
    j["identity_id"] = r.identity_id;
    j["manifold"] = r.manifold;
    j["point_index"] = r.point_index;
    j["point"] = {r.point[0], r.point[1], r.point[2], r.point[3]};
    j["residual_abs"] = r.residual_abs;
    j["scale"] = r.scale;
    j["residual_rel"] = r.residual_rel;
    j["tolerance"] = r.tolerance;
    j["status"] = to_string(r.status);
    j["jet_order"] = r.jet_order;
    if (!r.message.empty()) j["message"] = r.message;
    results.push_back(std::move(j));
  }

  ordered_json per_id = ordered_json::array();
  int total_fail = 0, total_pass = 0, total_na = 0, total_ef = 0, total_up = 0;
  for (const auto& s : rep.summary) {
    ordered_json j;
    j["identity_id"] = s.identity_id;
    j["pass"] = s.pass;
    j["fail"] = s.fail;
    j["not_applicable"] = s.not_applicable;
    j["expected_fail"] = s.expected_fail;
    j["unexpected_pass"] = s.unexpected_pass;
    j["max_residual_rel"] = s.max_rel;
    if (s.expected_fail + s.unexpected_pass > 0) j["negative_control_met"] = s.negative_expectation_met;
    per_id.push_back(std::move(j));
    total_fail += s.fail;
    total_pass += s.pass;
    total_na += s.not_applicable;
    total_ef += s.expected_fail;
    total_up += s.unexpected_pass;
  }
  ordered_json summary;
  summary["exit_code"] = rep.exit_code;
  summary["pass"] = total_pass;
  summary["fail"] = total_fail;
  summary["not_applicable"] = total_na;
  summary["expected_fail"] = total_ef;
  summary["unexpected_pass"] = total_up;
  summary["diagnostics"] = rep.diagnostics;
  summary["identities"] = per_id;

  ordered_json out;
  out["config"] = cfg;
  out["environment"] = env;
  out["results"] = results;
  out["summary"] = summary;
  return out;
}

inline std::string to_json(const Report& rep) { return to_json_value(rep).dump(2) + "\n"; }

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Report& rep) {
  std::ostringstream os;
  os << "identity_id,manifold,x1,x2,x3,x4,residual_abs,scale,residual_rel,status,jet_order\n";
  for (const auto& r : rep.results) {
    os << r.identity_id << ',' << r.manifold;
    for (double x : r.point) os << ',' << format_double(x);
    os << ',' << format_double(r.residual_abs) << ',' << format_double(r.scale) << ',' << format_double(r.residual_rel)
       << ',' << to_string(r.status) << ',' << r.jet_order << '\n';
  }
  return os.str();
}

inline std::string to_text(const Report& rep) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-40s %6s %6s %6s %6s %6s  %s\n", "identity", "pass", "fail", "n/a", "xfail", "xpass",
                "max rel");
  os << buf;
  for (const auto& s : rep.summary) {
    std::snprintf(buf, sizeof buf, "%-40s %6d %6d %6d %6d %6d  %.3e%s\n", s.identity_id.c_str(), s.pass, s.fail,
                  s.not_applicable, s.expected_fail, s.unexpected_pass, s.max_rel,
                  s.negative_expectation_met ? "" : "  negative control not met");
    os << buf;
  }
  bool header = false;
  for (const auto& r : rep.results) {
    if (r.status != Status::fail && r.status != Status::unexpected_pass) continue;
    if (!header) {
      os << "\nnot passing:\n";
      header = true;
    }
    std::snprintf(buf, sizeof buf, "  %-15s %-36s %-24s #%-3d rel=%.3e", to_string(r.status), r.identity_id.c_str(),
                  r.manifold.c_str(), r.point_index, r.residual_rel);
    os << buf;
    if (!r.message.empty()) os << "  " << r.message;
    os << '\n';
  }
  for (const auto& d : rep.diagnostics) os << "diagnostic: " << d << '\n';
  os << "\nexit code " << rep.exit_code << '\n';
  if (!rep.timestamp.empty()) os << "generated " << rep.timestamp << '\n';
  return os.str();
}

inline std::string render(const Report& rep) {
  if (rep.config.format == "csv") return to_csv(rep);
  if (rep.config.format == "text") return to_text(rep);
  return to_json(rep);
}

// Listings

inline std::string identity_listing() {
  std::ostringstream os;
  for (const auto& e : registry()) {
    os << e.id << "  " << e.gate_label();
    if (e.in_scope()) os << "  jets:" << e.jet_order();
    os << "  " << join(e.anchors, ",") << '\n';
  }
  return os.str();
}

/// Properties measured at the centre of the sample box.
inline std::string manifold_summary(const MetricChart& chart) {
  const CurvaturePoint cp = curvature_at(chart, chart.sample_box.center(), 1);
  const Hypotheses h = measure_hypotheses(cp);
  std::vector<std::string> props;
  if (h.einstein) {
    std::string lam = chart.declared.einstein_symbol;
    if (lam.empty()) {
      char buf[32];
      const double v = std::abs(h.einstein_constant) < 1e-12 ? 0.0 : h.einstein_constant;
      std::snprintf(buf, sizeof buf, "%.6g", v);
      lam = buf;
    }
    props.push_back("Einstein(λ=" + lam + ")");
  }
  props.push_back(h.parallel_weyl ? "∇W=0" : "∇W≠0");
  if (h.ricci_flat && h.curvature_scale > 0) props.push_back("Ricci-flat");
  if (h.curvature_scale == 0) props.push_back("flat");
  if (!h.einstein && h.harmonic_weyl) props.push_back("harmonic-W");
  if (h.conformally_flat) props.push_back("W=0");
  if (chart.declared.negative_control) props.push_back("negative-control");
  return chart.name + "  " + join(props, " ");
}

inline std::string manifold_listing() {
  std::ostringstream os;
  for (const auto& c : catalog()) os << manifold_summary(c) << "    " << c.description << '\n';
  return os.str();
}

}  // namespace weylforge
