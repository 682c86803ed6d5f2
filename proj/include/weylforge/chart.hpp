#pragma once

// Metric charts: closed-form 4D Riemannian metrics written in jet arithmetic,
// plus the fixed catalog used by the identity suite.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "weylforge/jet.hpp"

namespace weylforge {

using Point = std::array<double, 4>;

struct Box {
  Point lo{}, hi{};
  bool contains(const Point& p) const {
    for (int i = 0; i < 4; ++i)
      if (!(p[static_cast<std::size_t>(i)] >= lo[static_cast<std::size_t>(i)] &&
            p[static_cast<std::size_t>(i)] <= hi[static_cast<std::size_t>(i)]))
        return false;
    return true;
  }
  Point center() const {
    Point c{};
    for (std::size_t i = 0; i < 4; ++i) c[i] = 0.5 * (lo[i] + hi[i]);
    return c;
  }
};

/// Claims about a chart. The suite re-derives each of them numerically.
struct DeclaredProperties {
  std::optional<double> einstein;  // Ric = lambda g
  std::string einstein_symbol;     // printed instead of the value when set
  bool ricci_flat = false;
  bool harmonic_weyl = false;
  bool parallel_weyl = false;
  bool conformally_flat = false;
  bool negative_control = false;
};

/// Independent metric components in the order 00 01 02 03 11 12 13 22 23 33.
using MetricComponents = std::array<Jet, 10>;
using Coordinates = std::array<Jet, 4>;

inline constexpr int sym_index(int i, int j) {
  if (i > j) std::swap(i, j);
  return i * 4 - i * (i - 1) / 2 + (j - i);
}

struct MetricChart {
  std::string name;
  std::array<std::string, 4> coordinate_names;
  Box domain;       // where the formula is valid
  Box sample_box;   // safe region for random points
  std::function<MetricComponents(const Coordinates&)> metric_fn;
  int orientation = 1;
  DeclaredProperties declared;
  std::string description;

  /// Metric jets of the given order at a point; throws std::domain_error outside the domain.
  MetricComponents metric_jets(const Point& p, int order) const {
    if (!domain.contains(p)) {
      std::ostringstream os;
      os << "point (" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3] << ") outside the domain of chart "
         << name;
      throw std::domain_error(os.str());
    }
    Coordinates x;
    for (int d = 0; d < 4; ++d) x[static_cast<std::size_t>(d)] = Jet::variable(order, d, p[static_cast<std::size_t>(d)]);
    return metric_fn(x);
  }
};

namespace detail {

inline MetricComponents diagonal_metric(const Jet& a, const Jet& b, const Jet& c, const Jet& d) {
  const Jet z(a.order());
  return {a, z, z, z, b, z, z, c, z, d};
}

inline MetricComponents conformal_to_flat(const Jet& factor) {
  return diagonal_metric(factor, factor, factor, factor);
}

inline Jet radius_sq(const Coordinates& x) { return x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]; }

inline Box cube(double lo, double hi) { return Box{{lo, lo, lo, lo}, {hi, hi, hi, hi}}; }

inline constexpr double kPi = std::numbers::pi;

}  // namespace detail

inline MetricChart flat_r4() {
  MetricChart c;
  c.name = "flat-r4";
  c.coordinate_names = {"x1", "x2", "x3", "x4"};
  c.domain = detail::cube(-1e3, 1e3);
  c.sample_box = detail::cube(-1.0, 1.0);
  c.metric_fn = [](const Coordinates& x) {
    const Jet one = Jet::constant(x[0].order(), 1.0);
    return detail::diagonal_metric(one, one, one, one);
  };
  c.declared.einstein = 0.0;
  c.declared.ricci_flat = c.declared.harmonic_weyl = c.declared.parallel_weyl = c.declared.conformally_flat = true;
  c.description = "Euclidean space";
  return c;
}

/// Unit four-sphere in stereographic coordinates, g = 4 delta / (1 + |x|^2)^2.
inline MetricChart round_s4() {
  MetricChart c;
  c.name = "round-s4";
  c.coordinate_names = {"x1", "x2", "x3", "x4"};
  c.domain = detail::cube(-1e3, 1e3);
  c.sample_box = detail::cube(-1.0, 1.0);
  c.metric_fn = [](const Coordinates& x) {
    const Jet d = 1.0 + detail::radius_sq(x);
    return detail::conformal_to_flat(4.0 * recip(d * d));
  };
  c.declared.einstein = 3.0;
  c.declared.harmonic_weyl = c.declared.parallel_weyl = c.declared.conformally_flat = true;
  c.description = "unit sphere, stereographic chart";
  return c;
}

/// Poincare ball model of curvature -1.
inline MetricChart hyperbolic_h4() {
  MetricChart c;
  c.name = "hyperbolic-h4";
  c.coordinate_names = {"x1", "x2", "x3", "x4"};
  c.domain = detail::cube(-0.499, 0.499);
  c.sample_box = detail::cube(-0.4, 0.4);
  c.metric_fn = [](const Coordinates& x) {
    const Jet d = 1.0 - detail::radius_sq(x);
    return detail::conformal_to_flat(4.0 * recip(d * d));
  };
  c.declared.einstein = -3.0;
  c.declared.harmonic_weyl = c.declared.parallel_weyl = c.declared.conformally_flat = true;
  c.description = "hyperbolic space, Poincare ball";
  return c;
}

/// Fubini-Study metric (holomorphic sectional curvature 4) on the affine chart
/// z1 = x1 + i x2, z2 = x3 + i x4.
inline MetricChart cp2_fubini_study() {
  MetricChart c;
  c.name = "cp2-fubini-study";
  c.coordinate_names = {"x1", "y1", "x2", "y2"};
  c.domain = detail::cube(-1e3, 1e3);
  c.sample_box = detail::cube(-0.5, 0.5);
  c.metric_fn = [](const Coordinates& x) {
    // g(v, w) = Re[(S <v, w> - (zbar.v) conj(zbar.w))] / S^2 with S = 1 + |z|^2.
    // For the real basis vector of x_a (v_a = 1) zbar.v = x_a - i y_a; for y_a (v_a = i) it is y_a + i x_a.
    const Jet s = 1.0 + detail::radius_sq(x);
    const Jet inv_s2 = recip(s * s);
    std::array<Jet, 4> re, im;
    for (int a = 0; a < 2; ++a) {
      const Jet& xa = x[static_cast<std::size_t>(2 * a)];
      const Jet& ya = x[static_cast<std::size_t>(2 * a + 1)];
      re[static_cast<std::size_t>(2 * a)] = xa;
      im[static_cast<std::size_t>(2 * a)] = -ya;
      re[static_cast<std::size_t>(2 * a + 1)] = ya;
      im[static_cast<std::size_t>(2 * a + 1)] = xa;
    }
    MetricComponents g;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        const auto ui = static_cast<std::size_t>(i), uj = static_cast<std::size_t>(j);
        Jet e = -(re[ui] * re[uj] + im[ui] * im[uj]);
        if (i == j) e += s;
        g[static_cast<std::size_t>(sym_index(i, j))] = e * inv_s2;
      }
    return g;
  };
  c.declared.einstein = 6.0;
  c.declared.harmonic_weyl = c.declared.parallel_weyl = true;
  c.description = "complex projective plane, Fubini-Study, affine chart";
  return c;
}

/// Product of round spheres of radii a and b in angle coordinates.
inline MetricChart sphere_product(double a, double b) {
  MetricChart c;
  c.name = (a == b) ? "s2xs2" : "s2xs2-unequal";
  c.coordinate_names = {"theta1", "phi1", "theta2", "phi2"};
  const double pi = detail::kPi;
  c.domain = Box{{0.01, -1e3, 0.01, -1e3}, {pi - 0.01, 1e3, pi - 0.01, 1e3}};
  c.sample_box = Box{{0.2, 0.0, 0.2, 0.0}, {pi - 0.2, 2 * pi, pi - 0.2, 2 * pi}};
  c.metric_fn = [a, b](const Coordinates& x) {
    const Jet s1 = sin(x[0]), s2 = sin(x[2]);
    const int k = x[0].order();
    return detail::diagonal_metric(Jet::constant(k, a * a), a * a * s1 * s1, Jet::constant(k, b * b), b * b * s2 * s2);
  };
  if (a == b) c.declared.einstein = 1.0 / (a * a);
  c.declared.harmonic_weyl = c.declared.parallel_weyl = true;
  std::ostringstream os;
  os << "S2(" << a << ") x S2(" << b << ")";
  c.description = os.str();
  return c;
}

inline MetricChart s2xs2() { return sphere_product(1.0, 1.0); }
inline MetricChart s2xs2_unequal() { return sphere_product(1.0, 2.0); }

/// Static metric f dtau^2 + dr^2 / f + r^2 (dtheta^2 + sin^2 theta dphi^2).
inline MetricChart static_spherical(std::string name, std::function<Jet(const Jet&)> f, double r_min_valid) {
  MetricChart c;
  c.name = std::move(name);
  c.coordinate_names = {"tau", "r", "theta", "phi"};
  const double pi = detail::kPi;
  c.domain = Box{{-1e3, r_min_valid, 0.01, -1e3}, {1e3, 1e3, pi - 0.01, 1e3}};
  c.sample_box = Box{{0.0, 3.0, 0.2, 0.0}, {1.0, 8.0, pi - 0.2, 2 * pi}};
  c.metric_fn = [f](const Coordinates& x) {
    const Jet fr = f(x[1]);
    const Jet r2 = x[1] * x[1];
    const Jet st = sin(x[2]);
    return detail::diagonal_metric(fr, recip(fr), r2, r2 * st * st);
  };
  return c;
}

inline constexpr double kSchwarzschildMass = 1.0;
inline constexpr double kCosmologicalConstant = 0.03;

/// Euclidean Schwarzschild, f = 1 - 2m/r.
inline MetricChart schwarzschild() {
  const double m = kSchwarzschildMass;
  MetricChart c = static_spherical(
      "schwarzschild", [m](const Jet& r) { return 1.0 - 2.0 * m * recip(r); }, 2.05 * m);
  c.declared.einstein = 0.0;
  c.declared.ricci_flat = c.declared.harmonic_weyl = true;
  c.description = "Euclidean Schwarzschild, m = 1";
  return c;
}

/// Riemannian Schwarzschild-de Sitter, f = 1 - 2m/r - L r^2 / 3.
inline MetricChart schwarzschild_de_sitter() {
  const double m = kSchwarzschildMass, l = kCosmologicalConstant;
  MetricChart c = static_spherical(
      "schwarzschild-de-sitter", [m, l](const Jet& r) { return 1.0 - 2.0 * m * recip(r) - (l / 3.0) * r * r; },
      2.1 * m);
  c.domain.hi[1] = 8.7;
  c.declared.einstein = l;
  c.declared.einstein_symbol = "Λ";
  c.declared.harmonic_weyl = true;
  c.description = "Riemannian Schwarzschild-de Sitter, m = 1, Lambda = 0.03";
  return c;
}

/// f = 1 - 2m / r^(3/2): not Einstein, Cotton tensor nonzero.
inline MetricChart perturbed_schwarzschild() {
  const double m = kSchwarzschildMass;
  MetricChart c = static_spherical(
      "perturbed-schwarzschild", [m](const Jet& r) { return 1.0 - 2.0 * m * pow(r, -1.5); }, 1.6 * m);
  c.declared.negative_control = true;
  c.description = "negative control, f = 1 - 2m/r^(3/2)";
  return c;
}

using Polynomial = std::map<Exponent, double>;

inline Polynomial default_conformal_phi() {
  return {{{1, 0, 0, 0}, 0.1},  {{2, 0, 0, 0}, 0.2},  {{1, 1, 0, 0}, -0.15},
          {{0, 0, 1, 1}, 0.1},  {{0, 1, 2, 0}, 0.08}, {{0, 0, 0, 3}, -0.05}};
}

inline Jet evaluate_polynomial(const Polynomial& poly, const Coordinates& x) {
  Jet acc(x[0].order());
  for (const auto& [e, coef] : poly) {
    Jet term = Jet::constant(x[0].order(), coef);
    for (std::size_t d = 0; d < 4; ++d)
      for (int k = 0; k < e[d]; ++k) term = term * x[d];
    acc += term;
  }
  return acc;
}

/// e^{2 phi} delta with polynomial phi.
inline MetricChart conformally_flat(Polynomial phi = default_conformal_phi()) {
  MetricChart c;
  c.name = "conformally-flat";
  c.coordinate_names = {"x1", "x2", "x3", "x4"};
  c.domain = detail::cube(-10.0, 10.0);
  c.sample_box = detail::cube(-0.5, 0.5);
  c.metric_fn = [phi](const Coordinates& x) { return detail::conformal_to_flat(exp(2.0 * evaluate_polynomial(phi, x))); };
  c.declared.conformally_flat = c.declared.harmonic_weyl = c.declared.parallel_weyl = true;
  c.description = "e^(2 phi) delta, polynomial phi";
  return c;
}

/// delta + eps P(x) with a fixed cubic symmetric P; generic enough that both
/// Weyl sectors have simple spectrum at typical points.
inline MetricChart generic_polynomial(double eps = 0.1) {
  MetricChart c;
  c.name = "generic-polynomial";
  c.coordinate_names = {"x1", "x2", "x3", "x4"};
  c.domain = detail::cube(-1.0, 1.0);
  c.sample_box = detail::cube(-0.5, 0.5);
  c.metric_fn = [eps](const Coordinates& x) {
    MetricComponents g;
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Jet p(x[0].order());
        for (int k = 0; k < 4; ++k) {
          p += std::sin(1.3 + 7 * i + 3 * j + 5 * k) * x[static_cast<std::size_t>(k)];
          for (int l = k; l < 4; ++l)
            p += std::sin(0.7 + 7 * i + 3 * j + 5 * k + 11 * l) * (x[static_cast<std::size_t>(k)] * x[static_cast<std::size_t>(l)]);
        }
        p += std::cos(2.0 + i + 4 * j) * (x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>((i + j + 1) % 4)]);
        Jet e = eps * p;
        if (i == j) e += 1.0;
        g[static_cast<std::size_t>(sym_index(i, j))] = e;
      }
    return g;
  };
  c.description = "delta + 0.1 * cubic polynomial, no special structure";
  return c;
}

/// The same geometry with metric c2 * g.
inline MetricChart scaled(const MetricChart& base, double c2) {
  if (!(c2 > 0)) throw std::invalid_argument("metric scale factor must be positive");
  MetricChart c = base;
  auto fn = base.metric_fn;
  c.metric_fn = [fn, c2](const Coordinates& x) {
    MetricComponents g = fn(x);
    for (Jet& e : g) e *= c2;
    return g;
  };
  if (c.declared.einstein) c.declared.einstein = *c.declared.einstein / c2;
  return c;
}

inline std::vector<MetricChart> catalog() {
  return {flat_r4(),        round_s4(),      hyperbolic_h4(),          cp2_fubini_study(),
          s2xs2(),          s2xs2_unequal(), schwarzschild(),          schwarzschild_de_sitter(),
          perturbed_schwarzschild(), conformally_flat(), generic_polynomial()};
}

inline std::vector<std::string> catalog_names() {
  std::vector<std::string> out;
  for (const auto& c : catalog()) out.push_back(c.name);
  return out;
}

inline MetricChart chart_by_name(const std::string& name) {
  for (auto& c : catalog())
    if (c.name == name) return c;
  std::string valid;
  for (const auto& n : catalog_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown manifold '" + name + "'; valid: " + valid);
}

namespace detail {

inline Exponent parse_exponent(const std::string& s) {
  Exponent e{};
  std::string t = s;
  std::replace(t.begin(), t.end(), ',', ' ');
  std::istringstream is(t);
  for (int& v : e)
    if (!(is >> v) || v < 0) throw std::invalid_argument("bad exponent tuple '" + s + "'");
  std::string rest;
  if (is >> rest) throw std::invalid_argument("bad exponent tuple '" + s + "'");
  return e;
}

}  // namespace detail

/// Conformal factor from text: a JSON object {"e1,e2,e3,e4": c, ...} or
/// key=value pairs "e1,e2,e3,e4=c" separated by ';' or newlines.
inline Polynomial parse_polynomial(const std::string& text) {
  Polynomial out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [k, v] : j.items()) out[detail::parse_exponent(k)] += v.get<double>();
    return out;
  }
  std::string t = text;
  std::replace(t.begin(), t.end(), '\n', ';');
  std::istringstream is(t);
  std::string item;
  while (std::getline(is, item, ';')) {
    if (item.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("expected exponent=coefficient, got '" + item + "'");
    out[detail::parse_exponent(item.substr(0, eq))] += std::stod(item.substr(eq + 1));
  }
  return out;
}

}  // namespace weylforge
