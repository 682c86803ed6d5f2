#pragma once

// Truncated Taylor polynomials in four variables.
//
// A Jet of order K stores the coefficients c_a of
//   f(p + t) = sum_{|a| <= K} c_a t^a
// in a dense, graded-lexicographic layout. The layout of the monomials of
// degree <= q is a prefix of the layout for any order K >= q, so truncation
// is a resize.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace weylforge {

inline constexpr int kJetVars = 4;
inline constexpr int kMaxJetOrder = 8;

using Exponent = std::array<int, kJetVars>;

class JetOrderMismatch : public std::invalid_argument {
public:
  JetOrderMismatch(int a, int b)
      : std::invalid_argument("jet order mismatch: " + std::to_string(a) +
                              " vs " + std::to_string(b)) {}
};

namespace detail {

constexpr std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::size_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::size_t>(n - k + i) / i;
  return r;
}

/// Number of monomials of total degree <= order in four variables.
constexpr std::size_t jet_size(int order) { return binomial(order + kJetVars, kJetVars); }

struct MonomialTables {
  std::vector<Exponent> monomials;       // graded, then lexicographic (descending)
  std::vector<int> degree;               // total degree per monomial
  std::vector<int> lookup;               // (e0,e1,e2,e3) base 9 -> index, -1 if none
  // Product pairs sorted by degree sum; the prefix [0, pair_end[q]) is the
  // multiplication table for order q.
  std::vector<std::uint16_t> pair_a, pair_b, pair_c;
  std::array<std::size_t, kMaxJetOrder + 1> pair_end{};
  // partial[d][i]: index of x^{a - e_d} for monomial i (or -1), factor a_d.
  std::array<std::vector<int>, kJetVars> partial_target;
  std::array<std::vector<int>, kJetVars> partial_factor;

  static int key(const Exponent& e) { return ((e[0] * 9 + e[1]) * 9 + e[2]) * 9 + e[3]; }

  MonomialTables() {
    for (int deg = 0; deg <= kMaxJetOrder; ++deg) {
      for (int a = deg; a >= 0; --a)
        for (int b = deg - a; b >= 0; --b)
          for (int c = deg - a - b; c >= 0; --c) {
            monomials.push_back({a, b, c, deg - a - b - c});
            degree.push_back(deg);
          }
    }
    lookup.assign(9 * 9 * 9 * 9, -1);
    for (std::size_t i = 0; i < monomials.size(); ++i) lookup[key(monomials[i])] = static_cast<int>(i);

    const std::size_t n = monomials.size();
    for (int s = 0; s <= kMaxJetOrder; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        if (degree[i] > s) break;
        for (std::size_t j = 0; j < n; ++j) {
          if (degree[i] + degree[j] > s) break;
          if (degree[i] + degree[j] != s) continue;
          Exponent e{};
          for (int v = 0; v < kJetVars; ++v) e[v] = monomials[i][v] + monomials[j][v];
          pair_a.push_back(static_cast<std::uint16_t>(i));
          pair_b.push_back(static_cast<std::uint16_t>(j));
          pair_c.push_back(static_cast<std::uint16_t>(lookup[key(e)]));
        }
      }
      pair_end[s] = pair_a.size();
    }

    for (int d = 0; d < kJetVars; ++d) {
      partial_target[d].assign(n, -1);
      partial_factor[d].assign(n, 0);
      for (std::size_t i = 0; i < n; ++i) {
        Exponent e = monomials[i];
        if (e[d] == 0) continue;
        partial_factor[d][i] = e[d];
        e[d] -= 1;
        partial_target[d][i] = lookup[key(e)];
      }
    }
  }
};

inline const MonomialTables& tables() {
  static const MonomialTables t;
  return t;
}

}  // namespace detail

class Jet {
public:
  Jet() : order_(0), c_(1, 0.0) {}

  explicit Jet(int order) : order_(check_order(order)), c_(detail::jet_size(order), 0.0) {}

  Jet(int order, std::vector<double> coeffs) : order_(check_order(order)), c_(std::move(coeffs)) {
    if (c_.size() != detail::jet_size(order_))
      throw std::invalid_argument("jet coefficient table has wrong size");
  }

  static Jet constant(int order, double value) {
    Jet j(order);
    j.c_[0] = value;
    return j;
  }

  /// The coordinate function x_dir expanded about a point where it equals `value`.
  static Jet variable(int order, int dir, double value) {
    Jet j = constant(order, value);
    if (order >= 1) j.c_[static_cast<std::size_t>(1 + dir)] = 1.0;
    return j;
  }

  int order() const { return order_; }
  std::size_t size() const { return c_.size(); }
  double value() const { return c_[0]; }
  std::span<const double> coeffs() const { return c_; }
  std::span<double> coeffs() { return c_; }

  static const std::vector<Exponent>& monomials() { return detail::tables().monomials; }

  static int index_of(const Exponent& e) {
    for (int v : e)
      if (v < 0 || v > kMaxJetOrder) return -1;
    return detail::tables().lookup[detail::MonomialTables::key(e)];
  }

  /// Taylor coefficient of t^e (zero above the truncation order).
  double coeff(const Exponent& e) const {
    const int i = index_of(e);
    if (i < 0 || static_cast<std::size_t>(i) >= c_.size()) return 0.0;
    return c_[static_cast<std::size_t>(i)];
  }

  void set_coeff(const Exponent& e, double v) {
    const int i = index_of(e);
    if (i < 0 || static_cast<std::size_t>(i) >= c_.size())
      throw std::out_of_range("exponent beyond jet order");
    c_[static_cast<std::size_t>(i)] = v;
  }

  /// Partial derivative d^e f at the expansion point, i.e. e! * c_e.
  double derivative(const Exponent& e) const {
    double f = 1.0;
    for (int v : e)
      for (int k = 2; k <= v; ++k) f *= k;
    return f * coeff(e);
  }

  Jet truncated(int order) const {
    if (order > order_) throw std::invalid_argument("cannot raise jet order by truncation");
    Jet r(order);
    std::copy_n(c_.begin(), r.c_.size(), r.c_.begin());
    return r;
  }

  Jet& operator+=(const Jet& b) {
    require_same(b);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] += b.c_[i];
    return *this;
  }
  Jet& operator-=(const Jet& b) {
    require_same(b);
    for (std::size_t i = 0; i < c_.size(); ++i) c_[i] -= b.c_[i];
    return *this;
  }
  Jet& operator*=(double s) {
    for (double& v : c_) v *= s;
    return *this;
  }
  Jet& operator+=(double s) {
    c_[0] += s;
    return *this;
  }

  /// this += a * b, truncated at this->order(); all three orders must agree.
  void add_product(const Jet& a, const Jet& b) {
    require_same(a);
    require_same(b);
    const auto& t = detail::tables();
    const std::size_t end = t.pair_end[static_cast<std::size_t>(order_)];
    const double* pa = a.c_.data();
    const double* pb = b.c_.data();
    double* pc = c_.data();
    if (order_ == 0) {
      pc[0] += pa[0] * pb[0];
      return;
    }
    for (std::size_t k = 0; k < end; ++k) pc[t.pair_c[k]] += pa[t.pair_a[k]] * pb[t.pair_b[k]];
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator-(Jet a) { return a *= -1.0; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator+(Jet a, double s) { return a += s; }
  friend Jet operator+(double s, Jet a) { return a += s; }
  friend Jet operator-(Jet a, double s) { return a += -s; }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(a.order_);
    r.add_product(a, b);
    return r;
  }
  friend Jet operator/(Jet a, double s) { return a *= 1.0 / s; }

  friend bool operator==(const Jet& a, const Jet& b) { return a.order_ == b.order_ && a.c_ == b.c_; }

private:
  static int check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
      throw std::invalid_argument("jet order out of range [0, 8]: " + std::to_string(order));
    return order;
  }
  void require_same(const Jet& b) const {
    if (b.order_ != order_) throw JetOrderMismatch(order_, b.order_);
  }

  int order_;
  std::vector<double> c_;
};

/// Formal partial derivative in direction `dir` (0-based); the result has order - 1.
inline Jet partial(const Jet& a, int dir) {
  if (a.order() < 1) throw std::invalid_argument("partial derivative of an order-0 jet");
  if (dir < 0 || dir >= kJetVars) throw std::out_of_range("jet direction out of range");
  const auto& t = detail::tables();
  Jet r(a.order() - 1);
  auto src = a.coeffs();
  auto dst = r.coeffs();
  const auto& target = t.partial_target[static_cast<std::size_t>(dir)];
  const auto& factor = t.partial_factor[static_cast<std::size_t>(dir)];
  for (std::size_t i = 0; i < src.size(); ++i) {
    const int k = target[i];
    if (k >= 0) dst[static_cast<std::size_t>(k)] += factor[i] * src[i];
  }
  return r;
}

namespace detail {

// f(a0 + h) = sum_n d[n] h^n with h = a - a0, evaluated by Horner's rule.
inline Jet compose(const Jet& a, const std::vector<double>& d) {
  Jet h = a;
  h.coeffs()[0] = 0.0;
  Jet r = Jet::constant(a.order(), d[static_cast<std::size_t>(a.order())]);
  for (int n = a.order() - 1; n >= 0; --n) {
    r = r * h;
    r.coeffs()[0] += d[static_cast<std::size_t>(n)];
  }
  return r;
}

inline std::string describe(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace detail

inline Jet exp(const Jet& a) {
  std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
  double e = std::exp(a.value());
  for (std::size_t n = 0; n < d.size(); ++n) {
    d[n] = e;
    e /= static_cast<double>(n + 1);
  }
  return detail::compose(a, d);
}

inline Jet sin(const Jet& a) {
  std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[4] = {s, c, -s, -c};
  double fact = 1.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    d[n] = cycle[n % 4] / fact;
  }
  return detail::compose(a, d);
}

inline Jet cos(const Jet& a) {
  std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
  const double s = std::sin(a.value()), c = std::cos(a.value());
  const double cycle[4] = {c, -s, -c, s};
  double fact = 1.0;
  for (std::size_t n = 0; n < d.size(); ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    d[n] = cycle[n % 4] / fact;
  }
  return detail::compose(a, d);
}

/// a^p. Non-integer exponents need a strictly positive constant term; integer
/// exponents only need it to be nonzero when p < 0.
inline Jet pow(const Jet& a, double p) {
  const double a0 = a.value();
  const bool integral = std::floor(p) == p;
  if ((!integral && !(a0 > 0.0)) || (integral && p < 0 && a0 == 0.0))
    throw std::domain_error("jet pow(" + detail::describe(p) + ") of constant term " + detail::describe(a0));
  std::vector<double> d(static_cast<std::size_t>(a.order()) + 1);
  d[0] = std::pow(a0, p);
  for (std::size_t n = 1; n < d.size(); ++n)
    d[n] = (a0 == 0.0) ? 0.0 : d[n - 1] * (p - static_cast<double>(n) + 1.0) / (static_cast<double>(n) * a0);
  if (a0 == 0.0) {
    // Nonnegative integer power of a jet without constant term.
    Jet r = Jet::constant(a.order(), 1.0);
    for (int k = 0; k < static_cast<int>(p); ++k) r = r * a;
    return r;
  }
  return detail::compose(a, d);
}

inline Jet sqrt(const Jet& a) {
  if (!(a.value() > 0.0)) throw std::domain_error("jet sqrt of constant term " + detail::describe(a.value()));
  return pow(a, 0.5);
}

inline Jet recip(const Jet& a) {
  if (a.value() == 0.0) throw std::domain_error("jet reciprocal of constant term 0");
  return pow(a, -1.0);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }

inline double value_of(double x) { return x; }
inline double value_of(const Jet& x) { return x.value(); }

}  // namespace weylforge
