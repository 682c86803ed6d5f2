#pragma once

// Dense tensors over R^4 of rank 0..8 with scalar or jet entries.
//
// Storage is row-major: the first slot varies slowest. Frame-level identity
// code works with DenseTensor<double> and the einsum() kernel; chart-level
// code works with DenseTensor<Jet>.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "weylforge/jet.hpp"

namespace weylforge {

inline constexpr int kDim = 4;
inline constexpr int kMaxRank = 8;

enum class Variance : unsigned char { up, down };

class ShapeError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

inline std::size_t pow4(int r) { return std::size_t{1} << (2 * r); }

inline double zero_like(double) { return 0.0; }
inline Jet zero_like(const Jet& j) { return Jet(j.order()); }

template <class T>
class DenseTensor {
public:
  DenseTensor() : DenseTensor(0) {}

  explicit DenseTensor(int rank, const T& fill = T{})
      : rank_(check_rank(rank)),
        variance_(static_cast<std::size_t>(rank), Variance::down),
        data_(pow4(rank), fill) {}

  DenseTensor(std::vector<Variance> variance, const T& fill = T{})
      : rank_(check_rank(static_cast<int>(variance.size()))),
        variance_(std::move(variance)),
        data_(pow4(rank_), fill) {}

  int rank() const { return rank_; }
  std::size_t size() const { return data_.size(); }
  const std::vector<Variance>& variance() const { return variance_; }
  void set_variance(std::vector<Variance> v) {
    if (static_cast<int>(v.size()) != rank_) throw ShapeError("variance length must equal rank");
    variance_ = std::move(v);
  }

  std::span<T> data() { return data_; }
  std::span<const T> data() const { return data_; }

  T& operator[](std::size_t flat) { return data_[flat]; }
  const T& operator[](std::size_t flat) const { return data_[flat]; }

  template <class... I>
  T& operator()(I... idx) {
    return data_[offset(idx...)];
  }
  template <class... I>
  const T& operator()(I... idx) const {
    return data_[offset(idx...)];
  }

  T& at(std::span<const int> idx) { return data_[offset_of(idx)]; }
  const T& at(std::span<const int> idx) const { return data_[offset_of(idx)]; }

  std::size_t offset_of(std::span<const int> idx) const {
    if (static_cast<int>(idx.size()) != rank_) throw ShapeError("index count must equal rank");
    std::size_t o = 0;
    for (int i : idx) o = o * kDim + static_cast<std::size_t>(i);
    return o;
  }

  /// Multi-index of a flat offset.
  std::array<int, kMaxRank> unflatten(std::size_t flat) const {
    std::array<int, kMaxRank> idx{};
    for (int s = rank_ - 1; s >= 0; --s) {
      idx[static_cast<std::size_t>(s)] = static_cast<int>(flat % kDim);
      flat /= kDim;
    }
    return idx;
  }

  DenseTensor& operator+=(const DenseTensor& b) {
    require_same_shape(b);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += b.data_[i];
    return *this;
  }
  DenseTensor& operator-=(const DenseTensor& b) {
    require_same_shape(b);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= b.data_[i];
    return *this;
  }
  DenseTensor& operator*=(double s) {
    for (auto& v : data_) v *= s;
    return *this;
  }

  friend DenseTensor operator+(DenseTensor a, const DenseTensor& b) { return a += b; }
  friend DenseTensor operator-(DenseTensor a, const DenseTensor& b) { return a -= b; }
  friend DenseTensor operator*(DenseTensor a, double s) { return a *= s; }
  friend DenseTensor operator*(double s, DenseTensor a) { return a *= s; }
  friend DenseTensor operator-(DenseTensor a) { return a *= -1.0; }

  void require_same_shape(const DenseTensor& b) const {
    if (b.rank_ != rank_) throw ShapeError("rank mismatch: " + std::to_string(rank_) + " vs " + std::to_string(b.rank_));
  }

private:
  static int check_rank(int r) {
    if (r < 0 || r > kMaxRank) throw ShapeError("tensor rank out of range [0, 8]: " + std::to_string(r));
    return r;
  }

  template <class... I>
  std::size_t offset(I... idx) const {
    if (sizeof...(I) != static_cast<std::size_t>(rank_)) throw ShapeError("index count must equal rank");
    std::size_t o = 0;
    ((o = o * kDim + static_cast<std::size_t>(idx)), ...);
    return o;
  }

  int rank_;
  std::vector<Variance> variance_;
  std::vector<T> data_;
};

using Tensor = DenseTensor<double>;
using JetTensor = DenseTensor<Jet>;

// ---------------------------------------------------------------------------
// Basic constructors

inline Tensor kronecker() {
  Tensor d(2);
  for (int i = 0; i < kDim; ++i) d(i, i) = 1.0;
  return d;
}

inline Tensor scalar_tensor(double v) {
  Tensor t(0);
  t[0] = v;
  return t;
}

/// Levi-Civita symbol with eps_{0123} = +1.
inline const Tensor& levi_civita() {
  static const Tensor eps = [] {
    Tensor e(4);
    std::array<int, 4> p{0, 1, 2, 3};
    do {
      int inv = 0;
      for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b)
          if (p[static_cast<std::size_t>(a)] > p[static_cast<std::size_t>(b)]) ++inv;
      e(p[0], p[1], p[2], p[3]) = (inv % 2 == 0) ? 1.0 : -1.0;
    } while (std::next_permutation(p.begin(), p.end()));
    return e;
  }();
  return eps;
}

// ---------------------------------------------------------------------------
// Generic multilinear operations

template <class T>
T norm_sq(const DenseTensor<T>& t) {
  auto d = t.data();
  T acc = zero_like(d[0]);
  for (const auto& v : d) acc += v * v;
  return acc;
}

inline double norm(const Tensor& t) { return std::sqrt(norm_sq(t)); }

/// Full contraction of two tensors of equal rank.
inline double dot(const Tensor& a, const Tensor& b) {
  if (a.rank() != b.rank()) throw ShapeError("dot needs equal ranks");
  long double acc = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(acc);
}

inline double max_abs(const Tensor& t) {
  double m = 0.0;
  for (double v : t.data()) m = std::max(m, std::abs(v));
  return m;
}

/// Outer product a (x) b; slots of a come first.
template <class T>
DenseTensor<T> outer(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  std::vector<Variance> var = a.variance();
  var.insert(var.end(), b.variance().begin(), b.variance().end());
  DenseTensor<T> r(var, zero_like(a[0] * b[0]));
  const std::size_t nb = b.size();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < nb; ++j) r[i * nb + j] = a[i] * b[j];
  return r;
}

/// Slot k of the result is slot perm[k] of the input.
template <class T>
DenseTensor<T> permute(const DenseTensor<T>& t, std::span<const int> perm) {
  const int r = t.rank();
  if (static_cast<int>(perm.size()) != r) throw ShapeError("permutation length must equal rank");
  std::vector<bool> seen(static_cast<std::size_t>(r), false);
  for (int p : perm) {
    if (p < 0 || p >= r || seen[static_cast<std::size_t>(p)]) throw ShapeError("not a permutation");
    seen[static_cast<std::size_t>(p)] = true;
  }
  std::vector<Variance> var(static_cast<std::size_t>(r));
  for (int k = 0; k < r; ++k) var[static_cast<std::size_t>(k)] = t.variance()[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])];
  DenseTensor<T> out(var, zero_like(t[0]));
  std::array<int, kMaxRank> src{};
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = out.unflatten(f);
    for (int k = 0; k < r; ++k) src[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = idx[static_cast<std::size_t>(k)];
    out[f] = t.at(std::span<const int>(src.data(), static_cast<std::size_t>(r)));
  }
  return out;
}

template <class T>
DenseTensor<T> permute(const DenseTensor<T>& t, std::initializer_list<int> perm) {
  std::vector<int> p(perm);
  return permute(t, std::span<const int>(p));
}

inline std::vector<int> swap_permutation(int rank, int a, int b) {
  std::vector<int> p(static_cast<std::size_t>(rank));
  for (int k = 0; k < rank; ++k) p[static_cast<std::size_t>(k)] = k;
  std::swap(p[static_cast<std::size_t>(a)], p[static_cast<std::size_t>(b)]);
  return p;
}

template <class T>
DenseTensor<T> symmetrize(const DenseTensor<T>& t, int a, int b) {
  auto p = swap_permutation(t.rank(), a, b);
  auto s = t + permute(t, std::span<const int>(p));
  s *= 0.5;
  return s;
}

template <class T>
DenseTensor<T> antisymmetrize(const DenseTensor<T>& t, int a, int b) {
  auto p = swap_permutation(t.rank(), a, b);
  auto s = t - permute(t, std::span<const int>(p));
  s *= 0.5;
  return s;
}

/// Trace over slots a and b. An (up, down) pair contracts directly; a
/// (down, down) or (up, up) pair needs the inverse metric (resp. the metric).
template <class T>
DenseTensor<T> contract(const DenseTensor<T>& t, int a, int b,
                        const DenseTensor<T>* metric_for_pair = nullptr) {
  const int r = t.rank();
  if (a == b || a < 0 || b < 0 || a >= r || b >= r) throw ShapeError("invalid contraction slots");
  if (a > b) std::swap(a, b);
  const Variance va = t.variance()[static_cast<std::size_t>(a)];
  const Variance vb = t.variance()[static_cast<std::size_t>(b)];
  const bool mixed = va != vb;
  if (!mixed && metric_for_pair == nullptr)
    throw ShapeError("contraction of two like-variance slots needs a metric argument");
  if (metric_for_pair && metric_for_pair->rank() != 2) throw ShapeError("metric argument must have rank 2");

  std::vector<Variance> var;
  for (int k = 0; k < r; ++k)
    if (k != a && k != b) var.push_back(t.variance()[static_cast<std::size_t>(k)]);
  DenseTensor<T> out(var, zero_like(t[0]));
  std::array<int, kMaxRank> full{};
  for (std::size_t f = 0; f < out.size(); ++f) {
    auto idx = out.unflatten(f);
    int q = 0;
    for (int k = 0; k < r; ++k)
      if (k != a && k != b) full[static_cast<std::size_t>(k)] = idx[static_cast<std::size_t>(q++)];
    T acc = zero_like(t[0]);
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) {
        if (mixed && i != j) continue;
        full[static_cast<std::size_t>(a)] = i;
        full[static_cast<std::size_t>(b)] = j;
        const T& v = t.at(std::span<const int>(full.data(), static_cast<std::size_t>(r)));
        if (mixed)
          acc += v;
        else
          acc += (*metric_for_pair)(i, j) * v;
      }
    }
    out[f] = acc;
  }
  return out;
}

/// (a o b)_{ijkl} = a_ik b_jl - a_il b_jk + b_ik a_jl - b_il a_jk.
template <class T>
DenseTensor<T> kulkarni_nomizu(const DenseTensor<T>& a, const DenseTensor<T>& b) {
  if (a.rank() != 2 || b.rank() != 2) throw ShapeError("Kulkarni-Nomizu product needs rank-2 arguments");
  DenseTensor<T> r(4, zero_like(a[0] * b[0]));
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l)
          r(i, j, k, l) = a(i, k) * b(j, l) - a(i, l) * b(j, k) + b(i, k) * a(j, l) - b(i, l) * a(j, k);
  return r;
}

/// Largest violation of R_ijkl = -R_jikl = -R_ijlk = R_klij and the first
/// Bianchi identity, on scalar entries.
inline double riemann_symmetry_violation(const Tensor& r) {
  if (r.rank() != 4) throw ShapeError("Riemann symmetry check needs rank 4");
  double m = 0.0;
  for (int i = 0; i < kDim; ++i)
    for (int j = 0; j < kDim; ++j)
      for (int k = 0; k < kDim; ++k)
        for (int l = 0; l < kDim; ++l) {
          const double v = r(i, j, k, l);
          m = std::max({m, std::abs(v + r(j, i, k, l)), std::abs(v + r(i, j, l, k)), std::abs(v - r(k, l, i, j)),
                        std::abs(v + r(i, k, l, j) + r(i, l, j, k))});
        }
  return m;
}

// ---------------------------------------------------------------------------
// einsum over scalar tensors.
//
// Spec strings use one letter per slot, operands separated by commas, and an
// explicit output after "->" (empty for a full contraction). Every letter
// runs over 0..3; repeated letters are summed unless they appear in the
// output. The kernel is a plain odometer over all distinct letters, which is
// adequate for the <= 9 letters used by the identity checks.

namespace detail {

struct EinsumPlan {
  int letters = 0;
  std::vector<std::vector<std::size_t>> stride;  // [operand][letter]
  std::vector<std::size_t> out_stride;            // [letter]
  int out_rank = 0;
};

inline EinsumPlan plan_einsum(std::string_view spec, std::span<const int> ranks) {
  const auto arrow = spec.find("->");
  if (arrow == std::string_view::npos) throw ShapeError("einsum spec needs '->'");
  std::string_view lhs = spec.substr(0, arrow);
  std::string_view rhs = spec.substr(arrow + 2);

  std::array<int, 128> id;
  id.fill(-1);
  EinsumPlan plan;
  auto letter = [&](char c) {
    if (c < 'A' || c > 'z') throw ShapeError(std::string("bad einsum letter: ") + c);
    if (id[static_cast<std::size_t>(c)] < 0) id[static_cast<std::size_t>(c)] = plan.letters++;
    return id[static_cast<std::size_t>(c)];
  };

  std::vector<std::string_view> ops;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= lhs.size(); ++i) {
    if (i == lhs.size() || lhs[i] == ',') {
      ops.push_back(lhs.substr(start, i - start));
      start = i + 1;
    }
  }
  if (ops.size() != ranks.size()) throw ShapeError("einsum operand count mismatch");
  for (char c : rhs) letter(c);
  for (auto op : ops)
    for (char c : op) letter(c);
  if (plan.letters > 12) throw ShapeError("einsum: too many distinct letters");

  plan.stride.assign(ops.size(), std::vector<std::size_t>(static_cast<std::size_t>(plan.letters), 0));
  for (std::size_t o = 0; o < ops.size(); ++o) {
    if (static_cast<int>(ops[o].size()) != ranks[o])
      throw ShapeError("einsum: operand " + std::to_string(o) + " has rank " + std::to_string(ranks[o]) +
                       " but spec names " + std::to_string(ops[o].size()) + " slots");
    std::size_t s = 1;
    for (std::size_t k = ops[o].size(); k-- > 0;) {
      plan.stride[o][static_cast<std::size_t>(id[static_cast<std::size_t>(ops[o][k])])] += s;
      s *= kDim;
    }
  }
  plan.out_rank = static_cast<int>(rhs.size());
  plan.out_stride.assign(static_cast<std::size_t>(plan.letters), 0);
  std::size_t s = 1;
  for (std::size_t k = rhs.size(); k-- > 0;) {
    auto& slot = plan.out_stride[static_cast<std::size_t>(id[static_cast<std::size_t>(rhs[k])])];
    if (slot != 0) throw ShapeError("einsum: repeated output letter");
    slot = s;
    s *= kDim;
  }
  return plan;
}

}  // namespace detail

inline Tensor einsum_span(std::string_view spec, std::span<const Tensor* const> operands) {
  std::vector<int> ranks;
  for (const Tensor* t : operands) ranks.push_back(t->rank());
  const auto plan = detail::plan_einsum(spec, ranks);
  Tensor out(plan.out_rank);

  const std::size_t nops = operands.size();
  const int L = plan.letters;
  std::vector<const double*> base(nops);
  for (std::size_t o = 0; o < nops; ++o) base[o] = operands[o]->data().data();
  // Extended-precision accumulation keeps cancelling contractions near unit roundoff.
  std::vector<long double> acc(out.size(), 0.0L);
  long double* outp = acc.data();

  // Odometer over letters 0..L-2; the innermost letter L-1 runs in a tight loop.
  std::array<int, 12> ctr{};
  std::vector<std::size_t> off(nops, 0);
  std::size_t ooff = 0;
  const std::size_t inner = static_cast<std::size_t>(L - 1);
  std::vector<std::size_t> inner_stride(nops);
  for (std::size_t o = 0; o < nops; ++o) inner_stride[o] = plan.stride[o][inner];
  const std::size_t inner_out = plan.out_stride[inner];

  if (L == 0) {
    double p = 1.0;
    for (std::size_t o = 0; o < nops; ++o) p *= base[o][0];
    out[0] = p;
    return out;
  }

  while (true) {
    for (int v = 0; v < kDim; ++v) {
      double p = 1.0;
      for (std::size_t o = 0; o < nops; ++o) p *= base[o][off[o] + static_cast<std::size_t>(v) * inner_stride[o]];
      outp[ooff + static_cast<std::size_t>(v) * inner_out] += p;
    }
    int k = L - 2;
    for (; k >= 0; --k) {
      const auto kk = static_cast<std::size_t>(k);
      if (++ctr[kk] < kDim) {
        for (std::size_t o = 0; o < nops; ++o) off[o] += plan.stride[o][kk];
        ooff += plan.out_stride[kk];
        break;
      }
      ctr[kk] = 0;
      for (std::size_t o = 0; o < nops; ++o) off[o] -= (kDim - 1) * plan.stride[o][kk];
      ooff -= (kDim - 1) * plan.out_stride[kk];
    }
    if (k < 0) break;
  }
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = static_cast<double>(acc[i]);
  return out;
}

template <class... Ts>
Tensor einsum(std::string_view spec, const Ts&... operands) {
  const std::array<const Tensor*, sizeof...(Ts)> ops{&operands...};
  return einsum_span(spec, std::span<const Tensor* const>(ops.data(), ops.size()));
}

/// Full contraction returning a plain number.
template <class... Ts>
double einsum_scalar(std::string_view spec, const Ts&... operands) {
  return einsum(spec, operands...)[0];
}

}  // namespace weylforge
