#pragma once

// Pointwise curvature from a metric chart.
//
// Everything is computed in coordinates with jets (Taylor data at the
// point), then transformed to an orthonormal frame at the point. Covariant
// derivatives append their slot last: T_{...,pq} = nabla_q nabla_p T.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "weylforge/chart.hpp"
#include "weylforge/curvature_algebra.hpp"
#include "weylforge/jet.hpp"
#include "weylforge/tensor.hpp"

namespace weylforge {

class CapacityError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Metric jet order needed for nabla^depth W and for Laplacians of |nabla^k W|^2, k <= laplacian_level.
inline int required_jet_order(int depth, int laplacian_level = -1) {
  int k = std::max({2, depth + 2, laplacian_level + 2});
  if (laplacian_level >= 0) k = std::max(k, laplacian_level + 4);
  return k;
}

struct CurvatureRequest {
  int depth = 2;
  int laplacian_level = -1;
  int jet_order = 0;  // 0 selects required_jet_order
  std::optional<Tensor> frame_rotation;  // SO(4) applied after the Cholesky frame
};

struct CurvaturePoint {
  Point point{};
  int jet_order = 0;
  int depth = 0;
  int orientation = 1;

  Tensor g_coord;  // metric in coordinates
  Tensor frame;    // row a holds the coordinate components of e_a
  Tensor g;        // metric in the frame

  Tensor riem, ric, weyl, w_plus, w_minus;
  double scalar = 0.0;

  // Frame components; nabla_w[k] is nabla^k W of rank 4 + k.
  std::vector<Tensor> nabla_w;
  std::optional<Tensor> d_scalar, nabla_ric, nabla2_ric, nabla_riem, cotton;

  // lap_norm_sq[k] = Laplacian of |nabla^k W|^2; lap_sector_norm_sq[k][s] per sector.
  std::vector<double> lap_norm_sq;
  std::vector<std::array<double, 2>> lap_sector_norm_sq;

  // nabla Delta nabla^(k-1) W for k up to the Laplacian level, taken from
  // the jets so that nabla^(k+2) W is never formed.
  std::vector<Tensor> grad_laplacian_w;

  const Tensor& dw(int k) const {
    if (k < 0 || k >= static_cast<int>(nabla_w.size()))
      throw CapacityError("nabla^" + std::to_string(k) + " W not computed (depth " + std::to_string(depth) + ")");
    return nabla_w[static_cast<std::size_t>(k)];
  }
  Tensor dw_sector(int k, Sector s) const { return project_sector(dw(k), s, orientation); }
  double laplacian_norm_sq(int k) const {
    if (k < 0 || k >= static_cast<int>(lap_norm_sq.size()))
      throw CapacityError("Laplacian of |nabla^" + std::to_string(k) + " W|^2 not computed");
    return lap_norm_sq[static_cast<std::size_t>(k)];
  }
  double laplacian_sector_norm_sq(int k, Sector s) const {
    laplacian_norm_sq(k);
    return lap_sector_norm_sq[static_cast<std::size_t>(k)][s == Sector::plus ? 0 : 1];
  }
  /// nabla Delta nabla^(k-1) W, rank 4 + k, k >= 1.
  Tensor grad_laplacian(int k) const {
    if (k >= 1 && k < static_cast<int>(grad_laplacian_w.size()) && grad_laplacian_w[static_cast<std::size_t>(k)].rank() == 4 + k)
      return grad_laplacian_w[static_cast<std::size_t>(k)];
    const Tensor& d = dw(k + 2);
    std::string in = "abcd", out = "abcd";
    for (int h = 0; h < k - 1; ++h) in += static_cast<char>('e' + h);
    out = in + 'z';
    in += "yyz";
    return einsum(in + "->" + out, d);
  }
};

namespace detail {

inline JetTensor metric_tensor(const MetricComponents& m) {
  JetTensor g(2, Jet(m[0].order()));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g(i, j) = m[static_cast<std::size_t>(sym_index(i, j))];
  return g;
}

inline JetTensor truncated(const JetTensor& t, int order) {
  JetTensor out(t.variance(), Jet(order));
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].truncated(order);
  return out;
}

inline Tensor values(const JetTensor& t) {
  Tensor out(t.variance());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = t[i].value();
  return out;
}

/// Lower Cholesky factor L (g = L L^T) and F = L^{-1}, as jets.
struct JetCholesky {
  JetTensor l, f;
  Jet sqrt_det;
};

inline JetCholesky jet_cholesky(const JetTensor& g) {
  const int k = g[0].order();
  JetCholesky c{JetTensor(2, Jet(k)), JetTensor(2, Jet(k)), Jet::constant(k, 1.0)};
  std::array<Jet, 4> inv_diag;
  for (int j = 0; j < 4; ++j) {
    Jet s = g(j, j);
    for (int m = 0; m < j; ++m) s -= c.l(j, m) * c.l(j, m);
    if (!(s.value() > 0.0))
      throw std::domain_error("metric is not positive definite (Cholesky pivot " + std::to_string(s.value()) + ")");
    c.l(j, j) = sqrt(s);
    inv_diag[static_cast<std::size_t>(j)] = recip(c.l(j, j));
    c.sqrt_det = c.sqrt_det * c.l(j, j);
    for (int i = j + 1; i < 4; ++i) {
      Jet t = g(i, j);
      for (int m = 0; m < j; ++m) t -= c.l(i, m) * c.l(j, m);
      c.l(i, j) = t * inv_diag[static_cast<std::size_t>(j)];
    }
  }
  for (int j = 0; j < 4; ++j) {
    c.f(j, j) = inv_diag[static_cast<std::size_t>(j)];
    for (int i = j + 1; i < 4; ++i) {
      Jet t(k);
      for (int m = j; m < i; ++m) t.add_product(c.l(i, m), c.f(m, j));
      c.f(i, j) = -(t * inv_diag[static_cast<std::size_t>(i)]);
    }
  }
  return c;
}

/// nabla of a covariant jet tensor; gamma(m, i, j) = Gamma^m_ij with order >= t.order - 1.
inline JetTensor covariant_derivative(const JetTensor& t, const JetTensor& gamma) {
  const int q = t[0].order();
  if (q < 1) throw CapacityError("covariant derivative of an order-0 jet field");
  const int r = t.rank();
  const JetTensor tt = truncated(t, q - 1);
  JetTensor neg_gamma = truncated(gamma, q - 1);
  neg_gamma *= -1.0;
  JetTensor out(r + 1, Jet(q - 1));
  std::array<int, kMaxRank> idx{}, src{};
  for (std::size_t f = 0; f < out.size(); ++f) {
    idx = out.unflatten(f);
    const int p = idx[static_cast<std::size_t>(r)];
    const std::size_t base = f / kDim;
    Jet acc = partial(t[base], p);
    for (int s = 0; s < r; ++s) {
      src = idx;
      const int a = idx[static_cast<std::size_t>(s)];
      for (int m = 0; m < kDim; ++m) {
        src[static_cast<std::size_t>(s)] = m;
        acc.add_product(neg_gamma(m, p, a), tt.at(std::span<const int>(src.data(), static_cast<std::size_t>(r))));
      }
    }
    out[f] = std::move(acc);
  }
  return out;
}

/// Trace of the last two slots with g^pq.
inline JetTensor trace_last_pair(const JetTensor& t, const JetTensor& ginv) {
  const int q = t[0].order();
  const JetTensor gi = truncated(ginv, q);
  JetTensor out(t.rank() - 2, Jet(q));
  for (std::size_t f = 0; f < out.size(); ++f) {
    Jet acc(q);
    for (std::size_t pq = 0; pq < 16; ++pq) acc.add_product(gi[pq], t[f * 16 + pq]);
    out[f] = std::move(acc);
  }
  return out;
}

/// Apply the matrix f (row a = e_a) to every slot: out_{a b ...} = f_ai f_bj ... t_{ij...}.
template <class T>
DenseTensor<T> to_frame(const DenseTensor<T>& t, const DenseTensor<T>& f) {
  DenseTensor<T> cur = t;
  const int r = t.rank();
  for (int s = 0; s < r; ++s) {
    DenseTensor<T> next(r, zero_like(t[0]));
    const std::size_t stride = pow4(r - 1 - s);
    for (std::size_t o = 0; o < next.size(); ++o) {
      const int a = static_cast<int>((o / stride) % kDim);
      const std::size_t base = o - static_cast<std::size_t>(a) * stride;
      T acc = zero_like(t[0]);
      for (int i = 0; i < kDim; ++i) {
        if constexpr (std::is_same_v<T, Jet>)
          acc.add_product(f(a, i), cur[base + static_cast<std::size_t>(i) * stride]);
        else
          acc += f(a, i) * cur[base + static_cast<std::size_t>(i) * stride];
      }
      next[o] = std::move(acc);
    }
    cur = std::move(next);
  }
  return cur;
}

struct JetGeometry {
  int order = 0;
  JetTensor g, ginv, frame;  // order K; frame = L^{-1}
  Jet sqrt_det;
  JetTensor gamma;           // Gamma^m_ij, order K - 1
};

inline JetGeometry jet_geometry(const MetricChart& chart, const Point& p, int order) {
  JetGeometry geo;
  geo.order = order;
  geo.g = metric_tensor(chart.metric_jets(p, order));
  const JetCholesky ch = jet_cholesky(geo.g);
  geo.frame = ch.f;
  geo.sqrt_det = ch.sqrt_det;
  geo.ginv = JetTensor(2, Jet(order));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      Jet acc(order);
      for (int a = 0; a < 4; ++a) acc.add_product(ch.f(a, i), ch.f(a, j));
      geo.ginv(i, j) = acc;
    }
  if (order < 1) return geo;
  std::array<JetTensor, 4> dg;
  for (int k = 0; k < 4; ++k) {
    dg[static_cast<std::size_t>(k)] = JetTensor(2, Jet(order - 1));
    for (std::size_t e = 0; e < 16; ++e) dg[static_cast<std::size_t>(k)][e] = partial(geo.g[e], k);
  }
  const JetTensor ginv_t = truncated(geo.ginv, order - 1);
  geo.gamma = JetTensor(3, Jet(order - 1));
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = i; j < 4; ++j) {
        Jet acc(order - 1);
        for (int l = 0; l < 4; ++l) {
          Jet first = dg[static_cast<std::size_t>(i)](j, l) + dg[static_cast<std::size_t>(j)](i, l) -
                      dg[static_cast<std::size_t>(l)](i, j);
          acc.add_product(ginv_t(m, l), first);
        }
        acc *= 0.5;
        geo.gamma(m, i, j) = acc;
        geo.gamma(m, j, i) = acc;
      }
  return geo;
}

/// R_ijkl of order K - 2 from the jet geometry.
inline JetTensor jet_riemann(const JetGeometry& geo) {
  const int q = geo.order - 2;
  const JetTensor gam = truncated(geo.gamma, q);
  std::array<JetTensor, 4> dgam;
  for (int k = 0; k < 4; ++k) {
    dgam[static_cast<std::size_t>(k)] = JetTensor(3, Jet(q));
    for (std::size_t e = 0; e < 64; ++e) dgam[static_cast<std::size_t>(k)][e] = partial(geo.gamma[e], k);
  }
  // R^m_jkl = d_k G^m_lj - d_l G^m_kj + G^m_kp G^p_lj - G^m_lp G^p_kj
  JetTensor up(4, Jet(q));
  for (int m = 0; m < 4; ++m)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = k + 1; l < 4; ++l) {
          Jet acc = dgam[static_cast<std::size_t>(k)](m, l, j) - dgam[static_cast<std::size_t>(l)](m, k, j);
          for (int p = 0; p < 4; ++p) {
            acc.add_product(gam(m, k, p), gam(p, l, j));
            acc.add_product(-gam(m, l, p), gam(p, k, j));
          }
          up(m, j, l, k) = -acc;
          up(m, j, k, l) = std::move(acc);
        }
  const JetTensor g = truncated(geo.g, q);
  JetTensor riem(4, Jet(q));
  for (std::size_t f = 0; f < riem.size(); ++f) {
    const auto idx = riem.unflatten(f);
    Jet acc(q);
    for (int m = 0; m < 4; ++m) acc.add_product(g(idx[0], m), up(m, idx[1], idx[2], idx[3]));
    riem[f] = std::move(acc);
  }
  return riem;
}

struct JetCurvature {
  JetTensor riem, ric, weyl;
  Jet scalar;
};

inline JetCurvature jet_curvature(const JetGeometry& geo) {
  JetCurvature c;
  c.riem = jet_riemann(geo);
  const int q = geo.order - 2;
  const JetTensor ginv = truncated(geo.ginv, q);
  const JetTensor g = truncated(geo.g, q);
  c.ric = JetTensor(2, Jet(q));
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) {
      Jet acc(q);
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l) acc.add_product(ginv(j, l), c.riem(i, j, k, l));
      c.ric(i, k) = std::move(acc);
    }
  c.scalar = Jet(q);
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) c.scalar.add_product(ginv(i, k), c.ric(i, k));
  // W = Riem - 1/2 (Ric o g) + R/12 (g o g)
  c.weyl = c.riem - 0.5 * kulkarni_nomizu(c.ric, g);
  const JetTensor gg = kulkarni_nomizu(g, g);
  const Jet r12 = c.scalar * (1.0 / 12.0);
  for (std::size_t f = 0; f < c.weyl.size(); ++f) c.weyl[f].add_product(r12, gg[f]);
  return c;
}

/// Laplacian g^pq (d_p d_q f - Gamma^r_pq d_r f) of a scalar jet at the expansion point.
inline double scalar_laplacian_at(const Jet& f, const JetGeometry& geo) {
  if (f.order() < 2) throw CapacityError("scalar Laplacian needs a jet of order >= 2");
  double out = 0.0;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q) {
      Exponent e{};
      e[static_cast<std::size_t>(p)] += 1;
      e[static_cast<std::size_t>(q)] += 1;
      double h = f.derivative(e);
      for (int r = 0; r < 4; ++r) {
        Exponent er{};
        er[static_cast<std::size_t>(r)] = 1;
        h -= geo.gamma(r, p, q).value() * f.derivative(er);
      }
      out += geo.ginv(p, q).value() * h;
    }
  return out;
}

/// |T|^2 and <T, *T> (star on the first pair, reference orientation) as scalar
/// jet fields, using the orthonormal frame field.
inline std::array<Jet, 2> norm_and_duality_fields(const JetTensor& t, const JetTensor& frame_field) {
  const int q = t[0].order();
  const JetTensor ft = to_frame(t, truncated(frame_field, q));
  Jet n(q), d(q);
  for (std::size_t i = 0; i < ft.size(); ++i) n.add_product(ft[i], ft[i]);
  const std::size_t tail = ft.size() / 16;
  const Tensor& eps = levi_civita();
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c)
        for (int e = 0; e < 4; ++e) {
          const double s = eps(a, b, c, e);
          if (s == 0.0) continue;
          const std::size_t ab = static_cast<std::size_t>(a * 4 + b) * tail;
          const std::size_t ce = static_cast<std::size_t>(c * 4 + e) * tail;
          Jet acc(q);
          for (std::size_t k = 0; k < tail; ++k) acc.add_product(ft[ab + k], ft[ce + k]);
          acc *= 0.5 * s;
          d += acc;
        }
  return {n, d};
}

}  // namespace detail

/// Christoffel symbols Gamma^m_ij (stored (m, i, j)) as jets of order K - 1.
inline JetTensor christoffel(const MetricChart& chart, const Point& p, int jet_order) {
  if (jet_order < 1) throw std::invalid_argument("Christoffel symbols need jet order >= 1");
  if (jet_order > kMaxJetOrder) throw CapacityError("jet order " + std::to_string(jet_order) + " exceeds capacity 8");
  return detail::jet_geometry(chart, p, jet_order).gamma;
}

inline CurvaturePoint curvature_at(const MetricChart& chart, const Point& p, const CurvatureRequest& req = {}) {
  if (req.depth < 0) throw std::invalid_argument("derivative depth must be >= 0");
  const int need = required_jet_order(req.depth, req.laplacian_level);
  if (need > kMaxJetOrder)
    throw CapacityError("requested derivatives need jet order " + std::to_string(need) + ", capacity is 8");
  const int k = req.jet_order == 0 ? need : req.jet_order;
  if (k > kMaxJetOrder) throw CapacityError("jet order " + std::to_string(k) + " exceeds capacity 8");
  if (k < need)
    throw CapacityError("jet order " + std::to_string(k) + " is below the " + std::to_string(need) +
                        " needed for depth " + std::to_string(req.depth));

  const detail::JetGeometry geo = detail::jet_geometry(chart, p, k);
  const detail::JetCurvature jc = detail::jet_curvature(geo);

  CurvaturePoint cp;
  cp.point = p;
  cp.jet_order = k;
  cp.depth = std::max(req.depth, req.laplacian_level);
  cp.orientation = chart.orientation;
  cp.g_coord = detail::values(geo.g);
  cp.frame = detail::values(geo.frame);
  if (req.frame_rotation) {
    // rows of Q^T F are the rotated frame e'_a = Q_ba e_b
    cp.frame = einsum("ba,bi->ai", *req.frame_rotation, cp.frame);
  }
  const Tensor& f = cp.frame;
  cp.g = detail::to_frame(cp.g_coord, f);

  cp.riem = detail::to_frame(detail::values(jc.riem), f);
  cp.ric = detail::to_frame(detail::values(jc.ric), f);
  cp.scalar = jc.scalar.value();
  cp.weyl = detail::to_frame(detail::values(jc.weyl), f);
  cp.w_plus = project_sector(cp.weyl, Sector::plus, cp.orientation);
  cp.w_minus = project_sector(cp.weyl, Sector::minus, cp.orientation);

  // nabla^j W as jets, keeping those needed for Laplacians.
  const int lap = req.laplacian_level;
  std::vector<JetTensor> jets;
  jets.push_back(jc.weyl);
  cp.nabla_w.push_back(cp.weyl);
  for (int j = 1; j <= cp.depth; ++j) {
    JetTensor next = detail::covariant_derivative(jets.back(), geo.gamma);
    cp.nabla_w.push_back(detail::to_frame(detail::values(next), f));
    if (j - 1 > lap + 1) jets.back() = JetTensor();
    jets.push_back(std::move(next));
  }

  if (k >= 3) {
    const JetTensor dric = detail::covariant_derivative(jc.ric, geo.gamma);
    cp.nabla_ric = detail::to_frame(detail::values(dric), f);
    Tensor ds(1);
    for (int i = 0; i < 4; ++i) ds(i) = partial(jc.scalar, i).value();
    cp.d_scalar = detail::to_frame(ds, f);
    cp.nabla_riem = detail::to_frame(detail::values(detail::covariant_derivative(jc.riem, geo.gamma)), f);
    cp.cotton = cotton_from_ricci(*cp.nabla_ric, *cp.d_scalar, cp.g);
    if (k >= 4)
      cp.nabla2_ric = detail::to_frame(detail::values(detail::covariant_derivative(dric, geo.gamma)), f);
  }

  for (int j = 0; j <= lap; ++j) {
    const JetTensor& t = jets[static_cast<std::size_t>(j)];
    const auto fields = detail::norm_and_duality_fields(detail::truncated(t, 2), geo.frame);
    const double ln = detail::scalar_laplacian_at(fields[0], geo);
    const double ld = detail::scalar_laplacian_at(fields[1], geo) * cp.orientation;
    cp.lap_norm_sq.push_back(ln);
    cp.lap_sector_norm_sq.push_back({0.5 * (ln + ld), 0.5 * (ln - ld)});
  }

  cp.grad_laplacian_w.resize(static_cast<std::size_t>(std::max(lap + 1, 0)));
  for (int j = 1; j <= lap && j + 1 <= cp.depth; ++j) {
    const JetTensor& t = jets[static_cast<std::size_t>(j + 1)];
    if (t[0].order() < 1) continue;
    const JetTensor d = detail::covariant_derivative(detail::trace_last_pair(t, geo.ginv), geo.gamma);
    cp.grad_laplacian_w[static_cast<std::size_t>(j)] = detail::to_frame(detail::values(d), f);
  }
  return cp;
}

inline CurvaturePoint curvature_at(const MetricChart& chart, const Point& p, int depth) {
  CurvatureRequest req;
  req.depth = depth;
  return curvature_at(chart, p, req);
}

/// Laplacian of |W|^2, |nabla W|^2 or |nabla^2 W|^2 (level 0, 1, 2).
inline double scalar_laplacian(const MetricChart& chart, const Point& p, int level) {
  if (level < 0 || level > 2) throw std::invalid_argument("Laplacian level must be 0, 1 or 2");
  CurvatureRequest req;
  req.depth = level;
  req.laplacian_level = level;
  return curvature_at(chart, p, req).laplacian_norm_sq(level);
}

/// Laplacian of an arbitrary scalar field given in jet arithmetic.
inline double scalar_laplacian(const MetricChart& chart, const Point& p, const std::function<Jet(const Coordinates&)>& field,
                               int jet_order = 2) {
  const detail::JetGeometry geo = detail::jet_geometry(chart, p, jet_order);
  Coordinates x;
  for (int d = 0; d < 4; ++d) x[static_cast<std::size_t>(d)] = Jet::variable(jet_order, d, p[static_cast<std::size_t>(d)]);
  return detail::scalar_laplacian_at(field(x), geo);
}

}  // namespace weylforge
