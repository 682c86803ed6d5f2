#pragma once

// Derivative-free curvature algebra in dimension four.
//
// Unless stated otherwise, tensors here are components in an orthonormal
// frame, so the metric is the Kronecker delta. Two-forms are antisymmetric
// 4x4 arrays with the full-sum inner product <a, b> = a_ij b_ij; the seed
// forms e1^e2 + e3^e4 etc. then have <s, s> = 4.

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "weylforge/tensor.hpp"

namespace weylforge {

using Mat3 = std::array<std::array<double, 3>, 3>;

enum class Sector { plus, minus };

inline const char* to_string(Sector s) { return s == Sector::plus ? "plus" : "minus"; }

// ---------------------------------------------------------------------------
// Residuals

struct Residual {
  double abs = 0.0;
  double scale = 0.0;
  double rel(double floor = 1e-30) const { return abs / std::max(scale, floor); }
};

/// One additive term c * t of an identity written as sum(terms) = 0.
struct Term {
  Term(double c, const Tensor& t) : coeff(c), tensor(&t) {}
  double coeff;
  const Tensor* tensor;
};

/// Frobenius norm of the sum and the largest Frobenius norm among the terms.
inline Residual residual(std::initializer_list<Term> terms) {
  Residual r;
  const Tensor* first = terms.begin()->tensor;
  Tensor sum(first->rank());
  for (const Term& t : terms) {
    if (t.tensor->rank() != first->rank()) throw ShapeError("residual terms differ in rank");
    const auto src = t.tensor->data();
    auto dst = sum.data();
    double n = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] += t.coeff * src[i];
      n += src[i] * src[i];
    }
    r.scale = std::max(r.scale, std::abs(t.coeff) * std::sqrt(n));
  }
  r.abs = norm(sum);
  return r;
}

/// Scalar identity sum(c_i) = 0 given as a list of signed terms.
inline Residual scalar_residual(std::initializer_list<double> terms) {
  Residual r;
  double s = 0.0;
  for (double t : terms) {
    s += t;
    r.scale = std::max(r.scale, std::abs(t));
  }
  r.abs = std::abs(s);
  return r;
}

// ---------------------------------------------------------------------------
// Small dense linear algebra

inline Tensor inverse4(const Tensor& m) {
  if (m.rank() != 2) throw ShapeError("inverse4 needs a rank-2 tensor");
  double a[4][8];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      a[i][j] = m(i, j);
      a[i][j + 4] = (i == j) ? 1.0 : 0.0;
    }
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) throw std::domain_error("singular 4x4 matrix");
    for (int j = 0; j < 8; ++j) std::swap(a[c][j], a[piv][j]);
    const double d = a[c][c];
    for (int j = 0; j < 8; ++j) a[c][j] /= d;
    for (int r = 0; r < 4; ++r) {
      if (r == c) continue;
      const double f = a[r][c];
      for (int j = 0; j < 8; ++j) a[r][j] -= f * a[c][j];
    }
  }
  Tensor inv(2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) inv(i, j) = a[i][j + 4];
  return inv;
}

inline double det4(const Tensor& m) {
  double a[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a[i][j] = m(i, j);
  double det = 1.0;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < 4; ++j) std::swap(a[c][j], a[piv][j]);
      det = -det;
    }
    det *= a[c][c];
    for (int r = c + 1; r < 4; ++r) {
      const double f = a[r][c] / a[c][c];
      for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

struct SymEigen3 {
  std::array<double, 3> values{};  // ascending
  Mat3 vectors{};                  // column a is the unit eigenvector for values[a]
};

/// Cyclic Jacobi iteration for a symmetric 3x3 matrix.
inline SymEigen3 jacobi_eigen(Mat3 a, double tol = 1e-14, int max_sweeps = 30) {
  Mat3 v{};
  for (int i = 0; i < 3; ++i) v[i][i] = 1.0;
  double scale = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) scale = std::max(scale, std::abs(a[i][j]));
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    const double off = std::abs(a[0][1]) + std::abs(a[0][2]) + std::abs(a[1][2]);
    if (off <= tol * scale || off == 0.0) break;
    for (int p = 0; p < 2; ++p)
      for (int q = p + 1; q < 3; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = v[k][p], vkq = v[k][q];
          v[k][p] = c * vkp - s * vkq;
          v[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::array<int, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a[x][x] < a[y][y]; });
  SymEigen3 r;
  for (int n = 0; n < 3; ++n) {
    r.values[n] = a[order[n]][order[n]];
    for (int k = 0; k < 3; ++k) r.vectors[k][n] = v[k][order[n]];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Two-forms, Hodge star, Lambda+- projectors

/// Sign s of the seed forms e1^e2 + s e3^e4, ...: the sector's eigenvalue
/// under the star of the reference orientation eps_0123 = +1.
inline int sector_sign(Sector s, int orientation) {
  if (orientation != 1 && orientation != -1) throw std::invalid_argument("orientation must be +1 or -1");
  return (s == Sector::plus ? 1 : -1) * orientation;
}

inline Tensor elementary_form(int a, int b) {
  Tensor w(2);
  w(a, b) = 1.0;
  w(b, a) = -1.0;
  return w;
}

/// (*w)_ij = 1/2 eps_ijkl w_kl with eps_0123 = orientation.
inline Tensor hodge_star(const Tensor& w, int orientation = 1) {
  if (w.rank() != 2) throw ShapeError("hodge_star needs a two-form");
  Tensor r = einsum("ijkl,kl->ij", levi_civita(), w);
  r *= 0.5 * orientation;
  return r;
}

/// Seed basis of a sector: e1^e2 + s e3^e4, e1^e3 + s e4^e2, e1^e4 + s e2^e3.
inline std::array<Tensor, 3> seed_forms(Sector sector, int orientation = 1) {
  const double s = sector_sign(sector, orientation);
  std::array<Tensor, 3> f{elementary_form(0, 1) + s * elementary_form(2, 3),
                          elementary_form(0, 2) + s * elementary_form(3, 1),
                          elementary_form(0, 3) + s * elementary_form(1, 2)};
  return f;
}

inline double form_dot(const Tensor& a, const Tensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Matrix product (ab)_ij = a_ip b_pj of two-forms.
inline Tensor form_product(const Tensor& a, const Tensor& b) { return einsum("ip,pj->ij", a, b); }

/// (T w)_kl = 1/2 T_ijkl w_ij.
inline Tensor curvature_operator_apply(const Tensor& t, const Tensor& w) {
  Tensor r = einsum("ijkl,ij->kl", t, w);
  r *= 0.5;
  return r;
}

/// Replace the antisymmetric slot pair (p, p+1) by 1/2 (w + s *w), for p in {0, 2}.
inline Tensor project_pair(const Tensor& t, int p, int s) {
  const int r = t.rank();
  if (r < p + 2) throw ShapeError("project_pair: rank too small");
  const std::size_t outer = pow4(p), tail = pow4(r - p - 2);
  const Tensor& eps = levi_civita();
  Tensor out(r);
  for (std::size_t o = 0; o < outer; ++o)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const std::size_t dst = (o * 16 + static_cast<std::size_t>(i * 4 + j)) * tail;
        for (std::size_t x = 0; x < tail; ++x) out[dst + x] = 0.5 * t[dst + x];
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) {
            const double e = eps(i, j, a, b);
            if (e == 0.0) continue;
            const std::size_t src = (o * 16 + static_cast<std::size_t>(a * 4 + b)) * tail;
            const double f = 0.25 * s * e;
            for (std::size_t x = 0; x < tail; ++x) out[dst + x] += f * t[src + x];
          }
      }
  return out;
}

/// W+- of a Riemann-type tensor (slots 0..3), extra trailing slots allowed.
inline Tensor project_sector(const Tensor& t, Sector sector, int orientation = 1) {
  const int s = sector_sign(sector, orientation);
  return project_pair(project_pair(t, 0, s), 2, s);
}

/// M_ab = 1/8 T_ijkl sa_kl sb_ij: matrix of the operator T in the (orthogonal,
/// norm-2) bases a (rows) and b (columns).
inline Mat3 operator_block(const Tensor& t, const std::array<Tensor, 3>& rows, const std::array<Tensor, 3>& cols) {
  Mat3 m{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) m[a][b] = 0.125 * einsum_scalar("ijkl,ij,kl->", t, cols[b], rows[a]);
  return m;
}

inline double mat3_trace(const Mat3& m) { return m[0][0] + m[1][1] + m[2][2]; }

inline double mat3_norm(const Mat3& m) {
  double s = 0;
  for (const auto& row : m)
    for (double v : row) s += v * v;
  return std::sqrt(s);
}

// ---------------------------------------------------------------------------
// Ricci, scalar curvature and Weyl

struct RicciWeyl {
  Tensor ric;
  double scalar = 0.0;
  Tensor weyl;
};

/// Ricci, scalar curvature and Weyl tensor of a Riemann-type tensor with
/// respect to a metric g (the identity in an orthonormal frame).
inline RicciWeyl ricci_scalar_weyl(const Tensor& riem, const Tensor& g, double symmetry_tol = 1e-10) {
  if (riem.rank() != 4 || g.rank() != 2) throw ShapeError("ricci_scalar_weyl: need rank-4 curvature and rank-2 metric");
  const double viol = riemann_symmetry_violation(riem);
  if (viol > symmetry_tol * std::max(norm(riem), std::numeric_limits<double>::min())) {
    std::ostringstream os;
    os << "input lacks Riemann symmetries: max violation " << viol;
    throw std::invalid_argument(os.str());
  }
  const Tensor ginv = inverse4(g);
  RicciWeyl out;
  out.ric = einsum("jl,ijkl->ik", ginv, riem);
  out.scalar = einsum_scalar("ik,ik->", ginv, out.ric);
  // W = Riem - 1/2 (Ric o g) + R/12 (g o g) in dimension four.
  Tensor kn_rg = kulkarni_nomizu(out.ric, g);
  Tensor kn_gg = kulkarni_nomizu(g, g);
  out.weyl = riem - 0.5 * kn_rg + (out.scalar / 12.0) * kn_gg;
  return out;
}

inline Tensor trace_free_ricci(const Tensor& ric, double scalar) { return ric - (scalar / 4.0) * kronecker(); }

/// C_ijk = R_ij,k - R_ik,j - 1/6 (R_k g_ij - R_j g_ik).
inline Tensor cotton_from_ricci(const Tensor& nabla_ric, const Tensor& d_scalar, const Tensor& g) {
  if (nabla_ric.rank() != 3 || d_scalar.rank() != 1 || g.rank() != 2) throw ShapeError("cotton_from_ricci: bad ranks");
  Tensor c(3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        c(i, j, k) = nabla_ric(i, j, k) - nabla_ric(i, k, j) - (d_scalar(k) * g(i, j) - d_scalar(j) * g(i, k)) / 6.0;
  return c;
}

/// C_ijk = 2 W_tikj,t (derivative slot last).
inline Tensor cotton_from_weyl_divergence(const Tensor& nabla_w) {
  if (nabla_w.rank() != 5) throw ShapeError("cotton_from_weyl_divergence needs rank 5");
  Tensor c = einsum("tikjt->ijk", nabla_w);
  c *= 2.0;
  return c;
}

// ---------------------------------------------------------------------------
// Block decomposition of the curvature operator

struct CurvatureOperatorBlocks {
  Mat3 w_plus{};
  Mat3 w_minus{};
  Mat3 ric0_block{};  // rows: Lambda+ seeds, columns: Lambda- seeds
  double scalar = 0.0;
  int orientation = 1;
};

inline CurvatureOperatorBlocks lambda_split(const Tensor& riem, int orientation = 1) {
  const RicciWeyl rw = ricci_scalar_weyl(riem, kronecker());
  const auto sp = seed_forms(Sector::plus, orientation);
  const auto sm = seed_forms(Sector::minus, orientation);
  CurvatureOperatorBlocks b;
  b.orientation = orientation;
  b.scalar = rw.scalar;
  b.w_plus = operator_block(rw.weyl, sp, sp);
  b.w_minus = operator_block(rw.weyl, sm, sm);
  b.ric0_block = operator_block(riem, sp, sm);
  return b;
}

/// Action of the reassembled block operator on a two-form.
inline Tensor apply_blocks(const CurvatureOperatorBlocks& b, const Tensor& w) {
  const auto sp = seed_forms(Sector::plus, b.orientation);
  const auto sm = seed_forms(Sector::minus, b.orientation);
  std::array<double, 3> cp{}, cm{};
  for (int a = 0; a < 3; ++a) {
    cp[a] = form_dot(w, sp[a]) / 4.0;
    cm[a] = form_dot(w, sm[a]) / 4.0;
  }
  Tensor out(2);
  for (int a = 0; a < 3; ++a) {
    double vp = b.scalar / 12.0 * cp[a], vm = b.scalar / 12.0 * cm[a];
    for (int c = 0; c < 3; ++c) {
      vp += b.w_plus[a][c] * cp[c] + b.ric0_block[a][c] * cm[c];
      vm += b.w_minus[a][c] * cm[c] + b.ric0_block[c][a] * cp[c];
    }
    out += vp * sp[a];
    out += vm * sm[a];
  }
  return out;
}

// ---------------------------------------------------------------------------
// Eigenframes

struct TwoFormFrame {
  Sector sector = Sector::plus;
  int orientation = 1;
  std::array<double, 3> eigenvalues{};  // lambda <= mu <= nu
  std::array<Tensor, 3> forms;          // omega, eta, theta
  Mat3 basis{};                         // column a: seed coefficients of forms[a]
  bool degenerate = false;
  double min_gap = 0.0;
  bool theta_flipped = false;
};

inline constexpr double kDegeneracyThreshold = 1e-8;

/// Flip theta when omega eta = -theta so that the quaternionic table holds.
inline bool fix_quaternionic_orientation(std::array<Tensor, 3>& f, Mat3* basis = nullptr) {
  const double s = form_dot(form_product(f[0], f[1]), f[2]);
  if (s >= 0.0) return false;
  f[2] *= -1.0;
  if (basis)
    for (int k = 0; k < 3; ++k) (*basis)[k][2] = -(*basis)[k][2];
  return true;
}

inline TwoFormFrame derdzinski_frame(const Mat3& block, Sector sector, int orientation = 1) {
  const SymEigen3 e = jacobi_eigen(block);
  const auto seeds = seed_forms(sector, orientation);
  TwoFormFrame f;
  f.sector = sector;
  f.orientation = orientation;
  f.eigenvalues = e.values;
  f.basis = e.vectors;
  for (int a = 0; a < 3; ++a) {
    Tensor w(2);
    for (int k = 0; k < 3; ++k) w += e.vectors[k][a] * seeds[k];
    f.forms[a] = w;
  }
  f.theta_flipped = fix_quaternionic_orientation(f.forms, &f.basis);
  const double radius = std::max({std::abs(e.values[0]), std::abs(e.values[1]), std::abs(e.values[2])});
  f.min_gap = std::min(e.values[1] - e.values[0], e.values[2] - e.values[1]);
  f.degenerate = !(f.min_gap > kDegeneracyThreshold * radius) || radius == 0.0;
  return f;
}

/// 1/2 sum_a l_a s_a (x) s_a.
inline Tensor sector_tensor(const std::array<double, 3>& eig, const std::array<Tensor, 3>& forms) {
  Tensor w(4);
  for (int a = 0; a < 3; ++a) {
    Tensor o = outer(forms[a], forms[a]);
    o *= 0.5 * eig[a];
    w += o;
  }
  return w;
}

/// Largest deviation from the quaternionic multiplication table.
inline double quaternionic_violation(const std::array<Tensor, 3>& f) {
  const Tensor minus_delta = -1.0 * kronecker();
  double m = 0.0;
  for (int a = 0; a < 3; ++a) m = std::max(m, max_abs(form_product(f[a], f[a]) - minus_delta));
  m = std::max(m, max_abs(form_product(f[0], f[1]) - f[2]));
  m = std::max(m, max_abs(form_product(f[1], f[2]) - f[0]));
  m = std::max(m, max_abs(form_product(f[2], f[0]) - f[1]));
  for (int a = 0; a < 3; ++a) m = std::max(m, std::abs(form_dot(f[a], f[a]) - 4.0));
  return m;
}

template <class URBG>
Mat3 random_rotation3(URBG& rng) {
  std::normal_distribution<double> n;
  Mat3 q{};
  for (;;) {
    for (auto& row : q)
      for (double& v : row) v = n(rng);
    // Gram-Schmidt on the columns.
    bool ok = true;
    for (int c = 0; c < 3 && ok; ++c) {
      for (int d = 0; d < c; ++d) {
        double dot = 0;
        for (int k = 0; k < 3; ++k) dot += q[k][c] * q[k][d];
        for (int k = 0; k < 3; ++k) q[k][c] -= dot * q[k][d];
      }
      double nn = 0;
      for (int k = 0; k < 3; ++k) nn += q[k][c] * q[k][c];
      if (nn < 1e-12) ok = false;
      for (int k = 0; k < 3; ++k) q[k][c] /= std::sqrt(nn);
    }
    if (!ok) continue;
    const double det = q[0][0] * (q[1][1] * q[2][2] - q[1][2] * q[2][1]) -
                       q[0][1] * (q[1][0] * q[2][2] - q[1][2] * q[2][0]) +
                       q[0][2] * (q[1][0] * q[2][1] - q[1][1] * q[2][0]);
    if (det < 0)
      for (int k = 0; k < 3; ++k) q[k][2] = -q[k][2];
    return q;
  }
}

struct SectorSample {
  Tensor tensor;
  std::array<double, 3> eigenvalues{};
  std::array<Tensor, 3> forms;
};

/// Random algebraic Weyl tensor of one sector: eigenvalues (l, m, -l-m) on a
/// randomly rotated seed triple.
template <class URBG>
SectorSample random_sector_tensor(URBG& rng, Sector sector, int orientation = 1, double spread = 1.0) {
  std::uniform_real_distribution<double> u(-spread, spread);
  SectorSample s;
  const double l = u(rng), m = u(rng);
  s.eigenvalues = {l, m, -l - m};
  const Mat3 q = random_rotation3(rng);
  const auto seeds = seed_forms(sector, orientation);
  for (int a = 0; a < 3; ++a) {
    Tensor w(2);
    for (int k = 0; k < 3; ++k) w += q[k][a] * seeds[k];
    s.forms[a] = w;
  }
  fix_quaternionic_orientation(s.forms);
  s.tensor = sector_tensor(s.eigenvalues, s.forms);
  return s;
}

// ---------------------------------------------------------------------------
// Algebraic identities

/// W_ijkt W_ijkl = 1/4 |W|^2 delta_tl.
inline Residual weyl_weyl_metric(const Tensor& w) {
  const Tensor lhs = einsum("ijkt,ijkl->tl", w, w);
  const Tensor rhs = (0.25 * norm_sq(w)) * kronecker();
  return residual({{1.0, lhs}, {-1.0, rhs}});
}

inline double cubic_wwx(const Tensor& w) { return einsum_scalar("ijkl,ijpq,klpq->", w, w, w); }

/// W_ijkl W_ipkq W_jplq = 1/2 W_ijkl W_ijpq W_klpq.
inline Residual weyl_cubic(const Tensor& w) {
  const double lhs = einsum_scalar("ijkl,ipkq,jplq->", w, w, w);
  return scalar_residual({lhs, -0.5 * cubic_wwx(w)});
}

/// (W_pjkl W_pist + W_ipkl W_pjst + W_ijpl W_pkst + W_ijkp W_plst) W_rjkl W_rist = 1/4 |W|^4.
inline Residual weyl_quartic(const Tensor& w) {
  const Tensor e = einsum("rjkl,rist->ijklst", w, w);
  const double t1 = einsum_scalar("ijklst,ijklst->", einsum("pjkl,pist->ijklst", w, w), e);
  const double t2 = einsum_scalar("ijklst,ijklst->", einsum("ipkl,pjst->ijklst", w, w), e);
  const double t3 = einsum_scalar("ijklst,ijklst->", einsum("ijpl,pkst->ijklst", w, w), e);
  const double t4 = einsum_scalar("ijklst,ijklst->", einsum("ijkp,plst->ijklst", w, w), e);
  const double n2 = norm_sq(w);
  return scalar_residual({t1, t2, t3, t4, -0.25 * n2 * n2});
}

/// Residual of W+- = 1/2 sum l_a s_a (x) s_a.
inline Residual frame_reconstruction(const Tensor& w_sector, const TwoFormFrame& f) {
  const Tensor rec = sector_tensor(f.eigenvalues, f.forms);
  return residual({{1.0, w_sector}, {-1.0, rec}});
}

}  // namespace weylforge
