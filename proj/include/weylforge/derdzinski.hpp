#pragma once

// Eigenframe calculus for nabla W+- in dimension four.
//
// In a Derdzinski frame (omega, eta, theta) with eigenvalues (l, m, n) write
//   2 W_{ijpq,t} = sum_ab K_ab,t s_a,ij s_b,pq,   K_ab,t = 1/8 W_{ijpq,t} s_a,ij s_b,pq.
// K is symmetric with K11 = dl, K22 = dm, K33 = dn, K12 = (l - m) c,
// K13 = (n - l) b, K23 = (m - n) a. The checks below are phrased in K, which
// stays well defined when eigenvalues coincide; the one-forms a, b, c are
// only reported for simple spectrum.

#include <array>
#include <cmath>
#include <stdexcept>

#include "weylforge/curvature_algebra.hpp"
#include "weylforge/geometry.hpp"

namespace weylforge {

using OneForm = std::array<double, 4>;

inline double dot(const OneForm& a, const OneForm& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]; }

struct EigenframeDerivatives {
  Sector sector = Sector::plus;
  TwoFormFrame frame;
  std::array<std::array<OneForm, 3>, 3> coupling{};  // K_ab, symmetrized
  OneForm d_lambda{}, d_mu{}, d_nu{}, a{}, b{}, c{};  // a, b, c are zero when degenerate
  bool degenerate = false;
  double consistency_gap = 0.0;   // max |K_ab - K_ba| before symmetrizing
  double reconstruction_abs = 0.0;
  double scale = 0.0;             // |2 nabla W+-|

  double reconstruction_rel() const { return reconstruction_abs / std::max(scale, 1e-30); }
};

class DegenerateFrameError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Projects nabla W+- (rank 5, derivative slot last) onto the frame of W+-.
inline EigenframeDerivatives extract_frame_derivatives(const Tensor& w_sector, const Tensor& dw_sector, Sector s,
                                                       int orientation = 1) {
  if (w_sector.rank() != 4 || dw_sector.rank() != 5) throw ShapeError("expected W (rank 4) and nabla W (rank 5)");
  const auto seeds = seed_forms(s, orientation);
  EigenframeDerivatives ed;
  ed.sector = s;
  ed.frame = derdzinski_frame(operator_block(w_sector, seeds, seeds), s, orientation);
  ed.degenerate = ed.frame.degenerate;
  const auto& f = ed.frame.forms;

  std::array<Tensor, 3> half;  // (1/8) dW_{ijpq t} s_b,pq
  for (int b = 0; b < 3; ++b) half[b] = 0.125 * einsum("ijpqt,pq->ijt", dw_sector, f[b]);
  std::array<std::array<OneForm, 3>, 3> raw{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      const Tensor k = einsum("ijt,ij->t", half[b], f[a]);
      for (int t = 0; t < 4; ++t) raw[a][b][t] = k(t);
    }
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int t = 0; t < 4; ++t) {
        ed.consistency_gap = std::max(ed.consistency_gap, std::abs(raw[a][b][t] - raw[b][a][t]));
        ed.coupling[a][b][t] = 0.5 * (raw[a][b][t] + raw[b][a][t]);
      }

  Tensor rec(5);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      Tensor k(1);
      for (int t = 0; t < 4; ++t) k(t) = ed.coupling[a][b][t];
      rec += outer(outer(f[a], f[b]), k);
    }
  const Tensor two_dw = 2.0 * dw_sector;
  ed.reconstruction_abs = norm(two_dw - rec);
  ed.scale = norm(two_dw);

  ed.d_lambda = ed.coupling[0][0];
  ed.d_mu = ed.coupling[1][1];
  ed.d_nu = ed.coupling[2][2];
  if (!ed.degenerate) {
    const auto& e = ed.frame.eigenvalues;
    for (int t = 0; t < 4; ++t) {
      ed.c[t] = ed.coupling[0][1][t] / (e[0] - e[1]);
      ed.b[t] = ed.coupling[0][2][t] / (e[2] - e[0]);
      ed.a[t] = ed.coupling[1][2][t] / (e[1] - e[2]);
    }
  }
  return ed;
}

inline EigenframeDerivatives extract_frame_derivatives(const CurvaturePoint& cp, Sector s) {
  return extract_frame_derivatives(s == Sector::plus ? cp.w_plus : cp.w_minus, cp.dw_sector(1, s), s, cp.orientation);
}

/// Throws when a, b, c are not defined.
inline void require_simple_spectrum(const EigenframeDerivatives& ed) {
  if (ed.degenerate)
    throw DegenerateFrameError("eigenvalue gap " + std::to_string(ed.frame.min_gap) +
                               " below threshold; connection one-forms are not defined");
}

/// dl + dm + dn = 0.
inline Residual trace_relation(const EigenframeDerivatives& ed) {
  double abs = 0.0, scale = 0.0;
  for (int t = 0; t < 4; ++t) {
    abs = std::max(abs, std::abs(ed.d_lambda[t] + ed.d_mu[t] + ed.d_nu[t]));
    scale = std::max({scale, std::abs(ed.d_lambda[t]), std::abs(ed.d_mu[t]), std::abs(ed.d_nu[t])});
  }
  return {abs, scale};
}

/// 1/4 |nabla W+-|^2 against the frame expansion; uses a, b, c when the spectrum is simple.
inline Residual norm_expansion(const Tensor& dw_sector, const EigenframeDerivatives& ed) {
  const double lhs = 0.25 * norm_sq(dw_sector);
  double rhs = dot(ed.d_lambda, ed.d_lambda) + dot(ed.d_mu, ed.d_mu) + dot(ed.d_nu, ed.d_nu);
  if (!ed.degenerate) {
    const auto& e = ed.frame.eigenvalues;
    rhs += 2 * (e[1] - e[2]) * (e[1] - e[2]) * dot(ed.a, ed.a) + 2 * (e[0] - e[2]) * (e[0] - e[2]) * dot(ed.b, ed.b) +
           2 * (e[0] - e[1]) * (e[0] - e[1]) * dot(ed.c, ed.c);
  } else {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (a != b) rhs += dot(ed.coupling[a][b], ed.coupling[a][b]);
  }
  return scalar_residual({lhs, -rhs});
}

/// The three divergence-free relations as one-form residuals, in K form:
///   K11 = theta K12 - eta K13,  K22 = -theta K12 + omega K23,  K33 = eta K13 - omega K23,
/// with (sigma K)_k = sigma_kl K_l.
inline std::array<Residual, 3> div_free_relations(const EigenframeDerivatives& ed) {
  const auto& f = ed.frame.forms;
  const auto& k = ed.coupling;
  auto apply = [](const Tensor& s, const OneForm& v) {
    OneForm r{};
    for (int i = 0; i < 4; ++i)
      for (int l = 0; l < 4; ++l) r[i] += s(i, l) * v[l];
    return r;
  };
  const OneForm th12 = apply(f[2], k[0][1]), et13 = apply(f[1], k[0][2]), om23 = apply(f[0], k[1][2]);
  std::array<Residual, 3> out;
  const std::array<std::array<OneForm, 3>, 3> terms = {{{k[0][0], th12, et13},   // K11 - th12 + et13
                                                       {k[1][1], th12, om23},   // K22 + th12 - om23
                                                       {k[2][2], et13, om23}}};  // K33 - et13 + om23
  const std::array<std::array<double, 3>, 3> sign = {{{1, -1, 1}, {1, 1, -1}, {1, -1, 1}}};
  for (int r = 0; r < 3; ++r) {
    double abs = 0.0, scale = 0.0;
    for (int t = 0; t < 4; ++t) {
      double s = 0.0;
      for (int q = 0; q < 3; ++q) {
        s += sign[r][q] * terms[r][q][t];
        scale = std::max(scale, std::abs(terms[r][q][t]));
      }
      abs += s * s;
    }
    out[r] = {std::sqrt(abs), scale};
  }
  return out;
}

/// 1/8 W_ijkl W_ijpq,t W_klpq,t = sum_ab l_a K_ab . K_ab (eigenbasis of W+-).
inline Residual cubic_contraction(const Tensor& w_sector, const Tensor& dw_sector, const EigenframeDerivatives& ed) {
  const double lhs = 0.125 * einsum_scalar("ijkl,ijpqt,klpqt->", w_sector, dw_sector, dw_sector);
  const auto& e = ed.frame.eigenvalues;
  double rhs = 0.0;
  if (!ed.degenerate) {
    rhs = e[0] * dot(ed.d_lambda, ed.d_lambda) + e[1] * dot(ed.d_mu, ed.d_mu) + e[2] * dot(ed.d_nu, ed.d_nu) -
          e[0] * (e[1] - e[2]) * (e[1] - e[2]) * dot(ed.a, ed.a) -
          e[1] * (e[2] - e[0]) * (e[2] - e[0]) * dot(ed.b, ed.b) -
          e[2] * (e[0] - e[1]) * (e[0] - e[1]) * dot(ed.c, ed.c);
  } else {
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) rhs += e[a] * dot(ed.coupling[a][b], ed.coupling[a][b]);
  }
  const double w = std::max({std::abs(e[0]), std::abs(e[1]), std::abs(e[2])});
  const Residual r = scalar_residual({lhs, -rhs});
  // Terms like l |dl|^2 cancel against each other; |W| |K|^2 is their common size.
  double k2 = 0.0;
  for (const auto& row : ed.coupling)
    for (const auto& v : row) k2 += dot(v, v);
  return {r.abs, std::max(r.scale, w * k2)};
}

}  // namespace weylforge
