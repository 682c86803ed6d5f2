#pragma once

// Finite-difference reference for Christoffel symbols and the Riemann tensor.
// Uses only metric values and fourth-order central differences.

#include <array>
#include <cmath>

#include "weylforge/chart.hpp"

namespace fd {

using M4 = std::array<std::array<double, 4>, 4>;
using G3 = std::array<M4, 4>;                  // Gamma[m][i][j]
using R4 = std::array<std::array<M4, 4>, 4>;   // R[i][j][k][l], all indices down

inline M4 metric(const weylforge::MetricChart& c, weylforge::Point p) {
  const auto comp = c.metric_jets(p, 0);
  M4 g{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) g[i][j] = comp[static_cast<std::size_t>(weylforge::sym_index(i, j))].value();
  return g;
}

inline M4 inverse(M4 a) {
  M4 inv{};
  for (int i = 0; i < 4; ++i) inv[i][i] = 1.0;
  for (int c = 0; c < 4; ++c) {
    int piv = c;
    for (int r = c + 1; r < 4; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(inv[c], inv[piv]);
    const double d = a[c][c];
    for (int k = 0; k < 4; ++k) {
      a[c][k] /= d;
      inv[c][k] /= d;
    }
    for (int r = 0; r < 4; ++r)
      if (r != c) {
        const double f = a[r][c];
        for (int k = 0; k < 4; ++k) {
          a[r][k] -= f * a[c][k];
          inv[r][k] -= f * inv[c][k];
        }
      }
  }
  return inv;
}

/// Fourth-order central difference of any array-valued function along direction d.
template <class F>
auto derivative(F&& f, weylforge::Point p, int d, double h) {
  auto at = [&](double s) {
    weylforge::Point q = p;
    q[static_cast<std::size_t>(d)] += s * h;
    return f(q);
  };
  auto fp1 = at(1), fm1 = at(-1), fp2 = at(2), fm2 = at(-2);
  auto out = fp1;
  auto* o = reinterpret_cast<double*>(&out);
  const auto* a = reinterpret_cast<const double*>(&fp1);
  const auto* b = reinterpret_cast<const double*>(&fm1);
  const auto* c = reinterpret_cast<const double*>(&fp2);
  const auto* e = reinterpret_cast<const double*>(&fm2);
  for (std::size_t n = 0; n < sizeof(out) / sizeof(double); ++n) o[n] = (8 * (a[n] - b[n]) - (c[n] - e[n])) / (12 * h);
  return out;
}

inline G3 christoffel(const weylforge::MetricChart& c, weylforge::Point p, double h = 1e-3) {
  std::array<M4, 4> dg;
  for (int k = 0; k < 4; ++k) dg[k] = derivative([&](weylforge::Point q) { return metric(c, q); }, p, k, h);
  const M4 gi = inverse(metric(c, p));
  G3 gam{};
  for (int m = 0; m < 4; ++m)
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int l = 0; l < 4; ++l) gam[m][i][j] += 0.5 * gi[m][l] * (dg[i][j][l] + dg[j][i][l] - dg[l][i][j]);
  return gam;
}

/// R_ijkl = g_im (d_k G^m_lj - d_l G^m_kj + G^m_kp G^p_lj - G^m_lp G^p_kj).
inline R4 riemann(const weylforge::MetricChart& c, weylforge::Point p, double h = 1e-3) {
  std::array<G3, 4> dgam;
  for (int k = 0; k < 4; ++k) dgam[k] = derivative([&](weylforge::Point q) { return christoffel(c, q, h); }, p, k, h);
  const G3 gam = christoffel(c, p, h);
  const M4 g = metric(c, p);
  R4 up{}, down{};
  for (int m = 0; m < 4; ++m)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l) {
          double v = dgam[k][m][l][j] - dgam[l][m][k][j];
          for (int q = 0; q < 4; ++q) v += gam[m][k][q] * gam[q][l][j] - gam[m][l][q] * gam[q][k][j];
          up[m][j][k][l] = v;
        }
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k)
        for (int l = 0; l < 4; ++l)
          for (int m = 0; m < 4; ++m) down[i][j][k][l] += g[i][m] * up[m][j][k][l];
  return down;
}

}  // namespace fd
