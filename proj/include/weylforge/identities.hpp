#pragma once

// Registry of pointwise curvature identities as residual checks on a
// CurvaturePoint, with measured hypothesis gates.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "weylforge/chart.hpp"
#include "weylforge/curvature_algebra.hpp"
#include "weylforge/derdzinski.hpp"
#include "weylforge/geometry.hpp"

namespace weylforge {

enum class Gate {
  any,              // every 4-manifold
  harmonic_weyl,    // div W = 0
  half_harmonic,    // div W+- = 0 for the entry's sector
  einstein,         // Ric = (R/4) g
  parallel_sector,  // Einstein, nabla W+- = 0 and W+- != 0
  out_of_scope,     // global statement, listed only
};

enum class Status { pass, fail, not_applicable, expected_fail, unexpected_pass };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::pass: return "pass";
    case Status::fail: return "fail";
    case Status::not_applicable: return "not_applicable";
    case Status::expected_fail: return "expected-fail";
    case Status::unexpected_pass: return "unexpected-pass";
  }
  return "?";
}

inline constexpr double kGateTolerance = 1e-9;
inline constexpr double kNonzeroSector = 1e-6;
inline constexpr double kNegativeControlThreshold = 1e-2;
inline constexpr double kNegativeControlFraction = 0.6;
inline constexpr double kResidualFloor = 1e-30;

/// Hypotheses re-derived from the numbers at one point. Derivative
/// quantities are compared against |Riem|^(w/2), the curvature scale of the
/// same weight, so the gates are invariant under g -> c^2 g.
struct Hypotheses {
  double curvature_scale = 0.0;  // |Riem|
  bool einstein = false, ricci_flat = false, conformally_flat = false;
  bool harmonic_weyl = false, parallel_weyl = false;
  std::array<bool, 2> half_harmonic{}, parallel_sector{}, nonzero_sector{};
  double einstein_constant = 0.0;

  bool half_harmonic_in(Sector s) const { return half_harmonic[s == Sector::plus ? 0 : 1]; }
  bool parallel_in(Sector s) const { return parallel_sector[s == Sector::plus ? 0 : 1]; }
  bool nonzero_in(Sector s) const { return nonzero_sector[s == Sector::plus ? 0 : 1]; }
};

inline Tensor weyl_divergence(const Tensor& dw) { return einsum("tijkt->ijk", dw); }

inline Hypotheses measure_hypotheses(const CurvaturePoint& cp) {
  Hypotheses h;
  const double k = norm(cp.riem);
  const double k32 = std::pow(k, 1.5);
  h.curvature_scale = k;
  h.einstein_constant = cp.scalar / 4.0;
  h.einstein = norm(trace_free_ricci(cp.ric, cp.scalar)) <= kGateTolerance * k;
  h.ricci_flat = norm(cp.ric) <= kGateTolerance * k;
  h.conformally_flat = norm(cp.weyl) <= kGateTolerance * k;
  const Tensor& dw = cp.dw(1);
  h.harmonic_weyl = norm(weyl_divergence(dw)) <= kGateTolerance * std::max(norm(dw), k32);
  h.parallel_weyl = norm(dw) <= kGateTolerance * k32;
  for (Sector s : {Sector::plus, Sector::minus}) {
    const int i = s == Sector::plus ? 0 : 1;
    const Tensor ds = cp.dw_sector(1, s);
    const Tensor& ws = s == Sector::plus ? cp.w_plus : cp.w_minus;
    h.half_harmonic[i] = norm(weyl_divergence(ds)) <= kGateTolerance * std::max(norm(ds), k32);
    h.parallel_sector[i] = norm(ds) <= kGateTolerance * k32;
    h.nonzero_sector[i] = norm(ws) > kNonzeroSector * k;
  }
  return h;
}

/// Declared chart properties that the measurement contradicts.
inline std::vector<std::string> declaration_mismatches(const DeclaredProperties& d, const Hypotheses& h) {
  std::vector<std::string> out;
  if (d.einstein) {
    if (!h.einstein)
      out.push_back("einstein");
    else if (std::abs(*d.einstein - h.einstein_constant) > kGateTolerance * std::max(h.curvature_scale, 1.0))
      out.push_back("einstein-constant");
  }
  if (d.ricci_flat && !h.ricci_flat) out.push_back("ricci_flat");
  if (d.harmonic_weyl && !h.harmonic_weyl) out.push_back("harmonic_weyl");
  if (d.parallel_weyl && !h.parallel_weyl) out.push_back("parallel_weyl");
  if (d.conformally_flat && !h.conformally_flat) out.push_back("conformally_flat");
  if (d.negative_control && (h.einstein || h.harmonic_weyl)) out.push_back("negative_control");
  return out;
}

struct Identity {
  std::string id;
  std::vector<std::string> anchors;  // label names in the source text
  Gate gate = Gate::any;
  std::optional<Sector> sector;
  int depth = 0;             // highest nabla^k W used
  int laplacian_level = -1;  // highest k with Laplacian of |nabla^k W|^2 used
  int weight = 2;            // homogeneity in inverse length
  bool negative_control = false;
  double negative_threshold = kNegativeControlThreshold;  // rel above this counts as the expected failure
  std::string summary;
  std::function<Residual(const CurvaturePoint&)> check;

  bool in_scope() const { return gate != Gate::out_of_scope; }
  int jet_order() const { return in_scope() ? required_jet_order(depth, laplacian_level) : 0; }
  double default_tolerance() const {
    if (depth == 0 && laplacian_level < 0) return 1e-12;
    return jet_order() <= 4 ? 1e-8 : 1e-6;
  }
  std::string gate_label() const {
    const std::string s = sector ? (*sector == Sector::plus ? "+" : "-") : "";
    switch (gate) {
      case Gate::any: return "[any,4D]";
      case Gate::harmonic_weyl: return "[harmonic-Weyl,4D]";
      case Gate::half_harmonic: return "[harmonic-W" + s + ",4D]";
      case Gate::einstein: return "[Einstein,4D]";
      case Gate::parallel_sector: return "[Einstein,parallel-W" + s + "]";
      case Gate::out_of_scope: return "out-of-scope(global)";
    }
    return "";
  }
  bool applicable(const Hypotheses& h) const {
    switch (gate) {
      case Gate::any: return true;
      case Gate::harmonic_weyl: return h.harmonic_weyl;
      case Gate::half_harmonic: return h.half_harmonic_in(*sector);
      case Gate::einstein: return h.einstein;
      case Gate::parallel_sector: return h.einstein && h.parallel_in(*sector) && h.nonzero_in(*sector);
      case Gate::out_of_scope: return false;
    }
    return false;
  }
};

struct Evaluation {
  Residual residual;
  double rel = 0.0;
  Status status = Status::not_applicable;
};

/// Negative controls are evaluated regardless of the gate and are expected
/// to fail by more than kNegativeControlThreshold.
inline Evaluation evaluate(const Identity& id, const CurvaturePoint& cp, const Hypotheses& h, bool negative_chart,
                           double tolerance) {
  Evaluation e;
  const bool control = negative_chart && id.negative_control;
  if (!control && !id.applicable(h)) return e;
  e.residual = id.check(cp);
  e.rel = e.residual.rel(kResidualFloor);
  if (control)
    e.status = e.rel > id.negative_threshold ? Status::expected_fail : Status::unexpected_pass;
  else
    e.status = e.rel <= tolerance ? Status::pass : Status::fail;
  if (!std::isfinite(e.rel) || !std::isfinite(e.residual.abs) || !std::isfinite(e.residual.scale)) e.status = Status::fail;
  return e;
}

namespace idcheck {

inline const Tensor& delta() {
  static const Tensor d = kronecker();
  return d;
}

/// Raise the scale to the curvature scale of the identity's weight so that
/// "0 = 0" at flat-derivative points is not dominated by roundoff.
inline Residual floored(Residual r, const CurvaturePoint& cp, int weight) {
  r.scale = std::max(r.scale, std::pow(norm(cp.riem), 0.5 * weight));
  return r;
}

inline const Tensor& sector_w(const CurvaturePoint& cp, std::optional<Sector> s) {
  if (!s) return cp.weyl;
  return *s == Sector::plus ? cp.w_plus : cp.w_minus;
}

inline Tensor sector_dw(const CurvaturePoint& cp, int k, std::optional<Sector> s) {
  return s ? cp.dw_sector(k, *s) : cp.dw(k);
}

inline double cubic_gradient(const Tensor& w, const Tensor& dw) {
  return einsum_scalar("ijkl,ijpqt,klpqt->", w, dw, dw);
}

inline Residual bianchi1(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor b = einsum("itjk->ijkt", w), c = einsum("iktj->ijkt", w);
  return floored(residual({{1, w}, {1, b}, {1, c}}), cp, 2);
}

inline Residual weyl_traces(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const double abs = norm(einsum("ijil->jl", w)) + norm(einsum("ijkj->ik", w)) + norm(einsum("iikl->kl", w));
  return floored({abs, norm(w)}, cp, 2);
}

inline Residual riemann_einstein(const CurvaturePoint& cp) {
  const Tensor gg = einsum("ik,jt->ijkt", delta(), delta()) - einsum("it,jk->ijkt", delta(), delta());
  return floored(residual({{1, cp.riem}, {-1, cp.weyl}, {-cp.scalar / 12.0, gg}}), cp, 2);
}

inline Residual frame_reconstruction_check(const CurvaturePoint& cp, Sector s) {
  const Tensor& w = sector_w(cp, s);
  const auto seeds = seed_forms(s, cp.orientation);
  const auto f = derdzinski_frame(operator_block(w, seeds, seeds), s, cp.orientation);
  return floored(frame_reconstruction(w, f), cp, 2);
}

inline Residual frame_quaternionic(const CurvaturePoint& cp, Sector s) {
  const Tensor& w = sector_w(cp, s);
  const auto seeds = seed_forms(s, cp.orientation);
  const auto f = derdzinski_frame(operator_block(w, seeds, seeds), s, cp.orientation);
  const double q = quaternionic_violation(f.forms);
  const auto& e = f.eigenvalues;
  const double spread = std::max({std::abs(e[0]) + std::abs(e[1]) + std::abs(e[2]), norm(cp.riem), kResidualFloor});
  return {q + std::abs(e[0] + e[1] + e[2]) / spread, 1.0};
}

inline Residual sector_split(const CurvaturePoint& cp) {
  const int o = cp.orientation;
  const Tensor& w = cp.weyl;
  Residual r = residual({{1, w}, {-1, cp.w_plus}, {-1, cp.w_minus}});
  r.abs += norm(project_sector(cp.w_plus, Sector::minus, o)) + norm(project_sector(cp.w_minus, Sector::plus, o));
  return floored(r, cp, 2);
}

inline Residual operator_blocks(const CurvaturePoint& cp) {
  const auto b = lambda_split(cp.riem, cp.orientation);
  Residual r;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      const Tensor w = elementary_form(i, j);
      const Tensor direct = curvature_operator_apply(cp.riem, w);
      const Tensor blocks = apply_blocks(b, w);
      r.abs = std::max(r.abs, norm(direct - blocks));
      r.scale = std::max(r.scale, norm(direct));
    }
  return floored(r, cp, 2);
}

inline Residual pointwise_gap(const CurvaturePoint& cp, Sector s) {
  const double n = norm_sq(sector_w(cp, s));
  return floored(scalar_residual({6.0 * n, -cp.scalar * cp.scalar}), cp, 4);
}

// Cotton tensor

inline Tensor cotton(const CurvaturePoint& cp) { return cotton_from_ricci(*cp.nabla_ric, *cp.d_scalar, delta()); }

inline Residual cotton_cross(const CurvaturePoint& cp) {
  const Tensor a = cotton(cp), b = cotton_from_weyl_divergence(cp.dw(1));
  const Tensor c = -2.0 * einsum("tijkt->ijk", cp.dw(1));
  Residual r = residual({{1, a}, {-1, b}});
  r.abs += norm(b - c);
  return floored(r, cp, 3);
}

inline Residual cotton_symmetries(const CurvaturePoint& cp) {
  const Tensor c = cotton(cp);
  Residual r = residual({{1, c}, {1, einsum("ikj->ijk", c)}});
  r.abs += norm(c + einsum("jki->ijk", c) + einsum("kij->ijk", c));
  return floored(r, cp, 3);
}

inline Residual cotton_traces(const CurvaturePoint& cp) {
  const Tensor c = cotton(cp);
  const double abs = norm(einsum("iik->k", c)) + norm(einsum("iji->j", c)) + norm(einsum("ijj->i", c));
  return floored({abs, norm(c)}, cp, 3);
}

/// C_ijk,i from second derivatives of Ricci.
inline Residual cotton_divergence(const CurvaturePoint& cp) {
  const Tensor& r2 = *cp.nabla2_ric;  // R_ij,kl
  const Tensor d2s = einsum("ppkl->kl", r2);
  const Tensor a = einsum("ijki->jk", r2), b = einsum("ikji->jk", r2);
  const Tensor c = (1.0 / 6.0) * d2s, d = (1.0 / 6.0) * einsum("kj->jk", d2s);
  return floored(residual({{1, a}, {-1, b}, {-1, c}, {1, d}}), cp, 4);
}

inline Residual cotton_vanishes(const CurvaturePoint& cp) {
  const Tensor c = cotton(cp);
  return floored({norm(c), norm(*cp.nabla_ric)}, cp, 3);
}

inline Residual harmonic_curvature(const CurvaturePoint& cp) {
  const Tensor dw = einsum("tijkt->ijk", cp.dw(1)), dr = einsum("tijkt->ijk", *cp.nabla_riem);
  return floored({norm(dw) + norm(dr), std::max(norm(cp.dw(1)), norm(*cp.nabla_riem))}, cp, 3);
}

// First derivatives

/// W_ijkt,l + W_ijlk,t + W_ijtl,k = 1/2 (C_itl d_jk + C_ilk d_jt + C_ikt d_jl - C_jtl d_ik - C_jlk d_it - C_jkt d_il).
inline Residual second_bianchi_cotton(const CurvaturePoint& cp) {
  const Tensor& d = cp.dw(1);
  const Tensor c = cotton(cp);
  const Tensor& g = delta();
  const Tensor a1 = d, a2 = einsum("ijlkt->ijktl", d), a3 = einsum("ijtlk->ijktl", d);
  const Tensor c1 = einsum("itl,jk->ijktl", c, g), c2 = einsum("ilk,jt->ijktl", c, g), c3 = einsum("ikt,jl->ijktl", c, g);
  const Tensor c4 = einsum("jtl,ik->ijktl", c, g), c5 = einsum("jlk,it->ijktl", c, g), c6 = einsum("jkt,il->ijktl", c, g);
  return floored(residual({{1, a1}, {1, a2}, {1, a3}, {-0.5, c1}, {-0.5, c2}, {-0.5, c3}, {0.5, c4}, {0.5, c5}, {0.5, c6}}),
                 cp, 3);
}

/// W_klij,m + W_klmi,j + W_kljm,i = 0.
inline Residual second_bianchi_harmonic(const CurvaturePoint& cp) {
  const Tensor& d = cp.dw(1);
  const Tensor a = d, b = einsum("klmij->klijm", d), c = einsum("kljmi->klijm", d);
  return floored(residual({{1, a}, {1, b}, {1, c}}), cp, 3);
}

inline Residual grad_norm(const CurvaturePoint& cp, bool reduced) {
  const Tensor& d = cp.dw(1);
  const double lhs = einsum_scalar("ijklt,ijktl->", d, d);
  const double half = 0.5 * norm_sq(d);
  const double div = norm_sq(weyl_divergence(d));
  if (reduced) return floored(scalar_residual({lhs, -half}), cp, 6);
  return floored(scalar_residual({lhs, -half, div}), cp, 6);
}

// Commutation of covariant derivatives

/// Right side sum_r W_rjkl R_rist + ... with (s, t) the commuted pair, output ijklst.
inline std::array<Tensor, 4> weyl_slot_terms(const Tensor& w, const Tensor& r) {
  return {einsum("rjkl,rist->ijklst", w, r), einsum("irkl,rjst->ijklst", w, r), einsum("ijrl,rkst->ijklst", w, r),
          einsum("ijkr,rlst->ijklst", w, r)};
}

inline Tensor commutator2(const Tensor& d2) { return d2 - einsum("ijklts->ijklst", d2); }

inline Residual commutation2_riemann(const CurvaturePoint& cp) {
  const auto t = weyl_slot_terms(cp.weyl, cp.riem);
  const Tensor lhs = commutator2(cp.dw(2));
  return floored(residual({{1, lhs}, {-1, t[0]}, {-1, t[1]}, {-1, t[2]}, {-1, t[3]}}), cp, 4);
}

/// The Weyl plus Ricci form of the second commutator in dimension four.
inline Residual commutation2_weyl(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor& ric = cp.ric;
  const Tensor& g = delta();
  const auto t = weyl_slot_terms(w, w);
  const Tensor lhs = commutator2(cp.dw(2));
  // Ricci bracket of each slot: X_rs d_at - X_rt d_as + X_at d_rs - X_as d_rt, contracted with W on slot a -> r.
  const Tensor rb = einsum("rs,it->rist", ric, g) - einsum("rt,is->rist", ric, g) + einsum("it,rs->rist", ric, g) -
                    einsum("is,rt->rist", ric, g);
  const Tensor gb = einsum("rs,it->rist", g, g) - einsum("rt,is->rist", g, g);
  const auto ricci = weyl_slot_terms(w, rb);
  const auto metric = weyl_slot_terms(w, gb);
  Tensor rsum = ricci[0] + ricci[1] + ricci[2] + ricci[3];
  Tensor gsum = metric[0] + metric[1] + metric[2] + metric[3];
  return floored(residual({{1, lhs}, {-1, t[0]}, {-1, t[1]}, {-1, t[2]}, {-1, t[3]}, {-0.5, rsum},
                           {cp.scalar / 6.0, gsum}}),
                 cp, 4);
}

/// Einstein form with R/12.
inline Residual commutation2_einstein(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor& g = delta();
  const auto t = weyl_slot_terms(w, w);
  const Tensor lhs = commutator2(cp.dw(2));
  const Tensor e = einsum("sjkl,it->ijklst", w, g) - einsum("tjkl,is->ijklst", w, g) + einsum("iskl,jt->ijklst", w, g) -
                   einsum("itkl,js->ijklst", w, g) + einsum("ijsl,kt->ijklst", w, g) - einsum("ijtl,ks->ijklst", w, g) +
                   einsum("ijks,lt->ijklst", w, g) - einsum("ijkt,ls->ijklst", w, g);
  return floored(residual({{1, lhs}, {-1, t[0]}, {-1, t[1]}, {-1, t[2]}, {-1, t[3]}, {-cp.scalar / 12.0, e}}), cp, 4);
}

/// W_ijkl,si = W_irkl W_rjsi + W_ijrl W_rksi + W_ijkr W_rlsi + R/4 W_sjkl.
inline Residual commutation2_contracted(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor lhs = einsum("ijklsi->jkls", cp.dw(2));
  const Tensor a = einsum("irkl,rjsi->jkls", w, w), b = einsum("ijrl,rksi->jkls", w, w),
               c = einsum("ijkr,rlsi->jkls", w, w), d = einsum("sjkl->jkls", w);
  return floored(residual({{1, lhs}, {-1, a}, {-1, b}, {-1, c}, {-cp.scalar / 4.0, d}}), cp, 4);
}

/// W_ijkl,trs - W_ijkl,tsr against the five Riemann terms.
inline Residual commutation3_riemann(const CurvaturePoint& cp) {
  const Tensor& d3 = cp.dw(3);
  const Tensor& d1 = cp.dw(1);
  const Tensor& r = cp.riem;
  const Tensor lhs = d3 - einsum("ijkltsr->ijkltrs", d3);
  const Tensor a = einsum("vjklt,virs->ijkltrs", d1, r), b = einsum("ivklt,vjrs->ijkltrs", d1, r),
               c = einsum("ijvlt,vkrs->ijkltrs", d1, r), d = einsum("ijkvt,vlrs->ijkltrs", d1, r),
               e = einsum("ijklv,vtrs->ijkltrs", d1, r);
  return floored(residual({{1, lhs}, {-1, a}, {-1, b}, {-1, c}, {-1, d}, {-1, e}}), cp, 5);
}

/// General k-th order commutator, built from index strings.
inline Residual commutation_k(const CurvaturePoint& cp, int k) {
  const Tensor& dk = cp.dw(k);
  const Tensor& lower = cp.dw(k - 2);
  const Tensor& r = cp.riem;
  const std::string w4 = "abcd";
  std::string idx;  // derivative letters i_1 .. i_k
  for (int h = 0; h < k; ++h) idx += static_cast<char>('e' + h);
  const std::string out = w4 + idx;
  const char x = idx[static_cast<std::size_t>(k - 2)], y = idx[static_cast<std::size_t>(k - 1)];
  std::string swapped = out;
  std::swap(swapped[swapped.size() - 1], swapped[swapped.size() - 2]);
  const Tensor lhs = dk - einsum(swapped + "->" + out, dk);
  const std::string head = idx.substr(0, static_cast<std::size_t>(k - 2));
  std::vector<Tensor> terms;
  for (int slot = 0; slot < 4; ++slot) {
    std::string ws = w4;
    ws[static_cast<std::size_t>(slot)] = 'p';
    const std::string rs = std::string("p") + w4[static_cast<std::size_t>(slot)] + x + y;
    terms.push_back(einsum(ws + head + "," + rs + "->" + out, lower, r));
  }
  for (int h = 0; h < k - 2; ++h) {
    std::string hs = head;
    hs[static_cast<std::size_t>(h)] = 'p';
    const std::string rs = std::string("p") + head[static_cast<std::size_t>(h)] + x + y;
    terms.push_back(einsum(w4 + hs + "," + rs + "->" + out, lower, r));
  }
  Residual res;
  Tensor sum = lhs;
  res.scale = norm(lhs);
  for (const Tensor& t : terms) {
    sum -= t;
    res.scale = std::max(res.scale, norm(t));
  }
  res.abs = norm(sum);
  return floored(res, cp, k + 2);
}

/// W_klmi,jm - W_klmi,mj in terms of curvature, output klij.
inline Residual commutation_firstterm(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor& ric = cp.ric;
  const Tensor& d2 = cp.dw(2);
  const Tensor& g = delta();
  const Tensor lhs = einsum("klmijm->klij", d2) - einsum("klmimj->klij", d2);
  const Tensor a = einsum("rlmi,rkmj->klij", w, w), b = einsum("rkmi,rlmj->klij", w, w),
               c = einsum("mirj,mrlk->klij", w, w), d = einsum("rj,irkl->klij", ric, w);
  const Tensor e = einsum("im,mjkl->klij", ric, w) + einsum("lm,mikj->klij", ric, w) + einsum("km,mijl->klij", ric, w);
  const Tensor f = einsum("rm,mirl,kj->klij", ric, w, g) + einsum("rm,mikr,lj->klij", ric, w, g) +
                   einsum("rm,mrkl,ij->klij", ric, w, g);
  return floored(residual({{1, lhs}, {1, a}, {-1, b}, {1, c}, {1, d}, {-0.5, e}, {0.5, f}}), cp, 4);
}

// Laplacian of W and the first Bochner formula

inline Tensor laplacian_w(const CurvaturePoint& cp) { return einsum("ijkltt->ijkl", cp.dw(2)); }

/// -2 (W_ipjq W_pqkl - W_ipql W_jpqk + W_ipqk W_jpql).
inline Tensor quadratic_w(const Tensor& w) {
  return -2.0 * (einsum("ipjq,pqkl->ijkl", w, w) - einsum("ipql,jpqk->ijkl", w, w) + einsum("ipqk,jpql->ijkl", w, w));
}

inline Residual laplacian_harmonic(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor& ric = cp.ric;
  const Tensor& g = delta();
  const Tensor lhs = laplacian_w(cp);
  const Tensor a = einsum("ip,pjkl->ijkl", ric, w) - einsum("jp,pikl->ijkl", ric, w);
  const Tensor q = quadratic_w(w);
  const Tensor b = einsum("jp,pikl->ijkl", ric, w) - einsum("ip,pjkl->ijkl", ric, w) +
                   einsum("lp,pjki->ijkl", ric, w) - einsum("lp,pikj->ijkl", ric, w) -
                   einsum("kp,pjli->ijkl", ric, w) + einsum("kp,pilj->ijkl", ric, w);
  const Tensor c = einsum("pq,piql,kj->ijkl", ric, w, g) - einsum("pq,pjql,ki->ijkl", ric, w, g) +
                   einsum("pq,pikq,lj->ijkl", ric, w, g) - einsum("pq,pjkq,li->ijkl", ric, w, g);
  return floored(residual({{1, lhs}, {-1, a}, {-1, q}, {-0.5, b}, {-0.5, c}}), cp, 4);
}

/// Delta W = R/2 W - 2 (W_ipjq W_pqkl - W_ipql W_jpqk + W_ipqk W_jpql).
inline Residual laplacian_four(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor lhs = laplacian_w(cp);
  const Tensor q = quadratic_w(w);
  return floored(residual({{1, lhs}, {-0.5 * cp.scalar, w}, {-1, q}}), cp, 4);
}

/// Delta W = R/2 W - W_ijpq W_klpq - 2 (W_ipkq W_jplq - W_iplq W_jpkq).
inline Residual laplacian_four_rewritten(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const Tensor lhs = laplacian_w(cp);
  const Tensor a = einsum("ijpq,klpq->ijkl", w, w), b = einsum("ipkq,jplq->ijkl", w, w),
               c = einsum("iplq,jpkq->ijkl", w, w);
  return floored(residual({{1, lhs}, {-0.5 * cp.scalar, w}, {1, a}, {2, b}, {-2, c}}), cp, 4);
}

/// -W_klij,mm - (W_klmi,jm - W_klmi,mj) + (W_mjkl,im - W_mjkl,mi) = 0.
inline Residual laplacian_step(const CurvaturePoint& cp) {
  const Tensor& d2 = cp.dw(2);
  const Tensor a = einsum("klijmm->klij", d2);
  const Tensor b = einsum("klmijm->klij", d2) - einsum("klmimj->klij", d2);
  const Tensor c = einsum("mjklim->klij", d2) - einsum("mjklmi->klij", d2);
  return floored(residual({{-1, a}, {-1, b}, {1, c}}), cp, 4);
}

inline Residual bochner1_general(const CurvaturePoint& cp) {
  const Tensor& w = cp.weyl;
  const double lhs = 0.5 * cp.laplacian_norm_sq(0);
  const double grad = norm_sq(cp.dw(1));
  const double ricci = 2.0 * einsum_scalar("pq,pikl,qikl->", cp.ric, w, w);
  const double cubic = -2.0 * (2.0 * einsum_scalar("ijkl,ipkq,jplq->", w, w, w) + 0.5 * cubic_wwx(w));
  return floored(scalar_residual({lhs, -grad, -ricci, -cubic}), cp, 6);
}

inline Residual bochner1_four(const CurvaturePoint& cp, std::optional<Sector> s) {
  const Tensor& w = sector_w(cp, s);
  const double lhs = 0.5 * (s ? cp.laplacian_sector_norm_sq(0, *s) : cp.laplacian_norm_sq(0));
  const double grad = norm_sq(sector_dw(cp, 1, s));
  return floored(scalar_residual({lhs, -grad, -0.5 * cp.scalar * norm_sq(w), 3.0 * cubic_wwx(w)}), cp, 6);
}

// Cubic terms in the gradient

/// W_ijkl W_jpqt,k W_ipqt,l = -1/2 W_ijkl W_ijpq,t W_klpq,t.
inline Residual key1(const CurvaturePoint& cp, std::optional<Sector> s) {
  const Tensor& w = sector_w(cp, s);
  const Tensor d = sector_dw(cp, 1, s);
  const double lhs = einsum_scalar("ijkl,jpqtk,ipqtl->", w, d, d);
  return floored(scalar_residual({lhs, 0.5 * cubic_gradient(w, d)}), cp, 8);
}

/// W_ijkl W_ipkq,t W_jplq,t = 1/2 W_ijkl W_ijpq,t W_klpq,t.
inline Residual key2(const CurvaturePoint& cp, std::optional<Sector> s) {
  const Tensor& w = sector_w(cp, s);
  const Tensor d = sector_dw(cp, 1, s);
  const double lhs = einsum_scalar("ijkl,ipkqt,jplqt->", w, d, d);
  return floored(scalar_residual({lhs, -0.5 * cubic_gradient(w, d)}), cp, 8);
}

/// W^s_ijkl W^o_jpqt,k W^o_ipqt,l = 0 for opposite sectors s, o.
inline Residual mixed(const CurvaturePoint& cp, Sector s) {
  const Sector o = s == Sector::plus ? Sector::minus : Sector::plus;
  const Tensor& w = sector_w(cp, s);
  const Tensor d = cp.dw_sector(1, o);
  const double v = einsum_scalar("ijkl,jpqtk,ipqtl->", w, d, d);
  return floored({std::abs(v), norm(w) * norm_sq(d)}, cp, 8);
}

inline Residual additivity_cubic(const CurvaturePoint& cp) {
  const double full = cubic_gradient(cp.weyl, cp.dw(1));
  const double p = cubic_gradient(cp.w_plus, cp.dw_sector(1, Sector::plus));
  const double m = cubic_gradient(cp.w_minus, cp.dw_sector(1, Sector::minus));
  const double n = norm_sq(cp.dw(1)) - norm_sq(cp.dw_sector(1, Sector::plus)) - norm_sq(cp.dw_sector(1, Sector::minus));
  Residual r = scalar_residual({full, -p, -m});
  r.abs += std::abs(n) * norm(cp.weyl);
  r.scale = std::max(r.scale, norm_sq(cp.dw(1)) * norm(cp.weyl));
  return floored(r, cp, 8);
}

// Eigenframe calculus

inline EigenframeDerivatives frame_derivatives(const CurvaturePoint& cp, Sector s) {
  return extract_frame_derivatives(cp, s);
}

inline Residual derder(const CurvaturePoint& cp, Sector s) {
  const auto ed = frame_derivatives(cp, s);
  return floored({ed.reconstruction_abs + 16.0 * ed.consistency_gap, ed.scale}, cp, 3);
}

inline Residual nqder(const CurvaturePoint& cp, Sector s) {
  return floored(norm_expansion(cp.dw_sector(1, s), frame_derivatives(cp, s)), cp, 6);
}

inline Residual eqrhs(const CurvaturePoint& cp, Sector s) {
  return floored(cubic_contraction(sector_w(cp, s), cp.dw_sector(1, s), frame_derivatives(cp, s)), cp, 8);
}

inline Residual divz(const CurvaturePoint& cp, Sector s) {
  Residual out;
  for (const auto& r : div_free_relations(frame_derivatives(cp, s))) {
    out.abs += r.abs;
    out.scale = std::max(out.scale, r.scale);
  }
  return floored(out, cp, 3);
}

inline Residual eigen_trace(const CurvaturePoint& cp, Sector s) {
  return floored(trace_relation(frame_derivatives(cp, s)), cp, 3);
}

// Second-order Bochner formulas

/// <nabla^k W, nabla Delta nabla^(k-1) W>; the sector part pairs with the full tensor since star is parallel.
inline double gradient_laplacian_pairing(const CurvaturePoint& cp, const Tensor& dk, int k) {
  return dot(dk, cp.grad_laplacian(k));
}

/// 8 W_{abc i0, I ik} W_{abc j0, I jk} R_{j0 i0 ik jk} + 2 sum_h W_{.., .. ih .. ik} W_{.., .. jh .. jk} R_{jh ih ik jk}.
inline std::array<double, 2> rough_curvature_terms(const Tensor& dk, const Tensor& r, int k) {
  std::string idx;
  for (int h = 0; h < k; ++h) idx += static_cast<char>('e' + h);
  const char ik = idx.back();
  const std::string mid = idx.substr(0, static_cast<std::size_t>(k - 1));
  const double first = einsum_scalar("abcx" + idx + ",abcy" + mid + "z,yx" + ik + "z->", dk, dk, r);
  double sum = 0.0;
  for (int h = 0; h < k - 1; ++h) {
    std::string m = mid;
    m[static_cast<std::size_t>(h)] = 'y';
    const std::string rs = std::string("y") + mid[static_cast<std::size_t>(h)] + ik + "z";
    sum += einsum_scalar("abcd" + idx + ",abcd" + m + "z," + rs + "->", dk, dk, r);
  }
  return {8.0 * first, 2.0 * sum};
}

/// 1/2 Delta|nabla^k W|^2 = |nabla^(k+1) W|^2 + <nabla^k W, nabla^(k+2) W traced>.
inline Residual rough_laplacian_expansion(const CurvaturePoint& cp, int k) {
  const double lhs = 0.5 * cp.laplacian_norm_sq(k);
  const Tensor& dk = cp.dw(k);
  std::string idx;
  for (int h = 0; h < k; ++h) idx += static_cast<char>('e' + h);
  const double pair = einsum_scalar("abcd" + idx + ",abcd" + idx + "zz->", dk, cp.dw(k + 2));
  return floored(scalar_residual({lhs, -norm_sq(cp.dw(k + 1)), -pair}), cp, 2 * k + 6);
}

/// Rough Bochner formula for nabla^k W (or a sector), Riemann form.
inline Residual rough_bochner(const CurvaturePoint& cp, int k, std::optional<Sector> s) {
  const double lhs = 0.5 * (s ? cp.laplacian_sector_norm_sq(k, *s) : cp.laplacian_norm_sq(k));
  const Tensor dk = sector_dw(cp, k, s);
  const Tensor dk1 = sector_dw(cp, k + 1, s);
  const double pair = gradient_laplacian_pairing(cp, dk, k);
  const auto curv = rough_curvature_terms(dk, cp.riem, k);
  return floored(
      scalar_residual({lhs, -norm_sq(dk1), -pair, -0.25 * cp.scalar * norm_sq(dk), -curv[0], -curv[1]}), cp,
      2 * k + 6);
}

/// k = 1 with the Weyl curvature terms in place of Riemann.
inline Residual rough_bochner1_weyl(const CurvaturePoint& cp) {
  const double lhs = 0.5 * cp.laplacian_norm_sq(1);
  const Tensor& d1 = cp.dw(1);
  const double pair = gradient_laplacian_pairing(cp, d1, 1);
  const double c1 = 8.0 * einsum_scalar("ijkls,rjklt,rist->", d1, d1, cp.weyl);
  const double c2 = (2.0 / 3.0) * cp.scalar * einsum_scalar("ijkls,sjkli->", d1, d1);
  return floored(
      scalar_residual({lhs, -norm_sq(cp.dw(2)), -pair, -0.25 * cp.scalar * norm_sq(d1), -c1, -c2}), cp, 8);
}

/// The explicit k = 2 shape: 8 W_ijkl,tr W_pjkl,ts R_pirs + 2 W_ijkl,tr W_ijkl,ps R_ptrs.
inline Residual rough_bochner2_explicit(const CurvaturePoint& cp) {
  const double lhs = 0.5 * cp.laplacian_norm_sq(2);
  const Tensor& d2 = cp.dw(2);
  const double pair = gradient_laplacian_pairing(cp, d2, 2);
  const double c1 = 8.0 * einsum_scalar("ijkltr,pjklts,pirs->", d2, d2, cp.riem);
  const double c2 = 2.0 * einsum_scalar("ijkltr,ijklps,ptrs->", d2, d2, cp.riem);
  return floored(
      scalar_residual({lhs, -norm_sq(cp.dw(3)), -pair, -0.25 * cp.scalar * norm_sq(d2), -c1, -c2}), cp, 10);
}

/// k = 3: 8 W_ijkl,trs W_pjkl,tru R_pisu + 2 W_ijkl,pru W_ijkl,trs R_ptsu + 2 W_ijkl,tpu W_ijkl,trs R_prsu.
inline Residual rough_bochner3_explicit(const CurvaturePoint& cp) {
  const double lhs = 0.5 * cp.laplacian_norm_sq(3);
  const Tensor& d3 = cp.dw(3);
  const double pair = gradient_laplacian_pairing(cp, d3, 3);
  const double c1 = 8.0 * einsum_scalar("ijkltrs,pjkltru,pisu->", d3, d3, cp.riem);
  const double c2 = 2.0 * einsum_scalar("ijklpru,ijkltrs,ptsu->", d3, d3, cp.riem);
  const double c3 = 2.0 * einsum_scalar("ijkltpu,ijkltrs,prsu->", d3, d3, cp.riem);
  return floored(scalar_residual({lhs, -norm_sq(cp.dw(4)), -pair, -0.25 * cp.scalar * norm_sq(d3), -c1, -c2, -c3}),
                 cp, 12);
}

/// 1/2 Delta|nabla W|^2 = |nabla^2 W|^2 + 13/12 R |nabla W|^2 - 10 W_ijkl W_ijpq,t W_klpq,t.
inline Residual second_bochner(const CurvaturePoint& cp) {
  const double lhs = 0.5 * cp.laplacian_norm_sq(1);
  const Tensor& d1 = cp.dw(1);
  return floored(scalar_residual({lhs, -norm_sq(cp.dw(2)), -(13.0 / 12.0) * cp.scalar * norm_sq(d1),
                                  10.0 * cubic_gradient(cp.weyl, d1)}),
                 cp, 8);
}

/// <nabla W, nabla Delta W> = 1/2 R |nabla W|^2 - 6 W_ijkl W_ijpq,t W_klpq,t.
inline Residual paolo(const CurvaturePoint& cp) {
  const Tensor& d1 = cp.dw(1);
  const double pair = gradient_laplacian_pairing(cp, d1, 1);
  return floored(
      scalar_residual({pair, -0.5 * cp.scalar * norm_sq(d1), 6.0 * cubic_gradient(cp.weyl, d1)}), cp, 8);
}

inline std::string sector_suffix(Sector s) { return s == Sector::plus ? "sector-plus" : "sector-minus"; }

}  // namespace idcheck

/// All identities, in listing order.
inline const std::vector<Identity>& registry() {
  static const std::vector<Identity> reg = [] {
    using namespace idcheck;
    std::vector<Identity> r;
    auto add = [&](std::string id, std::vector<std::string> anchors, Gate gate, int depth, int lap, int weight,
                   std::string summary, std::function<Residual(const CurvaturePoint&)> fn,
                   std::optional<Sector> sector = std::nullopt, bool negative = false) {
      Identity e;
      e.id = std::move(id);
      e.anchors = std::move(anchors);
      e.gate = gate;
      e.sector = sector;
      e.depth = depth;
      e.laplacian_level = lap;
      e.weight = weight;
      e.summary = std::move(summary);
      e.check = std::move(fn);
      e.negative_control = negative;
      r.push_back(std::move(e));
    };
    auto global = [&](std::string id, std::vector<std::string> anchors, std::string summary) {
      Identity e;
      e.id = std::move(id);
      e.anchors = std::move(anchors);
      e.gate = Gate::out_of_scope;
      e.summary = std::move(summary);
      r.push_back(std::move(e));
    };
    const Sector P = Sector::plus, M = Sector::minus;

    // Algebra of W
    add("bianchi1.weyl", {"sec3"}, Gate::any, 0, -1, 2, "cyclic sum W_ijkt + W_itjk + W_iktj", bianchi1);
    add("weyl.trace-free", {"Weyl"}, Gate::any, 0, -1, 2, "all traces of W vanish", weyl_traces);
    add("riemann.einstein", {"RiemannEinstein"}, Gate::einstein, 0, -1, 2, "Riem = W + R/12 (g g - g g)",
        riemann_einstein);
    add("operator.blocks", {"conv"}, Gate::any, 0, -1, 2, "block form of the curvature operator on two-forms",
        operator_blocks);
    add("split.sectors", {"dec"}, Gate::any, 0, -1, 2, "W = W+ + W-, each in its eigenspace of the star",
        sector_split);
    for (Sector s : {P, M}) {
      add("frame.reconstruction." + sector_suffix(s), {"eq-derw"}, Gate::any, 0, -1, 2,
          "W+- = 1/2 sum l_a s_a (x) s_a in the eigenframe", [s](const CurvaturePoint& cp) {
            return frame_reconstruction_check(cp, s);
          }, s);
      add("frame.quaternionic." + sector_suffix(s), {"eq-derw"}, Gate::any, 0, -1, 0,
          "quaternionic table of the eigenframe and l + m + n = 0",
          [s](const CurvaturePoint& cp) { return frame_quaternionic(cp, s); }, s);
    }
    add("wwmetric.full", {"WeylWeylMetric"}, Gate::any, 0, -1, 4, "W_ijkt W_ijkl = |W|^2/4 g_tl",
        [](const CurvaturePoint& cp) { return floored(weyl_weyl_metric(cp.weyl), cp, 4); });
    add("www.full", {"WWW"}, Gate::any, 0, -1, 6, "W_ijkl W_ipkq W_jplq = 1/2 W_ijkl W_ijpq W_klpq",
        [](const CurvaturePoint& cp) { return floored(weyl_cubic(cp.weyl), cp, 6); });
    for (Sector s : {P, M}) {
      add("wwmetric." + sector_suffix(s), {"WeylWeylMetric"}, Gate::any, 0, -1, 4, "quadratic identity for one sector",
          [s](const CurvaturePoint& cp) { return floored(weyl_weyl_metric(sector_w(cp, s)), cp, 4); }, s);
      add("www." + sector_suffix(s), {"WWW"}, Gate::any, 0, -1, 6, "cubic identity for one sector",
          [s](const CurvaturePoint& cp) { return floored(weyl_cubic(sector_w(cp, s)), cp, 6); }, s);
      add("quartic." + sector_suffix(s), {"lem-quart"}, Gate::any, 0, -1, 8, "Q = |W+-|^4 / 4",
          [s](const CurvaturePoint& cp) { return floored(weyl_quartic(sector_w(cp, s)), cp, 8); }, s);
      add("gap." + sector_suffix(s), {"lem-quart", "teo-gapsa"}, Gate::parallel_sector, 1, -1, 4,
          "6 |W+-|^2 = R^2 where nabla W+- = 0", [s](const CurvaturePoint& cp) { return pointwise_gap(cp, s); }, s);
    }

    // Cotton tensor and divergences
    add("cotton.cross-definition", {"def_Cotton_comp_Weyl", "def_cot"}, Gate::any, 1, -1, 3,
        "Cotton from Ricci equals 2 W_tikj,t = -2 W_tijk,t", cotton_cross);
    add("cotton.symmetries", {"CottonSym"}, Gate::any, 1, -1, 3, "C_ijk = -C_ikj and cyclic sum zero",
        cotton_symmetries);
    add("cotton.traces", {"CottonTraces"}, Gate::any, 1, -1, 3, "all traces of C vanish", cotton_traces);
    add("cotton.divergence", {"eq_nulldivcotton"}, Gate::any, 2, -1, 4, "C_ijk,i = 0", cotton_divergence);
    add("cotton.einstein", {"def_cot"}, Gate::einstein, 1, -1, 3, "C = 0 on Einstein metrics", cotton_vanishes,
        std::nullopt, true);
    add("harmonic.einstein", {"harmall"}, Gate::einstein, 1, -1, 3, "W_tijk,t = 0 and R_tijk,t = 0",
        harmonic_curvature);
    add("bianchi2.cotton", {"fake2ndBianchiWeyl", "lemma_fake2ndBianchiWeyl"}, Gate::any, 1, -1, 3,
        "cyclic derivative sum of W equals the Cotton combination", second_bianchi_cotton);
    add("bianchi2.harmonic", {"2ndBIWeyl"}, Gate::harmonic_weyl, 1, -1, 3, "second Bianchi identity for W",
        second_bianchi_harmonic, std::nullopt, true);
    add("gradnorm.general", {"lem_GradWeylNorm"}, Gate::any, 1, -1, 6, "W_ijkl,t W_ijkt,l = |nabla W|^2/2 - |div W|^2",
        [](const CurvaturePoint& cp) { return grad_norm(cp, false); });
    add("gradnorm.harmonic", {"GradWeylNormEinstein"}, Gate::harmonic_weyl, 1, -1, 6,
        "W_ijkl,t W_ijkt,l = |nabla W|^2/2", [](const CurvaturePoint& cp) { return grad_norm(cp, true); },
        std::nullopt, true);
    r.back().negative_threshold = 1e-3;

    // Commutation formulas
    add("commutation2.riemann", {"SecondDerivWeylusingRiem"}, Gate::any, 2, -1, 4,
        "second commutator of W via Riemann", commutation2_riemann);
    add("commutation2.weyl", {"lem-comsec"}, Gate::any, 2, -1, 4, "second commutator via W and Ricci",
        commutation2_weyl);
    add("commutation2.einstein", {"lem-comsec"}, Gate::einstein, 2, -1, 4, "second commutator, Einstein form R/12",
        commutation2_einstein, std::nullopt, true);
    add("commutation2.contracted", {"lem-comsec"}, Gate::einstein, 2, -1, 4, "W_ijkl,si with R/4 W_sjkl",
        commutation2_contracted, std::nullopt, true);
    add("commutation2.firstterm", {"firstterm"}, Gate::any, 2, -1, 4, "W_klmi,jm - W_klmi,mj via W and Ricci",
        commutation_firstterm);
    add("commutation3.riemann", {"ThirdDerivWeylusingRiem"}, Gate::any, 3, -1, 5, "third commutator of W",
        commutation3_riemann);
    add("commutation-k.k3", {"CommutationWeylKorder", "LE_commutationKorderWeyl"}, Gate::any, 3, -1, 5,
        "k-th order commutator, k = 3", [](const CurvaturePoint& cp) { return commutation_k(cp, 3); });
    add("commutation-k.k4", {"CommutationWeylKorder"}, Gate::any, 4, -1, 6, "k-th order commutator, k = 4",
        [](const CurvaturePoint& cp) { return commutation_k(cp, 4); });

    // Eigenframe calculus
    for (Sector s : {P, M}) {
      const std::string x = sector_suffix(s);
      add("derder." + x, {"eq-derder"}, Gate::any, 1, -1, 3, "2 nabla W+- from d(l,m,n) and the one-forms a, b, c",
          [s](const CurvaturePoint& cp) { return derder(cp, s); }, s);
      add("nqder." + x, {"eq-nqder"}, Gate::any, 1, -1, 6, "norm of nabla W+- in the eigenframe",
          [s](const CurvaturePoint& cp) { return nqder(cp, s); }, s);
      add("eqrhs." + x, {"eqrhs"}, Gate::any, 1, -1, 8, "W nabla W nabla W in the eigenframe",
          [s](const CurvaturePoint& cp) { return eqrhs(cp, s); }, s);
      add("eigen-trace." + x, {"lem-key2"}, Gate::any, 1, -1, 3, "dl + dm + dn = 0",
          [s](const CurvaturePoint& cp) { return eigen_trace(cp, s); }, s);
      add("divz." + x, {"eq-divz"}, Gate::half_harmonic, 1, -1, 3, "divergence-free relations in the eigenframe",
          [s](const CurvaturePoint& cp) { return divz(cp, s); }, s, true);
    }

    // Cubic gradient identities
    add("key1.full", {"lem-key1"}, Gate::harmonic_weyl, 1, -1, 8, "W_ijkl W_jpqt,k W_ipqt,l = -1/2 W nabla W nabla W",
        [](const CurvaturePoint& cp) { return key1(cp, std::nullopt); }, std::nullopt, true);
    for (Sector s : {P, M})
      add("key1." + sector_suffix(s), {"lem-key1", "gianni"}, Gate::half_harmonic, 1, -1, 8,
          "first key identity for one sector", [s](const CurvaturePoint& cp) { return key1(cp, s); }, s, true);
    add("key2.full", {"lem-key2"}, Gate::any, 1, -1, 8, "W_ijkl W_ipkq,t W_jplq,t = 1/2 W nabla W nabla W",
        [](const CurvaturePoint& cp) { return key2(cp, std::nullopt); });
    for (Sector s : {P, M})
      add("key2." + sector_suffix(s), {"lem-key2"}, Gate::any, 1, -1, 8, "second key identity for one sector",
          [s](const CurvaturePoint& cp) { return key2(cp, s); }, s);
    add("mix.plus-minus", {"eq-mix"}, Gate::any, 1, -1, 8, "W+ contracted with two nabla W- vanishes",
        [](const CurvaturePoint& cp) { return mixed(cp, Sector::plus); });
    add("mix.minus-plus", {"eq-mix"}, Gate::any, 1, -1, 8, "W- contracted with two nabla W+ vanishes",
        [](const CurvaturePoint& cp) { return mixed(cp, Sector::minus); });
    add("additivity.gradient", {"lem-key1"}, Gate::any, 1, -1, 8, "|nabla W|^2 and W nabla W nabla W split by sector",
        additivity_cubic);

    // First Bochner formula
    add("laplacian.harmonic", {"LaplacianOfHarmonicWeyl"}, Gate::harmonic_weyl, 2, -1, 4,
        "Delta W for harmonic Weyl curvature, Ricci terms included", laplacian_harmonic);
    add("laplacian.step", {"LaplW_eq1"}, Gate::harmonic_weyl, 2, -1, 4, "traced second Bianchi identity",
        laplacian_step);
    add("bochner1.general", {"BWHarmonicWeyl"}, Gate::harmonic_weyl, 2, 0, 6, "1/2 Delta |W|^2 with the Ricci coupling",
        bochner1_general);
    add("bochner1.eq-bw", {"eq-bw"}, Gate::harmonic_weyl, 2, -1, 4, "Delta W = R/2 W + quadratic terms",
        laplacian_four);
    add("bochner1.eq-bw-rewritten", {"lem-paolo", "eq-bw"}, Gate::harmonic_weyl, 2, -1, 4,
        "Delta W = R/2 W - W_ijpq W_klpq - 2 (W_ipkq W_jplq - W_iplq W_jpkq)", laplacian_four_rewritten);
    add("bochner1.nice", {"nice"}, Gate::harmonic_weyl, 2, 0, 6, "1/2 Delta |W|^2 = |nabla W|^2 + R/2 |W|^2 - 3 WWW",
        [](const CurvaturePoint& cp) { return bochner1_four(cp, std::nullopt); });
    for (Sector s : {P, M})
      add("bochner1.niceself." + sector_suffix(s), {"niceself"}, Gate::half_harmonic, 2, 0, 6,
          "first Bochner formula for one sector", [s](const CurvaturePoint& cp) { return bochner1_four(cp, s); }, s);

    // Second-order Bochner formulas
    add("bochner2.delta1", {"Delta1"}, Gate::any, 3, 1, 8, "1/2 Delta |nabla W|^2 = |nabla^2 W|^2 + W_s W_stt",
        [](const CurvaturePoint& cp) { return rough_laplacian_expansion(cp, 1); });
    add("bochner2.pro-boch.riemann", {"pro-boch"}, Gate::einstein, 3, 1, 8, "rough Bochner formula for nabla W",
        [](const CurvaturePoint& cp) { return rough_bochner(cp, 1, std::nullopt); }, std::nullopt, true);
    add("bochner2.pro-boch.weyl", {"pro-boch"}, Gate::einstein, 3, 1, 8, "rough Bochner formula, Weyl form",
        rough_bochner1_weyl, std::nullopt, true);
    for (Sector s : {P, M})
      add("bochner2.pro-boch." + sector_suffix(s), {"pro-boch-k-pm"}, Gate::einstein, 3, 1, 8,
          "rough Bochner formula for nabla W+-", [s](const CurvaturePoint& cp) { return rough_bochner(cp, 1, s); }, s);
    add("bochner2.teo-sbf", {"teo-sbf"}, Gate::einstein, 2, 1, 8,
        "1/2 Delta |nabla W|^2 = |nabla^2 W|^2 + 13/12 R |nabla W|^2 - 10 W nabla W nabla W", second_bochner,
        std::nullopt, true);
    add("bochner2.lem-paolo", {"lem-paolo"}, Gate::harmonic_weyl, 3, -1, 8,
        "<nabla W, nabla Delta W> = R/2 |nabla W|^2 - 6 W nabla W nabla W", paolo);
    add("bochner3.delta1-k2", {"Delta1orderkrough"}, Gate::any, 4, 2, 10,
        "1/2 Delta |nabla^2 W|^2 = |nabla^3 W|^2 + W_st W_stuu",
        [](const CurvaturePoint& cp) { return rough_laplacian_expansion(cp, 2); });
    add("bochner3.pro-boch-k2", {"BochnerBIG", "pro-boch-k"}, Gate::einstein, 4, 2, 10,
        "rough Bochner formula for nabla^2 W, general-k form",
        [](const CurvaturePoint& cp) { return rough_bochner(cp, 2, std::nullopt); });
    add("bochner3.remark-k2", {"pro-boch-k"}, Gate::einstein, 4, 2, 10, "rough Bochner formula for nabla^2 W, explicit form",
        rough_bochner2_explicit);
    for (Sector s : {P, M})
      add("bochner3.pro-boch-k2." + sector_suffix(s), {"BochnerBIGpm", "pro-boch-k-pm"}, Gate::einstein, 4, 2, 10,
          "rough Bochner formula for nabla^2 W+-", [s](const CurvaturePoint& cp) { return rough_bochner(cp, 2, s); }, s);
    add("bochner4.pro-boch-k3", {"BochnerBIG", "pro-boch-k"}, Gate::einstein, 4, 3, 12,
        "rough Bochner formula for nabla^3 W, general-k form",
        [](const CurvaturePoint& cp) { return rough_bochner(cp, 3, std::nullopt); });
    add("bochner4.remark-k3", {"pro-boch-k"}, Gate::einstein, 4, 3, 12,
        "rough Bochner formula for nabla^3 W, explicit form", rough_bochner3_explicit);

    // Global statements, listed for coverage
    global("integral.prop1", {"prop1", "thm-intbochintro", "eq-deltas"},
           "L2 identity for the Hessian, Laplacian and gradient of W on compact Einstein manifolds");
    global("integral.cor-d2", {"cor-d2"}, "integral of the cubic gradient term against the commutator");
    global("integral.pro-imprhess", {"pro-imprhess", "eq-equality"}, "improved integral Hessian estimate");
    global("integral.lem-1", {"lem-1"}, "integral of the squared second commutator");
    global("integral.gap-corollaries", {"pro-imprhess"}, "Poincare type gap and L2 bounds");
    global("integral.teo-idsa", {"teo-idsa", "eq-lapsel"}, "L2 identity for one sector");
    global("integral.teo-gapsa", {"teo-gapsa", "thm-gap"}, "gap inequality for one sector");
    global("integral.lem-quart", {"lem-quart"}, "integral form of the quartic lemma");
    global("integral.final-proposition", {"lem-quart"}, "integral identities with the factor 6|W+-|^2 - R^2");
    global("bochner5.remark-k4", {"pro-boch-k"}, "explicit k = 4 shape; needs nabla^6 W");
    return r;
  }();
  return reg;
}

inline const Identity* find_identity(const std::string& id) {
  for (const auto& e : registry())
    if (e.id == id) return &e;
  return nullptr;
}

inline std::vector<std::string> identity_ids(bool include_out_of_scope = false) {
  std::vector<std::string> out;
  for (const auto& e : registry())
    if (include_out_of_scope || e.in_scope()) out.push_back(e.id);
  return out;
}

}  // namespace weylforge
