#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "weylforge/chart.hpp"
#include "weylforge/derdzinski.hpp"

using namespace weylforge;

namespace {

// Tensors sum_ab M_ab,t s_a (x) s_b (x) e^t with M symmetric and trace free.
std::vector<Tensor> sector_valued_basis(Sector s, int o) {
  const auto seeds = seed_forms(s, o);
  const int pairs[5][2] = {{0, 0}, {1, 1}, {0, 1}, {0, 2}, {1, 2}};
  std::vector<Tensor> basis;
  for (const auto& p : pairs)
    for (int t = 0; t < 4; ++t) {
      Tensor e(1);
      e(t) = 1.0;
      Tensor m(5);
      if (p[0] == p[1]) {
        m += outer(outer(seeds[p[0]], seeds[p[0]]), e);
        m -= outer(outer(seeds[2], seeds[2]), e);
      } else {
        m += outer(outer(seeds[p[0]], seeds[p[1]]), e);
        m += outer(outer(seeds[p[1]], seeds[p[0]]), e);
      }
      basis.push_back(m);
    }
  return basis;
}

Tensor random_combination(const std::vector<Tensor>& basis, const Eigen::MatrixXd& span, std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Eigen::VectorXd c(span.cols());
  for (int i = 0; i < span.cols(); ++i) c(i) = n(rng);
  const Eigen::VectorXd x = span * c;
  Tensor out(5);
  for (std::size_t k = 0; k < basis.size(); ++k) out += x(static_cast<Eigen::Index>(k)) * basis[k];
  return out;
}

// Random nabla W+- with W_ijkl,i = 0, from the kernel of the divergence map.
Tensor random_div_free(Sector s, int o, std::mt19937_64& rng) {
  const auto basis = sector_valued_basis(s, o);
  Eigen::MatrixXd d(64, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t c = 0; c < basis.size(); ++c) {
    const Tensor div = einsum("ijkli->jkl", basis[c]);
    for (int r = 0; r < 64; ++r) d(r, static_cast<Eigen::Index>(c)) = div[static_cast<std::size_t>(r)];
  }
  const Eigen::MatrixXd kernel = Eigen::FullPivLU<Eigen::MatrixXd>(d).kernel();
  EXPECT_EQ(kernel.cols(), 12);
  return random_combination(basis, kernel, rng);
}

Tensor random_sector_valued(Sector s, int o, std::mt19937_64& rng) {
  const auto basis = sector_valued_basis(s, o);
  return random_combination(basis, Eigen::MatrixXd::Identity(20, 20), rng);
}

struct Case {
  Sector sector;
  int orientation;
};
const Case kCases[] = {{Sector::plus, 1}, {Sector::minus, 1}, {Sector::plus, -1}, {Sector::minus, -1}};

}  // namespace

TEST(Derdzinski, FrameIsOrderedAndQuaternionic) {
  std::mt19937_64 rng(11);
  for (const auto& c : kCases) {
    const auto w = random_sector_tensor(rng, c.sector, c.orientation);
    const auto ed = extract_frame_derivatives(w.tensor, random_sector_valued(c.sector, c.orientation, rng), c.sector,
                                              c.orientation);
    const auto& e = ed.frame.eigenvalues;
    EXPECT_LE(e[0], e[1]);
    EXPECT_LE(e[1], e[2]);
    EXPECT_LT(quaternionic_violation(ed.frame.forms), 1e-12);
    EXPECT_LT(frame_reconstruction(w.tensor, ed.frame).rel(), 1e-12);
  }
}

TEST(Derdzinski, CouplingReconstructsGradient) {
  std::mt19937_64 rng(12);
  for (const auto& c : kCases) {
    const auto w = random_sector_tensor(rng, c.sector, c.orientation);
    const Tensor dw = random_sector_valued(c.sector, c.orientation, rng);
    const auto ed = extract_frame_derivatives(w.tensor, dw, c.sector, c.orientation);
    EXPECT_LT(ed.consistency_gap, 1e-12 * ed.scale);
    EXPECT_LT(ed.reconstruction_rel(), 1e-12);
    const auto& e = ed.frame.eigenvalues;
    for (int t = 0; t < 4; ++t) {
      EXPECT_NEAR(ed.coupling[0][1][t], (e[0] - e[1]) * ed.c[t], 1e-12);
      EXPECT_NEAR(ed.coupling[0][2][t], (e[2] - e[0]) * ed.b[t], 1e-12);
      EXPECT_NEAR(ed.coupling[1][2][t], (e[1] - e[2]) * ed.a[t], 1e-12);
    }
  }
}

TEST(Derdzinski, AlgebraicRelationsHoldForAnyGradient) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial)
    for (const auto& c : kCases) {
      const auto w = random_sector_tensor(rng, c.sector, c.orientation);
      const Tensor dw = random_sector_valued(c.sector, c.orientation, rng);
      const auto ed = extract_frame_derivatives(w.tensor, dw, c.sector, c.orientation);
      EXPECT_LT(trace_relation(ed).rel(), 1e-12);
      EXPECT_LT(norm_expansion(dw, ed).rel(), 1e-12);
      EXPECT_LT(cubic_contraction(w.tensor, dw, ed).rel(), 1e-12);
    }
}

TEST(Derdzinski, DivergenceFreeRelationsHoldInTheKernel) {
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 5; ++trial)
    for (const auto& c : kCases) {
      const auto w = random_sector_tensor(rng, c.sector, c.orientation);
      const Tensor dw = random_div_free(c.sector, c.orientation, rng);
      ASSERT_LT(norm(einsum("ijkli->jkl", dw)), 1e-12 * norm(dw));
      const auto ed = extract_frame_derivatives(w.tensor, dw, c.sector, c.orientation);
      for (const auto& r : div_free_relations(ed)) EXPECT_LT(r.rel(), 1e-12);
    }
}

TEST(Derdzinski, DivergenceFreeRelationsFailOffTheKernel) {
  std::mt19937_64 rng(15);
  for (const auto& c : kCases) {
    const auto w = random_sector_tensor(rng, c.sector, c.orientation);
    const Tensor dw = random_sector_valued(c.sector, c.orientation, rng);
    const auto ed = extract_frame_derivatives(w.tensor, dw, c.sector, c.orientation);
    double worst = 0.0;
    for (const auto& r : div_free_relations(ed)) worst = std::max(worst, r.rel());
    EXPECT_GT(worst, 1e-2);
  }
}

TEST(Derdzinski, DegenerateSpectrumKeepsCouplingForm) {
  std::mt19937_64 rng(16);
  const auto seeds = seed_forms(Sector::plus);
  const Tensor w = sector_tensor({-1.0, -1.0, 2.0}, seeds);
  const Tensor dw = random_div_free(Sector::plus, 1, rng);
  const auto ed = extract_frame_derivatives(w, dw, Sector::plus);
  EXPECT_TRUE(ed.degenerate);
  EXPECT_THROW(require_simple_spectrum(ed), DegenerateFrameError);
  EXPECT_LT(norm_expansion(dw, ed).rel(), 1e-12);
  EXPECT_LT(cubic_contraction(w, dw, ed).rel(), 1e-12);
  for (const auto& r : div_free_relations(ed)) EXPECT_LT(r.rel(), 1e-12);
}

TEST(Derdzinski, SchwarzschildSatisfiesDivergenceFreeRelations) {
  const auto chart = schwarzschild();
  const auto cp = curvature_at(chart, {0.3, 4.0, 1.1, 0.7}, 1);
  for (Sector s : {Sector::plus, Sector::minus}) {
    const auto ed = extract_frame_derivatives(cp, s);
    EXPECT_GT(ed.scale, 1e-4);
    EXPECT_LT(ed.reconstruction_rel(), 1e-10);
    for (const auto& r : div_free_relations(ed)) EXPECT_LT(r.rel(), 1e-8);
    EXPECT_LT(norm_expansion(cp.dw_sector(1, s), ed).rel(), 1e-10);
    EXPECT_LT(cubic_contraction(s == Sector::plus ? cp.w_plus : cp.w_minus, cp.dw_sector(1, s), ed).rel(), 1e-10);
  }
}

TEST(Derdzinski, NonHarmonicMetricBreaksDivergenceFreeRelations) {
  const auto chart = generic_polynomial();
  const auto cp = curvature_at(chart, chart.sample_box.center(), 1);
  double worst = 0.0;
  for (Sector s : {Sector::plus, Sector::minus})
    for (const auto& r : div_free_relations(extract_frame_derivatives(cp, s))) worst = std::max(worst, r.rel());
  EXPECT_GT(worst, 1e-2);
}

TEST(Derdzinski, ParallelWeylHasZeroCoupling) {
  const auto cp = curvature_at(cp2_fubini_study(), {0.1, -0.2, 0.3, 0.05}, 1);
  const auto ed = extract_frame_derivatives(cp, Sector::plus);
  EXPECT_LT(ed.scale, 1e-10);
  EXPECT_GT(norm(cp.w_plus), 1.0);
}

TEST(Derdzinski, RejectsWrongRanks) {
  EXPECT_THROW(extract_frame_derivatives(Tensor(4), Tensor(4), Sector::plus), ShapeError);
}
