#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "weylforge/curvature_algebra.hpp"

using namespace weylforge;

namespace {

Tensor random_symmetric(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Tensor s(2);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) s(i, j) = s(j, i) = n(rng);
  return s;
}

Tensor random_two_form(std::mt19937_64& rng) {
  std::normal_distribution<double> n;
  Tensor w(2);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) {
      w(i, j) = n(rng);
      w(j, i) = -w(i, j);
    }
  return w;
}

// Algebraic curvature tensor with prescribed Weyl part and Ricci data.
Tensor random_riemann(std::mt19937_64& rng, Tensor* weyl_out = nullptr) {
  const Tensor w = random_sector_tensor(rng, Sector::plus).tensor + random_sector_tensor(rng, Sector::minus).tensor;
  if (weyl_out) *weyl_out = w;
  const Tensor a = random_symmetric(rng);
  // Riem = W + 1/2 (A o g) with A = Schouten-like symmetric part.
  return w + 0.5 * kulkarni_nomizu(a, kronecker());
}

}  // namespace

TEST(Hodge, InvolutionWithBalancedSpectrum) {
  double trace = 0.0;
  for (int a = 0; a < 4; ++a)
    for (int b = a + 1; b < 4; ++b) {
      const Tensor e = elementary_form(a, b);
      const Tensor ss = hodge_star(hodge_star(e));
      EXPECT_LT(max_abs(ss - e), 1e-15);
      trace += form_dot(hodge_star(e), e) / 2.0;
    }
  // Eigenvalues are +-1, so a zero trace on the 6-dimensional space means multiplicity 3 each.
  EXPECT_EQ(trace, 0.0);
}

TEST(Hodge, SeedFormsAreEigenvectors) {
  for (int orient : {1, -1})
    for (Sector s : {Sector::plus, Sector::minus}) {
      const auto f = seed_forms(s, orient);
      const double sign = (s == Sector::plus) ? 1.0 : -1.0;
      for (int a = 0; a < 3; ++a) {
        EXPECT_LT(max_abs(hodge_star(f[a], orient) - sign * f[a]), 1e-15);
        EXPECT_EQ(form_dot(f[a], f[a]), 4.0);
        for (int b = a + 1; b < 3; ++b) EXPECT_EQ(form_dot(f[a], f[b]), 0.0);
      }
    }
}

TEST(Hodge, PlusSeedTripleNeedsThetaFlip) {
  auto f = seed_forms(Sector::plus);
  EXPECT_LT(max_abs(form_product(f[0], f[1]) + f[2]), 1e-15);
  EXPECT_TRUE(fix_quaternionic_orientation(f));
  EXPECT_LT(quaternionic_violation(f), 1e-15);
}

TEST(RicciWeyl, ConstantCurvatureHasNoWeyl) {
  const Tensor g = kronecker();
  const Tensor riem = 0.5 * kulkarni_nomizu(g, g);  // K = 1
  const RicciWeyl rw = ricci_scalar_weyl(riem, g);
  EXPECT_NEAR(rw.scalar, 12.0, 1e-14);
  EXPECT_LT(max_abs(rw.ric - 3.0 * g), 1e-14);
  EXPECT_LT(max_abs(rw.weyl), 1e-14);
}

TEST(RicciWeyl, RecoversWeylPartAndIsTraceFree) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    Tensor w;
    const Tensor riem = random_riemann(rng, &w);
    const RicciWeyl rw = ricci_scalar_weyl(riem, kronecker());
    EXPECT_LT(max_abs(rw.weyl - w), 1e-12);
    EXPECT_LT(max_abs(einsum("ijil->jl", rw.weyl)), 1e-12 * norm(rw.weyl));
    EXPECT_LT(riemann_symmetry_violation(rw.weyl), 1e-12);
  }
}

TEST(RicciWeyl, NonCurvatureInputRejected) {
  Tensor bad(4);
  bad(0, 1, 2, 3) = 1.0;
  EXPECT_THROW(ricci_scalar_weyl(bad, kronecker()), std::invalid_argument);
}

TEST(RicciWeyl, GeneralMetricMatchesFrameComputation) {
  std::mt19937_64 rng(22);
  const Tensor riem_frame = random_riemann(rng);
  // Coordinates with g = A^T A; components transform with A.
  Tensor a(2);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) a(i, j) = (i == j ? 1.0 : 0.0) + u(rng);
  const Tensor g = einsum("ai,aj->ij", a, a);
  const Tensor riem = einsum("ai,bj,ck,dl,abcd->ijkl", a, a, a, a, riem_frame);
  const RicciWeyl coord = ricci_scalar_weyl(riem, g);
  const RicciWeyl frame = ricci_scalar_weyl(riem_frame, kronecker());
  EXPECT_NEAR(coord.scalar, frame.scalar, 1e-11 * std::abs(frame.scalar) + 1e-12);
  const Tensor back = einsum("ai,bj,ck,dl,abcd->ijkl", a, a, a, a, frame.weyl);
  EXPECT_LT(max_abs(back - coord.weyl), 1e-10 * norm(coord.weyl));
}

TEST(Sectors, ProjectorsSplitWeyl) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_sector_tensor(rng, Sector::plus);
    const auto m = random_sector_tensor(rng, Sector::minus);
    const Tensor w = p.tensor + m.tensor;
    EXPECT_LT(max_abs(project_sector(w, Sector::plus) - p.tensor), 1e-13);
    EXPECT_LT(max_abs(project_sector(w, Sector::minus) - m.tensor), 1e-13);
    EXPECT_LT(max_abs(project_sector(p.tensor, Sector::minus)), 1e-14);
    // Reversed orientation mirrors the split.
    EXPECT_LT(max_abs(project_sector(w, Sector::plus, -1) - m.tensor), 1e-13);
  }
}

TEST(Sectors, OperatorNormIsQuarterTensorNorm) {
  std::mt19937_64 rng(24);
  const auto p = random_sector_tensor(rng, Sector::plus);
  const double lam2 = p.eigenvalues[0] * p.eigenvalues[0] + p.eigenvalues[1] * p.eigenvalues[1] +
                      p.eigenvalues[2] * p.eigenvalues[2];
  EXPECT_NEAR(0.25 * norm_sq(p.tensor), lam2, 1e-13);
  // Eigen-two-forms: W w = l w.
  for (int a = 0; a < 3; ++a)
    EXPECT_LT(max_abs(curvature_operator_apply(p.tensor, p.forms[a]) - p.eigenvalues[a] * p.forms[a]), 1e-13);
}

TEST(LambdaSplit, ConstantCurvatureBlocksVanish) {
  const Tensor g = kronecker();
  const auto b = lambda_split(0.5 * kulkarni_nomizu(g, g));
  EXPECT_LT(mat3_norm(b.w_plus), 1e-14);
  EXPECT_LT(mat3_norm(b.w_minus), 1e-14);
  EXPECT_LT(mat3_norm(b.ric0_block), 1e-14);
  EXPECT_NEAR(b.scalar, 12.0, 1e-13);
}

TEST(LambdaSplit, BlocksAreTraceFreeAndReassemble) {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const Tensor riem = random_riemann(rng);
    const auto b = lambda_split(riem);
    EXPECT_LE(std::abs(mat3_trace(b.w_plus)), 1e-10 * mat3_norm(b.w_plus));
    EXPECT_LE(std::abs(mat3_trace(b.w_minus)), 1e-10 * mat3_norm(b.w_minus));
    EXPECT_GT(mat3_norm(b.ric0_block), 1e-3);
    for (int k = 0; k < 50; ++k) {
      const Tensor w = random_two_form(rng);
      const Tensor direct = curvature_operator_apply(riem, w);
      EXPECT_LE(norm(apply_blocks(b, w) - direct), 1e-10 * norm(direct));
    }
  }
}

TEST(LambdaSplit, EinsteinInputHasNoOffDiagonalBlock) {
  std::mt19937_64 rng(26);
  Tensor w;
  const Tensor riem = random_sector_tensor(rng, Sector::plus).tensor + 0.25 * kulkarni_nomizu(kronecker(), kronecker());
  const auto b = lambda_split(riem);
  EXPECT_LT(mat3_norm(b.ric0_block), 1e-14);
}

TEST(Jacobi, ReconstructsRandomTraceFreeBlocks) {
  std::mt19937_64 rng(27);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 200; ++trial) {
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) m[i][j] = m[j][i] = n(rng);
    const double tr = mat3_trace(m) / 3.0;
    for (int i = 0; i < 3; ++i) m[i][i] -= tr;
    const SymEigen3 e = jacobi_eigen(m);
    EXPECT_LE(e.values[0], e.values[1]);
    EXPECT_LE(e.values[1], e.values[2]);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double r = 0;
        for (int a = 0; a < 3; ++a) r += e.values[a] * e.vectors[i][a] * e.vectors[j][a];
        EXPECT_NEAR(r, m[i][j], 1e-12);
      }
  }
}

TEST(Derdzinski, FrameInvariantsOnRandomBlocks) {
  std::mt19937_64 rng(28);
  for (int trial = 0; trial < 100; ++trial) {
    for (Sector s : {Sector::plus, Sector::minus}) {
      const auto smp = random_sector_tensor(rng, s);
      const auto seeds = seed_forms(s);
      const TwoFormFrame f = derdzinski_frame(operator_block(smp.tensor, seeds, seeds), s);
      const double sum = f.eigenvalues[0] + f.eigenvalues[1] + f.eigenvalues[2];
      EXPECT_LE(std::abs(sum), 1e-10 * (std::abs(f.eigenvalues[0]) + std::abs(f.eigenvalues[1]) + std::abs(f.eigenvalues[2])));
      EXPECT_LT(quaternionic_violation(f.forms), 1e-12);
      EXPECT_LE(frame_reconstruction(smp.tensor, f).rel(), 1e-12);
      for (int a = 0; a < 3; ++a) EXPECT_LT(max_abs(hodge_star(f.forms[a]) - sector_sign(s, 1) * f.forms[a]), 1e-12);
    }
  }
}

TEST(Derdzinski, ZeroBlockIsDegenerateButQuaternionic) {
  const TwoFormFrame f = derdzinski_frame(Mat3{}, Sector::plus);
  EXPECT_TRUE(f.degenerate);
  for (double v : f.eigenvalues) EXPECT_EQ(v, 0.0);
  EXPECT_LT(quaternionic_violation(f.forms), 1e-15);
}

TEST(Derdzinski, KaehlerTypeSpectrumFlaggedDegenerate) {
  Mat3 m{};
  m[0][0] = -1.0;
  m[1][1] = -1.0;
  m[2][2] = 2.0;
  const TwoFormFrame f = derdzinski_frame(m, Sector::plus);
  EXPECT_TRUE(f.degenerate);
  EXPECT_DOUBLE_EQ(f.eigenvalues[2], 2.0);
}

TEST(AlgebraicIdentities, ZeroTensorGivesZeroResiduals) {
  const Tensor w(4);
  EXPECT_EQ(weyl_weyl_metric(w).abs, 0.0);
  EXPECT_EQ(weyl_cubic(w).abs, 0.0);
  EXPECT_EQ(weyl_quartic(w).abs, 0.0);
}

TEST(AlgebraicIdentities, HoldPerSectorAndForSums) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const auto p = random_sector_tensor(rng, Sector::plus);
    const auto m = random_sector_tensor(rng, Sector::minus);
    EXPECT_LE(weyl_weyl_metric(p.tensor).rel(), 1e-12);
    EXPECT_LE(weyl_cubic(p.tensor).rel(), 1e-12);
    EXPECT_LE(weyl_quartic(p.tensor).rel(), 1e-12);
    EXPECT_LE(weyl_quartic(m.tensor).rel(), 1e-12);
    const Tensor w = p.tensor + m.tensor;
    EXPECT_LE(weyl_weyl_metric(w).rel(), 1e-12);
    EXPECT_LE(weyl_cubic(w).rel(), 1e-12);
  }
}

TEST(AlgebraicIdentities, WeylWeylMetricFailsOnNonWeylTensor) {
  const Tensor g = kronecker();
  Tensor a(2);
  a(0, 0) = 1.0;
  const Tensor t = kulkarni_nomizu(a, g);
  EXPECT_GT(weyl_weyl_metric(t).rel(), 1e-2);
}

TEST(Cotton, RicciFormulaIsSkewInLastPair) {
  std::mt19937_64 rng(30);
  std::normal_distribution<double> n;
  Tensor dric(3), dr(1);
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j)
      for (int k = 0; k < 4; ++k) dric(i, j, k) = dric(j, i, k) = n(rng);
  for (int k = 0; k < 4; ++k) dr(k) = n(rng);
  const Tensor c = cotton_from_ricci(dric, dr, kronecker());
  EXPECT_LT(max_abs(c + permute(c, {0, 2, 1})), 1e-14);
}

TEST(Cotton, WeylDivergenceSignConvention) {
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n;
  // Weyl-type in the first four slots, arbitrary in the derivative slot.
  Tensor dw(5);
  for (int t = 0; t < 4; ++t) {
    const Tensor w = random_sector_tensor(rng, Sector::plus).tensor + random_sector_tensor(rng, Sector::minus).tensor;
    for (std::size_t f = 0; f < w.size(); ++f) dw[f * 4 + static_cast<std::size_t>(t)] = w[f];
  }
  const Tensor c1 = cotton_from_weyl_divergence(dw);
  Tensor c2 = einsum("tijkt->ijk", dw);
  c2 *= -2.0;
  EXPECT_LT(max_abs(c1 - c2), 1e-10);
}
