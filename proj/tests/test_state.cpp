#include <gtest/gtest.h>

#include <qtexture/random.hpp>
#include <qtexture/state.hpp>

#include "support/oracles.hpp"
#include "support/states.hpp"

using namespace qtex;
using fixtures::bell;
using fixtures::ghz3;
using fixtures::ket;

TEST(PureState, RejectsUnnormalizedAmplitudes) {
  ComplexVector v(2);
  v << 1.0, 1.0;
  EXPECT_THROW(PureState{v}, invalid_state_error);
  EXPECT_NEAR(PureState::normalized(v).amplitudes().norm(), 1.0, 1e-15);
}

TEST(PureState, RejectsDimsThatDoNotMultiplyOut) {
  EXPECT_THROW(PureState(ComplexVector::Unit(4, 0), {2, 3}), usage_error);
}

TEST(DensityMatrix, EnforcesInvariants) {
  ComplexMatrix m = ComplexMatrix::Identity(2, 2) / 2.0;
  m(0, 1) = cplx(0.0, 0.1);
  EXPECT_THROW(DensityMatrix{m}, invalid_state_error);  // not Hermitian

  EXPECT_THROW(DensityMatrix{ComplexMatrix::Identity(2, 2)}, invalid_state_error);  // trace 2

  ComplexMatrix neg(2, 2);
  neg << 1.2, 0.0, 0.0, -0.2;
  EXPECT_THROW(DensityMatrix{neg}, invalid_state_error);
}

TEST(Spectrum, DiagonalAndDegenerateExamples) {
  const Spectrum s = spectral_decompose(DensityMatrix::diagonal({0.3, 0.7}));
  EXPECT_DOUBLE_EQ(s.eigenvalues(0), 0.7);
  EXPECT_DOUBLE_EQ(s.eigenvalues(1), 0.3);
  const Spectrum half = spectral_decompose(DensityMatrix::maximally_mixed(2));
  EXPECT_NEAR(half.eigenvalues(0), 0.5, 1e-15);
  EXPECT_NEAR(half.eigenvalues(1), 0.5, 1e-15);
}

TEST(Spectrum, RejectsNonHermitianInput) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 1) = 1.0;
  EXPECT_THROW(spectral_decompose(m), invalid_state_error);
}

TEST(Spectrum, MatchesJacobiOracleOnRandomStates) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto rho = std::get<DensityMatrix>(random_state(4, StateKind::mixed, seed));
    const Spectrum s = spectral_decompose(rho);
    const std::vector<double> w = oracle::jacobi_eigenvalues(rho.matrix());
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(s.eigenvalues(i), w[static_cast<std::size_t>(i)], 1e-8);
  }
}

TEST(Spectrum, ReconstructionRoundTripsUpToDimension64) {
  for (int d : {2, 5, 16, 33, 64}) {
    Rng rng = make_rng(static_cast<std::uint64_t>(d));
    const DensityMatrix rho = random_density_matrix(d, rng);
    const Spectrum s = spectral_decompose(rho);
    EXPECT_LT(detail::max_abs(reconstruct(s) - rho.matrix()), 1e-10) << "d=" << d;
    EXPECT_NEAR(s.eigenvalues.sum(), 1.0, 1e-10);
    EXPECT_LT(detail::max_abs(s.eigenvectors.adjoint() * s.eigenvectors - ComplexMatrix::Identity(d, d)), 1e-10);
    for (int i = 1; i < d; ++i) EXPECT_GE(s.eigenvalues(i - 1), s.eigenvalues(i));
  }
}

TEST(PartialTrace, BellMarginalIsMaximallyMixed) {
  const DensityMatrix r = partial_trace(DensityMatrix::from_pure(bell()), {1});
  EXPECT_LT(detail::max_abs(r.matrix() - ComplexMatrix::Identity(2, 2) / 2.0), 1e-15);
  EXPECT_EQ(r.dims(), Dims{2});
}

TEST(PartialTrace, ProductStateReturnsFactors) {
  Rng rng = make_rng(3);
  const DensityMatrix a = random_density_matrix(2, rng);
  const DensityMatrix b = random_density_matrix(3, rng);
  const DensityMatrix ab = tensor(a.with_dims({2}), b.with_dims({3}));
  EXPECT_LT(detail::max_abs(partial_trace(ab, {0}).matrix() - a.matrix()), 1e-14);
  EXPECT_LT(detail::max_abs(partial_trace(ab, {1}).matrix() - b.matrix()), 1e-14);
}

TEST(PartialTrace, GhzPairIsClassicalMixture) {
  const DensityMatrix r = partial_trace(DensityMatrix::from_pure(ghz3()), {1, 2});
  ComplexMatrix want = ComplexMatrix::Zero(4, 4);
  want(0, 0) = want(3, 3) = 0.5;
  EXPECT_LT(detail::max_abs(r.matrix() - want), 1e-15);
}

TEST(PartialTrace, NeedsSubsystemDimensions) {
  EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(4), {0}), usage_error);
  EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(4, {2, 2}), {2}), usage_error);
  EXPECT_THROW(partial_trace(DensityMatrix::maximally_mixed(4, {2, 2}), {}), usage_error);
}

TEST(PartialTrace, PreservesTraceAndCommutesWithMixing) {
  Rng rng = make_rng(11);
  const Dims dims{2, 3, 2};
  for (int trial = 0; trial < 20; ++trial) {
    const DensityMatrix r1 = random_density_matrix(12, rng, dims);
    const DensityMatrix r2 = random_density_matrix(12, rng, dims);
    const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const DensityMatrix mix(p * r1.matrix() + (1 - p) * r2.matrix(), dims);
    for (const std::vector<int>& keep : {std::vector<int>{0}, {1, 2}, {0, 2}}) {
      const DensityMatrix lhs = partial_trace(mix, keep);
      const ComplexMatrix rhs = p * partial_trace(r1, keep).matrix() + (1 - p) * partial_trace(r2, keep).matrix();
      EXPECT_NEAR(lhs.matrix().trace().real(), 1.0, 1e-12);
      EXPECT_LT(detail::max_abs(lhs.matrix() - rhs), 1e-12);
    }
  }
}

TEST(Schmidt, ClosedFormExamples) {
  const SchmidtData b = schmidt_decompose(bell(), Bipartition{{0}});
  EXPECT_NEAR(b.coefficients(0), 0.5, 1e-15);
  EXPECT_NEAR(b.coefficients(1), 0.5, 1e-15);

  const SchmidtData prod = schmidt_decompose(ket({1, 0, 0, 0}, {2, 2}), Bipartition{{0}});
  EXPECT_DOUBLE_EQ(prod.coefficients(0), 1.0);
  EXPECT_DOUBLE_EQ(prod.coefficients(1), 0.0);

  const SchmidtData skew = schmidt_decompose(ket({std::sqrt(0.9), 0, 0, std::sqrt(0.1)}, {2, 2}), Bipartition{{0}});
  EXPECT_NEAR(skew.coefficients(0), 0.9, 1e-15);
  EXPECT_NEAR(skew.coefficients(1), 0.1, 1e-15);
}

TEST(Schmidt, RejectsInvalidCuts) {
  EXPECT_THROW(schmidt_decompose(bell(), Bipartition{{0, 1}}), usage_error);
  EXPECT_THROW(schmidt_decompose(bell(), Bipartition{{2}}), usage_error);
  EXPECT_THROW(schmidt_decompose(PureState::basis_state(4, 0), Bipartition{{0}}), usage_error);
}

TEST(Schmidt, AgreesWithReducedStateSpectrumAndReconstructs) {
  Rng rng = make_rng(5);
  const Dims dims{2, 3, 2};
  for (int trial = 0; trial < 30; ++trial) {
    const PureState psi = random_pure_state(12, rng, dims);
    for (const Bipartition& cut : {Bipartition{{0}}, Bipartition{{1}}, Bipartition{{0, 2}}}) {
      const SchmidtData s = schmidt_decompose(psi, cut);
      const Spectrum red = spectral_decompose(partial_trace(DensityMatrix::from_pure(psi), cut.part));
      EXPECT_NEAR(s.coefficients.sum(), 1.0, 1e-10);
      for (Eigen::Index i = 0; i < s.coefficients.size(); ++i) EXPECT_NEAR(s.coefficients(i), red.eigenvalues(i), 1e-10);
      ComplexMatrix m = ComplexMatrix::Zero(s.left.rows(), s.right.rows());
      for (Eigen::Index i = 0; i < s.coefficients.size(); ++i)
        m += std::sqrt(s.coefficients(i)) * s.left.col(i) * s.right.col(i).transpose();
      EXPECT_LT(detail::max_abs(m - bipartite_matrix(psi, cut)), 1e-12);
    }
  }
}

TEST(RandomState, NormalizedDeterministicAndValid) {
  const auto a = std::get<PureState>(random_state(2, StateKind::pure, 9));
  const auto b = std::get<PureState>(random_state(2, StateKind::pure, 9));
  EXPECT_NEAR(a.amplitudes().norm(), 1.0, 1e-12);
  EXPECT_EQ(a.amplitudes(), b.amplitudes());
  const auto m1 = std::get<DensityMatrix>(random_state(4, StateKind::mixed, 9));
  const auto m2 = std::get<DensityMatrix>(random_state(4, StateKind::mixed, 9));
  EXPECT_EQ(m1.matrix(), m2.matrix());
  EXPECT_NE(m1.matrix(), std::get<DensityMatrix>(random_state(4, StateKind::mixed, 10)).matrix());
}

// The constructor checks the invariants; this re-derives them independently over many draws.
TEST(RandomState, ThousandDrawsSatisfyDensityInvariants) {
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const int d = 2 + static_cast<int>(seed % 7);
    const auto rho = std::get<DensityMatrix>(random_state(d, StateKind::mixed, seed));
    ASSERT_LE(detail::max_abs(rho.matrix() - rho.matrix().adjoint()), 1e-12);
    ASSERT_NEAR(rho.matrix().trace().real(), 1.0, 1e-12);
    ASSERT_GE(oracle::jacobi_eigenvalues(rho.matrix()).back(), -1e-10);
  }
}

TEST(HaarUnitary, IsUnitary) {
  Rng rng = make_rng(1);
  for (int d : {1, 2, 7, 16}) {
    const ComplexMatrix u = haar_unitary(d, rng);
    EXPECT_LT(detail::max_abs(u.adjoint() * u - ComplexMatrix::Identity(d, d)), 1e-12);
  }
}

TEST(Tensor, ConcatenatesDimsAndAmplitudes) {
  const PureState p = tensor(ket({1, 0}, {2}), ket({0, 1, 0}, {3}));
  EXPECT_EQ(p.dims(), (Dims{2, 3}));
  EXPECT_NEAR(std::abs(p[1]), 1.0, 1e-15);
}

TEST(Bipartition, FormatsBothSides) {
  EXPECT_EQ(to_string(Bipartition{{0, 1}}, 3), "0,1:2");
  EXPECT_EQ(Bipartition{{1}}.complement(3), (std::vector<int>{0, 2}));
}
