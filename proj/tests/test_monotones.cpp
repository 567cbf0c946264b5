#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include <qtexture/monotones.hpp>
#include <qtexture/texture.hpp>

#include "support/oracles.hpp"
#include "support/states.hpp"

using namespace qtex;
using fixtures::bell;
using fixtures::ghz3;
using fixtures::ket;
using fixtures::w3;

namespace {

/// Texture minimized over the 24 Cliffords, measured in the Fourier basis.
double clifford_brute_force(const PureState& psi) {
  const OrthonormalBasis f = fourier_basis(2);
  double best = 1.0;
  for (const ComplexMatrix& c : oracle::clifford_group())
    best = std::min(best, texture_in_basis(PureState::normalized(c * psi.amplitudes()), f).texture);
  return best;
}

PureState local_rotate(const PureState& psi, Rng& rng) {
  ComplexMatrix u = ComplexMatrix::Identity(1, 1);
  for (int d : psi.dims()) u = kron(u, haar_unitary(d, rng));
  return PureState::normalized(u * psi.amplitudes(), psi.dims());
}

}  // namespace

TEST(Coherence, ClosedFormExamples) {
  EXPECT_EQ(coherence_monotone(ket({1, 0})).value, 0.0);
  EXPECT_NEAR(coherence_monotone(ket({1, 1})).value, 0.5, 1e-15);
  EXPECT_NEAR(coherence_monotone(ket({1, 1, 1})).value, 2.0 / 3.0, 1e-15);
}

TEST(Coherence, TiesResolveToSmallestIndex) {
  const MonotoneResult r = coherence_monotone(ket({0, 1, 1}));
  EXPECT_EQ(std::get<CoherenceWitness>(r.witness).index, 1);
}

TEST(Coherence, FreeStatesAndUpperBound) {
  for (int i = 0; i < 5; ++i) EXPECT_EQ(coherence_monotone(PureState::basis_state(5, i)).value, 0.0);
  Rng rng = make_rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const int d = 2 + trial % 7;
    const double v = coherence_monotone(random_pure_state(d, rng)).value;
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0 - 1.0 / d + 1e-12);
  }
}

TEST(Magic, ClosedFormExamples) {
  EXPECT_NEAR(nonstabilizerness_monotone(ket({1, 0})).value, 0.0, 1e-15);
  EXPECT_NEAR(nonstabilizerness_monotone(ket({1, 1})).value, 0.0, 1e-15);
  const MonotoneResult t = nonstabilizerness_monotone(ket({1, std::polar(1.0, std::numbers::pi / 4)}));
  EXPECT_NEAR(t.value, 0.5 * (1.0 - 1.0 / std::sqrt(2.0)), 1e-15);
  EXPECT_NEAR(std::abs(std::get<MagicWitness>(t.witness).magnetization), 1.0 / std::sqrt(2.0), 1e-15);
}

TEST(Magic, SixStabilizerStatesAreFree) {
  const cplx i(0, 1);
  for (const PureState& s : {ket({1, 0}), ket({0, 1}), ket({1, 1}), ket({1, -1}), ket({1, i}), ket({1, -i})})
    EXPECT_NEAR(nonstabilizerness_monotone(s).value, 0.0, 1e-15);
}

TEST(Magic, CliffordGroupHasTwentyFourElements) { EXPECT_EQ(oracle::clifford_group().size(), 24u); }

TEST(Magic, ClosedFormMatchesCliffordBruteForce) {
  Rng rng = make_rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    const PureState psi = random_pure_state(2, rng);
    EXPECT_NEAR(nonstabilizerness_monotone(psi).value, clifford_brute_force(psi), 1e-10);
  }
  const PureState t = ket({1, std::polar(1.0, std::numbers::pi / 4)});
  EXPECT_NEAR(clifford_brute_force(t), 0.5 * (1.0 - 1.0 / std::sqrt(2.0)), 1e-12);
}

TEST(Magic, OnlyForQubits) { EXPECT_THROW(nonstabilizerness_monotone(ket({1, 0, 0})), unsupported_dimension_error); }

TEST(Entanglement, ClosedFormExamples) {
  EXPECT_NEAR(entanglement_monotone(ket({1, 0, 0, 0}, {2, 2}), Bipartition{{0}}).value, 0.0, 1e-15);
  EXPECT_NEAR(entanglement_monotone(bell(), Bipartition{{0}}).value, 0.5, 1e-15);
  EXPECT_NEAR(entanglement_monotone(ket({std::sqrt(0.9), 0, 0, std::sqrt(0.1)}, {2, 2}), Bipartition{{0}}).value, 0.1,
              1e-15);
}

TEST(Entanglement, InvalidCutIsUsageError) {
  EXPECT_THROW(entanglement_monotone(bell(), Bipartition{{0, 1}}), usage_error);
}

TEST(Entanglement, ProductStatesAreFreeAndRangeHolds) {
  Rng rng = make_rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const PureState a = random_pure_state(2, rng, {2}), b = random_pure_state(3, rng, {3});
    EXPECT_NEAR(entanglement_monotone(tensor(a, b), Bipartition{{0}}).value, 0.0, 1e-12);
    const double v = entanglement_monotone(random_pure_state(6, rng, {2, 3}), Bipartition{{1}}).value;
    EXPECT_LE(v, 0.5 + 1e-12);
  }
}

TEST(Entanglement, LocalUnitaryInvariant) {
  Rng rng = make_rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const PureState psi = random_pure_state(12, rng, {2, 3, 2});
    const PureState moved = local_rotate(psi, rng);
    EXPECT_NEAR(entanglement_monotone(psi, Bipartition{{0, 2}}).value,
                entanglement_monotone(moved, Bipartition{{0, 2}}).value, 1e-10);
    EXPECT_NEAR(gme_monotone(psi).value, gme_monotone(moved).value, 1e-10);
  }
}

TEST(Ggm, ClosedFormExamples) {
  EXPECT_NEAR(gme_monotone(ghz3()).value, 0.5, 1e-15);
  EXPECT_NEAR(gme_monotone(w3()).value, 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(gme_monotone(tensor(ket({1, 0}, {2}), bell())).value, 0.0, 1e-15);
}

TEST(Ggm, EnumeratesEveryBipartitionOnce) {
  for (int n = 2; n <= 8; ++n) EXPECT_EQ(all_bipartitions(n).size(), (1u << (n - 1)) - 1);
}

TEST(Ggm, MatchesBruteForceReducedStates) {
  Rng rng = make_rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 3 + trial % 3;
    const PureState psi = random_pure_state(1 << n, rng, Dims(static_cast<std::size_t>(n), 2));
    double best = 0.0;
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
      std::vector<int> part;
      for (int q = 0; q < n; ++q)
        if (mask & (1 << q)) part.push_back(q);
      best = std::max(best, oracle::reduced_lambda1(psi.amplitudes(), n, part));
    }
    EXPECT_NEAR(gme_monotone(psi).value, 1.0 - best, 1e-10);
  }
}

TEST(Ggm, BoundedByEveryCut) {
  Rng rng = make_rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const PureState psi = random_pure_state(16, rng, {2, 2, 2, 2});
    const double g = gme_monotone(psi).value;
    for (const Bipartition& cut : all_bipartitions(4)) EXPECT_LE(g, entanglement_monotone(psi, cut).value + 1e-12);
  }
}

TEST(Ggm, LimitsAndPreconditions) {
  EXPECT_THROW(gme_monotone(PureState::basis_state(2, 0)), usage_error);
  const PureState big = PureState::basis_state(1 << 13, 0, Dims(13, 2));
  EXPECT_THROW(gme_monotone(big), resource_limit_error);
}

TEST(SampledLocalBound, NeverBelowClosedForm) {
  Rng rng = make_rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const PureState psi = random_pure_state(6, rng, {2, 3});
    const double exact = entanglement_monotone(psi, Bipartition{{0}}).value;
    EXPECT_GE(sampled_local_texture_bound(psi, Bipartition{{0}}, 200, trial), exact - 1e-10);
    EXPECT_NEAR(sampled_local_texture_bound(psi, Bipartition{{0}}, 10, trial, true), exact, 1e-10);
  }
  EXPECT_GE(sampled_local_texture_bound(bell(), Bipartition{{0}}, 500, 1), 0.5 - 1e-10);
  EXPECT_NEAR(sampled_local_texture_bound(ket({1, 0, 0, 0}, {2, 2}), Bipartition{{0}}, 0, 1, true), 0.0, 1e-12);
}

TEST(Wootters, MatchesHermitianRouteOracle) {
  Rng rng = make_rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const DensityMatrix rho = random_density_matrix(4, rng, {2, 2}, 1 + trial % 4);
    // rank-deficient inputs put ~1e-16 eigenvalues under a square root in both routes
    EXPECT_NEAR(wootters_concurrence(rho), oracle::concurrence(rho.matrix()), 1e-6);
  }
  EXPECT_NEAR(wootters_concurrence(DensityMatrix::from_pure(bell())), 1.0, 1e-10);
  EXPECT_NEAR(two_qubit_entanglement_roof(DensityMatrix::from_pure(bell())), 0.5, 1e-7);
  EXPECT_NEAR(wootters_concurrence(fixtures::werner(1.0 / 3.0)), 0.0, 1e-10);
}

TEST(PureMonotone, DispatchesByTheory) {
  EXPECT_NEAR(pure_monotone(bell(), Theory::entanglement_bipartite).value, 0.5, 1e-15);
  EXPECT_EQ(pure_monotone(ket({1, 1}), Theory::coherence).value, coherence_monotone(ket({1, 1})).value);
  EXPECT_EQ(to_string(Theory::gme), "gme");
}
