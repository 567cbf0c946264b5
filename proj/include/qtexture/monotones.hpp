#ifndef QTEXTURE_MONOTONES_HPP
#define QTEXTURE_MONOTONES_HPP

// Texture-based pure-state resource monotones (minimum texture over a
// theory's free unitaries) in their closed forms.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <variant>

#include "random.hpp"
#include "state.hpp"

namespace qtex {

enum class Theory { coherence, nonstabilizerness, entanglement_bipartite, gme };

inline std::string to_string(Theory t) {
  switch (t) {
    case Theory::coherence: return "coherence";
    case Theory::nonstabilizerness: return "nonstabilizerness";
    case Theory::entanglement_bipartite: return "entanglement_bipartite";
    case Theory::gme: return "gme";
  }
  return "unknown";
}

struct CoherenceWitness {
  int index = 0;  ///< basis index of the largest |c_i|^2
  double weight = 0.0;
};

struct MagicWitness {
  char axis = 'x';
  double magnetization = 0.0;
};

struct EntanglementWitness {
  Bipartition cut;
  double lambda1 = 1.0;
};

struct MonotoneResult {
  Theory theory = Theory::coherence;
  double value = 0.0;
  std::variant<CoherenceWitness, MagicWitness, EntanglementWitness> witness;
};

/// 1 - max_i |<i|psi>|^2; ties resolve to the smallest index.
inline MonotoneResult coherence_monotone(const PureState& psi) {
  CoherenceWitness w;
  w.weight = -1.0;
  for (int i = 0; i < psi.dim(); ++i) {
    const double p = std::norm(psi[i]);
    if (p > w.weight) {
      w.weight = p;
      w.index = i;
    }
  }
  return {Theory::coherence, std::clamp(1.0 - w.weight, 0.0, 1.0), w};
}

/// Single-qubit closed form (1 - max_k |m_k|) / 2 with m_k = <psi|sigma^k|psi>.
inline MonotoneResult nonstabilizerness_monotone(const PureState& psi) {
  if (psi.dim() != 2) throw unsupported_dimension_error("non-stabilizerness closed form is single-qubit only");
  const cplx c0 = psi[0], c1 = psi[1];
  const cplx cross = std::conj(c0) * c1;
  const double m[3] = {2.0 * cross.real(), 2.0 * cross.imag(), std::norm(c0) - std::norm(c1)};
  MagicWitness w;
  int best = 0;
  for (int k = 1; k < 3; ++k)
    if (std::abs(m[k]) > std::abs(m[best])) best = k;
  w.axis = "xyz"[best];
  w.magnetization = m[best];
  return {Theory::nonstabilizerness, std::clamp(0.5 * (1.0 - std::abs(m[best])), 0.0, 1.0), w};
}

/// 1 - lambda_1 across the cut, equal to the minimum texture over product bases.
inline MonotoneResult entanglement_monotone(const PureState& psi, const Bipartition& cut) {
  const SchmidtData s = schmidt_decompose(psi, cut);
  return {Theory::entanglement_bipartite, std::clamp(1.0 - s.largest(), 0.0, 1.0), EntanglementWitness{s.cut, s.largest()}};
}

inline constexpr int max_gme_subsystems = 12;

/// Every nontrivial bipartition once: side A never contains the last subsystem.
inline std::vector<Bipartition> all_bipartitions(int subsystems) {
  std::vector<Bipartition> cuts;
  const std::uint32_t count = 1u << (subsystems - 1);
  for (std::uint32_t mask = 1; mask < count; ++mask) {
    Bipartition b;
    for (int k = 0; k < subsystems - 1; ++k)
      if (mask & (1u << k)) b.part.push_back(k);
    cuts.push_back(std::move(b));
  }
  return cuts;
}

/// Generalized geometric measure: 1 - max over bipartitions of lambda_1.
inline MonotoneResult gme_monotone(const PureState& psi) {
  if (!psi.has_dims() || psi.dims().size() < 2) throw usage_error("GGM needs a state with at least two subsystems");
  const int n = static_cast<int>(psi.dims().size());
  if (n > max_gme_subsystems) throw resource_limit_error("GGM bipartition enumeration is limited to 12 subsystems");
  EntanglementWitness best;
  best.lambda1 = -1.0;
  for (const Bipartition& cut : all_bipartitions(n)) {
    const double l1 = schmidt_decompose(psi, cut).largest();
    if (l1 > best.lambda1) {
      best.lambda1 = l1;
      best.cut = cut;
    }
  }
  return {Theory::gme, std::clamp(1.0 - best.lambda1, 0.0, 1.0), best};
}

/// Dispatches to the closed form of a theory. Cut is used for the bipartite theory.
inline MonotoneResult pure_monotone(const PureState& psi, Theory theory, const Bipartition& cut = {{0}}) {
  switch (theory) {
    case Theory::coherence: return coherence_monotone(psi);
    case Theory::nonstabilizerness: return nonstabilizerness_monotone(psi);
    case Theory::entanglement_bipartite: return entanglement_monotone(psi, cut);
    case Theory::gme: return gme_monotone(psi);
  }
  throw usage_error("unknown theory");
}

/// Minimum texture over `samples` random product bases U_A x U_B of the cut.
/// Every sample is an upper bound on 1 - lambda_1; with inject_witness the Schmidt-aligned
/// product basis is included and the bound is attained.
inline double sampled_local_texture_bound(const PureState& psi, const Bipartition& cut, int samples,
                                          std::uint64_t seed, bool inject_witness = false) {
  const ComplexMatrix m = bipartite_matrix(psi, cut);
  Rng rng = make_rng(seed);
  const int da = static_cast<int>(m.rows()), db = static_cast<int>(m.cols());
  const ComplexVector ua = ComplexVector::Constant(da, 1.0 / std::sqrt(static_cast<double>(da)));
  const ComplexVector ub = ComplexVector::Constant(db, 1.0 / std::sqrt(static_cast<double>(db)));
  double best = std::numeric_limits<double>::infinity();
  // texture in basis U_A x U_B is 1 - |<s_A|M|conj(s_B)>|^2 with s = U (uniform vector)
  auto texture_for = [&](const ComplexVector& sa, const ComplexVector& sb) {
    return std::clamp(1.0 - std::norm(sa.dot(m * sb.conjugate())), 0.0, 1.0);
  };
  for (int k = 0; k < samples; ++k) {
    const ComplexMatrix a = haar_unitary(da, rng);
    const ComplexMatrix b = haar_unitary(db, rng);
    best = std::min(best, texture_for(a * ua, b * ub));
  }
  if (inject_witness) {
    const SchmidtData s = schmidt_decompose(psi, cut);
    best = std::min(best, texture_for(s.left.col(0), s.right.col(0)));
  }
  return best;
}

/// Wootters concurrence of a two-qubit state from the eigenvalues of rho (sy x sy) rho* (sy x sy).
inline double wootters_concurrence(const DensityMatrix& rho) {
  if (rho.dim() != 4) throw unsupported_dimension_error("concurrence is defined here for two qubits only");
  ComplexMatrix flip = ComplexMatrix::Zero(4, 4);
  flip(0, 3) = -1.0;
  flip(1, 2) = 1.0;
  flip(2, 1) = 1.0;
  flip(3, 0) = -1.0;
  const ComplexMatrix tilde = flip * rho.matrix().conjugate() * flip;
  Eigen::ComplexEigenSolver<ComplexMatrix> es(rho.matrix() * tilde, false);
  std::vector<double> roots;
  for (Eigen::Index i = 0; i < 4; ++i) roots.push_back(std::sqrt(std::max(0.0, es.eigenvalues()(i).real())));
  std::sort(roots.rbegin(), roots.rend());
  return std::max(0.0, roots[0] - roots[1] - roots[2] - roots[3]);
}

/// Two-qubit entanglement roof in closed form: (1 - sqrt(1 - C^2)) / 2.
inline double two_qubit_entanglement_roof(const DensityMatrix& rho) {
  const double c = wootters_concurrence(rho);
  return 0.5 * (1.0 - std::sqrt(std::max(0.0, 1.0 - c * c)));
}

}  // namespace qtex

#endif
