#ifndef QTEXTURE_RANDOM_HPP
#define QTEXTURE_RANDOM_HPP

#include <cstdint>
#include <random>
#include <variant>

#include "state.hpp"

namespace qtex {

using Rng = std::mt19937_64;

/// Independent, reproducible substream for (seed, stream).
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline ComplexMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the R-diagonal phases removed.
inline ComplexMatrix haar_unitary(int dim, Rng& rng) {
  const ComplexMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ() * ComplexMatrix::Identity(dim, dim);
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int k = 0; k < dim; ++k) {
    const cplx rk = r(k, k);
    const double a = std::abs(rk);
    if (a > 0.0) q.col(k) *= rk / a;
  }
  return q;
}

inline PureState random_pure_state(int dim, Rng& rng, Dims dims = {}) {
  return PureState::normalized(ginibre(dim, 1, rng).col(0), std::move(dims));
}

/// rho = G G^dagger / tr(G G^dagger) with G a dim x rank Ginibre matrix (rank 0 means full).
inline DensityMatrix random_density_matrix(int dim, Rng& rng, Dims dims = {}, int rank = 0) {
  const ComplexMatrix g = ginibre(dim, rank > 0 ? rank : dim, rng);
  ComplexMatrix rho = g * g.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  rho /= rho.trace().real();
  return DensityMatrix(std::move(rho), std::move(dims));
}

enum class StateKind { pure, mixed };

using AnyState = std::variant<PureState, DensityMatrix>;

inline AnyState random_state(int dim, StateKind kind, std::uint64_t seed) {
  if (dim < 1) throw usage_error("random_state needs dim >= 1");
  Rng rng = make_rng(seed);
  if (kind == StateKind::pure) return random_pure_state(dim, rng);
  return random_density_matrix(dim, rng);
}

}  // namespace qtex

#endif
