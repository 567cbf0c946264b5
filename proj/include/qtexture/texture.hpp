#ifndef QTEXTURE_TEXTURE_HPP
#define QTEXTURE_TEXTURE_HPP

// Texture of a state relative to an orthonormal basis: grand sum, texture,
// rugosity, the texture-less (uniform superposition) state and the extremal
// textures over all bases.

#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <utility>

#include "state.hpp"

namespace qtex {

/// A basis given by the unitary whose columns are its kets in computational coordinates.
class OrthonormalBasis {
public:
  explicit OrthonormalBasis(ComplexMatrix unitary) : unitary_(std::move(unitary)) {
    if (unitary_.rows() == 0 || unitary_.rows() != unitary_.cols())
      throw usage_error("basis unitary must be square and non-empty");
    const auto d = unitary_.rows();
    const double residual = detail::max_abs(unitary_.adjoint() * unitary_ - ComplexMatrix::Identity(d, d));
    if (residual > tol::unitary) {
      std::ostringstream os;
      os << "basis is not orthonormal (residual " << residual << ")";
      throw usage_error(os.str());
    }
  }

  static OrthonormalBasis computational(int dim) { return OrthonormalBasis(ComplexMatrix::Identity(dim, dim)); }

  int dim() const { return static_cast<int>(unitary_.rows()); }
  const ComplexMatrix& unitary() const { return unitary_; }

private:
  ComplexMatrix unitary_;
};

struct TextureReport {
  double grand_sum = 0.0;
  double texture = 0.0;
  double rugosity = 0.0;  ///< natural log; +inf when the grand sum vanishes
  double imag_residual = 0.0;
};

/// Discrete Fourier basis: column j holds (1/sqrt d) sum_k omega^(k j) |k>, omega = e^(2 pi i/d).
inline OrthonormalBasis fourier_basis(int dim) {
  if (dim < 1) throw usage_error("fourier_basis needs d >= 1");
  ComplexMatrix u(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int k = 0; k < dim; ++k)
    for (int j = 0; j < dim; ++j) {
      // reduce the exponent mod d so large d keeps full phase accuracy
      const long long e = (static_cast<long long>(k) * j) % dim;
      u(k, j) = std::polar(norm, 2.0 * std::numbers::pi * static_cast<double>(e) / dim);
    }
  return OrthonormalBasis(std::move(u));
}

/// |s_1> of the basis, in computational coordinates.
inline PureState texture_less_state(const OrthonormalBasis& basis) {
  const int d = basis.dim();
  const ComplexVector uniform = ComplexVector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  return PureState::normalized(basis.unitary() * uniform);
}

namespace detail {

inline TextureReport texture_from_overlap(cplx overlap, int dim) {
  const double d = dim;
  TextureReport r;
  r.imag_residual = std::abs(d * overlap.imag());
  if (r.imag_residual > 1e-8) {
    std::ostringstream os;
    os << "grand sum has imaginary part " << r.imag_residual << "; input is not Hermitian";
    throw invalid_state_error(os.str());
  }
  double e = d * overlap.real();
  if (e < -1e-10 || e > d + 1e-10) {
    std::ostringstream os;
    os << "grand sum " << e << " outside [0, " << d << "]";
    throw invalid_state_error(os.str());
  }
  e = std::clamp(e, 0.0, d);
  r.grand_sum = e;
  r.texture = 1.0 - e / d;
  r.rugosity = e > 0.0 ? -std::log(e / d) : std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace detail

inline TextureReport texture_in_basis(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  if (rho.dim() != basis.dim()) throw usage_error("state and basis dimensions differ");
  const ComplexVector s = texture_less_state(basis).amplitudes();
  return detail::texture_from_overlap(s.dot(rho.matrix() * s), rho.dim());
}

inline TextureReport texture_in_basis(const PureState& psi, const OrthonormalBasis& basis) {
  if (psi.dim() != basis.dim()) throw usage_error("state and basis dimensions differ");
  const ComplexVector s = texture_less_state(basis).amplitudes();
  return detail::texture_from_overlap(std::norm(s.dot(psi.amplitudes())), psi.dim());
}

struct TextureExtrema {
  double t_max = 0.0;
  double t_min = 0.0;
  std::optional<std::pair<OrthonormalBasis, OrthonormalBasis>> witness;  ///< (max basis, min basis)
};

namespace detail {

/// Basis whose texture-less state is `target`: U = W F^dagger with W e_1 = target.
inline OrthonormalBasis basis_with_free_state(ComplexMatrix w_with_target_first) {
  const int d = static_cast<int>(w_with_target_first.rows());
  return OrthonormalBasis(w_with_target_first * fourier_basis(d).unitary().adjoint());
}

}  // namespace detail

/// Max/min texture over all orthonormal bases: 1 - lambda_min and 1 - lambda_max.
inline TextureExtrema texture_extrema(const DensityMatrix& rho) {
  const Spectrum s = spectral_decompose(rho);
  const int d = rho.dim();
  TextureExtrema ext;
  ext.t_max = 1.0 - s.smallest();
  ext.t_min = 1.0 - s.largest();

  ComplexMatrix w_min = s.eigenvectors;  // column 0 is the top eigenvector
  ComplexMatrix w_max = s.eigenvectors;
  w_max.col(0).swap(w_max.col(d - 1));
  ext.witness.emplace(detail::basis_with_free_state(std::move(w_max)),
                      detail::basis_with_free_state(std::move(w_min)));
  return ext;
}

/// -ln |<+...+|psi>|^2 in the computational basis; +inf for zero overlap.
inline double rugosity_pure(const PureState& psi) {
  cplx sum = 0.0;
  for (Eigen::Index i = 0; i < psi.amplitudes().size(); ++i) sum += psi[i];
  const double overlap = std::norm(sum) / psi.dim();
  return overlap > 0.0 ? -std::log(overlap) : std::numeric_limits<double>::infinity();
}

}  // namespace qtex

#endif
