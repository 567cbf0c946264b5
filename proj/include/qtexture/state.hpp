#ifndef QTEXTURE_STATE_HPP
#define QTEXTURE_STATE_HPP

// Quantum-state value types and the dense linear algebra they need:
// pure states, density matrices, spectra, partial traces and Schmidt data.
//
// Multipartite index convention: subsystem 0 is the most significant digit
// of the computational-basis index, i.e. the ordering of a Kronecker product
// |a>|b>|c> -> index ((a * d1) + b) * d2 + c.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace qtex {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Dims = std::vector<int>;

namespace tol {
inline constexpr double hermitian = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd = 1e-10;
inline constexpr double norm = 1e-12;
inline constexpr double unitary = 1e-10;
inline constexpr double rank = 1e-10;
}  // namespace tol

namespace detail {

inline long long dims_product(const Dims& dims) {
  long long p = 1;
  for (int d : dims) p *= d;
  return p;
}

inline void check_dims(const Dims& dims, long long total) {
  if (dims.empty()) return;
  for (int d : dims)
    if (d < 1) throw usage_error("subsystem dimensions must be positive");
  if (dims_product(dims) != total) {
    std::ostringstream os;
    os << "subsystem dimensions multiply to " << dims_product(dims) << ", expected " << total;
    throw usage_error(os.str());
  }
}

template <class Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const cplx z = m(i, j);
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
  return true;
}

inline double max_abs(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

}  // namespace detail

class PureState {
public:
  PureState() = default;

  /// Takes ownership of already-normalized amplitudes; throws invalid_state_error otherwise.
  explicit PureState(ComplexVector amplitudes, Dims dims = {})
      : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
    if (amplitudes_.size() == 0) throw invalid_state_error("pure state has zero dimension");
    if (!detail::all_finite(amplitudes_)) throw invalid_state_error("pure state has non-finite amplitudes");
    detail::check_dims(dims_, amplitudes_.size());
    const double n = amplitudes_.norm();
    if (std::abs(n - 1.0) > tol::norm) {
      std::ostringstream os;
      os << "pure state norm " << n << " differs from 1";
      throw invalid_state_error(os.str());
    }
  }

  static PureState normalized(ComplexVector v, Dims dims = {}) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw invalid_state_error("cannot normalize a zero or non-finite vector");
    v /= n;
    return PureState(std::move(v), std::move(dims));
  }

  static PureState basis_state(int dim, int index, Dims dims = {}) {
    ComplexVector v = ComplexVector::Zero(dim);
    v(index) = 1.0;
    return PureState(std::move(v), std::move(dims));
  }

  int dim() const { return static_cast<int>(amplitudes_.size()); }
  const ComplexVector& amplitudes() const { return amplitudes_; }
  cplx operator[](Eigen::Index i) const { return amplitudes_(i); }
  const Dims& dims() const { return dims_; }
  bool has_dims() const { return !dims_.empty(); }

  PureState with_dims(Dims dims) const { return PureState(amplitudes_, std::move(dims)); }

private:
  ComplexVector amplitudes_;
  Dims dims_;
};

class DensityMatrix {
public:
  DensityMatrix() = default;

  /// Validates Hermiticity, unit trace and positivity; throws invalid_state_error.
  explicit DensityMatrix(ComplexMatrix matrix, Dims dims = {})
      : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    if (matrix_.rows() == 0 || matrix_.rows() != matrix_.cols())
      throw invalid_state_error("density matrix must be square and non-empty");
    if (!detail::all_finite(matrix_)) throw invalid_state_error("density matrix has non-finite entries");
    detail::check_dims(dims_, matrix_.rows());
    const double herm = detail::max_abs(matrix_ - matrix_.adjoint());
    if (herm > tol::hermitian) {
      std::ostringstream os;
      os << "density matrix is not Hermitian (max deviation " << herm << ")";
      throw invalid_state_error(os.str());
    }
    const double tr = matrix_.trace().real();
    if (std::abs(tr - 1.0) > tol::trace) {
      std::ostringstream os;
      os << "density matrix trace " << tr << " differs from 1";
      throw invalid_state_error(os.str());
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(matrix_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) < -tol::psd) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << es.eigenvalues()(0);
      throw invalid_state_error(os.str());
    }
  }

  static DensityMatrix from_pure(const PureState& psi) {
    return DensityMatrix(psi.amplitudes() * psi.amplitudes().adjoint(), psi.dims());
  }

  static DensityMatrix maximally_mixed(int dim, Dims dims = {}) {
    return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim), std::move(dims));
  }

  static DensityMatrix diagonal(const std::vector<double>& probabilities, Dims dims = {}) {
    RealVector p = Eigen::Map<const RealVector>(probabilities.data(), static_cast<Eigen::Index>(probabilities.size()));
    return DensityMatrix(p.cast<cplx>().asDiagonal(), std::move(dims));
  }

  int dim() const { return static_cast<int>(matrix_.rows()); }
  const ComplexMatrix& matrix() const { return matrix_; }
  cplx operator()(Eigen::Index i, Eigen::Index j) const { return matrix_(i, j); }
  const Dims& dims() const { return dims_; }
  bool has_dims() const { return !dims_.empty(); }

  DensityMatrix with_dims(Dims dims) const { return DensityMatrix(matrix_, std::move(dims)); }

private:
  ComplexMatrix matrix_;
  Dims dims_;
};

/// Eigenvalues in descending order, eigenvector columns aligned with them.
struct Spectrum {
  RealVector eigenvalues;
  ComplexMatrix eigenvectors;

  double largest() const { return eigenvalues(0); }
  double smallest() const { return eigenvalues(eigenvalues.size() - 1); }
};

/// Spectral decomposition of an arbitrary Hermitian matrix.
inline Spectrum spectral_decompose(const ComplexMatrix& hermitian) {
  if (hermitian.rows() != hermitian.cols()) throw usage_error("spectral_decompose needs a square matrix");
  const double herm = detail::max_abs(hermitian - hermitian.adjoint());
  if (herm > tol::hermitian) {
    std::ostringstream os;
    os << "matrix is not Hermitian (max deviation " << herm << ")";
    throw invalid_state_error(os.str());
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(hermitian);
  if (es.info() != Eigen::Success) throw numerical_error("Hermitian eigensolver did not converge");
  Spectrum s;
  s.eigenvalues = es.eigenvalues().reverse();
  s.eigenvectors = es.eigenvectors().rowwise().reverse();
  return s;
}

inline Spectrum spectral_decompose(const DensityMatrix& rho) { return spectral_decompose(rho.matrix()); }

inline ComplexMatrix reconstruct(const Spectrum& s) {
  return s.eigenvectors * s.eigenvalues.cast<cplx>().asDiagonal() * s.eigenvectors.adjoint();
}

/// Subsystem indices forming side A of a cut; side B is the complement.
struct Bipartition {
  std::vector<int> part;

  std::vector<int> complement(int subsystems) const {
    std::vector<int> rest;
    for (int k = 0; k < subsystems; ++k)
      if (std::find(part.begin(), part.end(), k) == part.end()) rest.push_back(k);
    return rest;
  }

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

inline std::string to_string(const Bipartition& cut, int subsystems) {
  std::ostringstream os;
  auto list = [&os](const std::vector<int>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  list(cut.part);
  os << ':';
  list(cut.complement(subsystems));
  return os.str();
}

namespace detail {

inline std::vector<int> validated_subset(std::vector<int> subset, int subsystems, bool allow_full) {
  if (subset.empty()) throw usage_error("subsystem selection is empty");
  std::sort(subset.begin(), subset.end());
  if (std::adjacent_find(subset.begin(), subset.end()) != subset.end())
    throw usage_error("subsystem selection has duplicate indices");
  if (subset.front() < 0 || subset.back() >= subsystems)
    throw usage_error("subsystem index out of range");
  if (!allow_full && static_cast<int>(subset.size()) == subsystems)
    throw usage_error("cut must leave a non-empty complement");
  return subset;
}

inline Bipartition validated_cut(const Bipartition& cut, const Dims& dims) {
  if (dims.size() < 2) throw usage_error("a cut needs at least two subsystems");
  return Bipartition{validated_subset(cut.part, static_cast<int>(dims.size()), false)};
}

/// Mixed-radix digits of every basis index, subsystem 0 most significant.
inline std::vector<std::vector<int>> digits_table(const Dims& dims) {
  const long long total = dims_product(dims);
  std::vector<std::vector<int>> table(static_cast<std::size_t>(total), std::vector<int>(dims.size()));
  for (long long x = 0; x < total; ++x) {
    long long rem = x;
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
      table[static_cast<std::size_t>(x)][static_cast<std::size_t>(k)] = static_cast<int>(rem % dims[k]);
      rem /= dims[k];
    }
  }
  return table;
}

inline long long compose(const std::vector<int>& digits, const std::vector<int>& which, const Dims& dims) {
  long long idx = 0;
  for (int k : which) idx = idx * dims[static_cast<std::size_t>(k)] + digits[static_cast<std::size_t>(k)];
  return idx;
}

}  // namespace detail

/// Reshapes a multipartite vector into a D_A x D_B matrix for the given cut.
inline ComplexMatrix bipartite_matrix(const PureState& psi, const Bipartition& cut) {
  if (!psi.has_dims()) throw usage_error("state has no subsystem dimensions");
  const Dims& dims = psi.dims();
  const Bipartition a = detail::validated_cut(cut, dims);
  const std::vector<int> b = a.complement(static_cast<int>(dims.size()));
  long long da = 1, db = 1;
  for (int k : a.part) da *= dims[static_cast<std::size_t>(k)];
  for (int k : b) db *= dims[static_cast<std::size_t>(k)];
  ComplexMatrix m(da, db);
  const auto table = detail::digits_table(dims);
  for (std::size_t x = 0; x < table.size(); ++x)
    m(detail::compose(table[x], a.part, dims), detail::compose(table[x], b, dims)) =
        psi[static_cast<Eigen::Index>(x)];
  return m;
}

/// Traces out every subsystem not listed in `keep`.
inline DensityMatrix partial_trace(const DensityMatrix& rho, std::vector<int> keep) {
  if (!rho.has_dims()) throw usage_error("partial_trace needs subsystem dimensions");
  const Dims& dims = rho.dims();
  keep = detail::validated_subset(std::move(keep), static_cast<int>(dims.size()), true);
  const std::vector<int> traced = Bipartition{keep}.complement(static_cast<int>(dims.size()));
  long long dk = 1, dt = 1;
  Dims kept_dims;
  for (int k : keep) {
    dk *= dims[static_cast<std::size_t>(k)];
    kept_dims.push_back(dims[static_cast<std::size_t>(k)]);
  }
  for (int k : traced) dt *= dims[static_cast<std::size_t>(k)];

  // index[t][a] = full basis index with kept digits a and traced digits t
  std::vector<std::vector<Eigen::Index>> index(static_cast<std::size_t>(dt), std::vector<Eigen::Index>(static_cast<std::size_t>(dk)));
  const auto table = detail::digits_table(dims);
  for (std::size_t x = 0; x < table.size(); ++x)
    index[static_cast<std::size_t>(detail::compose(table[x], traced, dims))]
         [static_cast<std::size_t>(detail::compose(table[x], keep, dims))] = static_cast<Eigen::Index>(x);

  ComplexMatrix out = ComplexMatrix::Zero(dk, dk);
  for (const auto& row : index)
    for (long long a = 0; a < dk; ++a)
      for (long long b = 0; b < dk; ++b)
        out(a, b) += rho(row[static_cast<std::size_t>(a)], row[static_cast<std::size_t>(b)]);
  // Hermitian up to summation order; enforce it exactly
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out), std::move(kept_dims));
}

/// Schmidt probabilities lambda_i (squared Schmidt coefficients), descending.
/// psi = sum_i sqrt(lambda_i) |left_i>|right_i>.
struct SchmidtData {
  Bipartition cut;
  RealVector coefficients;
  ComplexMatrix left;
  ComplexMatrix right;

  double largest() const { return coefficients(0); }
};

inline SchmidtData schmidt_decompose(const PureState& psi, const Bipartition& cut) {
  const ComplexMatrix m = bipartite_matrix(psi, cut);
  Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SchmidtData s;
  s.cut = detail::validated_cut(cut, psi.dims());
  s.coefficients = svd.singularValues().array().square().matrix();
  s.left = svd.matrixU();
  s.right = svd.matrixV().conjugate();
  return s;
}

inline PureState tensor(const PureState& a, const PureState& b) {
  ComplexVector v(static_cast<Eigen::Index>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i) v.segment(static_cast<Eigen::Index>(i) * b.dim(), b.dim()) = a[i] * b.amplitudes();
  Dims dims = a.has_dims() ? a.dims() : Dims{a.dim()};
  const Dims db = b.has_dims() ? b.dims() : Dims{b.dim()};
  dims.insert(dims.end(), db.begin(), db.end());
  return PureState::normalized(std::move(v), std::move(dims));
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline DensityMatrix tensor(const DensityMatrix& a, const DensityMatrix& b) {
  Dims dims = a.has_dims() ? a.dims() : Dims{a.dim()};
  const Dims db = b.has_dims() ? b.dims() : Dims{b.dim()};
  dims.insert(dims.end(), db.begin(), db.end());
  return DensityMatrix(kron(a.matrix(), b.matrix()), std::move(dims));
}

}  // namespace qtex

#endif
