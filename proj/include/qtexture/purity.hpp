#ifndef QTEXTURE_PURITY_HPP
#define QTEXTURE_PURITY_HPP

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "state.hpp"

namespace qtex {

/// d (lambda_max - lambda_min): the spread between max and min texture, scaled by d.
inline double texture_purity(const Spectrum& s) {
  return static_cast<double>(s.eigenvalues.size()) * (s.largest() - s.smallest());
}

inline double texture_purity(const DensityMatrix& rho) { return texture_purity(spectral_decompose(rho)); }

/// Renyi alpha-purity in bits: log2 d - S_alpha(rho).
inline double renyi_purity(const Spectrum& s, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw usage_error("Renyi order must be a positive finite number");
  if (alpha == 1.0) throw usage_error("Renyi order 1 (von Neumann limit) is not supported");
  double sum = 0.0;
  for (Eigen::Index i = 0; i < s.eigenvalues.size(); ++i) {
    const double l = std::max(0.0, s.eigenvalues(i));
    if (l > 0.0) sum += std::pow(l, alpha);
  }
  const double d = static_cast<double>(s.eigenvalues.size());
  return std::log2(d) - std::log2(sum) / (1.0 - alpha);
}

inline double renyi_purity(const DensityMatrix& rho, double alpha) {
  return renyi_purity(spectral_decompose(rho), alpha);
}

/// ceil(log2 P) for rank-deficient states (lambda_min <= tol::rank), otherwise empty.
inline std::optional<int> single_shot_cost(const Spectrum& s) {
  if (s.smallest() > tol::rank) return std::nullopt;
  const double p = texture_purity(s);
  // P is an integer for projectors; absorb rounding just above it
  return static_cast<int>(std::ceil(std::log2(p) - 1e-9));
}

inline std::optional<int> single_shot_cost(const DensityMatrix& rho) {
  return single_shot_cost(spectral_decompose(rho));
}

struct PurityReport {
  double texture_purity = 0.0;
  std::map<double, double> renyi_purities;
  double renyi2 = 0.0;
  double renyi2_bound_rhs = 0.0;
  bool bound_satisfied = false;
  std::optional<int> single_shot_cost;
};

/// Evaluates P_2(rho) >= log2(1 + P^2 / (2d)); the two sides coincide for qubits.
inline PurityReport check_renyi2_bound(const DensityMatrix& rho, const std::vector<double>& alphas = {}) {
  const Spectrum s = spectral_decompose(rho);
  const double d = rho.dim();
  PurityReport r;
  r.texture_purity = texture_purity(s);
  r.renyi2 = renyi_purity(s, 2.0);
  r.renyi2_bound_rhs = std::log2(1.0 + r.texture_purity * r.texture_purity / (2.0 * d));
  r.bound_satisfied = r.renyi2 >= r.renyi2_bound_rhs - 1e-10;
  if (rho.dim() == 2 && std::abs(r.renyi2 - r.renyi2_bound_rhs) > 1e-10) {
    std::ostringstream os;
    os << "qubit Renyi-2 identity violated by " << std::abs(r.renyi2 - r.renyi2_bound_rhs);
    throw numerical_error(os.str());
  }
  for (double a : alphas) r.renyi_purities[a] = renyi_purity(s, a);
  r.single_shot_cost = single_shot_cost(s);
  return r;
}

}  // namespace qtex

#endif
