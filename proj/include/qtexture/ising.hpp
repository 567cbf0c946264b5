#ifndef QTEXTURE_ISING_HPP
#define QTEXTURE_ISING_HPP

// Texture observables of the periodic Ising chain
//   H = -1/2 [ sum_j sx_j sx_{j+1} + h sum_j sz_j - g sum_j sx_j ],   sx_{N+1} = sx_1,
// from the free-fermion solution (g = 0, even-parity ground state) and from exact
// diagonalization (any g, N <= 20).
//
// Site j of the chain is bit N-1-j of a computational index, so site 0 is the most
// significant digit, matching the subsystem convention of state.hpp.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "parallel.hpp"
#include "random.hpp"
#include "state.hpp"
#include "texture.hpp"

namespace qtex {

inline constexpr int max_ed_sites = 20;
inline constexpr long long max_analytic_sites = 1'000'000;

struct ChainSpec {
  int n = 8;
  double h = 0.0;
  double g = 0.0;
};

namespace detail {

inline void check_chain(const ChainSpec& spec, long long limit, const char* branch) {
  if (spec.n < 2 || spec.n % 2 != 0) throw usage_error("chain length must be an even positive integer");
  if (spec.n > limit) {
    std::ostringstream os;
    os << branch << " branch supports at most " << limit << " sites";
    throw resource_limit_error(os.str());
  }
  if (!std::isfinite(spec.h) || !std::isfinite(spec.g)) throw usage_error("fields must be finite");
}

inline void require_free_fermion(const ChainSpec& spec) {
  check_chain(spec, max_analytic_sites, "analytic");
  if (spec.g != 0.0) throw usage_error("the analytic branch requires g = 0");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Free-fermion branch

struct MomentumMode {
  int p = 1;
  double phi = 0.0;
  double lambda = 0.0;
  double theta = 0.0;
  double u = 0.0;     ///< cos(theta)
  double v_im = 0.0;  ///< v = i sin(theta)
  double arccos_residual = 0.0;  ///< amount the arccos argument left [-1, 1] before clamping
};

/// Modes p = 1..N/2 of the antiperiodic sector, phi_p = (2p - 1) pi / N.
inline std::vector<MomentumMode> bogoliubov_modes(const ChainSpec& spec) {
  detail::require_free_fermion(spec);
  std::vector<MomentumMode> modes;
  modes.reserve(static_cast<std::size_t>(spec.n / 2));
  for (int p = 1; p <= spec.n / 2; ++p) {
    MomentumMode m;
    m.p = p;
    m.phi = (2.0 * p - 1.0) * std::numbers::pi / spec.n;
    const double s = std::sin(m.phi);
    const double c = std::cos(m.phi) - spec.h;
    m.lambda = std::hypot(c, s);
    // lambda - c loses every digit when c ~ lambda; use sin^2 / (lambda + c) there
    const double lambda_minus_c = c > 0.0 ? s * s / (m.lambda + c) : m.lambda - c;
    const double arg = -lambda_minus_c / std::sqrt(2.0 * m.lambda * lambda_minus_c);
    m.arccos_residual = std::max(0.0, std::abs(arg) - 1.0);
    m.theta = std::acos(std::clamp(arg, -1.0, 1.0));
    m.u = std::cos(m.theta);
    m.v_im = std::sin(m.theta);
    modes.push_back(m);
  }
  return modes;
}

struct AnalyticRugosity {
  double value = 0.0;
  double max_form_gap = 0.0;         ///< largest per-mode difference of the two overlap forms
  double max_arccos_residual = 0.0;
};

/// ln 2 - sum_p ln sin^2(theta_p - phi_p/2). The ln 2 is the weight of |+...+> on the
/// even-parity sector that hosts the ground state.
inline AnalyticRugosity analytic_rugosity_report(const ChainSpec& spec) {
  AnalyticRugosity r;
  r.value = std::numbers::ln2;
  for (const MomentumMode& m : bogoliubov_modes(spec)) {
    const double angle_form = std::pow(std::sin(m.theta - 0.5 * m.phi), 2);
    const cplx v(0.0, m.v_im);
    const double amplitude_form = std::norm(v * std::cos(0.5 * m.phi) - cplx(0.0, 1.0) * m.u * std::sin(0.5 * m.phi));
    r.max_form_gap = std::max(r.max_form_gap, std::abs(angle_form - amplitude_form));
    r.max_arccos_residual = std::max(r.max_arccos_residual, m.arccos_residual);
    if (angle_form < 1e-300) {
      r.value = std::numeric_limits<double>::infinity();
      continue;
    }
    r.value -= std::log(angle_form);
  }
  if (r.max_form_gap > 1e-10) {
    std::ostringstream os;
    os << "mode overlap forms disagree by " << r.max_form_gap;
    throw numerical_error(os.str());
  }
  if (r.max_arccos_residual > 1e-9) {
    std::ostringstream os;
    os << "Bogoliubov angle argument left [-1, 1] by " << r.max_arccos_residual;
    throw numerical_error(os.str());
  }
  return r;
}

inline double analytic_rugosity(const ChainSpec& spec) { return analytic_rugosity_report(spec).value; }

/// Free-fermion ground energy -sum_p lambda_p.
inline double analytic_ground_energy(const ChainSpec& spec) {
  double e = 0.0;
  for (const MomentumMode& m : bogoliubov_modes(spec)) e -= m.lambda;
  return e;
}

struct PairObservables {
  double m_z = 0.0;
  double c_xx = 0.0;
  double c_yy = 0.0;
  double c_zz = 0.0;
  DensityMatrix rho_pair = DensityMatrix::maximally_mixed(4, {2, 2});
  double pair_rugosity = 0.0;          ///< -ln <++|rho_pair|++>
  double pair_rugosity_formula = 0.0;  ///< -ln[(1 + c_xx) / 4]
  double pair_rugosity_per_site = 0.0; ///< pair_rugosity / N
};

namespace detail {

/// 1/4 [I + m_z (Z1 + Z2) + sum_a C_aa sa sa] in the basis |00>, |01>, |10>, |11>.
inline ComplexMatrix symmetric_pair_matrix(double mz, double cxx, double cyy, double czz) {
  ComplexMatrix r = ComplexMatrix::Zero(4, 4);
  r(0, 0) = 0.25 * (1.0 + 2.0 * mz + czz);
  r(3, 3) = 0.25 * (1.0 - 2.0 * mz + czz);
  r(1, 1) = r(2, 2) = 0.25 * (1.0 - czz);
  r(0, 3) = r(3, 0) = 0.25 * (cxx - cyy);
  r(1, 2) = r(2, 1) = 0.25 * (cxx + cyy);
  return r;
}

inline void finish_pair(PairObservables& o, int n) {
  const ComplexVector plus = ComplexVector::Constant(4, 0.5);
  const double overlap = plus.dot(o.rho_pair.matrix() * plus).real();
  auto neg_log = [](double x) { return x > 0.0 ? -std::log(x) : std::numeric_limits<double>::infinity(); };
  o.pair_rugosity = neg_log(overlap);
  o.pair_rugosity_formula = neg_log(0.25 * (1.0 + o.c_xx));
  o.pair_rugosity_per_site = o.pair_rugosity / n;
}

}  // namespace detail

/// Nearest-neighbour observables from the Majorana two-point function
/// G_r = (2/N) sum_p [sin(phi r) sin(phi) - cos(phi r)(h - cos(phi))] / lambda:
/// m_z = -G_0, C_xx = G_1, C_yy = G_{-1}, C_zz = G_0^2 - G_1 G_{-1}.
inline PairObservables pair_observables(const ChainSpec& spec) {
  const std::vector<MomentumMode> modes = bogoliubov_modes(spec);
  auto contraction = [&](int r) {
    double s = 0.0;
    for (const MomentumMode& m : modes)
      s += (std::sin(m.phi * r) * std::sin(m.phi) - std::cos(m.phi * r) * (spec.h - std::cos(m.phi))) / m.lambda;
    return 2.0 * s / spec.n;
  };
  const double g0 = contraction(0), g1 = contraction(1), gm = contraction(-1);
  PairObservables o;
  o.m_z = -g0;
  o.c_xx = g1;
  o.c_yy = gm;
  o.c_zz = g0 * g0 - g1 * gm;
  o.rho_pair = DensityMatrix(detail::symmetric_pair_matrix(o.m_z, o.c_xx, o.c_yy, o.c_zz), {2, 2});
  detail::finish_pair(o, spec.n);
  return o;
}

// ---------------------------------------------------------------------------
// Exact diagonalization

enum class EdSolver { automatic, lanczos, dense };

struct EdGroundState {
  PureState state;
  double energy = 0.0;
  double gap = 0.0;  ///< to the competing level (opposite parity when g = 0)
  bool near_degenerate = false;
  double residual = 0.0;  ///< ||H psi - E psi||
  int iterations = 0;     ///< Lanczos restarts, 0 for the dense path
};

namespace detail {

enum class Parity { any, even, odd };

class IsingOperator {
public:
  explicit IsingOperator(const ChainSpec& spec) : n_(spec.n), h_(spec.h), g_(spec.g), dim_(std::uint64_t{1} << spec.n) {
    for (int j = 0; j < n_; ++j) bond_masks_.push_back(site_bit(j) | site_bit((j + 1) % n_));
  }

  std::uint64_t dim() const { return dim_; }

  std::uint64_t site_bit(int j) const { return std::uint64_t{1} << (n_ - 1 - j); }

  void apply(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
    for (std::uint64_t s = 0; s < dim_; ++s) {
      const int up = n_ - 2 * std::popcount(s);  // sum of sz eigenvalues, |0> has sz = +1
      double acc = -0.5 * h_ * up * x[static_cast<Eigen::Index>(s)];
      for (std::uint64_t mask : bond_masks_) acc -= 0.5 * x[static_cast<Eigen::Index>(s ^ mask)];
      if (g_ != 0.0)
        for (int j = 0; j < n_; ++j) acc += 0.5 * g_ * x[static_cast<Eigen::Index>(s ^ site_bit(j))];
      y[static_cast<Eigen::Index>(s)] = acc;
    }
  }

  Eigen::MatrixXd dense() const {
    const auto d = static_cast<Eigen::Index>(dim_);
    Eigen::MatrixXd m(d, d);
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d), col(d);
    for (Eigen::Index k = 0; k < d; ++k) {
      e[k] = 1.0;
      apply(e, col);
      m.col(k) = col;
      e[k] = 0.0;
    }
    return m;
  }

private:
  int n_;
  double h_, g_;
  std::uint64_t dim_;
  std::vector<std::uint64_t> bond_masks_;
};

inline void project_parity(Eigen::VectorXd& x, Parity parity) {
  if (parity == Parity::any) return;
  const int keep = parity == Parity::even ? 0 : 1;
  for (Eigen::Index s = 0; s < x.size(); ++s)
    if (std::popcount(static_cast<std::uint64_t>(s)) % 2 != keep) x[s] = 0.0;
}

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
  int restarts = 0;
};

/// Lowest eigenpair of the operator inside a parity sector and orthogonal to `deflate`.
/// Thick-restarted at the current Ritz vector with full reorthogonalization.
inline Eigenpair lanczos_lowest(const IsingOperator& op, Parity parity, const std::vector<Eigen::VectorXd>& deflate,
                                std::uint64_t seed) {
  const auto d = static_cast<Eigen::Index>(op.dim());
  auto clean = [&](Eigen::VectorXd& x) {
    project_parity(x, parity);
    for (const Eigen::VectorXd& q : deflate) x -= q.dot(x) * q;
  };
  Rng rng = make_rng(seed, 0x15A);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x(d);
  for (Eigen::Index i = 0; i < d; ++i) x[i] = normal(rng);
  clean(x);
  if (x.norm() == 0.0) throw numerical_error("Lanczos start vector vanished in the requested sector");
  x.normalize();

  constexpr int krylov = 60;
  constexpr int max_restarts = 500;
  Eigenpair out;
  Eigen::VectorXd w(d);
  for (int restart = 1; restart <= max_restarts; ++restart) {
    std::vector<Eigen::VectorXd> basis{x};
    std::vector<double> alpha, beta;
    for (int k = 0; k < krylov; ++k) {
      op.apply(basis.back(), w);
      clean(w);
      alpha.push_back(basis.back().dot(w));
      for (int pass = 0; pass < 2; ++pass)
        for (const Eigen::VectorXd& q : basis) w -= q.dot(w) * q;
      const double b = w.norm();
      if (k + 1 == krylov || b < 1e-13) break;
      beta.push_back(b);
      basis.push_back(w / b);
    }
    const auto m = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) t(i, i) = alpha[static_cast<std::size_t>(i)];
    for (Eigen::Index i = 0; i + 1 < m; ++i) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    x.setZero();
    for (Eigen::Index i = 0; i < m; ++i) x += y[i] * basis[static_cast<std::size_t>(i)];
    clean(x);
    x.normalize();

    op.apply(x, w);
    clean(w);
    const double e = x.dot(w);
    out.value = e;
    out.residual = (w - e * x).norm();
    out.restarts = restart;
    if (out.residual <= 1e-10 * std::max(1.0, std::abs(e))) {
      out.vector = x;
      return out;
    }
  }
  std::ostringstream os;
  os << "Lanczos did not converge: residual " << out.residual << " after " << max_restarts << " restarts";
  throw numerical_error(os.str());
}

inline Eigenpair dense_lowest(const IsingOperator& op, Parity parity, int which = 0) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index s = 0; s < static_cast<Eigen::Index>(op.dim()); ++s) {
    const int odd = std::popcount(static_cast<std::uint64_t>(s)) % 2;
    if (parity == Parity::any || (parity == Parity::even) == (odd == 0)) idx.push_back(s);
  }
  const Eigen::MatrixXd full = op.dense();
  const auto k = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index a = 0; a < k; ++a)
    for (Eigen::Index b = 0; b < k; ++b) sub(a, b) = full(idx[static_cast<std::size_t>(a)], idx[static_cast<std::size_t>(b)]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sub);
  Eigenpair out;
  out.value = es.eigenvalues()[which];
  out.vector = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(op.dim()));
  for (Eigen::Index a = 0; a < k; ++a) out.vector[idx[static_cast<std::size_t>(a)]] = es.eigenvectors()(a, which);
  Eigen::VectorXd w(out.vector.size());
  op.apply(out.vector, w);
  out.residual = (w - out.value * out.vector).norm();
  return out;
}

}  // namespace detail

/// Ground state by exact diagonalization. At g = 0 the search is restricted to the
/// even-parity sector (the sector of the free-fermion ground state); the reported gap is
/// then to the odd-parity ground level, which becomes exponentially close for |h| < 1.
inline EdGroundState ed_ground_state(const ChainSpec& spec, EdSolver solver = EdSolver::automatic) {
  detail::check_chain(spec, max_ed_sites, "exact-diagonalization");
  const detail::IsingOperator op(spec);
  const bool dense = solver == EdSolver::dense || (solver == EdSolver::automatic && spec.n <= 8);
  if (dense && spec.n > 10) throw resource_limit_error("dense diagonalization is limited to 10 sites");

  detail::Eigenpair ground, competitor;
  if (spec.g == 0.0) {
    ground = dense ? detail::dense_lowest(op, detail::Parity::even)
                   : detail::lanczos_lowest(op, detail::Parity::even, {}, 1);
    competitor = dense ? detail::dense_lowest(op, detail::Parity::odd)
                       : detail::lanczos_lowest(op, detail::Parity::odd, {}, 2);
  } else {
    ground = dense ? detail::dense_lowest(op, detail::Parity::any)
                   : detail::lanczos_lowest(op, detail::Parity::any, {}, 1);
    competitor = dense ? detail::dense_lowest(op, detail::Parity::any, 1)
                       : detail::lanczos_lowest(op, detail::Parity::any, {ground.vector}, 2);
  }
  if (ground.residual > 1e-10 * std::max(1.0, std::abs(ground.value))) {
    std::ostringstream os;
    os << "ground state residual " << ground.residual << " above tolerance";
    throw numerical_error(os.str());
  }

  Eigen::VectorXd v = ground.vector;
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax] < 0.0) v = -v;
  v.normalize();

  EdGroundState out{PureState(v.cast<cplx>(), Dims(static_cast<std::size_t>(spec.n), 2))};
  out.energy = ground.value;
  out.gap = competitor.value - ground.value;
  out.near_degenerate = out.gap < 1e-8;
  out.residual = ground.residual;
  out.iterations = ground.restarts;
  return out;
}

inline double ed_rugosity(const ChainSpec& spec, EdSolver solver = EdSolver::automatic) {
  return rugosity_pure(ed_ground_state(spec, solver).state);
}

/// Reduced state of sites (site, site + 1) of a chain state, read off directly as M M^dagger.
inline DensityMatrix adjacent_pair_state(const PureState& chain, int site = 0) {
  const int n = static_cast<int>(chain.dims().size());
  if (site < 0 || site + 1 >= n) throw usage_error("pair site out of range");
  const ComplexMatrix m = bipartite_matrix(chain, Bipartition{{site, site + 1}});
  ComplexMatrix rho = m * m.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho), {2, 2});
}

inline PairObservables pair_observables_from_state(const DensityMatrix& rho_pair, int n) {
  const ComplexMatrix& r = rho_pair.matrix();
  PairObservables o;
  o.m_z = r(0, 0).real() - r(3, 3).real();  // average of <Z1> and <Z2>
  o.c_zz = r(0, 0).real() - r(1, 1).real() - r(2, 2).real() + r(3, 3).real();
  o.c_xx = 2.0 * (r(0, 3).real() + r(1, 2).real());
  o.c_yy = 2.0 * (r(1, 2).real() - r(0, 3).real());
  o.rho_pair = rho_pair;
  detail::finish_pair(o, n);
  return o;
}

inline PairObservables ed_pair_observables(const ChainSpec& spec, EdSolver solver = EdSolver::automatic) {
  return pair_observables_from_state(adjacent_pair_state(ed_ground_state(spec, solver).state), spec.n);
}

// ---------------------------------------------------------------------------
// Scans

enum class ScanAxis { h, g };
enum class Observable { full, pair };
enum class Method { analytic, ed };

struct ScanGrid {
  ScanAxis axis = ScanAxis::h;
  std::vector<double> points;
  std::vector<double> rugosity;
  std::vector<double> normalized_rugosity;
  std::vector<double> first_derivative;   ///< at points[1 .. n-2]
  std::vector<double> second_derivative;  ///< at points[2 .. n-3]
  std::optional<double> kink_estimate;
};

/// from, from + step, ..., to (inclusive up to rounding).
inline std::vector<double> uniform_grid(double from, double to, double step) {
  if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from)
    throw usage_error("grid needs finite from <= to and a positive step");
  const auto count = static_cast<long long>(std::floor((to - from) / step + 1e-9)) + 1;
  if (count > 10'000'000) throw resource_limit_error("grid has too many points");
  std::vector<double> grid;
  for (long long i = 0; i < count; ++i) grid.push_back(from + static_cast<double>(i) * step);
  return grid;
}

/// Central differences on a possibly nonuniform grid; returns values at x[1 .. n-2].
inline std::vector<double> central_difference(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> d;
  for (std::size_t i = 1; i + 1 < y.size(); ++i) d.push_back((y[i + 1] - y[i - 1]) / (x[i + 1] - x[i - 1]));
  return d;
}

inline double observable_value(const ChainSpec& spec, Observable observable, Method method) {
  if (method == Method::analytic)
    return observable == Observable::full ? analytic_rugosity(spec) : pair_observables(spec).pair_rugosity;
  return observable == Observable::full ? ed_rugosity(spec) : ed_pair_observables(spec).pair_rugosity;
}

/// Rugosity along one field axis with derivatives and the curvature-peak location inside `window`
/// (whole grid when absent).
inline ScanGrid scan(const ChainSpec& base, ScanAxis axis, std::vector<double> grid, Observable observable,
                     Method method, std::optional<std::pair<double, double>> window = std::nullopt) {
  if (grid.size() < 5) throw usage_error("scan needs at least five grid points");
  if (!std::is_sorted(grid.begin(), grid.end()) || std::adjacent_find(grid.begin(), grid.end()) != grid.end())
    throw usage_error("scan grid must be strictly increasing");
  if (method == Method::analytic && (axis == ScanAxis::g || base.g != 0.0))
    throw usage_error("the analytic branch requires g = 0; use --method ed");
  detail::check_chain(base, method == Method::ed ? max_ed_sites : max_analytic_sites,
                      method == Method::ed ? "exact-diagonalization" : "analytic");

  ScanGrid out;
  out.axis = axis;
  out.points = std::move(grid);
  out.rugosity.resize(out.points.size());
  parallel_for(out.points.size(), [&](std::size_t i) {
    ChainSpec spec = base;
    (axis == ScanAxis::h ? spec.h : spec.g) = out.points[i];
    out.rugosity[i] = observable_value(spec, observable, method);
  });
  for (double r : out.rugosity) out.normalized_rugosity.push_back(r / base.n);

  out.first_derivative = central_difference(out.points, out.rugosity);
  const std::vector<double> inner(out.points.begin() + 1, out.points.end() - 1);
  out.second_derivative = central_difference(inner, out.first_derivative);

  double peak = -1.0;
  for (std::size_t j = 0; j < out.second_derivative.size(); ++j) {
    const double x = out.points[j + 2];
    if (window && (x < window->first || x > window->second)) continue;
    const double a = std::abs(out.second_derivative[j]);
    if (std::isfinite(a) && a > peak) {
      peak = a;
      out.kink_estimate = x;
    }
  }
  return out;
}

}  // namespace qtex

#endif
