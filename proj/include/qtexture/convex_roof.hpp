#ifndef QTEXTURE_CONVEX_ROOF_HPP
#define QTEXTURE_CONVEX_ROOF_HPP

// Convex-roof extension of a pure-state monotone by direct search over
// pure-state decompositions.
//
// Every decomposition of rho with m elements is sqrt(p_i)|Psi_i> = sum_j V_ij sqrt(mu_j)|e_j>
// for an m x r matrix V with orthonormal columns, (mu_j, e_j) the nonzero eigenpairs of rho.
// We keep the unnormalized branch vectors b_i = sqrt(p_i)|Psi_i> as the columns of a d x m
// matrix B = E sqrt(mu) V^T. Left-multiplying V by a unitary on two rows (i, k) mixes
// b_i and b_k by the same 2x2 unitary and leaves B B^dagger = rho untouched, so a sweep
// over all row pairs with a derivative-free 2-parameter search stays feasible at every step.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "monotones.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "state.hpp"

namespace qtex {

struct RoofConfig {
  int cardinality = 0;  ///< decomposition size m; 0 selects rank^2
  int restarts = 32;
  double tolerance = 1e-6;  ///< a start stops once a full sweep improves by less than this
  int max_iterations = 2000;  ///< sweeps per start
  std::uint64_t seed = 0;
  Bipartition cut{{0}};  ///< used by the bipartite entanglement theory
};

struct WeightedState {
  double probability = 0.0;
  PureState state;
};

struct ConvexRoofResult {
  double value = 0.0;
  std::vector<WeightedState> decomposition;
  int restarts_used = 0;
  bool converged = false;
  std::optional<double> gap_to_oracle;
};

namespace detail {

/// Largest eigenvalue of M M^dagger for a small matrix.
inline double top_singular_value_sq(const ComplexMatrix& m) {
  if (m.rows() == 2 && m.cols() == 2) {
    const double f = m.squaredNorm();
    const double det = std::norm(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
    return 0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * det)));
  }
  const ComplexMatrix g = m.rows() <= m.cols() ? ComplexMatrix(m * m.adjoint()) : ComplexMatrix(m.adjoint() * m);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(g, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(g.rows() - 1);
}

/// Reshape map of one cut: full index -> (row, col).
struct CutLayout {
  Eigen::Index rows = 0, cols = 0;
  std::vector<Eigen::Index> row, col;

  CutLayout(const Dims& dims, const Bipartition& cut) {
    const Bipartition a = validated_cut(cut, dims);
    const std::vector<int> b = a.complement(static_cast<int>(dims.size()));
    rows = 1;
    cols = 1;
    for (int k : a.part) rows *= dims[static_cast<std::size_t>(k)];
    for (int k : b) cols *= dims[static_cast<std::size_t>(k)];
    const auto table = digits_table(dims);
    for (const auto& digits : table) {
      row.push_back(compose(digits, a.part, dims));
      col.push_back(compose(digits, b, dims));
    }
  }

  ComplexMatrix reshape(const ComplexVector& w) const {
    ComplexMatrix m(rows, cols);
    for (std::size_t x = 0; x < row.size(); ++x) m(row[x], col[x]) = w(static_cast<Eigen::Index>(x));
    return m;
  }
};

/// p * M(w / sqrt p) with p = |w|^2, evaluated directly on the unnormalized branch.
class BranchCost {
public:
  BranchCost(Theory theory, const Dims& dims, int dim, const Bipartition& cut) : theory_(theory) {
    switch (theory) {
      case Theory::coherence: break;
      case Theory::nonstabilizerness:
        if (dim != 2) throw unsupported_dimension_error("non-stabilizerness roof needs a single qubit");
        break;
      case Theory::entanglement_bipartite:
        if (dims.size() < 2) throw usage_error("entanglement roof needs subsystem dimensions");
        layouts_.emplace_back(dims, cut);
        break;
      case Theory::gme:
        if (dims.size() < 2) throw usage_error("GGM roof needs subsystem dimensions");
        if (static_cast<int>(dims.size()) > max_gme_subsystems)
          throw resource_limit_error("GGM bipartition enumeration is limited to 12 subsystems");
        for (const Bipartition& c : all_bipartitions(static_cast<int>(dims.size()))) layouts_.emplace_back(dims, c);
        break;
    }
  }

  double operator()(const ComplexVector& w) const {
    const double p = w.squaredNorm();
    if (p <= 0.0) return 0.0;
    switch (theory_) {
      case Theory::coherence: return std::max(0.0, p - w.cwiseAbs2().maxCoeff());
      case Theory::nonstabilizerness: {
        const cplx cross = std::conj(w(0)) * w(1);
        const double m = std::max({std::abs(2.0 * cross.real()), std::abs(2.0 * cross.imag()),
                                   std::abs(std::norm(w(0)) - std::norm(w(1)))});
        return std::max(0.0, 0.5 * (p - m));
      }
      case Theory::entanglement_bipartite:
      case Theory::gme: {
        double top = 0.0;
        for (const CutLayout& l : layouts_) top = std::max(top, top_singular_value_sq(l.reshape(w)));
        return std::max(0.0, p - top);
      }
    }
    return 0.0;
  }

private:
  Theory theory_;
  std::vector<CutLayout> layouts_;
};

struct RoofStart {
  double value = std::numeric_limits<double>::infinity();
  ComplexMatrix branches;
  bool converged = false;
};

class PairSweepSearch {
public:
  PairSweepSearch(const BranchCost& cost, const RoofConfig& cfg) : cost_(cost), cfg_(cfg) {}

  RoofStart run(ComplexMatrix branches) const {
    const Eigen::Index m = branches.cols();
    std::vector<double> costs(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) costs[static_cast<std::size_t>(i)] = cost_(branches.col(i));
    RoofStart out;
    double total = sum(costs);
    for (int sweep = 0; sweep < cfg_.max_iterations; ++sweep) {
      for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index k = i + 1; k < m; ++k) optimize_pair(branches, costs, i, k, sweep == 0);
      const double next = sum(costs);
      const double gain = total - next;
      total = next;
      if (gain < cfg_.tolerance) {
        out.converged = true;
        break;
      }
    }
    out.value = total;
    out.branches = std::move(branches);
    return out;
  }

private:
  static double sum(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }

  // Coarse grid (when `global`) then compass search over the pair rotation
  // G(z) = [cos|z|, -e^{i arg z} sin|z|; e^{-i arg z} sin|z|, cos|z|], z = x + iy.
  // Cartesian z keeps the landscape well conditioned near the identity.
  void optimize_pair(ComplexMatrix& b, std::vector<double>& costs, Eigen::Index i, Eigen::Index k,
                     bool global) const {
    const ComplexVector wi = b.col(i), wk = b.col(k);
    if (wi.squaredNorm() + wk.squaredNorm() < 1e-28) return;
    const double current = costs[static_cast<std::size_t>(i)] + costs[static_cast<std::size_t>(k)];

    auto mix = [&](double x, double y, ComplexVector& a, ComplexVector& c) {
      const double r = std::hypot(x, y);
      const double ct = std::cos(r);
      const cplx es = r > 0.0 ? cplx(x, y) * (std::sin(r) / r) : cplx(0.0);
      a = ct * wi - es * wk;
      c = std::conj(es) * wi + ct * wk;
    };
    ComplexVector a, c;
    auto value = [&](double x, double y) {
      mix(x, y, a, c);
      return cost_(a) + cost_(c);
    };

    constexpr double pi = std::numbers::pi;
    double bx = 0.0, by = 0.0, best = current;
    constexpr int grid_radius = 6, grid_phase = 6;
    for (int u = 1; global && u < grid_radius; ++u)
      for (int v = 0; v < grid_phase; ++v) {
        const double x = pi * u / grid_radius * std::cos(2.0 * pi * v / grid_phase);
        const double y = pi * u / grid_radius * std::sin(2.0 * pi * v / grid_phase);
        const double f = value(x, y);
        if (f < best) {
          best = f;
          bx = x;
          by = y;
        }
      }
    // the objective is quadratic near a minimum, so steps of 1e-5 resolve it to ~1e-10
    double step = global ? pi / (2 * grid_radius) : 0.05;
    while (step > 1e-5) {
      bool moved = false;
      const double cand[4][2] = {{step, 0}, {-step, 0}, {0, step}, {0, -step}};
      for (const auto& d : cand) {
        const double f = value(bx + d[0], by + d[1]);
        if (f < best - 1e-14) {
          best = f;
          bx += d[0];
          by += d[1];
          moved = true;
          break;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (best < current - 1e-15) {
      mix(bx, by, a, c);
      b.col(i) = a;
      b.col(k) = c;
      costs[static_cast<std::size_t>(i)] = cost_(a);
      costs[static_cast<std::size_t>(k)] = cost_(c);
    }
  }

  const BranchCost& cost_;
  const RoofConfig& cfg_;
};

}  // namespace detail

/// Upper bound on the convex roof of a pure-state monotone; exact in the limit of a
/// successful global search. Restarts are independent and merged by minimum.
inline ConvexRoofResult convex_roof(const DensityMatrix& rho, Theory theory, const RoofConfig& config = {}) {
  if (config.restarts < 1) throw usage_error("convex roof needs at least one restart");
  if (config.max_iterations < 1) throw usage_error("convex roof needs max_iterations >= 1");
  const detail::BranchCost cost(theory, rho.dims(), rho.dim(), config.cut);

  const Spectrum s = spectral_decompose(rho);
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < s.eigenvalues.size(); ++j)
    if (s.eigenvalues(j) > 1e-14) support.push_back(j);
  const int rank = static_cast<int>(support.size());
  const int m = config.cardinality > 0 ? config.cardinality : rank * rank;
  if (m < rank) throw usage_error("decomposition cardinality must be at least the rank");

  ComplexMatrix weighted(rho.dim(), rank);
  for (int j = 0; j < rank; ++j)
    weighted.col(j) = std::sqrt(s.eigenvalues(support[static_cast<std::size_t>(j)])) *
                      s.eigenvectors.col(support[static_cast<std::size_t>(j)]);

  const detail::PairSweepSearch search(cost, config);
  std::vector<detail::RoofStart> starts(static_cast<std::size_t>(config.restarts));
  parallel_for(starts.size(), [&](std::size_t r) {
    ComplexMatrix v;  // m x rank, orthonormal columns
    if (r == 0) {
      v = ComplexMatrix::Identity(m, rank);
    } else {
      Rng rng = make_rng(config.seed, r);
      v = haar_unitary(m, rng).leftCols(rank);
    }
    starts[r] = search.run(weighted * v.transpose());
  });

  std::size_t best = 0;
  for (std::size_t r = 1; r < starts.size(); ++r)
    if (starts[r].value < starts[best].value) best = r;

  ConvexRoofResult out;
  out.restarts_used = config.restarts;
  out.converged = starts[best].converged;
  const ComplexMatrix& b = starts[best].branches;
  double value = 0.0;
  for (Eigen::Index i = 0; i < b.cols(); ++i) {
    const double p = b.col(i).squaredNorm();
    if (p < 1e-14) continue;
    PureState psi = PureState::normalized(b.col(i), rho.dims());
    value += p * pure_monotone(psi, theory, config.cut).value;
    out.decomposition.push_back({p, std::move(psi)});
  }
  out.value = value;
  if (theory == Theory::entanglement_bipartite && rho.dims() == Dims{2, 2})
    out.gap_to_oracle = out.value - two_qubit_entanglement_roof(rho);
  return out;
}

}  // namespace qtex

#endif
