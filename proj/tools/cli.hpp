#ifndef QTEXTURE_TOOLS_CLI_HPP
#define QTEXTURE_TOOLS_CLI_HPP

// The qtexture command line. run() is separate from main() so tests can drive it
// with in-memory streams.
//
// Exit codes: 0 success, 1 numerical failure or bad input file, 2 usage error.
// Results are buffered and reach `out` only on success.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <qtexture/convex_roof.hpp>
#include <qtexture/io.hpp>
#include <qtexture/ising.hpp>
#include <qtexture/monotones.hpp>
#include <qtexture/purity.hpp>
#include <qtexture/texture.hpp>

namespace qtex::cli {

// ---------------------------------------------------------------------------
// Argument helpers

/// "0,1:2" -> part {0, 1}; the right-hand side, when present, must be the complement.
inline Bipartition parse_cut(const std::string& text, int subsystems) {
  auto parse_list = [&](const std::string& s) {
    std::vector<int> v;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        std::size_t used = 0;
        const int k = std::stoi(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
        v.push_back(k);
      } catch (const std::exception&) {
        throw usage_error("malformed cut '" + text + "'");
      }
    }
    std::sort(v.begin(), v.end());
    return v;
  };
  const auto colon = text.find(':');
  Bipartition cut{parse_list(text.substr(0, colon))};
  if (cut.part.empty()) throw usage_error("cut '" + text + "' has an empty side");
  cut.part = qtex::detail::validated_subset(cut.part, subsystems, false);
  if (colon != std::string::npos && parse_list(text.substr(colon + 1)) != cut.complement(subsystems))
    throw usage_error("cut '" + text + "': the two sides must partition all subsystems");
  return cut;
}

inline std::pair<double, double> parse_window(const std::string& text) {
  const auto comma = text.find(',');
  try {
    if (comma == std::string::npos) throw std::invalid_argument(text);
    std::size_t a = 0, b = 0;
    const std::string lo_s = text.substr(0, comma), hi_s = text.substr(comma + 1);
    const double lo = std::stod(lo_s, &a), hi = std::stod(hi_s, &b);
    if (a != lo_s.size() || b != hi_s.size() || !(lo < hi)) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::exception&) {
    throw usage_error("--kink-window expects LO,HI with LO < HI, got '" + text + "'");
  }
}

inline Theory parse_theory(const std::string& name) {
  if (name == "coherence") return Theory::coherence;
  if (name == "magic") return Theory::nonstabilizerness;
  if (name == "entangle") return Theory::entanglement_bipartite;
  if (name == "ggm") return Theory::gme;
  throw usage_error("unknown theory '" + name + "'");
}

inline int subsystem_count(const AnyState& s) {
  return std::visit([](const auto& x) { return x.has_dims() ? static_cast<int>(x.dims().size()) : 1; }, s);
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f || !(f << content) || !f.flush()) throw numerical_error("cannot write '" + path + "'");
}

inline void add_witness(Record& r, const MonotoneResult& m, int subsystems) {
  std::visit(
      [&](const auto& w) {
        using W = std::decay_t<decltype(w)>;
        if constexpr (std::is_same_v<W, CoherenceWitness>) {
          r.add("witness_index", w.index).add("witness_weight", w.weight);
        } else if constexpr (std::is_same_v<W, MagicWitness>) {
          r.add("witness_axis", std::string(1, w.axis)).add("witness_magnetization", w.magnetization);
        } else {
          r.add("witness_cut", to_string(w.cut, subsystems)).add("witness_lambda1", w.lambda1);
        }
      },
      m.witness);
}

/// Generic matplotlib script that plots a scan CSV written by `ising scan`.
inline std::string plot_script(const std::string& csv_path, const std::string& axis) {
  std::ostringstream s;
  s << "import csv\n"
       "import matplotlib\n"
       "matplotlib.use(\"Agg\")\n"
       "import matplotlib.pyplot as plt\n\n"
    << "CSV = " << json(csv_path).dump() << "\n"
    << "AXIS = " << json(axis).dump() << "\n\n"
    << "rows = [r for r in csv.reader(open(CSV)) if r and not r[0].startswith(\"#\")]\n"
       "head, body = rows[0], rows[1:]\n"
       "col = {name: i for i, name in enumerate(head)}\n"
       "x = [float(r[col[\"point\"]]) for r in body]\n"
       "y = [float(r[col[\"normalized_rugosity\"]]) for r in body]\n"
       "d2 = [(float(r[col[\"point\"]]), float(r[col[\"d2\"]])) for r in body if r[col[\"d2\"]]]\n\n"
       "fig, ax = plt.subplots()\n"
       "ax.plot(x, y, label=\"normalized rugosity\")\n"
       "ax.set_xlabel(AXIS)\n"
       "ax.set_ylabel(\"rugosity / N\")\n"
       "if d2:\n"
       "    twin = ax.twinx()\n"
       "    twin.plot([p for p, _ in d2], [v for _, v in d2], color=\"tab:red\", lw=0.8)\n"
       "    twin.set_ylabel(\"second difference\", color=\"tab:red\")\n"
       "fig.tight_layout()\n"
       "fig.savefig(CSV.rsplit(\".\", 1)[0] + \".png\", dpi=150)\n";
  return s.str();
}

// ---------------------------------------------------------------------------
// Self-test

struct SelftestOptions {
  /// Multiplies every tolerance; values <= 0 make every check fail (used to prove the
  /// report is sensitive).
  double tolerance_scale = 1.0;
};

namespace detail {

class Checker {
public:
  Checker(std::ostream& out, double scale) : out_(out), scale_(scale) {}

  void near(const std::string& name, double got, double want, double tol) {
    record(name, std::abs(got - want) <= tol * scale_);
  }

  void truth(const std::string& name, bool ok) { record(name, ok && scale_ > 0.0); }

  template <class Fn>
  void guarded(const std::string& name, Fn&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      out_ << "FAIL  " << name << " (" << e.what() << ")\n";
      ++failed_;
    }
  }

  int failed() const { return failed_; }
  int total() const { return passed_ + failed_; }

private:
  void record(const std::string& name, bool ok) {
    out_ << (ok ? "PASS  " : "FAIL  ") << name << '\n';
    (ok ? passed_ : failed_)++;
  }

  std::ostream& out_;
  double scale_;
  int passed_ = 0, failed_ = 0;
};

inline PureState bell() {
  ComplexVector v = ComplexVector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  return PureState(v, {2, 2});
}

inline PureState ghz3() {
  ComplexVector v = ComplexVector::Zero(8);
  v(0) = v(7) = 1.0 / std::sqrt(2.0);
  return PureState(v, {2, 2, 2});
}

inline PureState w3() {
  ComplexVector v = ComplexVector::Zero(8);
  v(1) = v(2) = v(4) = 1.0 / std::sqrt(3.0);
  return PureState(v, {2, 2, 2});
}

}  // namespace detail

/// Fast release gate: closed-form examples of every module plus analytic-vs-ED at N = 8.
/// Returns the number of failed checks.
inline int selftest(std::ostream& out, const SelftestOptions& options = {}) {
  detail::Checker c(out, options.tolerance_scale);
  const double ln2 = std::numbers::ln2;

  c.guarded("state-core", [&] {
    const Spectrum s = spectral_decompose(DensityMatrix::diagonal({0.7, 0.3}));
    c.near("spectrum diag(0.7,0.3) largest", s.largest(), 0.7, 1e-12);
    c.near("spectrum diag(0.7,0.3) smallest", s.smallest(), 0.3, 1e-12);
    const DensityMatrix marginal = partial_trace(DensityMatrix::from_pure(detail::bell()), {1});
    c.near("partial trace of Bell state is I/2", qtex::detail::max_abs(marginal.matrix() - 0.5 * ComplexMatrix::Identity(2, 2)),
           0.0, 1e-12);
    const DensityMatrix ghz_pair = partial_trace(DensityMatrix::from_pure(detail::ghz3()), {1, 2});
    c.near("partial trace of GHZ keeps |00><00| weight", ghz_pair.matrix()(0, 0).real(), 0.5, 1e-12);
    c.near("partial trace of GHZ drops coherence", std::abs(ghz_pair.matrix()(0, 3)), 0.0, 1e-12);
    ComplexVector v = ComplexVector::Zero(4);
    v(0) = std::sqrt(0.9);
    v(3) = std::sqrt(0.1);
    const SchmidtData sd = schmidt_decompose(PureState(v, {2, 2}), Bipartition{{0}});
    c.near("Schmidt coefficients of sqrt(.9)|00>+sqrt(.1)|11>", sd.coefficients(0), 0.9, 1e-12);
    const auto a = std::get<DensityMatrix>(random_state(4, StateKind::mixed, 7));
    const auto b = std::get<DensityMatrix>(random_state(4, StateKind::mixed, 7));
    c.truth("random_state is deterministic", a.matrix() == b.matrix());
  });

  c.guarded("texture", [&] {
    for (int d : {2, 3, 5}) {
      const OrthonormalBasis comp = OrthonormalBasis::computational(d);
      c.near("texture of |s1> is 0, d=" + std::to_string(d),
             texture_in_basis(texture_less_state(comp), comp).texture, 0.0, 1e-12);
      c.near("texture of I/d is 1-1/d, d=" + std::to_string(d),
             texture_in_basis(DensityMatrix::maximally_mixed(d), comp).texture, 1.0 - 1.0 / d, 1e-12);
      const PureState fourier_last(fourier_basis(d).unitary().col(d - 1));
      c.near("Fourier state j=d has texture 1, d=" + std::to_string(d), texture_in_basis(fourier_last, comp).texture,
             1.0, 1e-12);
    }
    c.near("Bell state texture in computational basis", texture_in_basis(detail::bell(), OrthonormalBasis::computational(4)).texture,
           0.5, 1e-12);
    const TextureExtrema e = texture_extrema(DensityMatrix::diagonal({0.7, 0.3}));
    c.near("t_max of diag(0.7,0.3)", e.t_max, 0.7, 1e-12);
    c.near("t_min of diag(0.7,0.3)", e.t_min, 0.3, 1e-12);
    c.near("witness attains t_max", texture_in_basis(DensityMatrix::diagonal({0.7, 0.3}), e.witness->first).texture, 0.7,
           1e-10);
    c.near("rugosity of |0>^3 is 3 ln 2", rugosity_pure(PureState::basis_state(8, 0)), 3.0 * ln2, 1e-12);
  });

  c.guarded("purity", [&] {
    c.near("purity of I/3 is 0", texture_purity(DensityMatrix::maximally_mixed(3)), 0.0, 1e-12);
    c.near("purity of a pure qutrit is 3", texture_purity(DensityMatrix::from_pure(PureState::basis_state(3, 1))), 3.0,
           1e-12);
    c.near("purity of diag(0.7,0.3) is 0.8", texture_purity(DensityMatrix::diagonal({0.7, 0.3})), 0.8, 1e-12);
    c.near("Renyi-2 purity of diag(0.7,0.3)", renyi_purity(DensityMatrix::diagonal({0.7, 0.3}), 2.0), std::log2(1.16),
           1e-12);
    const PurityReport r = check_renyi2_bound(DensityMatrix::diagonal({0.7, 0.3}));
    c.near("Renyi-2 bound is tight for a qubit", r.renyi2 - r.renyi2_bound_rhs, 0.0, 1e-10);
    const auto cost = single_shot_cost(DensityMatrix::diagonal({0.75, 0.25, 0.0, 0.0}));
    c.truth("single-shot cost of diag(.75,.25,0,0) is 2", cost && *cost == 2);
    c.truth("single-shot cost absent at full rank", !single_shot_cost(DensityMatrix::maximally_mixed(2)));
  });

  c.guarded("monotones", [&] {
    c.near("coherence of |+>", coherence_monotone(PureState::normalized(ComplexVector::Ones(2))).value, 0.5, 1e-12);
    c.near("coherence of uniform qutrit", coherence_monotone(PureState::normalized(ComplexVector::Ones(3))).value,
           2.0 / 3.0, 1e-12);
    ComplexVector t(2);
    t << 1.0, std::polar(1.0, std::numbers::pi / 4);
    c.near("magic of the T state", nonstabilizerness_monotone(PureState::normalized(t)).value,
           0.5 * (1.0 - 1.0 / std::sqrt(2.0)), 1e-12);
    c.near("entanglement of Bell state", entanglement_monotone(detail::bell(), Bipartition{{0}}).value, 0.5, 1e-12);
    c.near("GGM of GHZ3", gme_monotone(detail::ghz3()).value, 0.5, 1e-12);
    c.near("GGM of W3", gme_monotone(detail::w3()).value, 1.0 / 3.0, 1e-12);
    RoofConfig cfg;
    cfg.restarts = 2;
    const ConvexRoofResult sep = convex_roof(
        DensityMatrix(0.5 * (ComplexMatrix(4, 4) << 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1).finished(), {2, 2}),
        Theory::entanglement_bipartite, cfg);
    c.near("convex roof of separable mixture", sep.value, 0.0, 1e-6);
    const ConvexRoofResult pure = convex_roof(DensityMatrix::from_pure(detail::bell()), Theory::entanglement_bipartite, cfg);
    c.near("convex roof of Bell state", pure.value, 0.5, 1e-8);
  });

  c.guarded("ising", [&] {
    c.near("ED energy N=2, h=0", ed_ground_state({2, 0.0, 0.0}).energy, -1.0, 1e-10);
    for (double h : {0.2, 0.5, 1.0, 1.5, 3.0}) {
      const ChainSpec spec{8, h, 0.0};
      std::ostringstream name;
      name << "analytic vs ED rugosity N=8 h=" << h;
      c.near(name.str(), analytic_rugosity(spec), ed_rugosity(spec), 1e-8);
    }
    c.near("analytic rugosity N=8 h=0 is ln 2", analytic_rugosity({8, 0.0, 0.0}), ln2, 1e-12);
  });

  out << "selftest: " << (c.total() - c.failed()) << "/" << c.total() << " passed\n";
  return c.failed();
}

// ---------------------------------------------------------------------------
// Command dispatch

struct Settings {
  std::string output = "structured";
  std::uint64_t seed = 0;
  std::string log_level = "warn";
};

inline int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum state texture: texture, purity, resource monotones and Ising-chain rugosity"};
  app.name("qtexture");
  app.set_help_flag("--help", "Print help and exit");  // -h would collide with the --h field option
  app.require_subcommand(1);
  app.fallthrough();

  Settings settings;
  app.add_option("--output", settings.output, "Output format")
      ->check(CLI::IsMember({"human", "structured", "csv"}))
      ->capture_default_str();
  app.add_option("--seed", settings.seed, "Seed for every stochastic component")->capture_default_str();
  app.add_option("--log-level", settings.log_level, "Diagnostics written to stderr")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}))
      ->capture_default_str();

  std::string state_path;

  auto* texture = app.add_subcommand("texture", "Texture of a state in a basis");
  std::string texture_mode, basis_name = "computational";
  texture->add_option("mode", texture_mode, "Use 'extrema' for the max/min texture")->check(CLI::IsMember({"extrema"}));
  texture->add_option("--state", state_path, "State file")->required();
  texture->add_option("--basis", basis_name, "computational, fourier or a unitary file")->capture_default_str();

  auto* extrema = app.add_subcommand("texture-extrema", "Max/min texture over all bases");
  extrema->add_option("--state", state_path, "State file")->required();

  auto* purity = app.add_subcommand("purity", "Texture purity, Renyi purities and the Renyi-2 bound");
  std::vector<double> alphas;
  purity->add_option("--state", state_path, "State file")->required();
  purity->add_option("--alpha", alphas, "Renyi orders, comma separated")->delimiter(',');

  auto* monotone = app.add_subcommand("monotone", "Closed-form pure-state monotone");
  std::string theory_name, cut_text;
  monotone->add_option("theory", theory_name, "coherence, magic, entangle or ggm")
      ->required()
      ->check(CLI::IsMember({"coherence", "magic", "entangle", "ggm"}));
  monotone->add_option("--state", state_path, "State file (pure)")->required();
  monotone->add_option("--cut", cut_text, "Bipartition such as 0,1:2 (default: first subsystem)");

  auto* roof = app.add_subcommand("convexroof", "Convex-roof upper bound by decomposition search");
  RoofConfig roof_cfg;
  std::optional<std::uint64_t> roof_seed;
  std::string dump_path;
  roof->add_option("--state", state_path, "State file")->required();
  roof->add_option("--theory", theory_name, "coherence, magic, entangle or ggm")
      ->required()
      ->check(CLI::IsMember({"coherence", "magic", "entangle", "ggm"}));
  roof->add_option("--restarts", roof_cfg.restarts, "Independent starts")->check(CLI::PositiveNumber)->capture_default_str();
  roof->add_option("--cardinality", roof_cfg.cardinality, "Decomposition size (0 = rank^2)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  roof->add_option("--seed", roof_seed, "Overrides the global seed");
  roof->add_option("--cut", cut_text, "Bipartition for the entangle theory");
  roof->add_option("--dump", dump_path, "Write the optimal decomposition to this file");

  auto* ising = app.add_subcommand("ising", "Ising-chain rugosity");
  ising->require_subcommand(1);
  ChainSpec chain;
  std::optional<double> field_h, field_g;
  std::string method_name, observable_name = "full";

  auto* point = ising->add_subcommand("point", "Rugosity at one (h, g)");
  point->add_option("--n", chain.n, "Even number of sites")->required();
  point->add_option("--h", chain.h, "Transverse field")->required();
  point->add_option("--g", chain.g, "Longitudinal field")->capture_default_str();
  point->add_option("--method", method_name, "analytic (g = 0) or ed; default analytic when g = 0")
      ->check(CLI::IsMember({"analytic", "ed"}));
  point->add_option("--observable", observable_name, "full chain or nearest-neighbour pair")
      ->check(CLI::IsMember({"full", "pair"}))
      ->capture_default_str();

  auto* scan_cmd = ising->add_subcommand("scan", "Rugosity along one field axis, written as CSV");
  std::string axis_name, out_path, window_text, plot_path;
  double from = 0.0, to = 0.0, step = 0.0;
  scan_cmd->add_option("--n", chain.n, "Even number of sites")->required();
  scan_cmd->add_option("--axis", axis_name, "Scanned field")->required()->check(CLI::IsMember({"h", "g"}));
  scan_cmd->add_option("--from", from, "First grid point")->required();
  scan_cmd->add_option("--to", to, "Last grid point")->required();
  scan_cmd->add_option("--step", step, "Grid spacing")->required()->check(CLI::PositiveNumber);
  scan_cmd->add_option("--h", field_h, "Fixed transverse field when scanning g");
  scan_cmd->add_option("--g", field_g, "Fixed longitudinal field when scanning h");
  scan_cmd->add_option("--method", method_name, "analytic (g = 0) or ed")->check(CLI::IsMember({"analytic", "ed"}));
  scan_cmd->add_option("--observable", observable_name, "full chain or nearest-neighbour pair")
      ->check(CLI::IsMember({"full", "pair"}))
      ->capture_default_str();
  scan_cmd->add_option("--out", out_path, "CSV output path")->required();
  scan_cmd->add_option("--kink-window", window_text, "LO,HI range searched for the curvature peak");
  scan_cmd->add_option("--emit-plot", plot_path, "Write a matplotlib script for the CSV");

  auto* selftest_cmd = app.add_subcommand("selftest", "Fast release checks");

  std::vector<std::string> args(argv.rbegin(), argv.rend());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "qtexture: " << e.what() << '\n';
    return 2;
  }

  auto sink = std::make_shared<spdlog::sinks::ostream_sink_st>(err);
  spdlog::logger log("qtexture", sink);
  log.set_pattern("[%l] %v");
  log.set_level(spdlog::level::from_str(settings.log_level));

  const OutputFormat format = settings.output == "human" ? OutputFormat::human
                              : settings.output == "csv" ? OutputFormat::csv
                                                         : OutputFormat::structured;
  std::ostringstream buffer;
  std::vector<std::pair<std::string, std::string>> files;  // written only after success

  try {
    const auto started = std::chrono::steady_clock::now();
    Record rec;

    if (texture->parsed() && texture_mode.empty()) {
      const AnyState state = load_state(state_path);
      const int d = std::visit([](const auto& s) { return s.dim(); }, state);
      std::optional<OrthonormalBasis> basis;
      if (basis_name == "computational") {
        basis = OrthonormalBasis::computational(d);
      } else if (basis_name == "fourier") {
        basis = fourier_basis(d);
      } else {
        try {
          basis.emplace(load_unitary(basis_name));
        } catch (const usage_error& e) {
          throw invalid_state_error("'" + basis_name + "': " + e.what());
        }
      }
      log.info("state dimension {}, basis {}", d, basis_name);
      const TextureReport r = std::visit([&](const auto& s) { return texture_in_basis(s, *basis); }, state);
      rec.add("grand_sum", r.grand_sum).add("texture", r.texture).add("rugosity", r.rugosity).add("imag_residual",
                                                                                                   r.imag_residual);
    } else if (texture->parsed() || extrema->parsed()) {
      const DensityMatrix rho = as_density_matrix(load_state(state_path));
      const TextureExtrema e = texture_extrema(rho);
      rec.add("t_max", e.t_max).add("t_min", e.t_min);
      rec.add("witness_max_texture", texture_in_basis(rho, e.witness->first).texture);
      rec.add("witness_min_texture", texture_in_basis(rho, e.witness->second).texture);
    } else if (purity->parsed()) {
      for (double a : alphas)
        if (!(a > 0.0) || a == 1.0 || !std::isfinite(a))
          throw usage_error("--alpha values must be positive, finite and different from 1");
      const DensityMatrix rho = as_density_matrix(load_state(state_path));
      const PurityReport r = check_renyi2_bound(rho, alphas);
      rec.add("texture_purity", r.texture_purity);
      for (double a : alphas) rec.add("renyi_purity_" + format_number(a), r.renyi_purities.at(a));
      rec.add("renyi2", r.renyi2).add("renyi2_bound_rhs", r.renyi2_bound_rhs).add("bound_satisfied", r.bound_satisfied);
      rec.add("single_shot_cost", r.single_shot_cost ? std::to_string(*r.single_shot_cost) : std::string("none"));
    } else if (monotone->parsed()) {
      const AnyState state = load_state(state_path);
      const auto* psi = std::get_if<PureState>(&state);
      if (!psi) throw usage_error("monotone needs a pure state; use convexroof for mixed states");
      const int n = subsystem_count(state);
      const Bipartition cut = cut_text.empty() ? Bipartition{{0}} : parse_cut(cut_text, n);
      const Theory theory = parse_theory(theory_name);
      if (theory == Theory::entanglement_bipartite && n < 2) throw usage_error("entangle needs at least two subsystems");
      const MonotoneResult m = pure_monotone(*psi, theory, cut);
      rec.add("theory", to_string(m.theory)).add("value", m.value);
      add_witness(rec, m, n);
    } else if (roof->parsed()) {
      const AnyState state = load_state(state_path);
      const int n = subsystem_count(state);
      roof_cfg.cut = cut_text.empty() ? Bipartition{{0}} : parse_cut(cut_text, n);
      roof_cfg.seed = roof_seed.value_or(settings.seed);
      const Theory theory = parse_theory(theory_name);
      if ((theory == Theory::entanglement_bipartite || theory == Theory::gme) && n < 2)
        throw usage_error("entanglement theories need at least two subsystems");
      const ConvexRoofResult r = convex_roof(as_density_matrix(state), theory, roof_cfg);
      rec.add("theory", to_string(theory)).add("value", r.value).add("restarts_used", r.restarts_used);
      rec.add("converged", r.converged).add("decomposition_size", static_cast<int>(r.decomposition.size()));
      if (r.gap_to_oracle) rec.add("gap_to_oracle", *r.gap_to_oracle);
      if (!dump_path.empty()) files.emplace_back(dump_path, decomposition_to_json(r.decomposition).dump(2) + "\n");
    } else if (point->parsed()) {
      const Method method = method_name.empty() ? (chain.g == 0.0 ? Method::analytic : Method::ed)
                            : method_name == "ed" ? Method::ed
                                                  : Method::analytic;
      if (method == Method::analytic && chain.g != 0.0)
        throw usage_error("the analytic branch requires g = 0; use --method ed");
      qtex::detail::check_chain(chain, method == Method::ed ? max_ed_sites : max_analytic_sites,
                          method == Method::ed ? "exact-diagonalization" : "analytic");
      const bool pair = observable_name == "pair";
      rec.add("n", chain.n).add("h", chain.h).add("g", chain.g);
      rec.add("method", method == Method::ed ? "ed" : "analytic").add("observable", observable_name);
      std::optional<EdGroundState> gs;
      if (method == Method::ed) gs = ed_ground_state(chain);
      if (pair) {
        const PairObservables o =
            gs ? pair_observables_from_state(adjacent_pair_state(gs->state), chain.n) : pair_observables(chain);
        rec.add("rugosity", o.pair_rugosity).add("normalized_rugosity", o.pair_rugosity_per_site);
        rec.add("m_z", o.m_z).add("c_xx", o.c_xx).add("c_yy", o.c_yy).add("c_zz", o.c_zz);
        rec.add("pair_rugosity_formula", o.pair_rugosity_formula);
      } else {
        const double r = gs ? rugosity_pure(gs->state) : analytic_rugosity(chain);
        rec.add("rugosity", r).add("normalized_rugosity", r / chain.n);
      }
      if (gs) {
        rec.add("energy", gs->energy).add("gap", gs->gap).add("near_degenerate", gs->near_degenerate);
        rec.add("residual", gs->residual);
        if (gs->near_degenerate) log.warn("ground level is near-degenerate (gap {:.3g})", gs->gap);
      } else {
        rec.add("energy", analytic_ground_energy(chain));
      }
    } else if (scan_cmd->parsed()) {
      const ScanAxis axis = axis_name == "h" ? ScanAxis::h : ScanAxis::g;
      if (axis == ScanAxis::h && field_h) throw usage_error("--h is the scanned axis; give --g instead");
      if (axis == ScanAxis::g && field_g) throw usage_error("--g is the scanned axis; give --h instead");
      chain.h = field_h.value_or(0.0);
      chain.g = field_g.value_or(0.0);
      const Method method = method_name.empty() ? (axis == ScanAxis::h && chain.g == 0.0 ? Method::analytic : Method::ed)
                            : method_name == "ed" ? Method::ed
                                                  : Method::analytic;
      std::optional<std::pair<double, double>> window;
      if (!window_text.empty()) window = parse_window(window_text);
      std::vector<double> grid = uniform_grid(from, to, step);
      const ScanGrid s = scan(chain, axis, std::move(grid), observable_name == "pair" ? Observable::pair : Observable::full,
                              method, window);

      std::ostringstream csv;
      csv << "point,rugosity,normalized_rugosity,d1,d2\n";
      for (std::size_t i = 0; i < s.points.size(); ++i) {
        csv << format_number(s.points[i]) << ',' << format_number(s.rugosity[i]) << ','
            << format_number(s.normalized_rugosity[i]) << ',';
        if (i >= 1 && i + 1 < s.points.size()) csv << format_number(s.first_derivative[i - 1]);
        csv << ',';
        if (i >= 2 && i + 2 < s.points.size()) csv << format_number(s.second_derivative[i - 2]);
        csv << '\n';
      }
      const std::string kink = s.kink_estimate ? format_number(*s.kink_estimate) : std::string("none");
      csv << "# kink_estimate: " << kink << '\n';
      files.emplace_back(out_path, csv.str());
      if (!plot_path.empty()) files.emplace_back(plot_path, plot_script(out_path, axis_name));

      rec.add("n", chain.n).add("axis", axis_name).add("method", method == Method::ed ? "ed" : "analytic");
      rec.add("observable", observable_name).add("points", static_cast<int>(s.points.size()));
      rec.add("kink_estimate", kink).add("out", out_path);
    } else if (selftest_cmd->parsed()) {
      const int failed = selftest(buffer);
      out << buffer.str();
      return failed == 0 ? 0 : 1;
    }

    for (const auto& [path, content] : files) write_file(path, content);
    rec.write(buffer, format);
    out << buffer.str();
    log.info("finished in {:.3f} s",
             std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count());
    return 0;
  } catch (const usage_error& e) {
    err << "qtexture: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "qtexture: " << e.what() << '\n';
    return 1;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  return run(std::vector<std::string>(argv + 1, argv + argc), out, err);
}

}  // namespace qtex::cli

#endif
