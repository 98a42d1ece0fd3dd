// Command-line laboratory for the two-phase walk: exact evolution, the
// closed-form measures, path spectra, topological numbers, and the
// cross-validation suite, emitted as CSV or JSON data files.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "qwalk/lattice.hpp"
#include "qwalk/measures.hpp"
#include "qwalk/spectral.hpp"
#include "qwalk/table.hpp"
#include "qwalk/topology.hpp"
#include "qwalk/validate.hpp"

namespace {

using namespace qwalk;

constexpr const char* kArtifactVersion = "1.0.0";
constexpr int kExitRuntime = 1;
constexpr int kExitValidation = 2;

struct CommonOpts {
  std::string sigma_plus = "0";
  std::string sigma_minus = "0";
  std::string init = "1,0,0,0";
  std::string kind = "twophase";
  std::string format = "csv";
  std::string out;
  std::int64_t steps = 100;
  int path_size = 100;
  std::int64_t window = 30;
  std::uint64_t seed = 20240808;
  int trials = 20;
};

int worker_count() {
  if (const char* env = std::getenv("QWALK_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

FieldKind parse_kind(const std::string& s) {
  if (s == "twophase") return FieldKind::TwoPhase;
  if (s == "onedefect") return FieldKind::OneDefect;
  if (s == "homogeneous") return FieldKind::Homogeneous;
  throw std::invalid_argument("--kind expects twophase|onedefect|homogeneous");
}

struct InitState {
  double a = 1.0, b = 0.0, phi1 = 0.0, phi2 = 0.0;
  Complex alpha() const { return std::polar(a, phi1); }
  Complex beta() const { return std::polar(b, phi2); }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

InitState parse_init(const std::string& s) {
  const std::vector<std::string> parts = split(s, ',');
  if (parts.size() != 4)
    throw std::invalid_argument("--init expects a,b,phi1,phi2");
  InitState st;
  st.a = std::stod(parts[0]);
  st.b = std::stod(parts[1]);
  st.phi1 = parse_angle(parts[2]);
  st.phi2 = parse_angle(parts[3]);
  if (st.a < 0 || st.b < 0 || std::abs(st.a * st.a + st.b * st.b - 1.0) > 1e-9)
    throw std::invalid_argument("--init needs a,b >= 0 with a^2 + b^2 = 1");
  return st;
}

PhasePair phases_of(const CommonOpts& o) {
  PhasePair ph(parse_angle(o.sigma_plus), parse_angle(o.sigma_minus));
  if (parse_kind(o.kind) == FieldKind::Homogeneous) ph.sigma_minus = ph.sigma_plus;
  return ph;
}

LimitMeasureSpec spec_of(const CommonOpts& o, const InitState& init) {
  return LimitMeasureSpec(phases_of(o), init.a, init.b, init.phi1, init.phi2);
}

void echo_config(ResultTable& t, const CommonOpts& o, const InitState* init) {
  const PhasePair ph = phases_of(o);
  t.add_meta("artifact_version", kArtifactVersion);
  t.add_meta("kind", o.kind);
  t.add_meta("sigma_plus", ph.sigma_plus);
  t.add_meta("sigma_minus", ph.sigma_minus);
  if (init != nullptr) {
    t.add_meta("init_a", init->a);
    t.add_meta("init_b", init->b);
    t.add_meta("init_phi1", init->phi1);
    t.add_meta("init_phi2", init->phi2);
  }
  t.add_meta("seed", static_cast<double>(o.seed));
}

int emit(const ResultTable& t, const CommonOpts& o) {
  const std::string text = o.format == "json" ? t.to_json() : t.to_csv();
  if (o.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file " + o.out);
    f << text;
  }
  return 0;
}

int cmd_evolve(const CommonOpts& o, bool rescale, int overlay_samples) {
  const InitState init = parse_init(o.init);
  const CoinField field = build_coin_field(parse_kind(o.kind), phases_of(o));
  const WalkerState state = evolve(init.alpha(), init.beta(), field, o.steps);
  const MeasureProfile prob = probability_distribution(state);

  ResultTable t;
  t.command = "evolve";
  echo_config(t, o, &init);
  t.add_meta("steps", static_cast<double>(o.steps));
  t.add_meta("rescale", rescale ? 1.0 : 0.0);
  t.add_meta("overlay", static_cast<double>(overlay_samples));
  TableSection& sec =
      rescale ? t.add_section("distribution", {"x", "prob", "x_over_t", "t_prob"})
              : t.add_section("distribution", {"x", "prob"});
  for (std::int64_t x = prob.min_x(); x <= prob.max_x(); ++x) {
    const double p = prob.at(x);
    if (p == 0.0) continue;
    if (rescale && o.steps > 0) {
      const double tt = static_cast<double>(o.steps);
      sec.rows.push_back({static_cast<double>(x), p, static_cast<double>(x) / tt, tt * p});
    } else {
      sec.rows.push_back({static_cast<double>(x), p});
    }
  }
  if (overlay_samples > 0) {
    const WeakLimitDensity d = weak_limit_density(spec_of(o, init));
    TableSection& ov = t.add_section("weak_limit_overlay", {"x", "w_fk"});
    for (int i = 1; i < overlay_samples; ++i) {
      const double x = -1.0 / kSqrt2 + kSqrt2 * i / overlay_samples;
      ov.rows.push_back({x, d.continuous_density(x)});
    }
  }
  return emit(t, o);
}

int cmd_timeavg(const CommonOpts& o, const std::string& horizons_csv) {
  const InitState init = parse_init(o.init);
  const LimitMeasureSpec spec = spec_of(o, init);
  const CoinField field = build_coin_field(parse_kind(o.kind), phases_of(o));

  ResultTable t;
  t.command = "timeavg";
  echo_config(t, o, &init);
  t.add_meta("window", static_cast<double>(o.window));
  t.add_meta("horizons", horizons_csv);
  TableSection& ana = t.add_section("analytic", {"x", "mu_bar"});
  for (std::int64_t x = -o.window; x <= o.window; ++x)
    ana.rows.push_back({static_cast<double>(x), time_averaged_limit_measure(spec, x)});
  for (const std::string& tok : split(horizons_csv, ',')) {
    const std::int64_t T = std::stoll(tok);
    const MeasureProfile emp = time_averaged_empirical(field, init.alpha(), init.beta(), T);
    TableSection& sec = t.add_section("empirical_T" + tok, {"x", "mu_bar"});
    for (std::int64_t x = -o.window; x <= o.window; ++x)
      sec.rows.push_back({static_cast<double>(x), emp.at(x)});
  }
  return emit(t, o);
}

int cmd_stationary(const CommonOpts& o, int sqrt_sign, int only_branch, double c2) {
  ResultTable t;
  t.command = "stationary";
  echo_config(t, o, nullptr);
  t.add_meta("window", static_cast<double>(o.window));
  t.add_meta("c_squared", c2);
  const PhasePair ph = phases_of(o);
  TableSection& eig = t.add_section(
      "branches", {"branch", "sqrt_sign", "lambda_re", "lambda_im", "rate", "divergent", "singular"});
  TableSection& mu = t.add_section("measure", {"branch", "sqrt_sign", "x", "mu"});
  for (int index = 1; index <= 4; ++index) {
    if (only_branch != 0 && index != only_branch) continue;
    for (int sgn : {+1, -1}) {
      if (sqrt_sign != 0 && sgn != sqrt_sign) continue;
      const StationaryBranch br{index, sgn, std::sqrt(c2)};
      try {
        const EigenPacket pk = stationary_eigenpacket(ph, br, o.window);
        const bool divergent = pk.decay_rate_right > 1.0 + 1e-12;
        eig.rows.push_back({static_cast<double>(index), static_cast<double>(sgn),
                            pk.lambda.real(), pk.lambda.imag(), pk.decay_rate_right,
                            divergent ? 1.0 : 0.0, 0.0});
        for (std::int64_t x = -o.window; x <= o.window; ++x)
          mu.rows.push_back({static_cast<double>(index), static_cast<double>(sgn),
                             static_cast<double>(x), pk.measure.at(x)});
      } catch (const std::domain_error&) {
        eig.rows.push_back({static_cast<double>(index), static_cast<double>(sgn), 0.0, 0.0, 0.0,
                            0.0, 1.0});
      }
    }
  }
  return emit(t, o);
}

int cmd_spectrum(const CommonOpts& o, double band_tolerance, int band_samples) {
  ResultTable t;
  t.command = "spectrum";
  echo_config(t, o, nullptr);
  t.add_meta("path_size", static_cast<double>(o.path_size));
  const PhasePair ph = phases_of(o);
  const PathOperator op(build_coin_field(parse_kind(o.kind), ph), o.path_size);
  const SpectrumReport rep = classify(op, diagonalize(op), band_tolerance);
  t.add_meta("band_tolerance", rep.band_tolerance);

  TableSection& ev = t.add_section(
      "eigenvalues",
      {"lambda_re", "lambda_im", "isolated", "band_distance", "decay_right", "decay_left"});
  for (const EigenPair& p : rep.pairs)
    ev.rows.push_back({p.lambda.real(), p.lambda.imag(),
                       p.tag == SpectrumTag::Isolated ? 1.0 : 0.0, p.band_distance,
                       p.fit_right.fitted ? p.fit_right.rate : 0.0,
                       p.fit_left.fitted ? p.fit_left.rate : 0.0});

  TableSection& band = t.add_section(
      "band_curve", {"k", "lambda_re_plus", "lambda_im_plus", "lambda_re_minus", "lambda_im_minus"});
  for (int i = 0; i < band_samples; ++i) {
    const double k = 2.0 * kPi * i / band_samples;
    const double eps = std::acos(std::clamp(std::sin(k) / kSqrt2, -1.0, 1.0));
    const Complex lp = std::polar(1.0, eps + kPi / 2.0);
    const Complex lm = std::polar(1.0, -eps + kPi / 2.0);
    band.rows.push_back({k, lp.real(), lp.imag(), lm.real(), lm.imag()});
  }

  TableSection& mark =
      t.add_section("analytic_markers", {"branch", "sqrt_sign", "lambda_re", "lambda_im", "rate"});
  for (int index = 1; index <= 4; ++index) {
    for (int sgn : {+1, -1}) {
      try {
        const EigenPacket pk = stationary_eigenpacket(ph, StationaryBranch{index, sgn, 1.0}, 4);
        mark.rows.push_back({static_cast<double>(index), static_cast<double>(sgn),
                             pk.lambda.real(), pk.lambda.imag(), pk.decay_rate_right});
      } catch (const std::domain_error&) {
      }
    }
  }
  return emit(t, o);
}

int cmd_topology(const CommonOpts& o, const std::string& theta_tok, int grid) {
  ResultTable t;
  t.command = "topology";
  echo_config(t, o, nullptr);
  t.add_meta("grid", static_cast<double>(grid));
  const PhasePair ph = phases_of(o);
  const double theta = parse_angle(theta_tok);
  t.add_meta("theta", theta);
  const TopologyReport rep = topological_numbers(ph);

  TableSection& res = t.add_section("residuals", {"chiral", "particle_hole"});
  res.rows.push_back({rep.chiral_resid, rep.ph_resid});

  TableSection& wind = t.add_section("winding", {"theta", "nu_prime", "nu_doubleprime", "nu_0", "nu_pi"});
  const int np = winding_number(ph.sigma_plus, theta, Frame::Prime, grid);
  const int nd = winding_number(ph.sigma_plus, theta, Frame::DoublePrime, grid);
  wind.rows.push_back({theta, static_cast<double>(np), static_cast<double>(nd),
                       (nd + np) / 2.0, (nd - np) / 2.0});

  TableSection& num = t.add_section(
      "topological_numbers",
      {"symmetry_holds", "n", "nu_m_right", "nu_p_right", "nu_m_left", "nu_p_left",
       "raw_nu0_right", "raw_nupi_right", "predict_plus_i", "predict_minus_i"});
  num.rows.push_back({rep.symmetry_holds ? 1.0 : 0.0, static_cast<double>(rep.n),
                      static_cast<double>(rep.nu_right.first),
                      static_cast<double>(rep.nu_right.second),
                      static_cast<double>(rep.nu_left.first),
                      static_cast<double>(rep.nu_left.second), rep.raw_right.first,
                      rep.raw_right.second,
                      static_cast<double>(rep.predicted_states_minus_pi_half),
                      static_cast<double>(rep.predicted_states_plus_pi_half)});
  return emit(t, o);
}

int cmd_perturb(const CommonOpts& o, const std::string& range_tok) {
  ResultTable t;
  t.command = "perturb";
  echo_config(t, o, nullptr);
  const double range = parse_angle(range_tok);
  t.add_meta("path_size", static_cast<double>(o.path_size));
  t.add_meta("trials", static_cast<double>(o.trials));
  t.add_meta("delta_theta_range", range);
  const RobustnessReport rep = robustness_experiment(phases_of(o), o.path_size, range, o.seed,
                                                     o.trials, worker_count());
  TableSection& refs = t.add_section("reference_eigenvalues", {"lambda_re", "lambda_im"});
  for (const Complex z : rep.reference) refs.rows.push_back({z.real(), z.imag()});
  TableSection& tr = t.add_section("trials", {"trial", "seed", "max_drift", "gap_closed"});
  for (std::size_t i = 0; i < rep.trials.size(); ++i)
    tr.rows.push_back({static_cast<double>(i), static_cast<double>(rep.trials[i].seed),
                       rep.trials[i].max_drift, rep.trials[i].gap_closed ? 1.0 : 0.0});
  TableSection& sum = t.add_section("summary", {"max_drift", "gap_closures"});
  sum.rows.push_back({rep.max_drift, static_cast<double>(rep.gap_closures)});
  return emit(t, o);
}

int cmd_locallength(const CommonOpts& o, int grid) {
  ResultTable t;
  t.command = "locallength";
  echo_config(t, o, nullptr);
  t.add_meta("grid", static_cast<double>(grid));
  TableSection& sec = t.add_section("xi", {"sigma", "xi", "diverges"});
  for (int i = 0; i <= grid; ++i) {
    const double sig = -kPi + 2.0 * kPi * i / grid;
    if (sig <= -kPi) continue;
    const double xi = localization_length(sig);
    sec.rows.push_back({sig, xi, std::isinf(xi) ? 1.0 : 0.0});
  }
  return emit(t, o);
}

int cmd_validate(const CommonOpts& o, double tolerance_scale) {
  const std::vector<CheckResult> results = run_validation(tolerance_scale, o.seed);
  ResultTable t;
  t.command = "validate";
  echo_config(t, o, nullptr);
  t.add_meta("tolerance_scale", tolerance_scale);
  bool all = true;
  TableSection& sec = t.add_section("checks", {"index", "pass"});
  for (std::size_t i = 0; i < results.size(); ++i) {
    sec.rows.push_back({static_cast<double>(i), results[i].pass ? 1.0 : 0.0});
    all = all && results[i].pass;
  }
  for (const CheckResult& r : results)
    std::cerr << (r.pass ? "[pass] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
  emit(t, o);
  return all ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-phase quantum walk laboratory"};
  app.require_subcommand(1);

  CommonOpts o;
  bool rescale = false;
  int overlay = 0;
  std::string horizons = "100,1000,10000";
  int sqrt_sign = 0, only_branch = 0;
  double c2 = 1.0;
  double band_tolerance = -1.0;
  int band_samples = 256;
  std::string theta = "pi/4";
  int grid = 2048;
  std::string range = "pi/4";
  double tol_scale = 1.0;

  auto add_common = [&](CLI::App* cmd, bool with_init) {
    cmd->add_option("--sigma-plus", o.sigma_plus, "coin phase for x >= 0 (angle, e.g. 3/2pi)");
    cmd->add_option("--sigma-minus", o.sigma_minus, "coin phase for x <= -1");
    if (with_init) cmd->add_option("--init", o.init, "initial spinor a,b,phi1,phi2");
    cmd->add_option("--kind", o.kind, "twophase|onedefect|homogeneous");
    cmd->add_option("--format", o.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", o.out, "output path (default stdout)");
    cmd->add_option("--seed", o.seed, "seed echoed into outputs and used by RNG commands");
    cmd->add_option("--window", o.window, "position half-window for measure tables");
  };

  CLI::App* evolve = app.add_subcommand("evolve", "evolve T steps and emit the distribution");
  add_common(evolve, true);
  evolve->add_option("--steps", o.steps, "number of steps T");
  evolve->add_flag("--rescale", rescale, "add (x/T, T P_T(x)) columns");
  evolve->add_option("--overlay", overlay, "sample w(x) f_K on this many points");

  CLI::App* timeavg = app.add_subcommand("timeavg", "analytic vs empirical time averages");
  add_common(timeavg, true);
  timeavg->add_option("--horizons", horizons, "comma list of empirical horizons");

  CLI::App* stationary = app.add_subcommand("stationary", "stationary branches and measures");
  add_common(stationary, false);
  stationary->add_option("--sqrt-branch", sqrt_sign, "+1/-1 to fix the sqrt(q) sign (0 = both)");
  stationary->add_option("--branch", only_branch, "restrict to one branch index 1..4");
  stationary->add_option("--c2", c2, "normalization c^2 of the eigenvector scale");

  CLI::App* spectrum = app.add_subcommand("spectrum", "path spectrum with bulk/isolated tags");
  add_common(spectrum, false);
  spectrum->add_option("--path-size", o.path_size, "half-size N of the path");
  spectrum->add_option("--band-tolerance", band_tolerance, "isolated threshold (default 10 spacings)");
  spectrum->add_option("--band-samples", band_samples, "samples of the analytic band curve");

  CLI::App* topology = app.add_subcommand("topology", "symmetry residuals and winding numbers");
  add_common(topology, false);
  topology->add_option("--theta", theta, "coin angle for the winding numbers");
  topology->add_option("--grid", grid, "Brillouin-zone grid points");

  CLI::App* perturb = app.add_subcommand("perturb", "random-coin robustness experiment");
  add_common(perturb, false);
  perturb->add_option("--path-size", o.path_size, "half-size N of the path");
  perturb->add_option("--trials", o.trials, "number of random trials");
  perturb->add_option("--delta-range", range, "half-width of the delta-theta distribution");

  CLI::App* locallength = app.add_subcommand("locallength", "localization length over sigma");
  add_common(locallength, false);
  locallength->add_option("--grid", grid, "sigma grid points over (-pi, pi]");

  CLI::App* validate = app.add_subcommand("validate", "run the cross-module invariant suites");
  add_common(validate, false);
  validate->add_option("--tolerance-scale", tol_scale,
                       "multiply every bound (negative control when tiny)");

  try {
    app.parse(argc, argv);
    if (evolve->parsed()) return cmd_evolve(o, rescale, overlay);
    if (timeavg->parsed()) return cmd_timeavg(o, horizons);
    if (stationary->parsed()) return cmd_stationary(o, sqrt_sign, only_branch, c2);
    if (spectrum->parsed()) return cmd_spectrum(o, band_tolerance, band_samples);
    if (topology->parsed()) return cmd_topology(o, theta, grid);
    if (perturb->parsed()) return cmd_perturb(o, range);
    if (locallength->parsed()) return cmd_locallength(o, grid);
    if (validate->parsed()) return cmd_validate(o, tol_scale);
  } catch (const CLI::ParseError& e) {
    // keep exit code 2 reserved for validation failures
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitRuntime;
}
