#include "alloy/cli.hpp"

#include "alloy/config.hpp"
#include "alloy/errors.hpp"
#include "alloy/estimators.hpp"
#include "alloy/spectra.hpp"
#include "alloy/transform.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>
#include <thread>

namespace alloy::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kVersion = "0.1.0";

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> samples;
  std::optional<unsigned> workers;
  std::string out_dir;
  std::string results;
};

/// What a subcommand produced.
struct Outcome {
  int status = kPass;
  std::vector<json> records;
  std::string csv_header;
  std::vector<std::string> csv_rows;
  std::vector<std::pair<std::string, std::string>> extra_csv;  // file name, contents
};

struct Context {
  Options opt;
  LabConfig lab;
  ExperimentConfig cfg;  // model with seed, samples and workers resolved
  std::ostream& out;
};

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

json site_json(const Site& s) { return std::vector<int>(s.data(), s.data() + s.size()); }

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json estimate_json(const MCEstimate& e) {
  return {{"estimator", e.estimator}, {"mean", e.mean},
          {"stderr", e.std_error},    {"n_samples", e.n_samples},
          {"bound", optional_json(e.bound)}, {"verdict", std::string(to_string(e.verdict))},
          {"seed", e.seed},           {"digest", e.digest},
          {"failures", e.failures}};
}

json base_record(const Context& c, const std::string& command) {
  return {{"command", command}, {"digest", c.lab.digest}, {"seed", c.cfg.seed}};
}

unsigned resolve_workers(const Options& opt) {
  if (opt.workers) return *opt.workers;
  if (const char* env = std::getenv("ALLOY_WORKERS")) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || w < 1) throw ConfigError("ALLOY_WORKERS must be a positive integer");
    return static_cast<unsigned>(w);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::size_t require_samples(const Context& c) {
  if (c.cfg.n_samples == 0) throw ConfigError("no sample count: pass --samples or set \"samples\" in the config");
  return c.cfg.n_samples;
}

template <typename T>
const T& require_section(const std::optional<T>& s, const char* name) {
  if (!s) throw ConfigError(std::string("config section '") + name + "' is required for this command");
  return *s;
}

void refuse_dense(Eigen::Index n) {
  if (n > kMaxDenseDimension) {
    std::ostringstream msg;
    msg << "matrix dimension " << n << " exceeds the cap " << kMaxDenseDimension
        << "; reduce L (or d) so that (2L+1)^d <= " << kMaxDenseDimension;
    throw std::length_error(msg.str());
  }
}

// ---------------------------------------------------------------------------

Outcome cmd_check(Context& c) {
  const auto r = certify_assumption(c.cfg.u, c.cfg.density);
  Outcome o;
  json rec = base_record(c, "check");
  rec["fourier_min_modulus"] = r.fourier_min_modulus;
  rec["argmin"] = std::vector<double>(r.argmin.data(), r.argmin.data() + r.argmin.size());
  rec["lipschitz_slack"] = r.lipschitz_slack;
  rec["grid_resolution"] = r.grid_resolution;
  rec["dominance_holds"] = r.dominance_holds;
  rec["density_in_w21"] = r.density_in_w21;
  rec["satisfied"] = r.satisfied;
  rec["diagnostic"] = r.diagnostic;
  rec["density"] = c.cfg.density.name();
  rec["rho_sup"] = c.cfg.density.norms().sup;
  rec["rho_d1"] = c.cfg.density.norms().d1;
  rec["rho_d2"] = c.cfg.density.norms().d2;
  o.records.push_back(rec);
  c.out << "assumption (rho, u): " << (r.satisfied ? "certified" : "NOT certified") << "\n"
        << "  min |u^|          " << fmt(r.fourier_min_modulus) << " (grid " << r.grid_resolution << ")\n"
        << "  Lipschitz slack   " << fmt(r.lipschitz_slack) << "\n"
        << "  dominance         " << (r.dominance_holds ? "yes" : "no") << "\n"
        << "  density in W21    " << (r.density_in_w21 ? "yes" : "no") << "\n"
        << "  " << r.diagnostic << "\n";
  o.status = r.satisfied ? kPass : kVerdictFailed;
  return o;
}

Outcome cmd_constants(Context& c) {
  const auto report = certify_assumption(c.cfg.u, c.cfg.density);
  if (!report.satisfied) throw AssumptionViolated("assumption on (rho, u) not certified: " + report.diagnostic);
  if (!(c.cfg.lambda > 0)) throw ConfigError("constants: lambda must be positive");
  const Box box = c.cfg.box();
  refuse_dense(Box::centered(c.cfg.d, c.cfg.L + c.cfg.u.support_radius()).size());
  const auto t = build_circulant(c.cfg.u, box);
  const auto cu = infinite_cu(c.cfg.u);
  const auto k = minami_constants(t, c.cfg.density, c.cfg.lambda, c.cfg.x, c.cfg.y);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double c_min_infinite = minami_constant(cu.upper_bound, c.cfg.density);

  Outcome o;
  json rec = base_record(c, "constants");
  rec["A_rows"] = t.A.rows();
  rec["A_cols"] = t.A.cols();
  rec["b_one_norm"] = t.b_one_norm;
  rec["condition_number"] = t.condition_number;
  rec["inverse_residual"] = t.inverse_residual;
  rec["cu_upper_bound"] = cu.upper_bound;
  rec["cu_exact"] = cu.exact;
  rec["cu_tail_bound"] = cu.tail_bound;
  rec["b_within_cu"] = t.b_one_norm <= cu.upper_bound * (1 + 1e-6);
  rec["rho_d1"] = k.rho_d1;
  rec["rho_d2"] = k.rho_d2;
  rec["c_min"] = k.c_min;
  rec["c_min_infinite_volume"] = c_min_infinite;
  rec["theorem_bound"] = k.theorem_bound;
  rec["theorem_bound_infinite_volume"] = pi2 / (c.cfg.lambda * c.cfg.lambda) * c_min_infinite;
  rec["x"] = site_json(c.cfg.x);
  rec["y"] = site_json(c.cfg.y);
  rec["sharp_bound"] = k.sharp_bound;
  rec["lambda"] = c.cfg.lambda;
  o.records.push_back(rec);

  o.csv_header = "y,sharp_bound,theorem_bound";
  for (Eigen::Index i = 0; i < box.size(); ++i) {
    const Site y = box.site(i);
    if (y == c.cfg.x) continue;
    const auto ky = minami_constants(t, c.cfg.density, c.cfg.lambda, c.cfg.x, y);
    std::ostringstream row;
    for (Eigen::Index j = 0; j < y.size(); ++j) row << (j ? " " : "") << y(j);
    row << "," << fmt(ky.sharp_bound) << "," << fmt(ky.theorem_bound);
    o.csv_rows.push_back(row.str());
  }

  c.out << "A: " << t.A.rows() << " x " << t.A.cols() << ", cond " << fmt(t.condition_number) << "\n"
        << "  ||B||_1           " << fmt(t.b_one_norm) << "\n"
        << "  C_u upper bound   " << fmt(cu.upper_bound) << (cu.exact ? " (exact)" : "") << "\n"
        << "  ||rho'||_1        " << fmt(k.rho_d1) << "\n"
        << "  ||rho''||_1       " << fmt(k.rho_d2) << "\n"
        << "  C_Min             " << fmt(k.c_min) << "\n"
        << "  (pi/lambda)^2 C_Min " << fmt(k.theorem_bound) << "\n"
        << "  site-resolved bound at (x, y) " << fmt(k.sharp_bound) << "\n";
  return o;
}

Outcome cmd_minami(Context& c) {
  const auto& s = require_section(c.lab.minami, "minami");
  require_samples(c);
  refuse_dense(c.cfg.box().size());
  std::vector<std::complex<double>> zs;
  for (double e : s.energies) zs.emplace_back(e, s.eta);
  const auto r = estimate_minami(c.cfg, zs);

  Outcome o;
  o.csv_header = "energy,eta,mean,stderr,bound,sharp_bound,classical_bound,verdict";
  c.out << "minami: C_Min " << fmt(r.constants.c_min) << ", bound " << fmt(r.constants.theorem_bound) << "\n";
  for (const auto& p : r.points) {
    json rec = base_record(c, "minami");
    rec["estimate"] = estimate_json(p.estimate);
    rec["energy"] = p.z.real();
    rec["eta"] = p.z.imag();
    rec["sharp_bound"] = p.sharp_bound;
    rec["sharp_verdict"] = std::string(to_string(p.sharp_verdict));
    rec["classical_bound"] = optional_json(p.classical_bound);
    rec["classical_verdict"] = std::string(to_string(p.classical_verdict));
    rec["classical_bound_scaled"] = optional_json(p.classical_bound_scaled);
    rec["classical_scaled_verdict"] = std::string(to_string(p.classical_scaled_verdict));
    rec["min_sample"] = p.min_sample;
    rec["max_sample"] = p.max_sample;
    rec["envelope"] = 1.0 / (p.z.imag() * p.z.imag());
    o.records.push_back(rec);
    o.csv_rows.push_back(fmt(p.z.real()) + "," + fmt(p.z.imag()) + "," + fmt(p.estimate.mean) + "," +
                         fmt(p.estimate.std_error) + "," + fmt(*p.estimate.bound) + "," + fmt(p.sharp_bound) + "," +
                         (p.classical_bound ? fmt(*p.classical_bound) : "") + "," +
                         std::string(to_string(p.estimate.verdict)));
    c.out << "  E = " << fmt(p.z.real()) << ": mean " << fmt(p.estimate.mean) << " +- " << fmt(p.estimate.std_error)
          << "  " << to_string(p.estimate.verdict) << "\n";
  }
  o.status = r.all_within() ? kPass : kVerdictFailed;
  return o;
}

Outcome cmd_wegner(Context& c) {
  const auto& s = require_section(c.lab.wegner, "wegner");
  require_samples(c);
  const auto sweep = wegner_sweep(c.cfg, s.center, s.widths);
  Outcome o;
  o.csv_header = "lower,upper,mean,stderr,ratio,ratio_stderr";
  for (const auto& p : sweep.points) {
    json rec = base_record(c, "wegner");
    rec["estimate"] = estimate_json(p.estimate);
    rec["interval"] = {p.J.lower, p.J.upper};
    rec["ratio"] = p.ratio;
    rec["ratio_stderr"] = p.ratio_std_error;
    o.records.push_back(rec);
    o.csv_rows.push_back(fmt(p.J.lower) + "," + fmt(p.J.upper) + "," + fmt(p.estimate.mean) + "," +
                         fmt(p.estimate.std_error) + "," + fmt(p.ratio) + "," + fmt(p.ratio_std_error));
    c.out << "  |J| = " << fmt(p.J.length()) << ": E Tr = " << fmt(p.estimate.mean) << ", ratio " << fmt(p.ratio)
          << " +- " << fmt(p.ratio_std_error) << "\n";
  }
  json summary = base_record(c, "wegner_summary");
  summary["spread"] = sweep.spread;
  summary["stable"] = sweep.stable;
  o.records.push_back(summary);
  c.out << "wegner: ratio spread " << fmt(sweep.spread) << (sweep.stable ? " (stable)" : " (NOT stable)") << "\n";
  o.status = sweep.stable ? kPass : kVerdictFailed;
  return o;
}

Outcome cmd_two_ev(Context& c) {
  const auto& s = require_section(c.lab.two_ev, "two_ev");
  require_samples(c);
  const auto reports = two_eigenvalue_sweep(c.cfg, s.center, s.widths);
  Outcome o;
  o.csv_header = "width,probability,probability_stderr,half_factorial_moment,moment_stderr,bound";
  bool ok = true;
  for (const auto& r : reports) {
    json rec = base_record(c, "two_ev");
    rec["interval"] = {r.I.lower, r.I.upper};
    rec["probability"] = estimate_json(r.probability);
    rec["factorial_moment"] = estimate_json(r.factorial_moment);
    rec["bound"] = optional_json(r.bound);
    rec["samples_with_two"] = r.samples_with_two;
    rec["half_pair_sum"] = r.half_pair_sum;
    rec["markov_exact"] = r.markov_exact;
    rec["markov_verdict"] = std::string(to_string(r.markov_verdict));
    rec["bound_verdict"] = std::string(to_string(r.bound_verdict));
    o.records.push_back(rec);
    o.csv_rows.push_back(fmt(r.I.length()) + "," + fmt(r.probability.mean) + "," + fmt(r.probability.std_error) + "," +
                         fmt(r.factorial_moment.mean) + "," + fmt(r.factorial_moment.std_error) + "," +
                         (r.bound ? fmt(*r.bound) : ""));
    c.out << "  |I| = " << fmt(r.I.length()) << ": P{>=2} " << fmt(r.probability.mean) << ", E/2 "
          << fmt(r.factorial_moment.mean) << ", bound " << (r.bound ? fmt(*r.bound) : "n/a") << "  "
          << (r.passed() ? "pass" : "FAIL") << "\n";
    ok = ok && r.passed();
  }
  o.status = ok ? kPass : kVerdictFailed;
  return o;
}

Outcome cmd_fvc(Context& c) {
  const auto& s = require_section(c.lab.fvc, "fvc");
  require_samples(c);
  const auto points = probe_fvc(c.cfg, s.energy, s.theta, s.radii);
  Outcome o;
  o.csv_header = "L,probability,stderr,threshold,resampled";
  for (const auto& p : points) {
    json rec = base_record(c, "fvc");
    rec["L"] = p.L;
    rec["probability"] = p.probability;
    rec["stderr"] = p.std_error;
    rec["n_samples"] = p.n_samples;
    rec["threshold"] = p.threshold;
    rec["resampled"] = p.resampled;
    rec["theta"] = s.theta;
    rec["energy"] = s.energy;
    o.records.push_back(rec);
    o.csv_rows.push_back(std::to_string(p.L) + "," + fmt(p.probability) + "," + fmt(p.std_error) + "," +
                         fmt(p.threshold) + "," + std::to_string(p.resampled));
    c.out << "  L = " << p.L << ": P(FVC event) " << fmt(p.probability) << " +- " << fmt(p.std_error) << "\n";
  }
  return o;
}

Outcome cmd_fmb(Context& c) {
  const auto& s = require_section(c.lab.fmb, "fmb");
  require_samples(c);
  const auto pairs = axis_pairs(c.cfg.d, c.cfg.L);
  const auto r = probe_fractional_moment(c.cfg, s.energy, s.epsilon, s.s, pairs);
  Outcome o;
  o.csv_header = "distance,mean,stderr";
  for (const auto& p : r.points) {
    json rec = base_record(c, "fmb");
    rec["distance"] = p.distance;
    rec["mean"] = p.mean;
    rec["stderr"] = p.std_error;
    o.records.push_back(rec);
    o.csv_rows.push_back(std::to_string(p.distance) + "," + fmt(p.mean) + "," + fmt(p.std_error));
  }
  json fit = base_record(c, "fmb_fit");
  fit["s"] = s.s;
  fit["amplitude"] = r.amplitude;
  fit["gamma"] = r.gamma;
  fit["r_squared"] = r.r_squared;
  o.records.push_back(fit);
  c.out << "fmb: A " << fmt(r.amplitude) << ", gamma " << fmt(r.gamma) << ", R^2 " << fmt(r.r_squared) << "\n";
  return o;
}

EmpiricalIds build_ids(const Context& c, const IdsSection& s) {
  ExperimentConfig ic = c.cfg;
  ic.seed = ids_seed(c.cfg.seed);
  const auto [lo, hi] = spectral_envelope(ic);
  return empirical_ids(ic, s.L_ids, s.realizations, uniform_grid(lo, hi, s.step));
}

std::string ids_csv(const EmpiricalIds& ids) {
  std::ostringstream csv;
  csv << "E,N\n";
  for (Eigen::Index k = 0; k < ids.grid.size(); ++k) csv << fmt(ids.grid(k)) << "," << fmt(ids.values(k)) << "\n";
  return csv.str();
}

Outcome cmd_ids(Context& c) {
  const auto& s = require_section(c.lab.ids, "ids");
  const auto ids = build_ids(c, s);
  Outcome o;
  json rec = base_record(c, "ids");
  rec["L_ids"] = s.L_ids;
  rec["realizations"] = ids.realizations;
  rec["grid_points"] = ids.grid.size();
  rec["grid"] = {ids.grid(0), ids.grid(ids.grid.size() - 1)};
  rec["ids_seed"] = ids.seed;
  const double median = ids.quantile(0.5);
  rec["median_energy"] = median;
  c.out << "ids: " << ids.realizations << " realizations of L_ids = " << s.L_ids << ", median energy " << fmt(median)
        << "\n";
  if (c.cfg.lambda == 0 && c.cfg.d == 1 && c.cfg.laplacian == Laplacian::adjacency) {
    double dist = 0;
    for (Eigen::Index k = 0; k < ids.grid.size(); ++k) {
      const double e = std::clamp(ids.grid(k), -2.0, 2.0);
      dist = std::max(dist, std::abs(ids.values(k) - std::acos(-e / 2) / std::numbers::pi));
    }
    rec["free_ids_sup_distance"] = dist;
    c.out << "  sup |N^ - N_free| = " << fmt(dist) << "\n";
    if (!(dist < 0.01)) o.status = kVerdictFailed;
  }
  o.records.push_back(rec);
  if (s.pos) {
    const auto p = probe_pos(ids, median, s.pos->kappa, s.pos->a, s.pos->b, s.pos->epsilons);
    json prec = base_record(c, "pos");
    prec["E0"] = median;
    prec["kappa"] = s.pos->kappa;
    prec["exponent"] = p.exponent;
    prec["reliable"] = p.reliable;
    json rows = json::array();
    for (const auto& row : p.rows)
      rows.push_back({{"epsilon", row.epsilon}, {"difference", row.difference}, {"reference", row.reference}});
    prec["rows"] = rows;
    o.records.push_back(prec);
    c.out << "  growth exponent at E0: " << fmt(p.exponent) << (p.reliable ? "" : " (unreliable)") << "\n";
  }
  std::string csv = ids_csv(ids);
  const auto nl = csv.find('\n');
  o.csv_header = csv.substr(0, nl);
  std::istringstream rows(csv.substr(nl + 1));
  for (std::string line; std::getline(rows, line);) o.csv_rows.push_back(line);
  return o;
}

Outcome cmd_spacing(Context& c) {
  const auto& s = require_section(c.lab.spacing, "spacing");
  const std::size_t n = require_samples(c);
  std::vector<RescaledSample> samples;
  Outcome o;
  json rec = base_record(c, "spacing");
  rec["mode"] = s.mode;
  if (s.mode == "pipeline") {
    const auto ids = build_ids(c, s.ids);
    const double E0 = ids.quantile(0.5);
    samples = rescaled_realizations(c.cfg, ids, E0);
    rec["E0"] = E0;
    rec["L_ids"] = s.ids.L_ids;
    rec["ids_realizations"] = ids.realizations;
    o.extra_csv.emplace_back("spacing_ids.csv", ids_csv(ids));
  } else if (s.mode == "poisson") {
    samples = synthetic_poisson(n, {s.window.lower - 1.0, s.window.upper + 10.0}, c.cfg.seed);
  } else {
    samples = picket_fence(n, {s.window.lower - 1.0, s.window.upper + 10.0});
  }
  PoissonTestOptions opts;
  opts.window = s.window;
  const auto st = poisson_tests(samples, opts);
  rec["window"] = {st.window.lower, st.window.upper};
  rec["realizations"] = samples.size();
  rec["gaps"] = st.gaps.size();
  rec["ks_statistic"] = st.ks.statistic;
  rec["ks_critical"] = st.ks.critical_value;
  rec["ks_pass"] = st.ks.pass;
  rec["chi_square"] = st.chi_square.statistic;
  rec["chi_square_dof"] = st.chi_square.dof;
  rec["chi_square_p_value"] = st.chi_square.p_value;
  rec["chi_square_pass"] = st.chi_square.pass;
  rec["correlation"] = st.correlation;
  rec["correlation_threshold"] = st.correlation_threshold;
  rec["correlation_pass"] = st.correlation_pass;
  rec["unit_window_mean"] = st.unit_mean;
  rec["unit_window_stderr"] = st.unit_std_error;
  rec["window_intensity"] = st.window_intensity;
  rec["window_intensity_stderr"] = st.window_intensity_std_error;
  rec["intensity_pass"] = st.intensity_pass;
  rec["inconclusive"] = st.inconclusive;
  rec["critical_values"] = "KS asymptotic 1.358/sqrt(n); chi-square 5% with bins pooled to expected >= 5";
  rec["pass"] = st.pass();
  o.records.push_back(rec);

  o.csv_header = "realization,xi";
  for (std::size_t r = 0; r < samples.size(); ++r)
    for (double x : samples[r].xi)
      if (x >= s.window.lower - 5 && x <= s.window.upper + 5) o.csv_rows.push_back(std::to_string(r) + "," + fmt(x));

  c.out << "spacing (" << s.mode << "): " << samples.size() << " realizations, " << st.gaps.size() << " gaps\n"
        << "  KS " << fmt(st.ks.statistic) << " vs " << fmt(st.ks.critical_value) << (st.ks.pass ? " pass" : " FAIL")
        << "\n  chi-square p " << fmt(st.chi_square.p_value) << (st.chi_square.pass ? " pass" : " FAIL")
        << "\n  correlation " << fmt(st.correlation) << " (|r| < " << fmt(st.correlation_threshold) << ")"
        << (st.correlation_pass ? " pass" : " FAIL") << "\n  unit-window mean " << fmt(st.unit_mean) << " +- "
        << fmt(st.unit_std_error) << ", window intensity " << fmt(st.window_intensity) << " +- "
        << fmt(st.window_intensity_std_error) << "\n";
  if (st.inconclusive) c.out << "  inconclusive: fewer than 50 gaps\n";
  o.status = st.pass() ? kPass : kVerdictFailed;
  return o;
}

// ---------------------------------------------------------------------------

std::string utc_now() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
}

void write_outputs(const Context& c, const std::string& command, const Outcome& o, const std::string& started,
                   double wall) {
  if (c.opt.out_dir.empty()) return;
  const fs::path dir(c.opt.out_dir);
  fs::create_directories(dir);
  std::vector<std::string> outputs;

  std::string jsonl;
  for (const auto& r : o.records) jsonl += r.dump() + "\n";
  const fs::path results = dir / (command + ".jsonl");
  write_file(results, jsonl);
  outputs.push_back(results.string());

  if (!o.csv_header.empty()) {
    std::string csv = o.csv_header + "\n";
    for (const auto& row : o.csv_rows) csv += row + "\n";
    const fs::path p = dir / (command + ".csv");
    write_file(p, csv);
    outputs.push_back(p.string());
  }
  for (const auto& [name, contents] : o.extra_csv) {
    write_file(dir / name, contents);
    outputs.push_back((dir / name).string());
  }

  json manifest = {{"artifact_version", kVersion},
                   {"subcommand", command},
                   {"digest", c.lab.digest},
                   {"seed", c.cfg.seed},
                   {"samples", c.cfg.n_samples},
                   {"workers", c.cfg.workers},
                   {"config", c.opt.config},
                   {"started", started},
                   {"finished", utc_now()},
                   {"wall_time_seconds", wall},
                   {"exit_status", o.status},
                   {"outputs", outputs}};
  write_file(dir / (command + ".manifest.json"), manifest.dump(2) + "\n");
}

int verify_digest(const Options& opt, std::ostream& out, std::ostream& err) {
  const auto lab = load_config(opt.config);
  std::ifstream in(opt.results);
  if (!in) {
    err << "error: cannot open results file " << opt.results << "\n";
    return kRuntimeError;
  }
  std::size_t records = 0, mismatched = 0, line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      err << "error: " << opt.results << " line " << line_no << ": " << e.what() << "\n";
      return kUsageError;
    }
    ++records;
    if (!rec.contains("digest") || rec["digest"] != lab.digest) {
      ++mismatched;
      err << "line " << line_no << ": digest " << (rec.contains("digest") ? rec["digest"].dump() : "missing")
          << " does not match " << lab.digest << "\n";
    }
  }
  out << "config digest " << lab.digest << ": " << records << " records, " << mismatched << " mismatched\n";
  return records > 0 && mismatched == 0 ? kPass : kVerdictFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Monte Carlo lab for discrete alloy-type random Schroedinger operators", "alloy-lab"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  Options opt;

  using Handler = Outcome (*)(Context&);
  const std::vector<std::tuple<std::string, std::string, Handler>> commands = {
      {"check", "Check the assumption on (rho, u)", cmd_check},
      {"constants", "Circulant transform and Minami constants", cmd_constants},
      {"minami", "Estimate E det Im G against the Minami bound", cmd_minami},
      {"wegner", "Wegner linearity sweep", cmd_wegner},
      {"two-ev", "Two-eigenvalue probability chain", cmd_two_ev},
      {"fvc", "Finite-volume criterion probe", cmd_fvc},
      {"fmb", "Fractional moment decay probe", cmd_fmb},
      {"ids", "Empirical integrated density of states", cmd_ids},
      {"spacing", "Poisson statistics of the rescaled spectrum", cmd_spacing},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, handler] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Config file (JSON)")->required()->check(CLI::ExistingFile);
    if (name != "check" && name != "constants") {
      sub->add_option("--seed", opt.seed, "Random seed");
      sub->add_option("--samples", opt.samples, "Number of samples or realizations");
      sub->add_option("--workers", opt.workers, "Worker threads (env ALLOY_WORKERS)")->check(CLI::PositiveNumber);
    }
    sub->add_option("--out", opt.out_dir, "Output directory for records, CSV and manifest");
    subs.push_back(sub);
  }
  auto* verify = app.add_subcommand("verify-digest", "Check that result records carry the config digest");
  verify->add_option("--config", opt.config, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  verify->add_option("--results", opt.results, "Line-delimited JSON results")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsageError;
  }

  try {
    if (verify->parsed()) return verify_digest(opt, out, err);
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const auto& [name, help, handler] = commands[i];
      const auto started = utc_now();
      const auto t0 = std::chrono::steady_clock::now();
      Context c{opt, load_config(opt.config), {}, out};
      c.cfg = c.lab.model;
      c.cfg.seed = opt.seed ? *opt.seed : c.lab.seed.value_or(0);
      c.cfg.n_samples = opt.samples ? *opt.samples : c.lab.samples.value_or(0);
      c.cfg.workers = resolve_workers(opt);
      const Outcome o = handler(c);
      const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      write_outputs(c, name, o, started, wall);
      return o.status;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const nlohmann::json::exception& e) {
    err << "error: config: " << e.what() << "\n";
    return kUsageError;
  } catch (const AssumptionViolated& e) {
    err << "error: " << e.what() << "\n";
    return kVerdictFailed;
  } catch (const std::length_error& e) {
    err << "error: resource cap: " << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace alloy::cli
