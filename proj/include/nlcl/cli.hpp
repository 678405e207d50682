#pragma once

// Command dispatch: runs one workflow and writes its artifacts.
//
//   manifest.json   effective config, warnings, versions, timings
//   report.json     numbers and verdicts only (byte-stable for a fixed seed)
//   norms.csv       norm history (solve, picard, decay) or sweep rows (greens)
//   series.csv      extra time series (solve, decay)
//   lemmas.csv      per-field ratios (verify-lemmas)
//   snapshots/      optional binary fields (solve, decay)
//
// Exit codes: 0 all verdicts pass, 1 some verdict fails, 2 runtime error.

#include <fftw3.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "nlcl/config.hpp"
#include "nlcl/decay.hpp"
#include "nlcl/greens.hpp"
#include "nlcl/inequalities.hpp"
#include "nlcl/io.hpp"
#include "nlcl/random_field.hpp"
#include "nlcl/solver.hpp"

namespace nlcl {

inline constexpr const char* version = "0.1.0";

using json = nlohmann::json;

enum ExitCode : int { exit_pass = 0, exit_fail = 1, exit_error = 2 };

namespace cli_detail {

/// NaN / inf are not representable in JSON; they become null.
inline json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

inline json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

inline json model_json(const RunConfig& c) {
  return {{"dim", c.dim},
          {"N", c.N},
          {"L", c.L},
          {"s1", c.model.s1},
          {"s2", c.model.s2},
          {"theta", c.model.theta},
          {"theta_0", number(theta_max(c.dim, c.model.s1, c.model.s2))},
          {"flux_dir", c.model.flux_dir},
          {"flux_scale", c.model.flux_scale}};
}

/// Runs f(i) for i in [0, n) on `threads` workers; results are stored by
/// index so the output does not depend on scheduling.
template <class F>
void parallel_for(std::size_t n, int threads, F&& f) {
  const std::size_t w = std::min<std::size_t>(std::max(1, threads), n);
  if (w <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::vector<std::exception_ptr> errors(w);
  std::vector<std::jthread> pool;
  for (std::size_t k = 0; k < w; ++k)
    pool.emplace_back([&, k] {
      try {
        for (std::size_t i = k; i < n; i += w) f(i);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct Outcome {
  json report;
  bool pass = false;
};

inline json trajectory_summary(const Trajectory& tr) {
  const auto res = energy_identity_residual(tr);
  double mean_drift = 0.0;
  const double m0 = tr.norms.front().mean;
  for (const auto& r : tr.norms) mean_drift = std::max(mean_drift, std::abs(r.mean - m0));
  const auto& last = tr.norms.back();
  return {{"records", tr.norms.size()},
          {"t_final", last.t},
          {"final", {{"L1", last.L1}, {"L2", last.L2}, {"Linf", last.Linf}, {"Hs2", last.Hs2}, {"Hdot_s", last.Hdot_s}}},
          {"mean_drift", mean_drift},
          {"hs2_monotone", tr.hs2_monotone},
          {"energy_max_residual", res.empty() ? 0.0 : *std::max_element(res.begin(), res.end())},
          {"energy_final_residual", res.empty() ? 0.0 : res.back()},
          {"blowup_time", tr.blowup_time ? json(*tr.blowup_time) : json(nullptr)},
          {"warnings", tr.warnings}};
}

inline void write_snapshots(const std::filesystem::path& out, const Trajectory& tr) {
  for (std::size_t i = 0; i < tr.snapshots.size(); ++i) {
    std::ostringstream name;
    name << "snap_" << std::setw(5) << std::setfill('0') << i << ".bin";
    io::write_snapshot(out / "snapshots" / name.str(), tr.snapshots[i], tr.snapshot_times[i]);
  }
}

inline Outcome run_greens(const RunConfig& c, const std::filesystem::path& out) {
  const Grid g(c.dim, c.N, c.L);
  const double s1 = c.model.s1;
  std::vector<double> times = c.times;
  std::sort(times.begin(), times.end());
  const bool envelopes = s1 < 1.0;
  const CutoffBank bank = make_cutoffs(g, c.delta, c.R);
  const int order = c.envelope_order ? *c.envelope_order : (envelopes ? default_envelope_order(c.dim, s1) : 0);

  struct PerTime {
    GreensNorms norms{};
    double heat_error = std::numeric_limits<double>::quiet_NaN();
    std::vector<EnvelopeReport> env;
  };
  std::vector<PerTime> per(times.size());
  parallel_for(times.size(), c.threads, [&](std::size_t i) {
    const GreensKernel k = make_kernel(g, times[i], s1);
    per[i].norms = greens_norms(k);
    if (s1 == 0.0 && times[i] > 0.0) per[i].heat_error = heat_kernel_error(k);
    if (envelopes && times[i] >= 1.0)
      for (auto band : {EnvelopeBand::low, EnvelopeBand::high})
        for (int a : {0, 1}) per[i].env.push_back(check_envelope(k, bank, band, order, a));
  });

  std::vector<SweepRow> rows;
  std::vector<double> l1, grad, l2;
  std::map<std::string, std::vector<double>> env_series;
  std::map<std::string, double> running;
  double heat_max = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (auto& r : greens_norm_rows(per[i].norms, c.dim)) rows.push_back(r);
    if (times[i] >= 1.0) {
      l1.push_back(per[i].norms.L1);
      grad.push_back(per[i].norms.gradL1 * std::sqrt(times[i]));
      l2.push_back(per[i].norms.L2 * std::pow(times[i], c.dim / 4.0));
    }
    if (std::isfinite(per[i].heat_error)) {
      rows.push_back({times[i], "heat_error", per[i].heat_error, per[i].heat_error});
      heat_max = std::max(heat_max, per[i].heat_error);
    }
    for (const auto& e : per[i].env) {
      const std::string name = std::string(e.band == EnvelopeBand::low ? "envelope_G1" : "envelope_G3") +
                               (e.alpha ? "_dx1" : "");
      double& cst = running[name];
      cst = std::max(cst, e.max_ratio);
      env_series[name].push_back(e.max_ratio);
      rows.push_back({times[i], name, e.max_ratio, cst});
    }
  }
  io::write_sweep_csv(out / "norms.csv", rows);

  Outcome o;
  o.pass = true;
  json laws = json::object();
  auto law = [&](const std::string& name, const std::vector<double>& v, double bound) {
    const double sp = spread(v);
    const bool ok = sp < bound;
    o.pass = o.pass && ok;
    laws[name] = {{"spread", number(sp)}, {"bound", bound}, {"pass", ok}, {"values", numbers(v)}};
  };
  if (!l1.empty()) {
    law("L1", l1, 1.5);
    law("gradL1_sqrt_t", grad, 2.0);
    law("L2_t_n4", l2, 2.0);
  }
  json env = json::object();
  for (const auto& [name, v] : env_series) {
    double c0 = v.front(), cmax = 0.0;
    for (double x : v) cmax = std::max(cmax, x);
    const double growth = c0 > 0.0 ? cmax / c0 : std::numeric_limits<double>::infinity();
    const bool ok = std::isfinite(growth) && growth < 2.0;
    o.pass = o.pass && ok;
    env[name] = {{"max_ratio", numbers(v)},
                 {"pointwise_spread", number(spread(v))},
                 {"constant_growth", number(growth)},
                 {"bound", 2.0},
                 {"pass", ok}};
  }
  o.report = {{"command", "greens"},
              {"parameters", model_json(c)},
              {"times", c.times},
              {"cutoffs", {{"delta", c.delta}, {"R", c.R}, {"envelope_order", order}}},
              {"norm_laws", laws},
              {"envelopes", env}};
  if (s1 == 0.0) {
    const bool ok = heat_max < 1e-8;
    o.pass = o.pass && ok;
    o.report["heat_kernel"] = {{"max_relative_error", heat_max}, {"bound", 1e-8}, {"pass", ok}};
  }
  return o;
}

inline Outcome run_solve(const RunConfig& c, const std::filesystem::path& out) {
  const Grid g(c.dim, c.N, c.L);
  const Trajectory tr = solve(gaussian_initial_data(g, c.amplitude, c.width), c.solver, {}, false);
  io::write_norms_csv(out / "norms.csv", tr);
  std::vector<std::string> names{"dissipation", "energy_residual"};
  std::vector<std::vector<double>> cols(2);
  for (const auto& r : tr.norms) cols[0].push_back(r.dissipation);
  cols[1] = energy_identity_residual(tr);
  for (std::size_t k = 0; k < c.solver.extra_orders.size(); ++k) {
    names.push_back("Lambda^" + order_label(c.solver.extra_orders[k]));
    cols.emplace_back();
    for (const auto& r : tr.norms) cols.back().push_back(r.extra[k]);
  }
  io::write_series_csv(out / "series.csv", tr.times, names, cols);
  write_snapshots(out, tr);
  Outcome o;
  o.pass = !tr.blowup_time && tr.hs2_monotone;
  o.report = {{"command", "solve"},
              {"parameters", model_json(c)},
              {"solver",
               {{"dt", c.solver.effective_dt()},
                {"T", c.solver.T},
                {"integrator", to_string(c.solver.integrator)},
                {"dealias_rule", c.solver.dealias_rule}}},
              {"initial_data", {{"amplitude", c.amplitude}, {"width", c.width}}},
              {"summary", trajectory_summary(tr)},
              {"pass", o.pass}};
  return o;
}

inline Outcome run_picard(const RunConfig& c, const std::filesystem::path& out) {
  const Grid g(c.dim, c.N, c.L);
  const Field u0 = gaussian_initial_data(g, c.amplitude, c.width);
  PicardOptions opt;
  opt.max_iter = c.max_iter;
  opt.tol = c.picard_tol;
  opt.substeps = c.substeps;
  opt.s = c.picard_s;
  opt.dealias_rule = c.solver.dealias_rule;
  const PicardResult full = picard_solve(u0, c.T0, c.model, opt);
  const PicardResult half = picard_solve(u0, 0.5 * c.T0, c.model, opt);

  SolverConfig sc = c.solver;
  sc.T = c.T0;
  sc.dt = std::min(c.solver.dt, c.T0 / 1000.0);
  sc.integrator = Integrator::ETDRK2;
  const Trajectory tr = solve(u0, sc);
  io::write_norms_csv(out / "norms.csv", tr);
  const double dist = sobolev_norm(full.at_end() - *tr.final_state, c.picard_s).value;

  bool contraction = !full.contraction_failed;
  for (std::size_t i = 1; i < full.factors.size(); ++i) contraction = contraction && full.factors[i] < 1.0;
  const std::size_t common = std::min(full.factors.size(), half.factors.size());
  double halving = std::numeric_limits<double>::quiet_NaN();
  if (common > 0 && half.factors[common - 1] > 0.0) halving = full.factors[common - 1] / half.factors[common - 1];
  const double d_last = full.distances.empty() ? 0.0 : full.distances.back();
  const bool fixed_ok = full.converged && d_last < 1e-8;
  const bool match_ok = dist < c.match_tol;
  const bool halving_ok = std::isfinite(halving) && halving >= 1.5 && halving <= 2.5;

  Outcome o;
  o.pass = contraction && fixed_ok && match_ok && halving_ok;
  o.report = {{"command", "picard"},
              {"parameters", model_json(c)},
              {"T0", c.T0},
              {"substeps", c.substeps},
              {"sobolev_order", c.picard_s},
              {"distances", numbers(full.distances)},
              {"factors", numbers(full.factors)},
              {"converged", full.converged},
              {"contraction_failed", full.contraction_failed},
              {"contraction", {{"all_k_below_1_from_m2", contraction}}},
              {"fixed_point", {{"final_distance", d_last}, {"bound", 1e-8}, {"pass", fixed_ok}}},
              {"etd_match", {{"distance", dist}, {"etd_dt", sc.effective_dt()}, {"bound", c.match_tol}, {"pass", match_ok}}},
              {"halving",
               {{"factors_half", numbers(half.factors)},
                {"common_index", common},
                {"ratio", number(halving)},
                {"range", {1.5, 2.5}},
                {"pass", halving_ok}}},
              {"pass", o.pass}};
  if (full.contraction_failed)
    o.report["diagnosis"] = "no contraction: T0 too large for this data";
  return o;
}

inline DecayConfig decay_config(const RunConfig& c) {
  DecayConfig d;
  d.id = c.id;
  d.dim = c.dim;
  d.N = c.N;
  d.L = c.L;
  d.solver = c.solver;
  d.amplitude = c.amplitude;
  d.width = c.width;
  d.s = c.s;
  d.orders = c.orders;
  d.mu = c.mu;
  d.t_min = c.t_min;
  d.tol_L2 = c.tol_L2;
  d.tol_Lambda = c.tol_Lambda;
  d.tol_Hs2 = c.tol_Hs2;
  d.tol_low = c.tol_low;
  d.l1_bound = c.l1_bound;
  return d;
}

inline json decay_report_json(const DecayReport& r) {
  const auto& c = r.config;
  json norms = json::object();
  for (const auto& f : r.fits) {
    json j = {{"expected", f.expected},
              {"fitted", number(f.fitted)},
              {"stderr", number(f.stderr_)},
              {"tolerance", f.tolerance},
              {"samples", f.samples},
              {"verdict", f.pass ? "pass" : "fail"}};
    if (!f.error.empty()) j["error"] = f.error;
    norms[f.name] = j;
  }
  return {{"id", c.id},
          {"parameters",
           {{"n", c.dim},
            {"N", c.N},
            {"L", c.L},
            {"s1", c.solver.model.s1},
            {"s2", c.solver.model.s2},
            {"theta", c.solver.model.theta},
            {"flux_scale", c.solver.model.flux_scale},
            {"s", c.s},
            {"mu", r.mu},
            {"dt", c.solver.effective_dt()},
            {"T", c.solver.T},
            {"integrator", to_string(c.solver.integrator)},
            {"amplitude", c.amplitude},
            {"width", c.width}}},
          {"hypotheses", {{"status", r.status}, {"notes", r.hypothesis_notes}}},
          {"windows", {{"t_min", r.t_min}, {"t_max", r.t_max}, {"t_wrap", r.t_wrap ? json(*r.t_wrap) : json(nullptr)}}},
          {"norms", norms},
          {"l1_stability", {{"sup_ratio", r.l1_sup_ratio}, {"bound", c.l1_bound}, {"verdict", r.l1_pass ? "pass" : "fail"}}},
          {"energy",
           {{"max_residual", r.energy_max_residual},
            {"final_residual", r.energy_final_residual},
            {"hs2_monotone", r.hs2_monotone}}},
          {"complete", r.complete},
          {"warnings", r.warnings},
          {"verdict", r.pass ? "pass" : "fail"}};
}

inline Outcome run_decay(const RunConfig& c, const std::filesystem::path& out) {
  const DecayReport r = run_decay_experiment(decay_config(c));
  io::write_norms_csv(out / "norms.csv", r.trajectory);
  io::write_series_csv(out / "series.csv", r.trajectory.times, r.series.names, r.series.columns);
  write_snapshots(out, r.trajectory);
  json rep = decay_report_json(r);
  rep["command"] = "decay";
  return {rep, r.pass};
}

/// Admissible Gagliardo-Nirenberg tuple with j = 0, m = 1, q = r = 2.
inline GagliardoNirenberg default_gn(int dim) {
  if (dim == 1) return {0, 1, infinity, 2.0, 2.0, 0.5};
  if (dim == 2) return {0, 1, 4.0, 2.0, 2.0, 0.5};
  return {0, 1, 3.0, 2.0, 2.0, 0.5};
}

inline Outcome run_verify_lemmas(const RunConfig& c, const std::filesystem::path& out) {
  const Grid g(c.dim, c.N, c.L);
  const long alias_free = static_cast<long>(c.N) / (2 * (c.model.theta + 1));
  if (c.kmax > alias_free)
    throw std::invalid_argument("verify-lemmas: kmax must be <= N / (2 (theta + 1)) for alias-free products");
  std::mt19937_64 rng(c.seed);
  const RandomFieldSpec spec{c.kmax, 1.0};
  const auto gn = default_gn(c.dim);
  const ProductExponents pe{};
  const double l = 1.0;

  FamilyStats interp, equiv, gns, prod, power;
  std::vector<std::vector<double>> cols(5);
  std::vector<double> idx;
  for (int i = 0; i < c.fields; ++i) {
    const SpectralField U = random_spectrum(g, rng, spec);
    const SpectralField V = random_spectrum(g, rng, spec);
    const Field u = inverse(U), v = inverse(V);
    const auto ri = check_interpolation(U, 0.5, 2.0);
    interp.add(ri.ratio, interpolation_violated(ri));
    const auto re = check_norm_equivalence(U, c.s);
    equiv.add(re.hs_sq / re.split_sq, !re.holds);
    const auto rg = check_gagliardo_nirenberg(u, gn);
    gns.add(rg.ratio);
    const auto rp = check_product_estimate(u, v, l, pe);
    prod.add(rp.ratio);
    const auto rw = check_power_estimate(u, c.model.theta, l, 2.0, infinity);
    power.add(rw.ratio);
    idx.push_back(i);
    cols[0].push_back(ri.ratio);
    cols[1].push_back(re.hs_sq / re.split_sq);
    cols[2].push_back(rg.ratio);
    cols[3].push_back(rp.ratio);
    cols[4].push_back(rw.ratio);
  }
  io::write_series_csv(out / "lemmas.csv", idx, {"interpolation", "equivalence", "gagliardo_nirenberg", "product", "power"},
                       cols, "field");
  auto stats = [](const FamilyStats& s) {
    return json{{"count", s.count},
                {"violations", s.violations},
                {"min_ratio", number(s.min_ratio)},
                {"max_ratio", number(s.max_ratio)},
                {"spread", number(s.spread())}};
  };
  const double c0 = std::min(1.0, std::pow(2.0, c.s - 1.0)), c1 = std::max(1.0, std::pow(2.0, c.s - 1.0));
  const bool prod_ok = std::isfinite(prod.spread()) && prod.spread() < 10.0;
  const bool power_ok = std::isfinite(power.spread()) && power.spread() < 10.0;
  Outcome o;
  o.pass = interp.violations == 0 && equiv.violations == 0 && prod_ok && power_ok && std::isfinite(gns.max_ratio);
  o.report = {{"command", "verify-lemmas"},
              {"grid", {{"dim", c.dim}, {"N", c.N}, {"L", c.L}}},
              {"seed", c.seed},
              {"fields", c.fields},
              {"kmax", c.kmax},
              {"interpolation", {{"r1", 0.5}, {"r2", 2.0}, {"stats", stats(interp)}}},
              {"norm_equivalence", {{"s", c.s}, {"c0", c0}, {"c1", c1}, {"stats", stats(equiv)}}},
              {"gagliardo_nirenberg",
               {{"j", gn.j}, {"m", gn.m}, {"p", number(gn.p)}, {"q", gn.q}, {"r", gn.r}, {"a", gn.a}, {"stats", stats(gns)}}},
              {"product_estimate",
               {{"l", l}, {"r", pe.r}, {"p1", number(pe.p1)}, {"q1", pe.q1}, {"p2", pe.p2}, {"q2", number(pe.q2)},
                {"stats", stats(prod)}, {"spread_bound", 10.0}, {"pass", prod_ok}}},
              {"power_estimate",
               {{"theta", c.model.theta}, {"l", l}, {"p", 2.0}, {"q", nullptr},
                {"stats", stats(power)}, {"spread_bound", 10.0}, {"pass", power_ok}}},
              {"pass", o.pass}};
  return o;
}

}  // namespace cli_detail

struct DispatchResult {
  int exit_code = exit_error;
  std::string message;
};

/// Runs the configured command and writes artifacts into `out`.
inline DispatchResult dispatch(RunConfig cfg, const std::filesystem::path& out) {
  using namespace cli_detail;
  DispatchResult res;
  json manifest;
  const auto start = std::chrono::steady_clock::now();
  try {
    cfg.finalize();
    std::filesystem::create_directories(out);
    Outcome o;
    switch (cfg.command) {
      case Command::greens: o = run_greens(cfg, out); break;
      case Command::solve: o = run_solve(cfg, out); break;
      case Command::picard: o = run_picard(cfg, out); break;
      case Command::decay: o = run_decay(cfg, out); break;
      case Command::verify_lemmas: o = run_verify_lemmas(cfg, out); break;
    }
    o.report["config_warnings"] = cfg.warnings;
    o.report["pass"] = o.pass;
    io::write_text(out / "report.json", o.report.dump(2) + "\n");
    res.exit_code = o.pass ? exit_pass : exit_fail;
    res.message = std::string(to_string(cfg.command)) + (o.pass ? ": pass" : ": FAIL");
  } catch (const std::exception& e) {
    res.exit_code = exit_error;
    res.message = std::string("error: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  manifest = {{"command", to_string(cfg.command)},
              {"config", echo_config(cfg)},
              {"seed", cfg.seed},
              {"threads", cfg.threads},
              {"warnings", cfg.warnings},
              {"versions", {{"nlcl", version}, {"fftw", std::string(fftw_version)}, {"compiler", __VERSION__}}},
              {"timings", {{"wall_seconds", secs}}},
              {"exit_code", res.exit_code},
              {"message", res.message}};
  try {
    io::write_text(out / "manifest.json", manifest.dump(2) + "\n");
  } catch (const std::exception& e) {
    res.exit_code = exit_error;
    res.message += std::string("; ") + e.what();
  }
  return res;
}

}  // namespace nlcl
