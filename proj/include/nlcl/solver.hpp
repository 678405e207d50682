#pragma once

// Mild-solution integrators for
//   u_t - Lap (I - Lap)^{-s1} u = -div (I - Lap)^{-s2} (u^{theta+1} b)
// in Fourier space: u^_t = -sigma u^ + N(u)^. The linear part is propagated
// exactly by G^(dt) = exp(-sigma dt); the Duhamel integral of the
// nonlinearity is approximated by exponential time differencing (ETD1 or
// the Cox-Matthews ETDRK2). A Picard iteration on a fine time grid serves as
// an independent local-existence oracle.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/model.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/symbols.hpp"

namespace nlcl {

/// Thrown when the state stops being finite; carries the time reached.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Spectral form of -div (I - Lap)^{-s2} (u^{theta+1} b), dealiased.
class NonlinearTerm {
 public:
  NonlinearTerm(const Grid& g, const ModelParams& m, double dealias_rule = 2.0 / 3.0)
      : grid_(g), theta_(m.theta), active_(m.flux_scale != 0.0), symbol_(g.size()) {
    m.validate(g.dim());
    const auto b = m.direction3();
    const auto mask = dealias_mask(g, dealias_rule);
    const std::size_t n = g.points_per_dim();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto w = g.wavevector(i);
      symbol_[i] = -m.flux_scale * mask[i] * bessel(w.xi_sq, m.s2) * directional_derivative_symbol(w, b, n);
    }
  }

  bool active() const { return active_; }
  const Grid& grid() const { return grid_; }

  SpectralField operator()(const Field& u, double t = 0.0) const {
    SpectralField out(grid_);
    if (!active_) return out;
    Field p(grid_);
    auto pv = p.values();
    const auto uv = u.values();
    for (std::size_t i = 0; i < uv.size(); ++i) {
      double v = uv[i];
      for (int k = 0; k < theta_; ++k) v *= uv[i];
      if (!std::isfinite(v)) throw BlowUpError("nonlinear term overflowed (u^{theta+1} not finite)", t);
      pv[i] = v;
    }
    out = forward(p);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= symbol_[i];
    return out;
  }

  SpectralField from_spectrum(const SpectralField& uh, double t = 0.0) const {
    if (!active_) return SpectralField(grid_);
    return (*this)(inverse(uh), t);
  }

 private:
  Grid grid_;
  int theta_;
  bool active_;
  std::vector<complex> symbol_;
};

inline SpectralField nonlinear_rhs(const Field& u, const ModelParams& m, double dealias_rule = 2.0 / 3.0) {
  return NonlinearTerm(u.grid(), m, dealias_rule)(u);
}

enum class Integrator { ETD1, ETDRK2 };

inline const char* to_string(Integrator i) { return i == Integrator::ETD1 ? "ETD1" : "ETDRK2"; }

/// One integrator with its dt-dependent tables.
class Stepper {
 public:
  Stepper(const Grid& g, const ModelParams& m, double dt, Integrator integ,
          double dealias_rule = 2.0 / 3.0)
      : nl_(g, m, dealias_rule), integ_(integ), dt_(dt), E_(g.size()), p1_(g.size()), p2_(g.size()) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("Stepper: dt must be positive");
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double z = -sigma(g.xi_sq(i), m.s1) * dt;
      E_[i] = std::exp(z);
      p1_[i] = phi1(z);
      p2_[i] = phi2(z);
    }
  }

  double dt() const { return dt_; }
  const NonlinearTerm& nonlinear() const { return nl_; }

  /// Advances u^ from time t to t + dt.
  SpectralField advance(const SpectralField& uh, double t) const {
    SpectralField out(uh.grid());
    if (!nl_.active()) {
      for (std::size_t i = 0; i < uh.size(); ++i) out[i] = E_[i] * uh[i];
      return out;
    }
    const SpectralField n0 = nl_.from_spectrum(uh, t);
    for (std::size_t i = 0; i < uh.size(); ++i) out[i] = E_[i] * uh[i] + dt_ * p1_[i] * n0[i];
    if (integ_ == Integrator::ETDRK2) {
      const SpectralField n1 = nl_.from_spectrum(out, t + dt_);
      for (std::size_t i = 0; i < uh.size(); ++i) out[i] += dt_ * p2_[i] * (n1[i] - n0[i]);
    }
    if (!out.all_finite()) throw BlowUpError("state became non-finite", t + dt_);
    return out;
  }

 private:
  NonlinearTerm nl_;
  Integrator integ_;
  double dt_;
  std::vector<double> E_, p1_, p2_;
};

inline Field step(const Field& u, double dt, const ModelParams& m, Integrator integ,
                  double dealias_rule = 2.0 / 3.0) {
  return inverse(Stepper(u.grid(), m, dt, integ, dealias_rule).advance(forward(u), 0.0));
}

struct SolverConfig {
  ModelParams model;
  double dt = 0.01;
  double T = 1.0;
  Integrator integrator = Integrator::ETDRK2;
  double dealias_rule = 2.0 / 3.0;
  int record_every = 1;
  double hdot_order = 1.0;             // s in the Hdot_s column
  std::vector<double> extra_orders;    // l for additional |Lambda^l u|_2 series
  int snapshot_every = 0;              // in records; 0 keeps no snapshots

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("solver: dt must be positive");
    if (!(T >= dt)) throw std::invalid_argument("solver: T must be >= dt");
    if (record_every < 1) throw std::invalid_argument("solver: record_every must be >= 1");
    if (!(dealias_rule > 0.0 && dealias_rule <= 1.0))
      throw std::invalid_argument("solver: dealias rule must lie in (0, 1]");
    if (!(hdot_order >= 0.0)) throw std::invalid_argument("solver: hdot order must be nonnegative");
    for (double l : extra_orders)
      if (!(l >= 0.0)) throw std::invalid_argument("solver: extra orders must be nonnegative");
    if (snapshot_every < 0) throw std::invalid_argument("solver: snapshot_every must be >= 0");
  }

  /// Whole number of steps; dt is shrunk slightly so that steps * dt = T.
  long steps() const { return std::max(1L, static_cast<long>(std::ceil(T / dt - 1e-9))); }
  double effective_dt() const { return T / static_cast<double>(steps()); }
};

struct NormRecord {
  double t = 0.0;
  double L1 = 0.0, L2 = 0.0, Linf = 0.0;
  double Hs2 = 0.0;            // |u|_{H^{s2}}
  double Hdot_s = 0.0;         // |Lambda^s u|_2
  double mean = 0.0;           // box average (DC coefficient / N^n)
  double dissipation = 0.0;    // int (1+|xi|^2)^{s2-s1} |xi|^2 |u^|^2
  std::vector<double> extra;   // |Lambda^l u|_2 per configured l
};

inline NormRecord measure(double t, const SpectralField& uh, const Field& u, const SolverConfig& cfg) {
  const Grid& g = uh.grid();
  const double s1 = cfg.model.s1, s2 = cfg.model.s2;
  NormRecord r;
  r.t = t;
  r.L1 = lp_norm(u, 1.0).value;
  r.L2 = lp_norm(u, 2.0).value;
  r.Linf = lp_norm(u, infinity).value;
  r.Hs2 = sobolev_norm(uh, s2).value;
  r.Hdot_s = hom_sobolev_norm(uh, cfg.hdot_order).value;
  r.mean = uh[0].real() / static_cast<double>(g.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double xs = g.xi_sq(i);
    if (xs == 0.0) continue;
    acc += std::exp((s2 - s1) * std::log1p(xs)) * xs * std::norm(uh[i]);
  }
  r.dissipation = acc * g.spectral_weight();
  for (double l : cfg.extra_orders) r.extra.push_back(hom_sobolev_norm(uh, l).value);
  return r;
}

struct Trajectory {
  std::vector<double> times;
  std::vector<NormRecord> norms;
  std::vector<Field> snapshots;
  std::vector<double> snapshot_times;
  std::vector<std::string> warnings;
  bool hs2_monotone = true;
  std::optional<SpectralField> final_state;
  std::optional<double> blowup_time;
};

/// Max |u^| over the outer tenth of the retained band relative to max |u^|.
inline double spectral_tail(const SpectralField& uh, double dealias_rule) {
  const Grid& g = uh.grid();
  const long kcut = dealias_cutoff(g.points_per_dim(), dealias_rule);
  const double edge = 0.9 * static_cast<double>(kcut);
  double peak = 0.0, tail = 0.0;
  for (std::size_t i = 0; i < uh.size(); ++i) {
    const double a = std::abs(uh[i]);
    peak = std::max(peak, a);
    const auto w = g.wavevector(i);
    long kinf = 0;
    for (int d = 0; d < g.dim(); ++d) kinf = std::max(kinf, std::labs(w.k[d]));
    if (static_cast<double>(kinf) > edge) tail = std::max(tail, a);
  }
  return peak > 0.0 ? tail / peak : 0.0;
}

/// Called at every record with (t, u^, u).
using Observer = std::function<void(double, const SpectralField&, const Field&)>;

/// Integrates from u0 over [0, T]. A blow-up stops the run: the trajectory up
/// to the last good record is kept, `blowup_time` is set and BlowUpError is
/// rethrown only when `rethrow` is true.
inline Trajectory solve(const Field& u0, const SolverConfig& cfg, const Observer& observer = {},
                        bool rethrow = true) {
  cfg.validate();
  const Grid& g = u0.grid();
  if (!u0.all_finite()) throw std::invalid_argument("solve: initial data must be finite");
  const long nsteps = cfg.steps();
  const double dt = cfg.effective_dt();
  const Stepper stepper(g, cfg.model, dt, cfg.integrator, cfg.dealias_rule);

  Trajectory traj;
  SpectralField uh = forward(u0);
  bool tail_warned = false;
  long records = 0;
  auto record = [&](double t, const Field& u) {
    traj.times.push_back(t);
    traj.norms.push_back(measure(t, uh, u, cfg));
    const auto& nr = traj.norms;
    if (nr.size() > 1 && nr.back().Hs2 > nr[nr.size() - 2].Hs2 * (1.0 + 1e-12)) traj.hs2_monotone = false;
    if (cfg.snapshot_every > 0 && records % cfg.snapshot_every == 0) {
      traj.snapshots.push_back(u);
      traj.snapshot_times.push_back(t);
    }
    if (!tail_warned && spectral_tail(uh, cfg.dealias_rule) > 1e-6) {
      tail_warned = true;
      traj.warnings.push_back("resolution exhaustion: spectral tail above 1e-6 of peak at t=" + std::to_string(t));
    }
    if (observer) observer(t, uh, u);
    ++records;
  };
  record(0.0, u0);
  for (long j = 1; j <= nsteps; ++j) {
    const double t_prev = static_cast<double>(j - 1) * dt;
    try {
      uh = stepper.advance(uh, t_prev);
    } catch (const BlowUpError& e) {
      traj.blowup_time = e.time();
      traj.warnings.push_back(std::string("blow-up: ") + e.what() + " at t=" + std::to_string(e.time()));
      if (rethrow) throw;
      return traj;
    }
    if (j % cfg.record_every == 0 || j == nsteps) record(static_cast<double>(j) * dt, inverse(uh));
  }
  if (!traj.hs2_monotone) traj.warnings.push_back("H^{s2} norm increased between records");
  traj.final_state = uh;
  return traj;
}

struct PicardOptions {
  int max_iter = 40;
  double tol = 1e-10;
  int substeps = 400;       // trapezoid nodes on [0, T0] minus one
  double s = 1.0;           // Sobolev order of the distance
  double dealias_rule = 2.0 / 3.0;
  int patience = 3;         // consecutive k_m >= 1 before giving up
};

struct PicardResult {
  std::vector<double> distances;   // d_m = sup_t |u^{m+1} - u^m|_{H^s}, m = 0, 1, ...
  std::vector<double> factors;     // k_m = d_m / d_{m-1}, m = 1, 2, ...
  bool converged = false;
  bool contraction_failed = false;
  std::vector<SpectralField> path; // final iterate at the nodes
  double T0 = 0.0;

  const SpectralField& at_end() const { return path.back(); }
};

/// u^0 = 0; u^{m+1} solves the linear problem with source N(u^m) by the exact
/// propagator and a composite trapezoid rule:
///   u(t_{j+1}) = E u(t_j) + h/2 (E N_j + N_{j+1}).
inline PicardResult picard_solve(const Field& u0, double T0, const ModelParams& model,
                                 const PicardOptions& opt = {}) {
  if (!(T0 > 0.0)) throw std::invalid_argument("picard_solve: T0 must be positive");
  if (opt.substeps < 1 || opt.max_iter < 1) throw std::invalid_argument("picard_solve: bad options");
  const Grid& g = u0.grid();
  const NonlinearTerm nl(g, model, opt.dealias_rule);
  const int M = opt.substeps;
  const double h = T0 / M;
  std::vector<double> E(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) E[i] = std::exp(-h * sigma(g.xi_sq(i), model.s1));

  PicardResult res;
  res.T0 = T0;
  const SpectralField u0h = forward(u0);
  std::vector<SpectralField> cur(M + 1, SpectralField(g));
  int bad_streak = 0;
  for (int m = 0; m < opt.max_iter; ++m) {
    std::vector<SpectralField> src;
    src.reserve(M + 1);
    for (int j = 0; j <= M; ++j) src.push_back(nl.from_spectrum(cur[j], j * h));
    std::vector<SpectralField> next;
    next.reserve(M + 1);
    next.push_back(u0h);
    for (int j = 0; j < M; ++j) {
      SpectralField v(g);
      for (std::size_t i = 0; i < g.size(); ++i)
        v[i] = E[i] * next[j][i] + 0.5 * h * (E[i] * src[j][i] + src[j + 1][i]);
      if (!v.all_finite()) throw BlowUpError("picard iterate became non-finite", (j + 1) * h);
      next.push_back(std::move(v));
    }
    double d = 0.0;
    for (int j = 0; j <= M; ++j) d = std::max(d, sobolev_norm(next[j] - cur[j], opt.s).value);
    res.distances.push_back(d);
    if (m > 0) {
      const double prev = res.distances[m - 1];
      res.factors.push_back(prev > 0.0 ? d / prev : 0.0);
      bad_streak = res.factors.back() >= 1.0 ? bad_streak + 1 : 0;
    }
    cur = std::move(next);
    if (d < opt.tol) {
      res.converged = true;
      break;
    }
    if (bad_streak >= opt.patience || !std::isfinite(d)) {
      res.contraction_failed = true;
      break;
    }
  }
  res.path = std::move(cur);
  return res;
}

}  // namespace nlcl
