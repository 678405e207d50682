#pragma once

// Long-time experiments: time-frequency splitting, the H^{s2} energy
// identity, power-law fits of norm histories and the assembled report.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/model.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/solver.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/symbols.hpp"

namespace nlcl {

/// eta(t) = sqrt(mu / (1 + t)).
inline double split_radius(double t, double mu) { return std::sqrt(mu / (1.0 + t)); }

/// chi(t, xi) = rho(2 - (1 + t) |xi|^2 / mu): 1 for |xi| <= eta, 0 for
/// |xi| >= sqrt(2) eta (inside the 2 eta support bound).
inline double time_frequency_cutoff(double xi_sq, double t, double mu) {
  return smooth_ramp(2.0 - (1.0 + t) * xi_sq / mu);
}

/// mu = ceil(n + 2 s) + 1, the smallest integer above n + 2 s plus one.
inline double default_mu(int dim, double s) { return std::ceil(dim + 2.0 * s) + 1.0; }

struct FrequencySplit {
  double mu;
  double t;
  double eta;
  Field u_L;
  Field u_H;
};

inline SpectralField low_part(const SpectralField& uh, double t, double mu) {
  if (!(mu > 0.0)) throw std::domain_error("split: mu must be positive");
  if (!(t >= 0.0)) throw std::domain_error("split: t must be nonnegative");
  SpectralField out = uh;
  const Grid& g = uh.grid();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= time_frequency_cutoff(g.xi_sq(i), t, mu);
  return out;
}

inline FrequencySplit split(const Field& u, double t, double mu) {
  const SpectralField lo = low_part(forward(u), t, mu);
  Field uL = inverse(lo);
  Field uH = u - uL;
  return FrequencySplit{mu, t, split_radius(t, mu), std::move(uL), std::move(uH)};
}

/// r(t) = | |u|_{H^{s2}}^2 + 2 int_0^t D dtau - |u0|_{H^{s2}}^2 | / |u0|_{H^{s2}}^2,
/// trapezoid in tau over the recorded dissipation D.
inline std::vector<double> energy_identity_residual(const Trajectory& traj) {
  std::vector<double> r;
  if (traj.norms.empty()) return r;
  const double e0 = traj.norms.front().Hs2 * traj.norms.front().Hs2;
  if (!(e0 > 0.0)) return std::vector<double>(traj.norms.size(), 0.0);
  double integral = 0.0;
  for (std::size_t i = 0; i < traj.norms.size(); ++i) {
    const auto& n = traj.norms[i];
    if (i > 0) {
      const auto& p = traj.norms[i - 1];
      integral += 0.5 * (n.t - p.t) * (n.dissipation + p.dissipation);
    }
    r.push_back(std::abs(n.Hs2 * n.Hs2 + 2.0 * integral - e0) / e0);
  }
  return r;
}

struct FitWindow {
  double t_min = 5.0;
  double t_max = std::numeric_limits<double>::infinity();
};

struct FitResult {
  double slope = 0.0;
  double stderr_ = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

/// Ordinary least squares of log(value) against log(1 + t) over the window.
/// Requires >= 8 samples whose (1 + t) spans at least one decade.
inline FitResult fit_exponent(const std::vector<double>& times, const std::vector<double>& values,
                              const FitWindow& w) {
  if (times.size() != values.size()) throw std::invalid_argument("fit_exponent: length mismatch");
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < w.t_min || times[i] > w.t_max) continue;
    if (!(values[i] > 0.0) || !std::isfinite(values[i]))
      throw std::domain_error("fit_exponent: values must be positive and finite");
    X.push_back(std::log1p(times[i]));
    Y.push_back(std::log(values[i]));
  }
  if (X.size() < 8) throw std::invalid_argument("fit_exponent: fewer than 8 samples in window");
  const auto [lo, hi] = std::minmax_element(X.begin(), X.end());
  if (*hi - *lo < std::log(10.0) * (1.0 - 1e-12))
    throw std::invalid_argument("fit_exponent: window spans less than one decade in 1+t");
  const double n = static_cast<double>(X.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  FitResult f;
  f.samples = X.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double e = Y[i] - (f.intercept + f.slope * X[i]);
    sse += e * e;
  }
  f.stderr_ = std::sqrt(sse / (n - 2.0) / sxx);
  return f;
}

/// Periodic-image contamination estimate: with v the per-axis variance of
/// the u^2-weighted distribution about its centroid, a Gaussian profile
/// leaks eps = 2 n exp(-L^2 / (8 v)) of its u^2 mass across the box edge.
inline double wrap_leakage(const Field& u) {
  const Grid& g = u.grid();
  const int n = g.dim();
  double mass = 0.0;
  std::array<double, 3> c{}, c2{};
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = u[i] * u[i];
    const auto x = g.position(i);
    mass += w;
    for (int d = 0; d < n; ++d) {
      c[d] += w * x[d];
      c2[d] += w * x[d] * x[d];
    }
  }
  if (!(mass > 0.0)) return 0.0;
  double v = 0.0;
  for (int d = 0; d < n; ++d) {
    const double m1 = c[d] / mass;
    v = std::max(v, c2[d] / mass - m1 * m1);
  }
  if (!(v > 0.0)) return 0.0;
  const double L = g.extent();
  return 2.0 * n * std::exp(-L * L / (8.0 * v));
}

inline constexpr double wrap_threshold = 1e-4;

struct DecayConfig {
  std::string id = "decay";
  int dim = 1;
  std::size_t N = 2048;
  double L = 400.0;
  SolverConfig solver{};
  double amplitude = 1.0;     // u0 = A exp(-|x|^2 / (4 a))
  double width = 1.0;         // a
  double s = 1.0;             // regularity order of the Lambda^s rate
  std::vector<double> orders{0.0, 1.0};  // l for |Lambda^l u| and |Lambda^l u_L|
  std::optional<double> mu;   // default ceil(n + 2 s) + 1
  double t_min = 5.0;
  double tol_L2 = 0.05;
  double tol_Lambda = 0.05;
  double tol_Hs2 = 0.05;
  double tol_low = 0.05;
  double l1_bound = 3.0;

  double effective_mu() const { return mu ? *mu : default_mu(dim, s); }
};

struct NormFit {
  std::string name;
  double expected = 0.0;
  double fitted = std::numeric_limits<double>::quiet_NaN();
  double stderr_ = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  std::size_t samples = 0;
  bool pass = false;
  std::string error;  // set when the fit could not be performed
};

/// Columns of the raw norm series beyond the fixed CSV columns.
struct SeriesTable {
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;
};

struct DecayReport {
  DecayConfig config;
  double mu = 0.0;
  std::vector<std::string> hypothesis_notes;
  std::string status;
  double t_min = 0.0, t_max = 0.0;
  std::optional<double> t_wrap;
  std::vector<NormFit> fits;
  double l1_sup_ratio = 0.0;
  bool l1_pass = false;
  double energy_max_residual = 0.0;
  double energy_final_residual = 0.0;
  bool hs2_monotone = true;
  bool complete = true;
  std::vector<std::string> warnings;
  bool pass = false;
  Trajectory trajectory;
  SeriesTable series;

  const NormFit* fit(const std::string& name) const {
    for (const auto& f : fits)
      if (f.name == name) return &f;
    return nullptr;
  }
};

inline std::string order_label(double l) {
  std::string s = std::to_string(l);
  s.erase(s.find_last_not_of('0') + 1);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

inline Field gaussian_initial_data(const Grid& g, double amplitude, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("initial data: width must be positive");
  return Field::sample(g, [&](const std::array<double, 3>& x) {
    double r2 = 0.0;
    for (int d = 0; d < g.dim(); ++d) r2 += x[d] * x[d];
    return amplitude * std::exp(-r2 / (4.0 * width));
  });
}

inline DecayReport run_decay_experiment(const DecayConfig& cfg) {
  const Grid g(cfg.dim, cfg.N, cfg.L);
  const int n = cfg.dim;
  DecayReport rep;
  rep.config = cfg;
  rep.mu = cfg.effective_mu();

  rep.hypothesis_notes = hypothesis_violations(cfg.solver.model, n, true);
  if (!(cfg.s > std::max(cfg.solver.model.s2, n / 2.0)))
    rep.hypothesis_notes.push_back("violates s>max(s2,n/2) (regularity class of the decay rates): s=" +
                                   std::to_string(cfg.s));
  if (!(rep.mu > n + 2.0 * cfg.s))
    rep.hypothesis_notes.push_back("violates mu>n+2s (time-frequency cutoff radius): mu=" + std::to_string(rep.mu));
  if (!rep.hypothesis_notes.empty()) rep.status = "exploratory";
  else if (n <= 2) rep.status = "consistency probe (below n>2 hypothesis)";
  else rep.status = "within hypotheses";

  for (double l : cfg.orders)
    if (!(l >= 0.0)) throw std::invalid_argument("decay: orders must be nonnegative");

  SolverConfig sc = cfg.solver;
  sc.hdot_order = cfg.s;
  sc.extra_orders = cfg.orders;

  const std::size_t nl = cfg.orders.size();
  std::vector<std::vector<double>> low(nl);
  std::vector<double> leak;
  const Observer obs = [&](double t, const SpectralField& uh, const Field& u) {
    const SpectralField lo = low_part(uh, t, rep.mu);
    for (std::size_t k = 0; k < nl; ++k) low[k].push_back(hom_sobolev_norm(lo, cfg.orders[k]).value);
    leak.push_back(wrap_leakage(u));
  };
  rep.trajectory = solve(gaussian_initial_data(g, cfg.amplitude, cfg.width), sc, obs, false);
  const Trajectory& tr = rep.trajectory;
  rep.warnings = tr.warnings;
  rep.hs2_monotone = tr.hs2_monotone;
  if (tr.blowup_time) rep.complete = false;

  const double T_reached = tr.times.back();
  for (std::size_t i = 0; i < leak.size(); ++i)
    if (leak[i] > wrap_threshold) {
      rep.t_wrap = tr.times[i];
      break;
    }
  rep.t_min = cfg.t_min;
  rep.t_max = rep.t_wrap ? std::min(T_reached, *rep.t_wrap) : T_reached;
  const FitWindow win{rep.t_min, rep.t_max};

  std::vector<double> L2, Hs2, L1;
  for (const auto& r : tr.norms) {
    L2.push_back(r.L2);
    Hs2.push_back(r.Hs2);
    L1.push_back(r.L1);
  }

  auto add_fit = [&](const std::string& name, const std::vector<double>& values, double expected, double tol) {
    NormFit f;
    f.name = name;
    f.expected = expected;
    f.tolerance = tol;
    try {
      const auto res = fit_exponent(tr.times, values, win);
      f.fitted = res.slope;
      f.stderr_ = res.stderr_;
      f.samples = res.samples;
      f.pass = std::abs(res.slope - expected) <= tol;
    } catch (const std::exception& e) {
      f.error = e.what();
      f.pass = false;
    }
    rep.fits.push_back(std::move(f));
  };

  const double base = -n / 4.0;
  add_fit("L2", L2, base, cfg.tol_L2);
  for (std::size_t k = 0; k < nl; ++k) {
    const double l = cfg.orders[k];
    if (l == 0.0) continue;
    std::vector<double> v;
    for (const auto& r : tr.norms) v.push_back(r.extra[k]);
    add_fit("Lambda^" + order_label(l), v, base - l / 2.0, cfg.tol_Lambda);
  }
  add_fit("Hs2", Hs2, base, cfg.tol_Hs2);
  for (std::size_t k = 0; k < nl; ++k) {
    const double l = cfg.orders[k];
    add_fit("low_Lambda^" + order_label(l), low[k], base - l / 2.0, cfg.tol_low);
  }

  const double l10 = L1.front();
  for (std::size_t i = 0; i < tr.times.size(); ++i)
    if (tr.times[i] <= rep.t_max && l10 > 0.0) rep.l1_sup_ratio = std::max(rep.l1_sup_ratio, L1[i] / l10);
  rep.l1_pass = rep.l1_sup_ratio <= cfg.l1_bound;

  const auto res = energy_identity_residual(tr);
  for (double r : res) rep.energy_max_residual = std::max(rep.energy_max_residual, r);
  rep.energy_final_residual = res.empty() ? 0.0 : res.back();

  for (std::size_t k = 0; k < nl; ++k) {
    rep.series.names.push_back("low_Lambda^" + order_label(cfg.orders[k]));
    rep.series.columns.push_back(low[k]);
  }
  for (std::size_t k = 0; k < nl; ++k) {
    std::vector<double> v;
    for (const auto& r : tr.norms) v.push_back(r.extra[k]);
    rep.series.names.push_back("Lambda^" + order_label(cfg.orders[k]));
    rep.series.columns.push_back(std::move(v));
  }
  rep.series.names.push_back("energy_residual");
  rep.series.columns.push_back(res);
  rep.series.names.push_back("wrap_leakage");
  rep.series.columns.push_back(leak);

  rep.pass = rep.complete && rep.l1_pass;
  for (const auto& f : rep.fits) rep.pass = rep.pass && f.pass;
  return rep;
}

}  // namespace nlcl
