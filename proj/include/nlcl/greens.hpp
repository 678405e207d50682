#pragma once

// Green's function of the linear part, G^(t, xi) = exp(-t sigma(xi)), its
// low / middle / high frequency bands, pointwise envelope probes and the
// L^1, grad-L^1, L^2 decay laws.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/symbols.hpp"

namespace nlcl {

inline SpectralField greens_hat(const Grid& g, double t, double s1) {
  if (!(t >= 0.0)) throw std::domain_error("greens_hat: t must be nonnegative");
  if (!(s1 >= 0.0)) throw std::domain_error("greens_hat: s1 must be nonnegative");
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = std::exp(-t * sigma(g.xi_sq(i), s1));
  return out;
}

struct GreensKernel {
  Grid grid;
  double t;
  double s1;
  SpectralField spectral;  // G^(t, .)
};

inline GreensKernel make_kernel(const Grid& g, double t, double s1) {
  return GreensKernel{g, t, s1, greens_hat(g, t, s1)};
}

/// Physical-space samples of the kernel whose spectrum is `hat`: the
/// multiplier applied to the unit-mass delta at x = 0.
inline Field kernel_field(const SpectralField& hat) {
  SpectralField src = point_source(hat.grid());
  for (std::size_t i = 0; i < src.size(); ++i) src[i] *= hat[i];
  return inverse(src);
}

inline Field kernel_field(const GreensKernel& k) { return kernel_field(k.spectral); }

/// Smooth partition chi1 + chi2 + chi3 = 1 on the frequency lattice.
/// chi1 = 1 on |xi| <= delta, 0 on |xi| >= 2 delta; chi3 = 0 on |xi| <= R-1,
/// 1 on |xi| >= R.
struct CutoffBank {
  double delta;
  double R;
  std::array<std::vector<double>, 3> chi;

  static double low(double r, double delta) { return smooth_ramp(2.0 - r / delta); }
  static double high(double r, double R) { return smooth_ramp(r - (R - 1.0)); }
};

inline CutoffBank make_cutoffs(const Grid& g, double delta = 0.5, double R = 3.0) {
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("make_cutoffs: delta must lie in (0, 1)");
  if (!(R > 2.0)) throw std::invalid_argument("make_cutoffs: R must exceed 2");
  if (!(2.0 * delta < R - 1.0)) throw std::invalid_argument("make_cutoffs: bands collide (need 2 delta < R - 1)");
  CutoffBank bank{delta, R, {}};
  for (auto& c : bank.chi) c.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = std::sqrt(g.xi_sq(i));
    const double c1 = CutoffBank::low(r, delta);
    const double c3 = CutoffBank::high(r, R);
    bank.chi[0][i] = c1;
    bank.chi[2][i] = c3;
    bank.chi[1][i] = 1.0 - c1 - c3;
  }
  return bank;
}

/// Spectrum of the band-`band` part (0, 1, 2 for G1, G2, G3), optionally
/// differentiated once along axis 0.
inline SpectralField band_spectrum(const GreensKernel& k, const CutoffBank& bank, int band,
                                   bool dx1 = false) {
  if (band < 0 || band > 2) throw std::invalid_argument("band_spectrum: band must be 0, 1 or 2");
  SpectralField out = k.spectral;
  scale_by(out, bank.chi[band]);
  if (dx1) out = partial_derivative(out, 0);
  return out;
}

inline std::array<Field, 3> decompose(const GreensKernel& k, const CutoffBank& bank) {
  if (bank.chi[0].size() != k.grid.size())
    throw std::invalid_argument("decompose: cutoff bank built on a different grid");
  return {kernel_field(band_spectrum(k, bank, 0)), kernel_field(band_spectrum(k, bank, 1)),
          kernel_field(band_spectrum(k, bank, 2))};
}

/// ceil(n / (2 (1 - s1))) + 1, the smallest order with 2 (1 - s1) N > n.
inline int default_envelope_order(int dim, double s1) {
  if (!(s1 < 1.0)) throw std::domain_error("default_envelope_order: needs s1 < 1");
  return static_cast<int>(std::ceil(dim / (2.0 * (1.0 - s1)))) + 1;
}

enum class EnvelopeBand { low, high };

struct EnvelopeReport {
  EnvelopeBand band;
  double t;
  int order;          // N_env
  int alpha;          // 0 or 1 (d/dx1)
  double exponent;    // time exponent multiplying |D^a G_i|
  double max_ratio;   // sup_{|x| <= L/4} |D^a G_i| t^exponent / envelope
  double argmax;      // |x| at the supremum
};

/// Low band: |D^a G1| <= c t^{-(n+|a|)/2} (1 + |x|^2/(1+t))^{-N}.
/// High band: |D^a G3| <= c t^{-(n+|a|)/(2 nu)} (1 + |x|^{2 nu}/(1+t))^{-N}, nu = 1 - s1.
inline EnvelopeReport check_envelope(const GreensKernel& k, const CutoffBank& bank, EnvelopeBand band,
                                     int order, int alpha = 0) {
  if (!(k.t >= 1.0)) throw std::domain_error("check_envelope: requires t >= 1");
  if (alpha != 0 && alpha != 1) throw std::invalid_argument("check_envelope: alpha must be 0 or 1");
  if (order < 1) throw std::invalid_argument("check_envelope: envelope order must be positive");
  const int n = k.grid.dim();
  double nu = 1.0;
  if (band == EnvelopeBand::high) {
    if (!(k.s1 < 1.0)) throw std::domain_error("check_envelope: high band requires s1 < 1 (nu = 1 - s1 > 0)");
    nu = 1.0 - k.s1;
  }
  const double exponent = (n + alpha) / (2.0 * nu);
  const Field part = kernel_field(band_spectrum(k, bank, band == EnvelopeBand::low ? 0 : 2, alpha == 1));
  const double tf = std::pow(k.t, exponent);
  const double rmax = 0.25 * k.grid.extent();
  EnvelopeReport rep{band, k.t, order, alpha, exponent, 0.0, 0.0};
  for (std::size_t i = 0; i < part.size(); ++i) {
    const auto x = k.grid.position(i);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    if (r2 > rmax * rmax) continue;
    const double base = band == EnvelopeBand::low ? r2 : std::pow(r2, nu);
    const double log_env = -order * std::log1p(base / (1.0 + k.t));
    const double ratio = std::abs(part[i]) * tf * std::exp(-log_env);
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.argmax = std::sqrt(r2);
    }
  }
  return rep;
}

inline EnvelopeReport check_envelope_G1(const GreensKernel& k, const CutoffBank& bank, int order,
                                        int alpha = 0) {
  return check_envelope(k, bank, EnvelopeBand::low, order, alpha);
}

inline EnvelopeReport check_envelope_G3(const GreensKernel& k, const CutoffBank& bank, int order,
                                        int alpha = 0) {
  return check_envelope(k, bank, EnvelopeBand::high, order, alpha);
}

/// Envelope ratios over increasing times and the running empirical
/// constant c(t) = max_{tau <= t} ratio(tau).
struct EnvelopeSweep {
  std::vector<EnvelopeReport> reports;
  std::vector<double> running;

  /// c(t_last) / c(t_first): 1 when the constant found at the first time
  /// keeps bounding every later time.
  double running_growth() const {
    if (running.empty() || running.front() <= 0.0) return std::numeric_limits<double>::infinity();
    return running.back() / running.front();
  }
  /// max / min of the per-time ratios.
  double pointwise_spread() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& r : reports) {
      lo = std::min(lo, r.max_ratio);
      hi = std::max(hi, r.max_ratio);
    }
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  }
};

inline EnvelopeSweep sweep_envelope(const Grid& g, double s1, const CutoffBank& bank,
                                    EnvelopeBand band, int order, int alpha,
                                    const std::vector<double>& times) {
  EnvelopeSweep out;
  double c = 0.0;
  for (double t : times) {
    const auto rep = check_envelope(make_kernel(g, t, s1), bank, band, order, alpha);
    c = std::max(c, rep.max_ratio);
    out.reports.push_back(rep);
    out.running.push_back(c);
  }
  return out;
}

struct GreensNorms {
  double t;
  double L1;
  double gradL1;
  double L2;
};

inline GreensNorms greens_norms(const GreensKernel& k) {
  const Grid& g = k.grid;
  SpectralField src = point_source(g);
  for (std::size_t i = 0; i < src.size(); ++i) src[i] *= k.spectral[i];
  const Field G = inverse(src);
  Field grad_mag(g);
  auto gm = grad_mag.values();
  for (int d = 0; d < g.dim(); ++d) {
    const Field dG = inverse(partial_derivative(src, d));
    for (std::size_t i = 0; i < gm.size(); ++i) gm[i] += dG[i] * dG[i];
  }
  for (auto& v : gm) v = std::sqrt(v);
  return {k.t, lp_norm(G, 1.0).value, lp_norm(grad_mag, 1.0).value, lp_norm(G, 2.0).value};
}

/// One CSV row of a Green's-function sweep. `ratio` is the value with its
/// predicted time law divided out (t^{1/2} for gradL1, t^{n/4} for L2).
struct SweepRow {
  double t;
  std::string quantity;
  double value;
  double ratio;
};

inline std::vector<SweepRow> greens_norm_rows(const GreensNorms& gn, int dim) {
  return {{gn.t, "L1", gn.L1, gn.L1},
          {gn.t, "gradL1", gn.gradL1, gn.gradL1 * std::sqrt(gn.t)},
          {gn.t, "L2", gn.L2, gn.L2 * std::pow(gn.t, dim / 4.0)}};
}

/// sup_{|x| <= L/4} |G - H| / sup |H| against the heat kernel
/// H = (4 pi t)^{-n/2} exp(-|x|^2 / (4 t)); meaningful for s1 = 0.
inline double heat_kernel_error(const GreensKernel& k) {
  if (!(k.t > 0.0)) throw std::domain_error("heat_kernel_error: t must be positive");
  const Field G = kernel_field(k);
  const int n = k.grid.dim();
  const double rmax = 0.25 * k.grid.extent();
  const double norm = std::pow(4.0 * std::numbers::pi * k.t, -0.5 * n);
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const auto x = k.grid.position(i);
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    if (r2 > rmax * rmax) continue;
    const double h = norm * std::exp(-r2 / (4.0 * k.t));
    err = std::max(err, std::abs(G[i] - h));
    peak = std::max(peak, h);
  }
  return err / peak;
}

/// max / min of a positive series.
inline double spread(const std::vector<double>& v) {
  if (v.empty()) return 1.0;
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
}

}  // namespace nlcl
