#pragma once

// Discrete L^p, H^s and homogeneous H^s norms.
//
// Physical norms use the cell volume h^n as quadrature weight. Spectral
// norms use the Parseval-matched weight h^n / N^n, so that
// sobolev_norm(forward(f), 0) == lp_norm(f, 2) up to rounding.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlcl/grid.hpp"
#include "nlcl/spectral.hpp"

namespace nlcl {

enum class NormKind { lp, sobolev, hom_sobolev };

struct NormValue {
  NormKind kind;
  double order;  // p for L^p (infinity allowed), s otherwise
  double value;
  operator double() const { return value; }
};

inline constexpr double infinity = std::numeric_limits<double>::infinity();

inline NormValue lp_norm(std::span<const double> values, double cell_volume, double p) {
  if (!(p >= 1.0)) throw std::domain_error("lp_norm: p must be >= 1");
  double acc = 0.0;
  if (std::isinf(p)) {
    for (double v : values) acc = std::max(acc, std::abs(v));
    return {NormKind::lp, p, acc};
  }
  if (p == 1.0) {
    for (double v : values) acc += std::abs(v);
    return {NormKind::lp, p, acc * cell_volume};
  }
  if (p == 2.0) {
    for (double v : values) acc += v * v;
    return {NormKind::lp, p, std::sqrt(acc * cell_volume)};
  }
  for (double v : values) acc += std::pow(std::abs(v), p);
  return {NormKind::lp, p, std::pow(acc * cell_volume, 1.0 / p)};
}

inline NormValue lp_norm(const Field& f, double p) {
  return lp_norm(f.values(), f.grid().cell_volume(), p);
}

/// sqrt(w sum weight(|xi|^2) |F|^2) for a radial weight.
template <class W>
double spectral_weighted_norm(const SpectralField& F, W&& weight) {
  const Grid& g = F.grid();
  double acc = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) acc += weight(g.xi_sq(i)) * std::norm(F[i]);
  return std::sqrt(acc * g.spectral_weight());
}

inline NormValue sobolev_norm(const SpectralField& F, double s) {
  if (s == 0.0) return {NormKind::sobolev, s, spectral_weighted_norm(F, [](double) { return 1.0; })};
  return {NormKind::sobolev, s,
          spectral_weighted_norm(F, [s](double xs) { return std::exp(s * std::log1p(xs)); })};
}

/// |xi|^{2s} weighted norm; 0^0 is taken as 1.
inline NormValue hom_sobolev_norm(const SpectralField& F, double s) {
  if (!(s >= 0.0)) throw std::domain_error("hom_sobolev_norm: s must be nonnegative");
  if (s == 0.0) return {NormKind::hom_sobolev, s, spectral_weighted_norm(F, [](double) { return 1.0; })};
  return {NormKind::hom_sobolev, s, spectral_weighted_norm(F, [s](double xs) {
            return xs == 0.0 ? 0.0 : std::exp(s * std::log(xs));
          })};
}

inline double mean_value(const Field& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / static_cast<double>(f.size());
}

}  // namespace nlcl
