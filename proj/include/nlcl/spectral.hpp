#pragma once

// Transforms and Fourier-multiplier application. See grid.hpp for the
// indexing and normalization conventions.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

#include "nlcl/fft.hpp"
#include "nlcl/grid.hpp"

namespace nlcl {

inline SpectralField forward(const Field& f) {
  const Grid& g = f.grid();
  std::vector<complex> in(g.size());
  const auto v = f.values();
  for (std::size_t i = 0; i < in.size(); ++i) in[i] = complex(v[i], 0.0);
  SpectralField out(g);
  fft::execute(g, fft::Direction::forward, in.data(), out.coeffs().data());
  return out;
}

/// Complex inverse transform including the 1/N^n factor.
inline std::vector<complex> inverse_complex(const SpectralField& F) {
  const Grid& g = F.grid();
  std::vector<complex> out(g.size());
  fft::execute(g, fft::Direction::backward, F.coeffs().data(), out.data());
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out) c *= scale;
  return out;
}

/// Inverse transform keeping the real part.
inline Field inverse(const SpectralField& F) {
  const auto c = inverse_complex(F);
  Field out(F.grid());
  auto v = out.values();
  for (std::size_t i = 0; i < c.size(); ++i) v[i] = c[i].real();
  return out;
}

/// max |Im| / max |Re| of the inverse transform; ~1e-16 for real fields.
inline double imaginary_residual(const SpectralField& F) {
  const auto c = inverse_complex(F);
  double im = 0.0, re = 0.0;
  for (const auto& z : c) {
    im = std::max(im, std::abs(z.imag()));
    re = std::max(re, std::abs(z.real()));
  }
  return re > 0.0 ? im / re : im;
}

/// max over the lattice of |F(k) - conj(F(-k))| relative to max |F|,
/// skipping points whose negation leaves the lattice (Nyquist rows).
inline double hermitian_defect(const SpectralField& F) {
  const Grid& g = F.grid();
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    scale = std::max(scale, std::abs(F[i]));
    const auto w = g.wavevector(i);
    bool nyq = false;
    for (int d = 0; d < g.dim(); ++d) nyq = nyq || w.nyquist_axis(d, g.points_per_dim());
    if (nyq) continue;
    worst = std::max(worst, std::abs(F[i] - std::conj(F[negated_index(g, i)])));
  }
  return scale > 0.0 ? worst / scale : worst;
}

template <class M>
concept Symbol = requires(M m, const Wavevector& w) {
  { m(w) } -> std::convertible_to<complex>;
};

/// Pointwise product of the coefficients with m(xi). Rejects non-finite
/// symbol values.
template <Symbol M>
SpectralField apply_multiplier(const SpectralField& F, M&& m) {
  const Grid& g = F.grid();
  SpectralField out(g);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const complex mv = static_cast<complex>(m(g.wavevector(i)));
    if (!std::isfinite(mv.real()) || !std::isfinite(mv.imag()))
      throw std::domain_error("apply_multiplier: symbol is not finite at lattice point " +
                              std::to_string(i));
    out[i] = F[i] * mv;
  }
  return out;
}

/// Tabulated real symbol over the flat lattice.
template <class M>
std::vector<double> tabulate(const Grid& g, M&& m) {
  std::vector<double> t(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) t[i] = m(g.wavevector(i));
  return t;
}

/// In-place product with a tabulated real symbol.
inline void scale_by(SpectralField& F, std::span<const double> table) {
  if (table.size() != F.size()) throw std::invalid_argument("scale_by: table size mismatch");
  for (std::size_t i = 0; i < F.size(); ++i) F[i] *= table[i];
}

/// |xi|^l. The xi = 0 mode is kept for l = 0 and removed for l > 0.
inline SpectralField lambda_power(const SpectralField& F, double l) {
  if (!(l >= 0.0)) throw std::domain_error("lambda_power: order must be nonnegative");
  if (l == 0.0) return F;
  SpectralField out = F;
  const Grid& g = F.grid();
  for (std::size_t i = 0; i < F.size(); ++i) {
    const double xs = g.xi_sq(i);
    out[i] *= xs == 0.0 ? 0.0 : std::exp(0.5 * l * std::log(xs));
  }
  return out;
}

/// Largest retained |k| per axis for a dealiasing fraction.
inline long dealias_cutoff(std::size_t n, double rule) {
  return static_cast<long>(std::floor(rule * static_cast<double>(n) / 2.0 + 1e-12));
}

/// Zeroes every coefficient with some |k_j| > rule * N / 2.
inline SpectralField dealias(const SpectralField& F, double rule = 2.0 / 3.0) {
  if (!(rule > 0.0 && rule <= 1.0)) throw std::domain_error("dealias: rule must lie in (0, 1]");
  const Grid& g = F.grid();
  const long kmax = dealias_cutoff(g.points_per_dim(), rule);
  SpectralField out = F;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto w = g.wavevector(i);
    for (int d = 0; d < g.dim(); ++d) {
      if (std::labs(w.k[d]) > kmax) {
        out[i] = 0.0;
        break;
      }
    }
  }
  return out;
}

/// Dealiasing mask as a table (1 retained, 0 removed).
inline std::vector<double> dealias_mask(const Grid& g, double rule) {
  if (!(rule > 0.0 && rule <= 1.0)) throw std::domain_error("dealias: rule must lie in (0, 1]");
  const long kmax = dealias_cutoff(g.points_per_dim(), rule);
  return tabulate(g, [&](const Wavevector& w) {
    for (int d = 0; d < w.dim; ++d)
      if (std::labs(w.k[d]) > kmax) return 0.0;
    return 1.0;
  });
}

/// Fraction retaining an alias-free product of theta + 1 factors.
inline double strict_dealias_rule(int theta) { return 2.0 / static_cast<double>(theta + 2); }

/// i xi . b, zero on Nyquist rows of axes with b_j != 0.
inline complex directional_derivative_symbol(const Wavevector& w, std::span<const double> b,
                                             std::size_t n) {
  double s = 0.0;
  for (int d = 0; d < w.dim; ++d) {
    if (b[d] == 0.0) continue;
    if (w.nyquist_axis(d, n)) return 0.0;
    s += w.xi[d] * b[d];
  }
  return complex(0.0, s);
}

/// Partial derivative along one axis by spectral differentiation.
inline SpectralField partial_derivative(const SpectralField& F, int axis) {
  const Grid& g = F.grid();
  if (axis < 0 || axis >= g.dim()) throw std::invalid_argument("partial_derivative: bad axis");
  std::vector<double> b(3, 0.0);
  b[axis] = 1.0;
  const std::size_t n = g.points_per_dim();
  return apply_multiplier(F, [&](const Wavevector& w) { return directional_derivative_symbol(w, b, n); });
}

/// Spectrum of the unit-mass discrete delta at the origin x = 0.
inline SpectralField point_source(const Grid& g) {
  SpectralField out(g);
  const double amp = 1.0 / g.cell_volume();
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto w = g.wavevector(i);
    long ksum = 0;
    for (int d = 0; d < g.dim(); ++d) ksum += w.k[d];
    out[i] = (ksum % 2 == 0) ? amp : -amp;
  }
  return out;
}

}  // namespace nlcl
