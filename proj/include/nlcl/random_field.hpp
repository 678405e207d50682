#pragma once

// Seeded band-limited Gaussian random fields.
//
// Coefficients inside the band 0 < max_j |k_j| <= kmax are complex normals
// scaled by |xi|^{-(n+1)/2 - 1}; the spectrum is then made Hermitian, the
// DC and Nyquist modes are zeroed, and the result has zero mean. With
// kmax <= N/4 every pairwise product is resolved without aliasing.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "nlcl/grid.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/spectral.hpp"

namespace nlcl {

struct RandomFieldSpec {
  long kmax = 8;            // band edge in integer wavenumbers
  double amplitude = 1.0;   // target L^2 norm; <= 0 keeps the raw scale
};

inline SpectralField random_spectrum(const Grid& g, std::mt19937_64& rng,
                                     const RandomFieldSpec& spec = {}) {
  if (spec.kmax < 1 || spec.kmax >= static_cast<long>(g.points_per_dim() / 2))
    throw std::invalid_argument("random_spectrum: kmax must lie in [1, N/2)");
  std::normal_distribution<double> normal(0.0, 1.0);
  const double decay = -0.5 * (0.5 * (g.dim() + 1) + 1.0);  // exponent on |xi|^2
  SpectralField raw(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    // Draw unconditionally so the stream does not depend on the band.
    const double re = normal(rng), im = normal(rng);
    const auto w = g.wavevector(i);
    long kinf = 0;
    for (int d = 0; d < g.dim(); ++d) kinf = std::max(kinf, std::labs(w.k[d]));
    if (kinf == 0 || kinf > spec.kmax) continue;
    raw[i] = complex(re, im) * std::exp(decay * std::log(w.xi_sq));
  }
  SpectralField out(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    out[i] = 0.5 * (raw[i] + std::conj(raw[negated_index(g, i)]));
  if (spec.amplitude > 0.0) {
    const double nrm = sobolev_norm(out, 0.0);
    if (nrm > 0.0) out *= spec.amplitude / nrm;
  }
  return out;
}

inline Field random_field(const Grid& g, std::mt19937_64& rng, const RandomFieldSpec& spec = {}) {
  return inverse(random_spectrum(g, rng, spec));
}

inline Field random_field(const Grid& g, std::uint64_t seed, const RandomFieldSpec& spec = {}) {
  std::mt19937_64 rng(seed);
  return random_field(g, rng, spec);
}

}  // namespace nlcl
