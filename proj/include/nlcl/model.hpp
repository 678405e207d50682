#pragma once

// Parameters of u_t - Lap (I - Lap)^{-s1} u = -div (I - Lap)^{-s2} (u^{theta+1} b).

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlcl {

struct ModelParams {
  double s1 = 0.25;
  double s2 = 0.75;
  int theta = 1;
  std::vector<double> flux_dir{1.0, 0.0, 0.0};
  /// Multiplies the flux; 0 gives the linear equation.
  double flux_scale = 1.0;

  /// Hard errors only: theta >= 1, finite exponents, |b| = 1.
  void validate(int dim) const {
    if (theta < 1) throw std::invalid_argument("ModelParams: theta must be a positive integer");
    if (!std::isfinite(s1) || !std::isfinite(s2) || s1 < 0.0)
      throw std::invalid_argument("ModelParams: s1 must be finite and >= 0, s2 finite");
    if (flux_dir.size() < static_cast<std::size_t>(dim))
      throw std::invalid_argument("ModelParams: flux direction has too few components");
    double nrm = 0.0;
    for (int d = 0; d < dim; ++d) nrm += flux_dir[d] * flux_dir[d];
    for (std::size_t d = dim; d < flux_dir.size(); ++d)
      if (flux_dir[d] != 0.0)
        throw std::invalid_argument("ModelParams: flux direction has components beyond dim");
    if (std::abs(std::sqrt(nrm) - 1.0) > 1e-12)
      throw std::invalid_argument("ModelParams: flux direction must be a unit vector");
  }

  /// Flux direction padded to three components.
  std::vector<double> direction3() const {
    std::vector<double> b(3, 0.0);
    for (std::size_t d = 0; d < std::min<std::size_t>(3, flux_dir.size()); ++d) b[d] = flux_dir[d];
    return b;
  }
};

/// Largest admissible theta: infinite when n <= 2 s2, otherwise
/// 2 (1 + 2 (s2 - s1)) / (n - 2 s2).
inline double theta_max(int dim, double s1, double s2) {
  const double n = static_cast<double>(dim);
  if (n <= 2.0 * s2) return std::numeric_limits<double>::infinity();
  return 2.0 * (1.0 + 2.0 * (s2 - s1)) / (n - 2.0 * s2);
}

/// Human-readable list of violated model hypotheses (empty when all hold).
/// `for_decay` adds the regularity-gain requirement 0 <= s1 < 1.
inline std::vector<std::string> hypothesis_violations(const ModelParams& m, int dim,
                                                      bool for_decay) {
  std::vector<std::string> out;
  if (!(m.s2 > m.s1)) {
    std::ostringstream os;
    os << "violates s2>s1 (global existence hypothesis): s1=" << m.s1 << " s2=" << m.s2;
    out.push_back(os.str());
  }
  const double tmax = theta_max(dim, m.s1, m.s2);
  if (static_cast<double>(m.theta) > tmax) {
    std::ostringstream os;
    os << "violates theta<=theta_0 (nonlinearity growth bound): theta=" << m.theta
       << " theta_0=" << tmax;
    out.push_back(os.str());
  }
  if (for_decay && m.s1 >= 1.0) {
    std::ostringstream os;
    os << "violates 0<=s1<1 (regularity-gain hypothesis of the decay rates): s1=" << m.s1;
    out.push_back(os.str());
  }
  return out;
}

}  // namespace nlcl
