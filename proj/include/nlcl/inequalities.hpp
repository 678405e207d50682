#pragma once

// Numerical probes of the functional inequalities used by the analysis:
// Hölder interpolation in frequency, Gagliardo-Nirenberg, fractional
// product (Kato-Ponce type) and power estimates, and the equivalence of
// the H^s norm with L^2 + homogeneous H^s. Each probe returns both sides so
// callers can record empirical constants.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "nlcl/grid.hpp"
#include "nlcl/norms.hpp"
#include "nlcl/spectral.hpp"

namespace nlcl {

struct RatioReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;  // lhs / rhs, 0 when both vanish
};

inline RatioReport make_ratio(double lhs, double rhs) {
  RatioReport r{lhs, rhs, 0.0};
  if (rhs > 0.0) r.ratio = lhs / rhs;
  else if (lhs > 0.0) r.ratio = std::numeric_limits<double>::infinity();
  return r;
}

/// Running min / max of ratios over a family of test fields.
struct FamilyStats {
  std::size_t count = 0;
  std::size_t violations = 0;
  double min_ratio = std::numeric_limits<double>::infinity();
  double max_ratio = 0.0;

  void add(double ratio, bool violated = false) {
    ++count;
    if (violated) ++violations;
    min_ratio = std::min(min_ratio, ratio);
    max_ratio = std::max(max_ratio, ratio);
  }
  double spread() const { return min_ratio > 0.0 ? max_ratio / min_ratio : std::numeric_limits<double>::infinity(); }
};

using FrequencyRegion = std::function<bool(const Wavevector&)>;

inline bool whole_lattice(const Wavevector&) { return true; }

/// lhs = int_D |xi|^{2 r1} |F|^2, rhs = (int_D |xi|^{2 r2} |F|^2)^a (int_D |F|^2)^{1-a},
/// a = r1 / r2. Hölder gives lhs <= rhs.
inline RatioReport check_interpolation(const SpectralField& F, double r1, double r2,
                                       const FrequencyRegion& region = whole_lattice) {
  if (!(r1 > 0.0)) throw std::domain_error("check_interpolation: r1 must be positive");
  if (!(r2 >= r1)) throw std::domain_error("check_interpolation: r2 must be >= r1");
  const Grid& g = F.grid();
  const double a = r1 / r2;
  double i1 = 0.0, i2 = 0.0, i0 = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i) {
    const auto w = g.wavevector(i);
    if (!region(w)) continue;
    const double m = std::norm(F[i]);
    i0 += m;
    if (w.xi_sq == 0.0) continue;
    const double lx = std::log(w.xi_sq);
    i1 += std::exp(r1 * lx) * m;
    i2 += std::exp(r2 * lx) * m;
  }
  const double wgt = g.spectral_weight();
  i0 *= wgt;
  i1 *= wgt;
  i2 *= wgt;
  const double rhs = (i2 > 0.0 ? std::pow(i2, a) : 0.0) * (i0 > 0.0 ? std::pow(i0, 1.0 - a) : 0.0);
  return make_ratio(i1, a == 1.0 ? i2 : rhs);
}

inline bool interpolation_violated(const RatioReport& r) { return r.lhs > r.rhs * (1.0 + 1e-12); }

struct NormEquivalenceReport {
  double s;
  double hs_sq;      // |u|_{H^s}^2
  double split_sq;   // |u|_{L^2}^2 + |u|_{dot H^s}^2
  double c0, c1;     // sharp constants min/max(1, 2^{s-1})
  bool holds;
};

/// c0 (|u|_2^2 + |u|_{dot H^s}^2) <= |u|_{H^s}^2 <= c1 (...) with the sharp
/// constants of (1+x)^s against 1+x^s.
inline NormEquivalenceReport check_norm_equivalence(const SpectralField& F, double s) {
  if (!(s >= 0.0)) throw std::domain_error("check_norm_equivalence: s must be nonnegative");
  const double hs = sobolev_norm(F, s).value;
  const double l2 = sobolev_norm(F, 0.0).value;
  const double hd = hom_sobolev_norm(F, s).value;
  NormEquivalenceReport r{s, hs * hs, l2 * l2 + hd * hd, 0.0, 0.0, false};
  const double k = std::pow(2.0, s - 1.0);
  r.c0 = std::min(1.0, k);
  r.c1 = std::max(1.0, k);
  const double slack = 1e-12 * r.split_sq;
  r.holds = r.c0 * r.split_sq <= r.hs_sq + slack && r.hs_sq <= r.c1 * r.split_sq + slack;
  return r;
}

/// Pointwise magnitude of the j-th derivative tensor,
/// sqrt(sum over ordered j-tuples of axes of (d^j u)^2). j = 0 gives |u|.
inline Field derivative_magnitude(const Field& u, int j) {
  if (j < 0) throw std::invalid_argument("derivative_magnitude: order must be nonnegative");
  const Grid& g = u.grid();
  Field out(g);
  auto ov = out.values();
  if (j == 0) {
    for (std::size_t i = 0; i < u.size(); ++i) ov[i] = std::abs(u[i]);
    return out;
  }
  const SpectralField U = forward(u);
  const int n = g.dim();
  int tuples = 1;
  for (int k = 0; k < j; ++k) tuples *= n;
  for (int code = 0; code < tuples; ++code) {
    SpectralField D = U;
    int c = code;
    for (int k = 0; k < j; ++k) {
      D = partial_derivative(D, c % n);
      c /= n;
    }
    const Field d = inverse(D);
    for (std::size_t i = 0; i < u.size(); ++i) ov[i] += d[i] * d[i];
  }
  for (auto& v : ov) v = std::sqrt(v);
  return out;
}

struct GagliardoNirenberg {
  int j = 0;
  int m = 1;
  double p = 2.0, q = 2.0, r = 2.0;
  double a = 0.0;

  /// Throws when the tuple violates the admissibility conditions.
  void validate(int dim) const {
    if (j < 0 || m < j) throw std::invalid_argument("gagliardo_nirenberg: need 0 <= j <= m");
    for (double e : {p, q, r})
      if (!(e >= 1.0)) throw std::invalid_argument("gagliardo_nirenberg: exponents must be >= 1");
    if (a > 1.0 || (m > 0 && a < static_cast<double>(j) / m) || a < 0.0)
      throw std::invalid_argument("gagliardo_nirenberg: need j/m <= a <= 1");
    const double n = dim;
    auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
    const double balance = j / n + a * (inv(r) - m / n) + (1.0 - a) * inv(q);
    if (std::abs(inv(p) - balance) > 1e-12)
      throw std::invalid_argument("gagliardo_nirenberg: exponents violate the dimensional balance 1/p = j/n + a(1/r - m/n) + (1-a)/q");
    const double gap = m - j - n * inv(r);
    if (a == 1.0 && gap >= 0.0 && std::abs(gap - std::round(gap)) < 1e-12)
      throw std::invalid_argument("gagliardo_nirenberg: a = 1 excluded when m - j - n/r is a nonnegative integer");
  }
};

/// |D^j u|_p / (|D^m u|_r^a |u|_q^{1-a}).
inline RatioReport check_gagliardo_nirenberg(const Field& u, const GagliardoNirenberg& gn) {
  gn.validate(u.grid().dim());
  const double lhs = lp_norm(derivative_magnitude(u, gn.j), gn.p).value;
  const double dm = gn.a > 0.0 ? lp_norm(derivative_magnitude(u, gn.m), gn.r).value : 1.0;
  const double uq = gn.a < 1.0 ? lp_norm(u, gn.q).value : 1.0;
  return make_ratio(lhs, std::pow(dm, gn.a) * std::pow(uq, 1.0 - gn.a));
}

struct ProductExponents {
  double r = 2.0;
  double p1 = infinity, q1 = 2.0;
  double p2 = 2.0, q2 = infinity;

  void validate() const {
    auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
    for (double e : {r, p1, q1, p2, q2})
      if (!(e >= 1.0)) throw std::invalid_argument("product estimate: exponents must be >= 1");
    if (std::abs(inv(r) - inv(p1) - inv(q1)) > 1e-12 || std::abs(inv(r) - inv(p2) - inv(q2)) > 1e-12)
      throw std::invalid_argument("product estimate: need 1/r = 1/p1 + 1/q1 = 1/p2 + 1/q2");
  }
};

inline Field lambda_power(const Field& f, double l) { return inverse(lambda_power(forward(f), l)); }

inline Field pointwise_product(const Field& g, const Field& h) {
  require_same_grid(g.grid(), h.grid(), "pointwise_product");
  Field out(g.grid());
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] * h[i];
  return out;
}

/// |L^l(gh)|_r / (|g|_p1 |L^l h|_q1 + |L^l g|_p2 |h|_q2), L = Lambda.
inline RatioReport check_product_estimate(const Field& g, const Field& h, double l,
                                          const ProductExponents& e = {}) {
  if (!(l > 0.0)) throw std::domain_error("check_product_estimate: l must be positive");
  e.validate();
  const double lhs = lp_norm(lambda_power(pointwise_product(g, h), l), e.r).value;
  const double rhs = lp_norm(g, e.p1).value * lp_norm(lambda_power(h, l), e.q1).value +
                     lp_norm(lambda_power(g, l), e.p2).value * lp_norm(h, e.q2).value;
  return make_ratio(lhs, rhs);
}

/// |L^l u^{theta+1}|_r / (|L^l u|_p sum_{k=1..theta} |u^k|_q |u|_q^{theta-k}),
/// with 1/p + 1/q = 1/r.
inline RatioReport check_power_estimate(const Field& u, int theta, double l, double p, double q) {
  if (theta < 1) throw std::invalid_argument("check_power_estimate: theta must be >= 1");
  if (!(l > 0.0)) throw std::domain_error("check_power_estimate: l must be positive");
  if (!(p >= 1.0 && q >= 1.0)) throw std::invalid_argument("check_power_estimate: p, q must be >= 1");
  auto inv = [](double e) { return std::isinf(e) ? 0.0 : 1.0 / e; };
  const double rinv = inv(p) + inv(q);
  if (rinv > 1.0) throw std::invalid_argument("check_power_estimate: 1/p + 1/q must be <= 1");
  const double r = rinv == 0.0 ? infinity : 1.0 / rinv;

  Field power = u;
  std::vector<double> uk_norms;  // |u^k|_q for k = 1..theta
  uk_norms.push_back(lp_norm(u, q).value);
  for (int k = 2; k <= theta + 1; ++k) {
    power = pointwise_product(power, u);
    if (k <= theta) uk_norms.push_back(lp_norm(power, q).value);
  }
  const double lhs = lp_norm(lambda_power(power, l), r).value;
  double sum = 0.0;
  for (int k = 1; k <= theta; ++k) sum += uk_norms[k - 1] * std::pow(uk_norms[0], theta - k);
  return make_ratio(lhs, lp_norm(lambda_power(u, l), p).value * sum);
}

}  // namespace nlcl
