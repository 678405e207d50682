#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <thread>
#include <vector>

#include "nlcl/random_field.hpp"
#include "nlcl/spectral.hpp"
#include "nlcl/symbols.hpp"

using namespace nlcl;
using Catch::Approx;
using std::numbers::pi;

namespace {

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double coeff_max(const SpectralField& F) {
  double m = 0.0;
  for (const auto& c : F.coeffs()) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace

TEST_CASE("grid lattice on the unit box") {
  const Grid g = make_grid(1, 8, 2.0 * pi);
  const std::vector<long> expected{0, 1, 2, 3, -4, -3, -2, -1};
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(g.wavenumber(i) == expected[i]);
    CHECK(g.frequency(i) == Approx(static_cast<double>(expected[i])));
  }
  CHECK(g.coordinate(0) == Approx(-pi));
  CHECK(g.coordinate(4) == Approx(0.0).margin(1e-15));
}

TEST_CASE("grid size and spacing") {
  const Grid g = make_grid(2, 16, 100.0);
  CHECK(g.size() == 256);
  CHECK(g.spacing() == 6.25);
  CHECK(g.spacing() * static_cast<double>(g.points_per_dim()) == g.extent());
}

TEST_CASE("grid rejects invalid parameters") {
  CHECK_THROWS_AS(make_grid(1, 7, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 6, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(0, 8, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(4, 8, 10.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_grid(1, 8, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Field(make_grid(1, 8, 1.0), std::vector<double>(7)), std::invalid_argument);
}

TEST_CASE("lattice is symmetric under negation except the Nyquist row") {
  const Grid g = make_grid(2, 8, 3.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto w = g.wavevector(i);
    const auto m = g.wavevector(negated_index(g, i));
    for (int d = 0; d < 2; ++d) {
      if (w.nyquist_axis(d, 8)) CHECK(m.k[d] == w.k[d]);
      else CHECK(m.k[d] == -w.k[d]);
    }
  }
}

TEST_CASE("constant field transforms to the DC mode only") {
  const Grid g = make_grid(2, 16, 5.0);
  const Field f = Field::sample(g, [](auto) { return 3.0; });
  const SpectralField F = forward(f);
  CHECK(F[0].real() == Approx(3.0 * 256));
  for (std::size_t i = 1; i < F.size(); ++i) CHECK(std::abs(F[i]) < 1e-12);
}

TEST_CASE("single cosine mode has two conjugate coefficients") {
  const double L = 10.0;
  const Grid g = make_grid(1, 32, L);
  const Field f = Field::sample(g, [&](auto x) { return std::cos(2.0 * pi * x[0] / L); });
  const SpectralField F = forward(f);
  for (std::size_t i = 0; i < F.size(); ++i) {
    const long k = g.wavenumber(i);
    if (std::labs(k) == 1) {
      // x_0 = -L/2 shifts the phase by pi.
      CHECK(std::abs(F[i]) == Approx(16.0));
      CHECK(std::abs(F[i] - std::conj(F[negated_index(g, i)])) < 1e-12);
    } else {
      CHECK(std::abs(F[i]) < 1e-12);
    }
  }
}

TEST_CASE("round trip and Parseval on random fields") {
  for (int dim : {1, 2, 3}) {
    const Grid g = make_grid(dim, dim == 3 ? 16 : 64, 7.0);
    const Field f = random_field(g, 42u + dim, {5, 1.0});
    const Field back = inverse(forward(f));
    double err = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
    CHECK(err < 1e-12 * max_abs(f.values()));
    const double l2 = lp_norm(f, 2.0).value;
    CHECK(std::abs(l2 - sobolev_norm(forward(f), 0.0).value) <= 1e-12 * l2);
  }
}

TEST_CASE("sigma: values, small and large frequency asymptotics") {
  CHECK(sigma(0.0, 0.3) == 0.0);
  CHECK_THROWS_AS(sigma(-1.0, 0.3), std::domain_error);
  for (double s1 : {0.0, 0.25, 0.5, 0.75}) {
    // sigma = xi^2 (1 + xi^2)^{-s1} and 1 - s1 x <= (1 + x)^{-s1} <= 1, so
    // |sigma - xi^2| <= s1 xi^4.
    for (double xi = 1e-3; xi <= 0.1; xi += 1e-3) {
      const double x2 = xi * xi;
      CHECK(std::abs(sigma(x2, s1) - x2) <= s1 * x2 * x2 * (1.0 + 1e-9) + 1e-18);
    }
    // sigma / |xi|^{2-2 s1} = (xi^2 / (1 + xi^2))^{s1} -> 1.
    double prev_gap = 1.0;
    for (double x2 : {1e2, 1e4, 1e6, 1e8}) {
      const double gap = std::abs(sigma(x2, s1) / std::pow(x2, 1.0 - s1) - 1.0);
      CHECK(gap <= prev_gap);
      CHECK(gap <= s1 / x2 * (1.0 + 1e-6));
      prev_gap = gap;
    }
  }
}

TEST_CASE("sigma is strictly increasing for 0 <= s1 < 1") {
  for (double s1 : {0.0, 0.3, 0.6, 0.99}) {
    double prev = 0.0;
    for (double x2 = 1e-6; x2 < 1e6; x2 *= 1.1) {
      const double v = sigma(x2, s1);
      CHECK(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("bessel potential symbol") {
  CHECK(bessel(0.0, 0.7) == 1.0);
  CHECK(bessel(1.0, 1.0) == Approx(0.5).epsilon(1e-15));
  CHECK(bessel(3.0, 0.5) == Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(bessel(-0.1, 1.0), std::domain_error);
  for (double x2 : {0.1, 1.0, 10.0, 1e6}) {
    const double b = bessel(x2, 0.8);
    CHECK(b > 0.0);
    CHECK(b <= 1.0);
  }
}

TEST_CASE("phi functions") {
  for (double z : {-1e-6, -1e-3, -0.5, -0.99, -1.5, -10.0, -700.0}) {
    const double p1 = std::abs(z) > 1e-5 ? std::expm1(z) / z : 1.0 + z / 2.0 + z * z / 6.0;
    CHECK(phi1(z) == Approx(p1).epsilon(1e-12));
    if (std::abs(z) > 0.1) CHECK(phi2(z) == Approx((std::expm1(z) - z) / (z * z)).epsilon(1e-10));
  }
  CHECK(phi1(0.0) == 1.0);
  CHECK(phi2(0.0) == 0.5);
  // continuity across the series switch
  CHECK(phi2(-0.999999) == Approx(phi2(-1.000001)).epsilon(1e-6));
}

TEST_CASE("apply_multiplier: identity, eigenvalue, NaN rejection") {
  const double L = 9.0;
  const Grid g = make_grid(1, 32, L);
  const Field f = Field::sample(g, [&](auto x) { return std::cos(2.0 * pi * 3.0 * x[0] / L); });
  const SpectralField F = forward(f);
  const SpectralField id = apply_multiplier(F, [](const Wavevector&) { return 1.0; });
  for (std::size_t i = 0; i < F.size(); ++i) CHECK(id[i] == F[i]);

  const Field lap = inverse(apply_multiplier(F, [](const Wavevector& w) { return w.xi_sq; }));
  const double lambda = std::pow(2.0 * pi * 3.0 / L, 2);
  for (std::size_t i = 0; i < f.size(); ++i) CHECK(lap[i] == Approx(lambda * f[i]).margin(1e-12));

  CHECK_THROWS_AS(apply_multiplier(F, [](const Wavevector& w) { return w.k[0] == 2 ? std::nan("") : 1.0; }),
                  std::domain_error);
}

TEST_CASE("multiplier composition equals the pointwise product") {
  const Grid g = make_grid(2, 32, 6.0);
  const SpectralField F = forward(random_field(g, 7u, {8, 1.0}));
  auto m1 = [](const Wavevector& w) { return bessel(w.xi_sq, 0.6); };
  auto m2 = [](const Wavevector& w) { return complex(std::cos(w.xi[0]), 0.0) * sigma(w.xi_sq, 0.3); };
  const SpectralField a = apply_multiplier(apply_multiplier(F, m2), m1);
  const SpectralField b = apply_multiplier(F, [&](const Wavevector& w) { return m1(w) * m2(w); });
  for (std::size_t i = 0; i < F.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 4e-16 * std::abs(b[i]) + 1e-300);
}

TEST_CASE("real symbols keep real fields real") {
  const Grid g = make_grid(2, 32, 6.0);
  const SpectralField F = forward(random_field(g, 9u, {8, 1.0}));
  CHECK(hermitian_defect(F) < 1e-13);
  const SpectralField G = apply_multiplier(F, [](const Wavevector& w) { return std::exp(-0.3 * sigma(w.xi_sq, 0.5)); });
  CHECK(imaginary_residual(G) < 1e-12);
  CHECK(imaginary_residual(partial_derivative(F, 1)) < 1e-12);
}

TEST_CASE("spectral derivative of u^{theta+1} matches centered differences at second order") {
  // u = exp(sin x) on [0, 2 pi); d/dx u^3 = 3 cos x exp(3 sin x). The spectral
  // derivative is exact to rounding; centered differences converge as h^2.
  auto run = [](std::size_t N) {
    const Grid g = make_grid(1, N, 2.0 * pi);
    const double h = g.spacing();
    Field p = Field::sample(g, [](auto x) { return std::exp(3.0 * std::sin(x[0])); });
    const Field d = inverse(apply_multiplier(forward(p), [N](const Wavevector& w) {
      const std::vector<double> b{1.0, 0.0, 0.0};
      return directional_derivative_symbol(w, b, N);
    }));
    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double fd = (p[(i + 1) % N] - p[(i + N - 1) % N]) / (2.0 * h);
      err = std::max(err, std::abs(fd - d[i]));
    }
    return err;
  };
  const double e1 = run(64), e2 = run(128), e3 = run(256);
  CHECK(e1 / e2 == Approx(4.0).epsilon(0.1));
  CHECK(e2 / e3 == Approx(4.0).epsilon(0.05));
}

TEST_CASE("lambda_power") {
  const double L = 8.0;
  const Grid g = make_grid(1, 64, L);
  const SpectralField F = forward(random_field(g, 3u, {12, 1.0}));
  const SpectralField id = lambda_power(F, 0.0);
  for (std::size_t i = 0; i < F.size(); ++i) CHECK(id[i] == F[i]);

  const Field c = Field::sample(g, [&](auto x) { return 2.0 + std::cos(2.0 * pi * 5.0 * x[0] / L); });
  const SpectralField C = forward(c);
  const SpectralField C2 = lambda_power(C, 2.0);
  CHECK(std::abs(C2[0]) == 0.0);
  const double xi5 = 2.0 * pi * 5.0 / L;
  CHECK(std::abs(C2[5]) == Approx(xi5 * xi5 * std::abs(C[5])));

  const SpectralField half2 = lambda_power(lambda_power(F, 0.5), 0.5);
  const SpectralField one = lambda_power(F, 1.0);
  for (std::size_t i = 0; i < F.size(); ++i) CHECK(std::abs(half2[i] - one[i]) <= 1e-12 * coeff_max(one));
  CHECK_THROWS_AS(lambda_power(F, -0.5), std::domain_error);
}

TEST_CASE("dealias: identity, retained mode, truncation") {
  const Grid g = make_grid(1, 48, 4.0);
  const SpectralField F = forward(random_field(g, 5u, {23, 1.0}));
  const SpectralField same = dealias(F, 1.0);
  for (std::size_t i = 0; i < F.size(); ++i) CHECK(same[i] == F[i]);
  const SpectralField cut = dealias(F);
  for (std::size_t i = 0; i < F.size(); ++i) {
    if (std::labs(g.wavenumber(i)) > 16) CHECK(cut[i] == complex(0.0));
    else CHECK(cut[i] == F[i]);
  }
  const Field mode = Field::sample(g, [](auto x) { return std::sin(2.0 * pi * 3.0 * x[0] / 4.0); });
  const SpectralField M = forward(mode);
  const SpectralField Md = dealias(M);
  for (std::size_t i = 0; i < F.size(); ++i)
    if (std::labs(g.wavenumber(i)) <= 16) CHECK(Md[i] == M[i]);
  CHECK(sobolev_norm(Md, 0.0).value == Approx(sobolev_norm(M, 0.0).value).epsilon(1e-14));
  CHECK_THROWS_AS(dealias(F, 0.0), std::domain_error);
  CHECK(strict_dealias_rule(2) == 0.5);
}

TEST_CASE("dealiased square equals the double-resolution square restricted to the band") {
  for (int dim : {1, 2}) {
    const std::size_t N = dim == 1 ? 64 : 32;
    const double L = 5.0;
    const Grid coarse = make_grid(dim, N, L), fine = make_grid(dim, 2 * N, L);
    const long kcut = dealias_cutoff(N, 2.0 / 3.0);
    // Random band-limited u with |k_j| <= kcut, evaluated on both grids.
    std::mt19937_64 rng(11);
    std::normal_distribution<double> nd;
    struct Mode { std::array<long, 3> k; double a, b; };
    std::vector<Mode> modes;
    for (long kx = 0; kx <= kcut; ++kx)
      for (long ky = (dim == 2 ? -kcut : 0); ky <= (dim == 2 ? kcut : 0); ++ky) modes.push_back({{kx, ky, 0}, nd(rng), nd(rng)});
    auto u = [&](const std::array<double, 3>& x) {
      double s = 0.0;
      for (const auto& m : modes) {
        const double ph = 2.0 * pi * (m.k[0] * x[0] + m.k[1] * x[1]) / L;
        s += (m.a * std::cos(ph) + m.b * std::sin(ph)) / (1.0 + m.k[0] * m.k[0] + m.k[1] * m.k[1]);
      }
      return s;
    };
    auto sq = [&](const Grid& g) {
      Field f = Field::sample(g, u);
      for (auto& v : f.values()) v *= v;
      return forward(f);
    };
    const SpectralField c = dealias(sq(coarse));
    const SpectralField f = sq(fine);
    const double scale = std::pow(2.0, dim);  // unnormalized transforms
    double err = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      const auto w = fine.wavevector(i);
      bool inside = true;
      for (int d = 0; d < dim; ++d) inside = inside && std::labs(w.k[d]) <= kcut;
      ref = std::max(ref, std::abs(f[i]));
      if (!inside) continue;
      std::size_t ci = 0;
      for (int d = 0; d < dim; ++d) ci = ci * N + static_cast<std::size_t>((w.k[d] + static_cast<long>(N)) % static_cast<long>(N));
      err = std::max(err, std::abs(f[i] / scale - c[ci]));
    }
    CHECK(err < 1e-10 * ref);
  }
}

TEST_CASE("point source is the unit-mass delta at the origin") {
  const Grid g = make_grid(2, 16, 4.0);
  const Field d = inverse(point_source(g));
  const std::size_t origin = 8 * 16 + 8;
  double mass = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    mass += d[i] * g.cell_volume();
    if (i == origin) CHECK(d[i] == Approx(1.0 / g.cell_volume()));
    else CHECK(std::abs(d[i]) < 1e-12);
  }
  CHECK(mass == Approx(1.0));
}

TEST_CASE("concurrent transforms agree with serial ones") {
  const Grid g = make_grid(2, 64, 3.0);
  std::vector<Field> inputs;
  for (unsigned s = 0; s < 4; ++s) inputs.push_back(random_field(g, 100u + s, {10, 1.0}));
  std::vector<SpectralField> serial, parallel(4, SpectralField(g));
  for (const auto& f : inputs) serial.push_back(forward(f));
  {
    std::vector<std::jthread> pool;
    for (std::size_t k = 0; k < 4; ++k) pool.emplace_back([&, k] { parallel[k] = forward(inputs[k]); });
  }
  for (std::size_t k = 0; k < 4; ++k)
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(serial[k][i] == parallel[k][i]);
}
