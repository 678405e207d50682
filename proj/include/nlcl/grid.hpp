#pragma once

// Periodic-box discretization of R^n and the field types living on it.
//
// Conventions (fixed for the whole library):
//   * The box is [-L/2, L/2)^n sampled at x_j = -L/2 + j h, h = L/N.
//   * Samples are stored row-major: flat = (i0 * N + i1) * N + i2, axis 0
//     slowest. Axis 0 is the x1 direction.
//   * Spectral coefficients use the same flat layout in FFT order. Lattice
//     index i maps to the integer wavenumber k = i for i < N/2 and k = i - N
//     otherwise, so k ranges over {-N/2, ..., N/2 - 1}. The angular
//     frequency is xi = 2 pi k / L.
//   * forward is the unnormalized DFT F_k = sum_j f_j exp(-2 pi i j.k / N);
//     inverse carries the 1/N^n factor.
//   * k = -N/2 is the Nyquist row. It has no partner under negation, so odd
//     symbols (derivatives) are evaluated as zero there.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <memory>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlcl {

using complex = std::complex<double>;

/// One lattice point of the frequency grid.
struct Wavevector {
  std::array<double, 3> xi{};     // angular frequency per axis, zero past dim
  std::array<long, 3> k{};        // integer wavenumber per axis
  double xi_sq = 0.0;             // |xi|^2
  int dim = 1;
  bool nyquist_axis(int axis, std::size_t n) const {
    return k[axis] == -static_cast<long>(n / 2);
  }
};

namespace detail {

struct Lattice {
  int dim;
  std::size_t n;
  double extent;
  std::vector<double> axis_xi;    // xi for lattice index i, length n
  std::vector<long> axis_k;       // k for lattice index i
  std::vector<double> xi_sq;      // |xi|^2 per flat index
};

inline std::shared_ptr<const Lattice> build_lattice(int dim, std::size_t n, double extent) {
  auto lat = std::make_shared<Lattice>();
  lat->dim = dim;
  lat->n = n;
  lat->extent = extent;
  lat->axis_xi.resize(n);
  lat->axis_k.resize(n);
  const double dk = 2.0 * std::numbers::pi / extent;
  for (std::size_t i = 0; i < n; ++i) {
    const long k = i < n / 2 ? static_cast<long>(i) : static_cast<long>(i) - static_cast<long>(n);
    lat->axis_k[i] = k;
    lat->axis_xi[i] = dk * static_cast<double>(k);
  }
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= n;
  lat->xi_sq.resize(total);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    double sq = 0.0;
    for (int d = dim - 1; d >= 0; --d) {
      const double xi = lat->axis_xi[rem % n];
      sq += xi * xi;
      rem /= n;
    }
    lat->xi_sq[flat] = sq;
  }
  return lat;
}

}  // namespace detail

/// Immutable periodic grid. Copies share the cached frequency lattice.
class Grid {
 public:
  Grid(int dim, std::size_t points_per_dim, double extent) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("Grid: dim must be 1, 2 or 3");
    if (points_per_dim < 8) throw std::invalid_argument("Grid: N must be at least 8");
    if (points_per_dim % 2 != 0) throw std::invalid_argument("Grid: N must be even");
    if (!(extent > 0.0) || !std::isfinite(extent))
      throw std::invalid_argument("Grid: extent L must be positive and finite");
    lattice_ = detail::build_lattice(dim, points_per_dim, extent);
  }

  int dim() const { return lattice_->dim; }
  std::size_t points_per_dim() const { return lattice_->n; }
  double extent() const { return lattice_->extent; }
  double spacing() const { return lattice_->extent / static_cast<double>(lattice_->n); }
  std::size_t size() const { return lattice_->xi_sq.size(); }
  double cell_volume() const { return std::pow(spacing(), dim()); }
  double box_volume() const { return std::pow(extent(), dim()); }

  /// Weight turning sum |F_k|^2 into the physical L^2 norm squared.
  double spectral_weight() const { return cell_volume() / static_cast<double>(size()); }

  long wavenumber(std::size_t axis_index) const { return lattice_->axis_k[axis_index]; }
  double frequency(std::size_t axis_index) const { return lattice_->axis_xi[axis_index]; }
  double coordinate(std::size_t axis_index) const {
    return -0.5 * extent() + static_cast<double>(axis_index) * spacing();
  }
  double xi_sq(std::size_t flat) const { return lattice_->xi_sq[flat]; }
  std::span<const double> xi_sq() const { return lattice_->xi_sq; }

  std::array<std::size_t, 3> unravel(std::size_t flat) const {
    std::array<std::size_t, 3> idx{};
    const std::size_t n = points_per_dim();
    for (int d = dim() - 1; d >= 0; --d) {
      idx[d] = flat % n;
      flat /= n;
    }
    return idx;
  }

  std::array<double, 3> position(std::size_t flat) const {
    const auto idx = unravel(flat);
    std::array<double, 3> x{};
    for (int d = 0; d < dim(); ++d) x[d] = coordinate(idx[d]);
    return x;
  }

  Wavevector wavevector(std::size_t flat) const {
    const auto idx = unravel(flat);
    Wavevector w;
    w.dim = dim();
    for (int d = 0; d < dim(); ++d) {
      w.k[d] = lattice_->axis_k[idx[d]];
      w.xi[d] = lattice_->axis_xi[idx[d]];
    }
    w.xi_sq = lattice_->xi_sq[flat];
    return w;
  }

  bool operator==(const Grid& other) const {
    return dim() == other.dim() && points_per_dim() == other.points_per_dim() &&
           extent() == other.extent();
  }

  std::string describe() const {
    return "dim=" + std::to_string(dim()) + " N=" + std::to_string(points_per_dim()) +
           " L=" + std::to_string(extent());
  }

 private:
  std::shared_ptr<const detail::Lattice> lattice_;
};

inline Grid make_grid(int dim, std::size_t points_per_dim, double extent) {
  return Grid(dim, points_per_dim, extent);
}

inline void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grids differ");
}

/// Real samples on a grid.
class Field {
 public:
  explicit Field(Grid grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}
  Field(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size())
      throw std::invalid_argument("Field: sample count does not match grid");
  }

  /// Samples f(x) at every grid point; f takes std::array<double,3>.
  template <class F>
  static Field sample(const Grid& grid, F&& f) {
    Field out(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.position(i));
    return out;
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  Field& operator+=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Field& operator-=(const Field& o) {
    require_same_grid(grid_, o.grid_, "Field::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Field& operator*=(double a) {
    for (auto& v : values_) v *= a;
    return *this;
  }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  bool all_finite() const {
    for (double v : values_)
      if (!std::isfinite(v)) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<double> values_;
};

/// Complex Fourier coefficients on the frequency lattice (FFT order).
class SpectralField {
 public:
  explicit SpectralField(Grid grid) : grid_(std::move(grid)), coeffs_(grid_.size()) {}
  SpectralField(Grid grid, std::vector<complex> coeffs)
      : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
    if (coeffs_.size() != grid_.size())
      throw std::invalid_argument("SpectralField: coefficient count does not match grid");
  }

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return coeffs_.size(); }
  std::span<complex> coeffs() { return coeffs_; }
  std::span<const complex> coeffs() const { return coeffs_; }
  complex& operator[](std::size_t i) { return coeffs_[i]; }
  const complex& operator[](std::size_t i) const { return coeffs_[i]; }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField::operator+=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_grid(grid_, o.grid_, "SpectralField::operator-=");
    for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  SpectralField& operator*=(complex a) {
    for (auto& c : coeffs_) c *= a;
    return *this;
  }
  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }

  bool all_finite() const {
    for (const auto& c : coeffs_)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
    return true;
  }

 private:
  Grid grid_;
  std::vector<complex> coeffs_;
};

/// Flat index of the lattice point -k for the point at `flat`.
inline std::size_t negated_index(const Grid& grid, std::size_t flat) {
  const std::size_t n = grid.points_per_dim();
  const auto idx = grid.unravel(flat);
  std::size_t out = 0;
  for (int d = 0; d < grid.dim(); ++d) out = out * n + (n - idx[d]) % n;
  return out;
}

}  // namespace nlcl
