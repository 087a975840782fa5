#pragma once

// Uniform periodic grids on [-L, L)^N, sampled real fields, their discrete
// Fourier duals, norms and file containers.

#include <complex>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fraclap {

/// Periodic box [-L, L)^dim sampled at n points per axis.
/// Points: x_j = -L + j * spacing. Wavenumbers (FFT order): pi * k / L with
/// k = 0, 1, ..., n/2 - 1, -n/2, ..., -1.
class GridSpec {
 public:
  GridSpec(int dim, std::size_t n, double half_width);

  int dim() const noexcept { return dim_; }
  std::size_t points_per_dim() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return 2.0 * half_width_ / static_cast<double>(n_); }
  std::size_t size() const noexcept { return dim_ == 1 ? n_ : n_ * n_; }
  double cell_volume() const noexcept;

  double coordinate(std::size_t j) const noexcept {
    return -half_width_ + static_cast<double>(j) * spacing();
  }
  /// Signed integer mode index of FFT slot j.
  std::int64_t mode_index(std::size_t j) const noexcept {
    const auto jj = static_cast<std::int64_t>(j);
    const auto nn = static_cast<std::int64_t>(n_);
    return jj < nn / 2 ? jj : jj - nn;
  }
  const std::vector<double>& wavenumbers() const noexcept { return wavenumbers_; }
  /// Largest wavenumber magnitude on one axis, pi * (n/2) / L.
  double k_max() const noexcept;
  /// Euclidean wavenumber magnitude of flat spectral slot `index`.
  double wavenumber_norm(std::size_t index) const noexcept;
  /// Squared distance from the origin of flat grid point `index`.
  double radius_squared(std::size_t index) const noexcept;

  friend bool operator==(const GridSpec& a, const GridSpec& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.half_width_ == b.half_width_;
  }

 private:
  int dim_;
  std::size_t n_;
  double half_width_;
  std::vector<double> wavenumbers_;
};

/// Validating factory: dim in {1,2}, n a power of two >= 16, L > 0.
GridSpec make_grid(int dim, std::size_t n, double half_width);

/// Real samples on a grid, row-major (index = i0 * n + i1 in 2D).
class Field {
 public:
  Field(GridSpec grid, std::vector<double> values);
  explicit Field(GridSpec grid);  // zeros

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::vector<double>& mutable_values() noexcept { return values_; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  bool is_finite() const noexcept;
  /// Non-empty when the sampled family is not negligible at the box boundary.
  const std::string& warning() const noexcept { return warning_; }
  void set_warning(std::string w) { warning_ = std::move(w); }
  /// Largest |value| on the boundary faces x_axis = -L.
  double boundary_max() const noexcept;

 private:
  GridSpec grid_;
  std::vector<double> values_;
  std::string warning_;
};

/// Discrete Fourier coefficients c_k = n^{-N} sum_j f_j exp(-2 pi i j.k / n),
/// stored in FFT order. A constant field c has c_0 = c.
class Spectrum {
 public:
  Spectrum(GridSpec grid, std::vector<std::complex<double>> coefficients);

  const GridSpec& grid() const noexcept { return grid_; }
  std::span<const std::complex<double>> coefficients() const noexcept { return coefficients_; }
  std::vector<std::complex<double>>& mutable_coefficients() noexcept { return coefficients_; }

 private:
  GridSpec grid_;
  std::vector<std::complex<double>> coefficients_;
};

Spectrum to_spectrum(const Field& field);
Field from_spectrum(const Spectrum& spectrum);

/// Applies a real radial Fourier multiplier m(|k|) (one forward and one inverse
/// transform). The result is the real part of the inverse transform.
Field apply_radial_multiplier(const Field& field, const std::function<double(double)>& multiplier);

// Built-in function families for sample().
struct Gaussian {
  double amplitude = 1.0;
  double width = 1.0;  // a * exp(-|x|^2 / (2 w^2))
};
struct AlgebraicDecay {
  double epsilon = 1.0;
  double gamma = 1.0;  // eps * (1 + |x|^2)^(-gamma/2)
};
struct PlaneWave {
  int mode = 1;  // cos(pi * mode * x_axis / L)
  int axis = 0;
};
struct Bump {
  double radius = 1.0;  // Phi(|x| / radius)
};
struct Constant {
  double value = 0.0;
};

using Descriptor = std::variant<Gaussian, AlgebraicDecay, PlaneWave, Bump, Constant>;

/// Parses "gaussian:a,w", "algdecay:eps,gamma", "plane:k[,axis]", "bump:R", "const:c".
Descriptor parse_descriptor(std::string_view text);
std::string describe(const Descriptor& descriptor);

double evaluate(const Descriptor& descriptor, const GridSpec& grid, std::span<const double> x);
Field sample(const Descriptor& descriptor, const GridSpec& grid);

struct Norms {
  double sup = 0.0;
  double l1 = 0.0;
  double l2 = 0.0;
  double lq = 0.0;
  double q = 2.0;
};

/// Rectangle-rule norms with weight spacing^N.
Norms norms(const Field& field, double q = 2.0);
double lq_norm(const Field& field, double q);
/// Rectangle-rule integral of the samples.
double integrate(const Field& field);
/// Rectangle-rule inner product.
double inner_product(const Field& a, const Field& b);

// File containers.
void write_csv(const Field& field, std::ostream& out);
void write_csv(const Field& field, const std::filesystem::path& path);
Field read_csv(std::istream& in);
Field read_csv(const std::filesystem::path& path);

/// Binary container: int64 dim, int64 n, float64 L (little endian), then
/// n^dim float64 samples in row-major order.
void write_binary(const Field& field, std::ostream& out);
void write_binary(const Field& field, const std::filesystem::path& path);
Field read_binary(std::istream& in);
Field read_binary(const std::filesystem::path& path);

/// Dispatches on extension: ".csv" text, anything else binary.
Field load_field(const std::filesystem::path& path);
void save_field(const Field& field, const std::filesystem::path& path);

}  // namespace fraclap
