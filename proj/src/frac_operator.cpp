#include "fraclap/frac_operator.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <tuple>
#include <vector>

#include "fraclap/error.hpp"
#include "fraclap/parallel.hpp"
#include "fraclap/special.hpp"

namespace fraclap {

std::string_view to_string(Backend backend) {
  return backend == Backend::spectral ? "spectral" : "singular_integral";
}

Backend parse_backend(std::string_view text) {
  if (text == "spectral") return Backend::spectral;
  if (text == "singular_integral" || text == "singular") return Backend::singular_integral;
  fail(ErrorCode::invalid_parameter, "unknown backend '" + std::string(text) + "'");
}

Field spectral_frac_lap(const Field& field, double beta) {
  require(beta >= 0.0 && beta <= 2.0, ErrorCode::invalid_parameter,
          "spectral fractional Laplacian needs beta in [0, 2]");
  require(field.is_finite(), ErrorCode::non_finite, "fractional Laplacian of a non-finite field");
  if (beta == 0.0) return Field(field.grid(), {field.values().begin(), field.values().end()});
  if (beta == 2.0) return apply_radial_multiplier(field, [](double k) { return k * k; });
  if (beta == 1.0) return apply_radial_multiplier(field, [](double k) { return k; });
  return apply_radial_multiplier(field, [beta](double k) { return k == 0.0 ? 0.0 : std::pow(k, beta); });
}

double normalization_constant(int dim, double delta) {
  require(delta > 0.0 && delta < 2.0, ErrorCode::invalid_parameter,
          "normalization constant needs delta in (0, 2)");
  require(dim >= 1, ErrorCode::invalid_dimension, "dimension must be >= 1");
  const double n = static_cast<double>(dim);
  return std::pow(2.0, delta) * std::tgamma(0.5 * (n + delta)) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - 0.5 * delta));
}

double standard_normalization_constant(int dim, double delta) {
  require(delta > 0.0 && delta < 2.0, ErrorCode::invalid_parameter,
          "normalization constant needs delta in (0, 2)");
  const double n = static_cast<double>(dim);
  return std::pow(2.0, delta) * std::tgamma(0.5 * (n + delta)) /
         (std::pow(std::numbers::pi, 0.5 * n) * std::abs(std::tgamma(-0.5 * delta)));
}

SingularIntegralSpec singular_integral_spec(int dim, const OperatorSpec& spec) {
  return {normalization_constant(dim, spec.beta) * spec.calibration_factor, 4};
}

namespace {

// Periodized kernel sum_m |z + m P|^{-s} on one axis; explicit images for
// |m| <= M, the rest by the midpoint-integral tail.
double periodized_kernel_1d(double z, double period, double s) {
  constexpr int images = 64;
  double sum = 0.0;
  for (int m = -images; m <= images; ++m) {
    const double r = std::abs(z + m * period);
    if (r > 0.0) sum += std::pow(r, -s);
  }
  const double a = (images + 0.5) * period;
  sum += (std::pow(a + z, 1.0 - s) + std::pow(a - z, 1.0 - s)) / ((s - 1.0) * period);
  return sum;
}

// int_0^{pi/4} cos(theta)^{s-2} dtheta by composite Simpson.
double octant_integral(double s) {
  constexpr int intervals = 2000;
  const double a = 0.0, b = 0.25 * std::numbers::pi;
  const double h = (b - a) / intervals;
  double sum = 1.0 + std::pow(std::cos(b), s - 2.0);
  for (int i = 1; i < intervals; ++i) sum += (i % 2 ? 4.0 : 2.0) * std::pow(std::cos(a + i * h), s - 2.0);
  return sum * h / 3.0;
}

double periodized_kernel_2d(double z0, double z1, double period, double s, double tail) {
  constexpr int images = 16;
  double sum = 0.0;
  for (int a = -images; a <= images; ++a) {
    const double y0 = z0 + a * period;
    for (int b = -images; b <= images; ++b) {
      const double y1 = z1 + b * period;
      const double r2 = y0 * y0 + y1 * y1;
      if (r2 > 0.0) sum += std::pow(r2, -0.5 * s);
    }
  }
  return sum + tail;
}

// Quadrature weights W_o = h^N K_per(o h) indexed by offset slot (o mod n),
// with W_0 = 0. Cached per (dim, n, L, beta).
using Weights = std::shared_ptr<const std::vector<double>>;

Weights kernel_weights(const GridSpec& grid, double beta) {
  static std::mutex mutex;
  static std::map<std::tuple<int, std::size_t, double, double>, Weights> cache;
  const auto key = std::make_tuple(grid.dim(), grid.points_per_dim(), grid.half_width(), beta);
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }

  const std::size_t n = grid.points_per_dim();
  const double h = grid.spacing();
  const double period = 2.0 * grid.half_width();
  const double s = grid.dim() + beta;
  auto weights = std::make_shared<std::vector<double>>(grid.size(), 0.0);
  auto& w = *weights;

  if (grid.dim() == 1) {
    for (std::size_t j = 1; j <= n / 2; ++j) {
      const double value = h * periodized_kernel_1d(static_cast<double>(j) * h, period, s);
      w[j] = value;
      w[n - j] = value;
    }
  } else {
    constexpr int images = 16;
    const double a = (images + 0.5) * period;
    const double tail = 8.0 * std::pow(a, 2.0 - s) / (s - 2.0) * octant_integral(s) / (period * period);
    const double cell = h * h;
    // The periodized kernel is even in each axis; fill the quarter and mirror.
    parallel_for(0, n / 2 + 1, [&](std::size_t i) {
      for (std::size_t j = 0; j <= n / 2; ++j) {
        if (i == 0 && j == 0) continue;
        const double value =
            cell * periodized_kernel_2d(static_cast<double>(i) * h, static_cast<double>(j) * h, period, s, tail);
        const std::size_t is[2] = {i, (n - i) % n};
        const std::size_t js[2] = {j, (n - j) % n};
        for (std::size_t ii : is)
          for (std::size_t jj : js) w[ii * n + jj] = value;
      }
    });
  }

  Weights result = std::move(weights);
  std::lock_guard lock(mutex);
  return cache.emplace(key, result).first->second;
}

// Fourth-order periodic finite-difference Laplacian.
std::vector<double> laplacian_fd4(const Field& field) {
  const auto& grid = field.grid();
  const std::size_t n = grid.points_per_dim();
  const std::size_t mask = n - 1;
  const double inv = 1.0 / (12.0 * grid.spacing() * grid.spacing());
  const auto v = field.values();
  std::vector<double> out(field.size(), 0.0);
  auto d2 = [&](double m2, double m1, double c, double p1, double p2) {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) * inv;
  };
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i)
      out[i] = d2(v[(i - 2) & mask], v[(i - 1) & mask], v[i], v[(i + 1) & mask], v[(i + 2) & mask]);
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        auto at = [&](std::size_t a, std::size_t b) { return v[(a & mask) * n + (b & mask)]; };
        out[i * n + j] = d2(at(i - 2, j), at(i - 1, j), at(i, j), at(i + 1, j), at(i + 2, j)) +
                         d2(at(i, j - 2), at(i, j - 1), at(i, j), at(i, j + 1), at(i, j + 2));
      }
  }
  return out;
}

struct OffsetSets {
  std::vector<std::pair<std::size_t, std::size_t>> inner;  // (o, -o) slot pairs, |z| < cutoff
  std::vector<std::size_t> tail;                          // remaining nonzero slots
};

// Splits nonzero offsets into symmetrized inner pairs and one-sided tail
// slots. Slot encoding is the flat index of the offset modulo n per axis.
OffsetSets split_offsets(const GridSpec& grid, double cutoff) {
  const std::size_t n = grid.points_per_dim();
  const double h = grid.spacing();
  OffsetSets sets;
  auto signed_of = [&](std::size_t j) { return static_cast<double>(grid.mode_index(j)); };
  auto negate = [&](std::size_t j) { return (n - j) % n; };
  if (grid.dim() == 1) {
    for (std::size_t j = 1; j < n; ++j) {
      const double r = std::abs(signed_of(j)) * h;
      if (r < cutoff) {
        if (grid.mode_index(j) > 0) sets.inner.emplace_back(j, negate(j));
      } else {
        sets.tail.push_back(j);
      }
    }
  } else {
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        if (a == 0 && b == 0) continue;
        const double za = signed_of(a) * h, zb = signed_of(b) * h;
        const double r = std::sqrt(za * za + zb * zb);
        if (r < cutoff) {
          // keep one representative of each +-pair: lexicographically positive
          const auto ia = grid.mode_index(a), ib = grid.mode_index(b);
          if (ia > 0 || (ia == 0 && ib > 0)) sets.inner.emplace_back(a * n + b, negate(a) * n + negate(b));
        } else {
          sets.tail.push_back(a * n + b);
        }
      }
  }
  return sets;
}

}  // namespace

Field singular_frac_lap(const Field& field, const OperatorSpec& spec) {
  const double beta = spec.beta;
  require(beta > 0.0 && beta < 2.0, ErrorCode::invalid_parameter,
          "singular-integral backend needs beta in (0, 2)");
  require(field.is_finite(), ErrorCode::non_finite, "fractional Laplacian of a non-finite field");
  const auto& grid = field.grid();
  const double h = grid.spacing();
  const double cutoff = spec.quadrature.cutoff_radius > 0.0 ? spec.quadrature.cutoff_radius : 4.0 * h;
  require(h <= cutoff, ErrorCode::grid_too_coarse, "grid spacing exceeds the quadrature cutoff radius");

  const int dim = grid.dim();
  const std::size_t n = grid.points_per_dim();
  const std::size_t mask = n - 1;
  const Weights weights = kernel_weights(grid, beta);
  const auto& w = *weights;
  const OffsetSets offsets = split_offsets(grid, cutoff);
  const double constant = singular_integral_spec(dim, spec).constant_cN;

  std::vector<double> correction;
  double correction_scale = 0.0;
  if (spec.quadrature.inner_regularization == InnerRegularization::zeta_corrected) {
    correction = laplacian_fd4(field);
    correction_scale = std::pow(h, 2.0 - beta) * special::lattice_zeta(dim, dim + beta - 2.0) / (2.0 * dim);
  }

  const auto v = field.values();
  std::vector<double> out(field.size());
  // Shifted sample psi(x_i + offset) with periodic wrap.
  auto shifted = [&](std::size_t i, std::size_t slot) -> double {
    if (dim == 1) return v[(i + slot) & mask];
    const std::size_t i0 = i / n, i1 = i % n;
    const std::size_t o0 = slot / n, o1 = slot % n;
    return v[((i0 + o0) & mask) * n + ((i1 + o1) & mask)];
  };

  parallel_for(0, field.size(), [&](std::size_t i) {
    const double center = v[i];
    double sum = 0.0;
    for (const auto& [plus, minus] : offsets.inner)
      sum += w[plus] * (2.0 * center - shifted(i, plus) - shifted(i, minus));
    for (std::size_t slot : offsets.tail) sum += w[slot] * (center - shifted(i, slot));
    if (!correction.empty()) sum += correction_scale * correction[i];
    out[i] = constant * sum;
  });
  return Field(grid, std::move(out));
}

Field singular_frac_lap_dense(const Descriptor& descriptor, const GridSpec& grid,
                              const OperatorSpec& spec, int dense_factor) {
  require(dense_factor >= 1 && std::has_single_bit(static_cast<unsigned>(dense_factor)),
          ErrorCode::invalid_parameter, "dense_factor must be a power of two");
  const GridSpec dense = make_grid(grid.dim(), grid.points_per_dim() * dense_factor, grid.half_width());
  OperatorSpec fine = spec;
  if (fine.quadrature.cutoff_radius == 0.0) fine.quadrature.cutoff_radius = 4.0 * dense.spacing();
  const Field result = singular_frac_lap(sample(descriptor, dense), fine);

  const std::size_t n = grid.points_per_dim();
  const std::size_t nd = dense.points_per_dim();
  const auto f = static_cast<std::size_t>(dense_factor);
  std::vector<double> out(grid.size());
  if (grid.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = result[i * f];
  } else {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) out[i * n + j] = result[(i * f) * nd + j * f];
  }
  return Field(grid, std::move(out));
}

double calibrate_constant(int dim, double beta, const GridSpec& grid) {
  require(grid.dim() == dim, ErrorCode::grid_mismatch, "calibration grid dimension mismatch");
  require(grid.half_width() >= 8.0 && grid.spacing() <= 0.5, ErrorCode::grid_too_coarse,
          "calibration grid must resolve a unit Gaussian (L >= 8, spacing <= 0.5)");
  const Field reference = sample(Gaussian{1.0, 1.0}, grid);
  OperatorSpec raw;
  raw.beta = beta;
  raw.backend = Backend::singular_integral;
  raw.calibration_factor = 1.0;
  const Field uncalibrated = singular_frac_lap(reference, raw);
  const Field target = spectral_frac_lap(reference, beta);
  const double uu = inner_product(uncalibrated, uncalibrated);
  const double tt = inner_product(target, target);
  require(uu > 1e-24 * std::max(tt, 1.0), ErrorCode::degenerate_fit,
          "calibration reference output is numerically zero");
  return inner_product(target, uncalibrated) / uu;
}

OperatorSpec calibrated(OperatorSpec spec, const GridSpec& grid) {
  if (spec.backend == Backend::singular_integral)
    spec.calibration_factor = calibrate_constant(grid.dim(), spec.beta, grid);
  return spec;
}

Field apply_operator(const Field& field, const OperatorSpec& spec) {
  return spec.backend == Backend::spectral ? spectral_frac_lap(field, spec.beta)
                                           : singular_frac_lap(field, spec);
}

}  // namespace fraclap
