#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "doctest.h"
#include "fraclap/error.hpp"
#include "fraclap/frac_operator.hpp"
#include "fraclap/special.hpp"

using namespace fraclap;

namespace {

double rel_linf(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

double rel_l2(const Field& a, const Field& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

Field from_function(const GridSpec& g, auto&& f) {
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = f(g.coordinate(i));
  return Field(g, std::move(v));
}

OperatorSpec singular(double beta, double lambda = 1.0) {
  OperatorSpec s;
  s.beta = beta;
  s.backend = Backend::singular_integral;
  s.calibration_factor = lambda;
  return s;
}

}  // namespace

TEST_CASE("plane waves are eigenfunctions of the spectral multiplier") {
  for (int dim = 1; dim <= 2; ++dim) {
    const GridSpec g = make_grid(dim, dim == 1 ? 128 : 64, 7.5);
    for (double beta : {0.3, 1.0, 1.5, 2.0})
      for (int mode : {1, 4, 13, 31})
        for (int axis = 0; axis < dim; ++axis) {
          const Field w = sample(PlaneWave{mode, axis}, g);
          const double k = std::numbers::pi * mode / g.half_width();
          const Field out = spectral_frac_lap(w, beta);
          double err = 0.0;
          for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(out[i] - std::pow(k, beta) * w[i]));
          CHECK(err <= 1e-12 * std::pow(k, beta));
        }
  }
}

TEST_CASE("plane-wave error on fine grids stays at the rounding floor (k_max/k)^beta eps") {
  // Sample rounding (~eps) is spread over all modes and amplified by k_max^beta.
  const GridSpec g = make_grid(1, 1024, 7.5);
  for (double beta : {1.0, 1.5, 2.0})
    for (int mode : {1, 2, 5, 100}) {
      const Field w = sample(PlaneWave{mode, 0}, g);
      const double k = std::numbers::pi * mode / g.half_width();
      const Field out = spectral_frac_lap(w, beta);
      double err = 0.0;
      for (std::size_t i = 0; i < w.size(); ++i) err = std::max(err, std::abs(out[i] - std::pow(k, beta) * w[i]));
      const double floor = std::pow(g.k_max() / k, beta) * std::numeric_limits<double>::epsilon();
      CHECK(err / std::pow(k, beta) <= 10.0 * std::max(floor, 1e-14));
    }
}

TEST_CASE("beta = 0 is the identity and constants are annihilated") {
  const GridSpec g = make_grid(1, 64, 3.0);
  const Field c = sample(Constant{2.5}, g);
  const Field id = spectral_frac_lap(c, 0.0);
  for (double v : id.values()) CHECK(v == 2.5);
  for (double beta : {0.5, 1.0, 2.0}) {
    const Field out = spectral_frac_lap(c, beta);
    for (double v : out.values()) CHECK(std::abs(v) < 1e-13);
  }
  CHECK_THROWS_AS(spectral_frac_lap(c, 2.5), Error);
  CHECK_THROWS_AS(spectral_frac_lap(c, -0.1), Error);
}

TEST_CASE("beta = 2 reproduces the classical Laplacian of a Gaussian") {
  const GridSpec g1 = make_grid(1, 512, 20.0);
  const Field out1 = spectral_frac_lap(sample(Gaussian{1.0, 1.0}, g1), 2.0);
  double err = 0.0;
  for (std::size_t i = 0; i < g1.size(); ++i) {
    const double r2 = g1.radius_squared(i);
    err = std::max(err, std::abs(out1[i] - (1.0 - r2) * std::exp(-0.5 * r2)));
  }
  CHECK(err <= 1e-8);

  const GridSpec g2 = make_grid(2, 128, 12.0);
  const Field out2 = spectral_frac_lap(sample(Gaussian{1.0, 1.0}, g2), 2.0);
  err = 0.0;
  for (std::size_t i = 0; i < g2.size(); ++i) {
    const double r2 = g2.radius_squared(i);
    err = std::max(err, std::abs(out2[i] - (2.0 - r2) * std::exp(-0.5 * r2)));
  }
  CHECK(err <= 1e-8);
}

TEST_CASE("half Laplacian of the periodized Lorentzian matches the Poisson-kernel identity") {
  // sum_m 1/(1+(x+2Lm)^2) = (a/2) sinh a / (cosh a - cos ax), a = pi/L, and its
  // half Laplacian is -d/dt of the periodized Poisson kernel at t = 1.
  for (double L : {5.0, 40.0}) {
    const GridSpec g = make_grid(1, 2048, L);
    const double a = std::numbers::pi / L;
    const Field f = from_function(g, [&](double x) {
      return 0.5 * a * std::sinh(a) / (std::cosh(a) - std::cos(a * x));
    });
    const Field expected = from_function(g, [&](double x) {
      const double d = std::cosh(a) - std::cos(a * x);
      return 0.5 * a * a * (std::cosh(a) * std::cos(a * x) - 1.0) / (d * d);
    });
    CHECK(rel_linf(spectral_frac_lap(f, 1.0), expected) <= 1e-10);
  }
}

TEST_CASE("truncated Lorentzian: deviation from the whole-line formula decays like 1/L^2") {
  // The box cuts the 1/x^2 tails, so the whole-line closed form is only
  // approached as L grows; the mismatch is set by the missing periodic images.
  auto mismatch = [](double L, std::size_t n) {
    const GridSpec g = make_grid(1, n, L);
    const Field out = spectral_frac_lap(from_function(g, [](double x) { return 1.0 / (1.0 + x * x); }), 1.0);
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = g.coordinate(i);
      if (std::abs(x) <= 5.0) err = std::max(err, std::abs(out[i] - (1.0 - x * x) / std::pow(1.0 + x * x, 2)));
    }
    return err;
  };
  const double e40 = mismatch(40.0, 2048);
  const double e80 = mismatch(80.0, 4096);
  CHECK(e40 > 1e-4);
  CHECK(e40 < 1e-3);
  CHECK(e40 / e80 == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("spectral semigroup additivity") {
  const GridSpec g = make_grid(1, 256, 10.0);
  const Field f = sample(Gaussian{1.0, 0.8}, g);
  const double pairs[][2] = {{0.5, 0.7}, {1.0, 1.0}, {0.3, 1.2}};
  for (const auto& bp : pairs)
    CHECK(rel_l2(spectral_frac_lap(spectral_frac_lap(f, bp[0]), bp[1]), spectral_frac_lap(f, bp[0] + bp[1])) <=
          1e-10);
}

TEST_CASE("normalization constants") {
  CHECK(normalization_constant(1, 1.0) == doctest::Approx(2.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(normalization_constant(2, 1.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
  CHECK(std::isfinite(normalization_constant(1, 1.999)));
  CHECK_THROWS_AS(normalization_constant(1, 2.0), Error);
  CHECK_THROWS_AS(normalization_constant(1, 0.0), Error);
  for (int dim = 1; dim <= 2; ++dim)
    for (double d : {0.25, 0.5, 1.0, 1.5, 1.9})
      CHECK(standard_normalization_constant(dim, d) / normalization_constant(dim, d) ==
            doctest::Approx(0.5 * d).epsilon(1e-13));
}

TEST_CASE("special functions") {
  CHECK(special::dirichlet_beta(1.0) == doctest::Approx(std::numbers::pi / 4.0).epsilon(1e-14));
  CHECK(special::dirichlet_beta(2.0) == doctest::Approx(0.915965594177219015).epsilon(1e-14));
  CHECK(special::dirichlet_beta(3.0) == doctest::Approx(std::pow(std::numbers::pi, 3) / 32.0).epsilon(1e-14));
  CHECK(special::lattice_zeta(1, 2.0) == doctest::Approx(std::pow(std::numbers::pi, 2) / 3.0).epsilon(1e-14));
  // 4 zeta(2) beta(2): the Epstein zeta of the square lattice at s = 4.
  CHECK(special::lattice_zeta(2, 4.0) ==
        doctest::Approx(4.0 * std::pow(std::numbers::pi, 2) / 6.0 * 0.915965594177219015).epsilon(1e-13));
  // Negative arguments from the analytic continuation: zeta(-0.5) = -0.2078862250...
  CHECK(special::lattice_zeta(1, -0.5) == doctest::Approx(2.0 * -0.207886224977354566).epsilon(1e-12));
}

TEST_CASE("singular backend annihilates constants and is translation equivariant") {
  const GridSpec g = make_grid(1, 256, 10.0);
  for (double beta : {0.5, 1.0, 1.5}) {
    const Field out = singular_frac_lap(sample(Constant{1.0}, g), singular(beta));
    for (double v : out.values()) CHECK(std::abs(v) <= 1e-8);
  }

  const Field f = sample(Gaussian{1.0, 1.3}, g);
  const std::size_t shift = 37;
  std::vector<double> rolled(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) rolled[i] = f[(i + shift) % g.size()];
  for (Backend b : {Backend::spectral, Backend::singular_integral}) {
    OperatorSpec spec = singular(1.2);
    spec.backend = b;
    const Field a = apply_operator(f, spec);
    const Field r = apply_operator(Field(g, rolled), spec);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      err = std::max(err, std::abs(r[i] - a[(i + shift) % g.size()]));
      scale = std::max(scale, std::abs(a[i]));
    }
    CHECK(err <= 1e-10 * scale);
  }
}

TEST_CASE("both backends are symmetric and positive at a strict maximum") {
  std::mt19937_64 rng(99);
  const GridSpec g = make_grid(1, 256, 10.0);
  const Field f = sample(Gaussian{1.0, 1.0}, g);
  const Field h = sample(Gaussian{0.7, 2.1}, g);
  for (Backend b : {Backend::spectral, Backend::singular_integral}) {
    OperatorSpec spec = singular(0.8);
    spec.backend = b;
    const double left = inner_product(apply_operator(f, spec), h);
    const double right = inner_product(f, apply_operator(h, spec));
    CHECK(std::abs(left - right) <= 1e-10 * std::abs(left));
    // Gaussian peak at x = 0 (index 128) is the strict maximum.
    CHECK(apply_operator(f, spec)[128] > 1e-10);
  }

  const GridSpec g2 = make_grid(2, 32, 6.0);
  const Field f2 = sample(Gaussian{1.0, 1.0}, g2);
  const Field h2 = sample(Bump{3.0}, g2);
  const OperatorSpec s2 = singular(1.4);
  const double l2 = inner_product(singular_frac_lap(f2, s2), h2);
  const double r2 = inner_product(f2, singular_frac_lap(h2, s2));
  CHECK(std::abs(l2 - r2) <= 1e-10 * std::abs(l2));
  CHECK(singular_frac_lap(f2, s2)[16 * 32 + 16] > 1e-10);
}

TEST_CASE("calibration recovers beta/2 and reconciles the backends") {
  const GridSpec g = make_grid(1, 2048, 40.0);
  CHECK(calibrate_constant(1, 1.0, g) == doctest::Approx(0.5).epsilon(0.02));

  const GridSpec g1 = make_grid(1, 1024, 20.0);
  CHECK(calibrate_constant(1, 1.9, g1) == doctest::Approx(0.95).epsilon(0.05));

  for (double beta : {0.5, 1.0, 1.5}) {
    const OperatorSpec spec = calibrated(singular(beta), g1);
    CHECK(spec.calibration_factor == doctest::Approx(0.5 * beta).epsilon(0.05));
    const Field f = sample(Gaussian{1.0, 1.0}, g1);
    CHECK(rel_linf(singular_frac_lap(f, spec), spectral_frac_lap(f, beta)) <= 1e-3);
  }

  CHECK_THROWS_AS(calibrate_constant(1, 1.0, make_grid(1, 64, 4.0)), Error);
}

TEST_CASE("two-dimensional singular backend agrees with the spectral one") {
  const GridSpec g = make_grid(2, 64, 8.0);
  const Field f = sample(Gaussian{1.0, 1.0}, g);
  for (double beta : {0.6, 1.3}) {
    const OperatorSpec spec = calibrated(singular(beta), g);
    CHECK(spec.calibration_factor == doctest::Approx(0.5 * beta).epsilon(0.05));
    CHECK(rel_linf(singular_frac_lap(f, spec), spectral_frac_lap(f, beta)) <= 1e-3);
  }
}

TEST_CASE("dense quadrature oracle agrees with the coarse evaluation") {
  const GridSpec g = make_grid(1, 256, 10.0);
  const OperatorSpec spec = singular(1.0, 0.5);
  const Field coarse = singular_frac_lap(sample(Gaussian{1.0, 1.0}, g), spec);
  const Field dense = singular_frac_lap_dense(Gaussian{1.0, 1.0}, g, spec, 4);
  CHECK(rel_linf(coarse, dense) <= 1e-3);
  CHECK(rel_linf(dense, spectral_frac_lap(sample(Gaussian{1.0, 1.0}, g), 1.0)) <= 1e-3);
}

TEST_CASE("singular backend preconditions") {
  const GridSpec g = make_grid(1, 64, 10.0);
  const Field f = sample(Gaussian{1.0, 1.0}, g);
  CHECK_THROWS_AS(singular_frac_lap(f, singular(2.0)), Error);
  CHECK_THROWS_AS(singular_frac_lap(f, singular(0.0)), Error);
  OperatorSpec tight = singular(1.0);
  tight.quadrature.cutoff_radius = 0.5 * g.spacing();
  try {
    singular_frac_lap(f, tight);
    FAIL("expected grid_too_coarse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::grid_too_coarse);
  }
  CHECK(parse_backend("singular") == Backend::singular_integral);
  CHECK(parse_backend("spectral") == Backend::spectral);
  CHECK_THROWS_AS(parse_backend("fem"), Error);
}

TEST_CASE("zeta correction improves the plain lattice sum") {
  const GridSpec g = make_grid(1, 512, 10.0);
  const Field f = sample(Gaussian{1.0, 1.0}, g);
  const Field ref = spectral_frac_lap(f, 1.0);
  OperatorSpec plain = singular(1.0, 0.5);
  plain.quadrature.inner_regularization = InnerRegularization::none;
  const double err_plain = rel_linf(singular_frac_lap(f, plain), ref);
  const double err_corr = rel_linf(singular_frac_lap(f, singular(1.0, 0.5)), ref);
  CHECK(err_corr < 0.1 * err_plain);
}
