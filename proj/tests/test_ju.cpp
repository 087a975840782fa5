#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fraclap/cutoff.hpp"
#include "fraclap/error.hpp"
#include "fraclap/ju.hpp"

using namespace fraclap;

namespace {

double max_abs(const Field& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::io_error;
}

// Eighth-order periodic central difference along one axis.
Field fd8_derivative(const Field& f, int axis) {
  const GridSpec& g = f.grid();
  const std::size_t n = g.points_per_dim();
  const double h = g.spacing();
  const std::size_t stride = g.dim() == 2 && axis == 0 ? n : 1;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const std::size_t along = g.dim() == 1 ? i : (axis == 0 ? i / n : i % n);
    const std::size_t base = i - along * stride;
    auto at = [&](long off) {
      const long j = (static_cast<long>(along) + off + static_cast<long>(n)) % static_cast<long>(n);
      return f[base + static_cast<std::size_t>(j) * stride];
    };
    static constexpr double w[] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    double d = 0.0;
    for (long m = 1; m <= 4; ++m) d += w[m - 1] * (at(m) - at(-m));
    out[i] = d / h;
  }
  return Field(g, std::move(out));
}

}  // namespace

TEST_CASE("q = 1 gives an identically zero gap") {
  const GridSpec g = make_grid(1, 256, 10.0);
  for (double delta : {0.0, 0.5, 1.0, 1.7, 2.0}) {
    const JuGap r = ju_gap({random_smooth_positive(g, 9), 1.0, delta});
    CHECK(max_abs(r.gap) <= 1e-13);
    CHECK(r.max_violation <= 1e-13);
  }
}

TEST_CASE("delta = 0 reduces the gap to (q-1) psi^q") {
  const GridSpec g = make_grid(1, 128, 6.0);
  const Field psi = random_smooth_positive(g, 4);
  for (double q : {1.5, 2.0, 3.0}) {
    const JuGap r = ju_gap({psi, q, 0.0});
    for (std::size_t i = 0; i < psi.size(); ++i)
      CHECK(r.gap[i] == doctest::Approx((q - 1.0) * std::pow(psi[i], q)).epsilon(1e-13));
    CHECK(r.max_violation == 0.0);
  }
}

TEST_CASE("Gaussian with q = 2, delta = 1 satisfies the inequality") {
  const GridSpec g = make_grid(1, 1024, 20.0);
  const JuGap spectral = ju_gap({sample(Gaussian{1.0, 1.0}, g), 2.0, 1.0});
  CHECK(spectral.max_violation <= 1e-8);

  // Quadrature oracle at 4x resolution, independent of the FFT path.
  const GridSpec coarse = make_grid(1, 256, 20.0);
  OperatorSpec spec;
  spec.beta = 1.0;
  spec.backend = Backend::singular_integral;
  spec = calibrated(spec, make_grid(1, 1024, 20.0));
  const Field psi = sample(Gaussian{1.0, 1.0}, coarse);
  const Field op_psi = singular_frac_lap_dense(Gaussian{1.0, 1.0}, coarse, spec, 4);
  const Field op_sq = singular_frac_lap_dense(Gaussian{1.0, std::sqrt(0.5)}, coarse, spec, 4);
  double worst = 0.0;
  for (std::size_t i = 0; i < psi.size(); ++i) worst = std::min(worst, 2.0 * psi[i] * op_psi[i] - op_sq[i]);
  CHECK(-worst <= 1e-8);
}

TEST_CASE("ju_gap preconditions") {
  const GridSpec g = make_grid(1, 64, 5.0);
  std::vector<double> v(64, 1.0);
  v[10] = -1e-3;
  CHECK(code_of([&] { ju_gap({Field(g, v), 2.0, 1.0}); }) == ErrorCode::invalid_parameter);
  const Field psi = sample(Gaussian{1.0, 1.0}, g);
  CHECK(code_of([&] { ju_gap({psi, 0.9, 1.0}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([&] { ju_gap({psi, 2.0, 2.1}); }) == ErrorCode::invalid_parameter);
  CHECK(code_of([&] { ju_gap({psi, 2.0, -0.1}); }) == ErrorCode::invalid_parameter);
}

TEST_CASE("Young step: equality and boundary values") {
  for (double q : {1.5, 2.0, 3.0}) {
    CHECK(young_excess(0.7, 0.7, q) <= 0.0);
    CHECK(young_excess(0.7, 0.7, q) >= -1e-15);
  }
  CHECK(young_excess(2.0, 0.0, 2.0) == doctest::Approx(-2.0));
  CHECK(young_excess(2.0, 0.0, 2.0) <= 0.0);
  CHECK_THROWS_AS(young_excess(1.0, 1.0, 1.0), Error);
}

TEST_CASE("Young step over 10^5 random pairs, with exhaustive enumeration as oracle") {
  const GridSpec g = make_grid(1, 256, 8.0);
  const Field psi = random_smooth_positive(g, 2024);
  std::mt19937_64 rng(77);
  std::uniform_int_distribution<std::size_t> pick(0, g.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> pairs(100000);
  for (auto& pr : pairs) pr = {pick(rng), pick(rng)};

  std::vector<std::pair<std::size_t, std::size_t>> all;
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t b = 0; b < g.size(); ++b) all.emplace_back(a, b);

  for (double q : {1.5, 2.0, 3.0}) {
    const double sampled = young_step_check(psi, q, pairs);
    const double exhaustive = young_step_check(psi, q, all);
    CHECK(sampled <= 1e-14);
    CHECK(exhaustive <= 1e-14);
    CHECK(sampled <= exhaustive);
  }
  CHECK_THROWS_AS(young_step_check(psi, 1.0, pairs), Error);
}

TEST_CASE("random smooth fields are strictly positive and reproducible") {
  for (int dim = 1; dim <= 2; ++dim) {
    const GridSpec g = make_grid(dim, dim == 1 ? 512 : 64, 10.0);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const Field a = random_smooth_positive(g, seed);
      const auto v = a.values();
      CHECK(*std::min_element(v.begin(), v.end()) > 0.0);
      const Field b = random_smooth_positive(g, seed);
      CHECK(std::equal(v.begin(), v.end(), b.values().begin()));
    }
  }
}

TEST_CASE("standard suite passes and is deterministic") {
  JuSuiteConfig cfg;
  const JuReport a = ju_sweep(cfg);
  CHECK(a.cases.size() == 100);
  CHECK(a.aggregate_max_violation <= 1e-8);
  CHECK(a.pass);
  const JuReport b = ju_sweep(cfg);
  CHECK(a.to_json().dump() == b.to_json().dump());
  for (const auto& c : a.cases) CHECK(c.gap_integral >= -1e-8);
}

TEST_CASE("suite with q = 1 only reports exactly zero") {
  JuSuiteConfig cfg;
  cfg.count = 20;
  cfg.q_list = {1.0};
  cfg.n = 256;
  CHECK(ju_sweep(cfg).aggregate_max_violation == 0.0);
}

TEST_CASE("violation does not grow under refinement") {
  JuSuiteConfig cfg;
  cfg.count = 24;
  cfg.n = 256;
  const JuReport coarse = ju_sweep(cfg);
  cfg.n = 512;
  const JuReport fine = ju_sweep(cfg);
  for (std::size_t i = 0; i < coarse.cases.size(); ++i)
    CHECK(fine.cases[i].max_violation <= coarse.cases[i].max_violation + 1e-12);
}

TEST_CASE("gap scales like c^q") {
  const GridSpec g = make_grid(1, 512, 10.0);
  const Field psi = random_smooth_positive(g, 31);
  for (double q : {1.5, 2.0, 3.0})
    for (double c : {0.1, 3.0}) {
      std::vector<double> scaled(psi.size());
      for (std::size_t i = 0; i < psi.size(); ++i) scaled[i] = c * psi[i];
      const JuGap base = ju_gap({psi, q, 1.3});
      const JuGap big = ju_gap({Field(g, scaled), q, 1.3});
      const double cq = std::pow(c, q);
      double err = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) err = std::max(err, std::abs(big.gap[i] - cq * base.gap[i]));
      CHECK(err <= 1e-10 * cq * max_abs(base.gap));
    }
}

TEST_CASE("delta = 2 matches the classical identity q (q-1) psi^{q-2} |grad psi|^2") {
  for (int dim = 1; dim <= 2; ++dim) {
    const GridSpec g = make_grid(dim, dim == 1 ? 1024 : 128, 6.0);
    const Field psi = random_smooth_positive(g, 5 + dim);
    for (double q : {1.5, 2.0, 3.0}) {
      const JuGap r = ju_gap({psi, q, 2.0});
      CHECK(r.max_violation <= 1e-8);
      std::vector<Field> grad;
      for (int axis = 0; axis < dim; ++axis) grad.push_back(fd8_derivative(psi, axis));
      double err = 0.0, scale = 0.0;
      for (std::size_t i = 0; i < psi.size(); ++i) {
        double g2 = 0.0;
        for (const auto& d : grad) g2 += d[i] * d[i];
        const double classical = q * (q - 1.0) * std::pow(psi[i], q - 2.0) * g2;
        err = std::max(err, std::abs(r.gap[i] - classical));
        scale = std::max(scale, std::abs(classical));
      }
      CHECK(err <= 1e-6 * scale);
    }
  }
}

TEST_CASE("two-dimensional suite within 1e-6 at n = 128") {
  JuSuiteConfig cfg;
  cfg.dim = 2;
  cfg.n = 128;
  cfg.count = 24;
  cfg.tolerance = 1e-6;
  const JuReport r = ju_sweep(cfg);
  CHECK(r.aggregate_max_violation <= 1e-6);
  CHECK(r.pass);
}

TEST_CASE("singular backend suite in one dimension") {
  JuSuiteConfig cfg;
  cfg.count = 12;
  cfg.n = 1024;
  cfg.backend = Backend::singular_integral;
  cfg.tolerance = 1e-6;
  const JuReport r = ju_sweep(cfg);
  CHECK(r.aggregate_max_violation <= 1e-6);
}

TEST_CASE("cutoff profile raised to the power ell obeys the pointwise step") {
  // The test-function argument applies the inequality to phi_1 with q = ell.
  const GridSpec g = make_grid(1, 2048, 8.0);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cutoff::profile(std::abs(g.coordinate(i)) / 3.0);
  const Field phi(g, std::move(v));
  for (double ell : {2.0, 4.0, 6.0}) {
    const JuGap r = ju_gap({phi, ell, 1.0});
    CHECK(r.max_violation <= 1e-8);
  }
}

TEST_CASE("empty suite is rejected") {
  JuSuiteConfig cfg;
  cfg.count = 0;
  CHECK(code_of([&] { ju_sweep(cfg); }) == ErrorCode::empty_input);
  cfg.count = 4;
  cfg.q_list.clear();
  CHECK(code_of([&] { ju_sweep(cfg); }) == ErrorCode::empty_input);
}
