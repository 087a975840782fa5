#include "fraclap/special.hpp"

#include <cmath>

#include "fraclap/error.hpp"

namespace fraclap::special {

double dirichlet_beta(double s) {
  require(s > 0.0, ErrorCode::invalid_parameter, "dirichlet_beta needs s > 0");
  constexpr int terms = 40;
  double d = std::pow(3.0 + std::sqrt(8.0), terms);
  d = 0.5 * (d + 1.0 / d);
  double b = -1.0;
  double c = -d;
  double sum = 0.0;
  for (int k = 0; k < terms; ++k) {
    c = b - c;
    sum += c * std::pow(2.0 * k + 1.0, -s);
    b = static_cast<double>(k + terms) * static_cast<double>(k - terms) * b /
        ((k + 0.5) * (k + 1.0));
  }
  return sum / d;
}

double lattice_zeta(int dim, double s) {
  switch (dim) {
    case 1:
      require(s != 1.0, ErrorCode::invalid_parameter, "lattice_zeta(1, s) has a pole at s = 1");
      return 2.0 * std::riemann_zeta(s);
    case 2:
      require(s > 0.0 && s != 2.0, ErrorCode::invalid_parameter,
              "lattice_zeta(2, s) implemented for s > 0, s != 2");
      return 4.0 * std::riemann_zeta(0.5 * s) * dirichlet_beta(0.5 * s);
    default:
      fail(ErrorCode::invalid_dimension, "lattice_zeta supports dimensions 1 and 2");
  }
}

}  // namespace fraclap::special
