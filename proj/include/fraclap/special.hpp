#pragma once

namespace fraclap::special {

/// Dirichlet beta function sum_{k>=0} (-1)^k (2k+1)^{-s}, s > 0, summed with
/// Cohen-Villegas-Zagier acceleration.
double dirichlet_beta(double s);

/// Analytic continuation of the lattice sum sum_{j in Z^N \ 0} |j|^{-s}
/// for N in {1, 2}: 2 zeta(s) and 4 zeta(s/2) beta(s/2).
double lattice_zeta(int dim, double s);

}  // namespace fraclap::special
