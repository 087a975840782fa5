#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace fraclap::detail {

// In-place unnormalized complex DFT on an n^dim array. Plans are cached per
// (dim, n, direction); execution is safe from concurrent threads.
void fft_forward(std::vector<std::complex<double>>& data, int dim, std::size_t n);
void fft_backward(std::vector<std::complex<double>>& data, int dim, std::size_t n);

}  // namespace fraclap::detail
