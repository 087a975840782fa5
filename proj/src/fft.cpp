#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace fraclap::detail {

namespace {

struct PlanDeleter {
  void operator()(fftw_plan_s* plan) const { fftw_destroy_plan(plan); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

class PlanCache {
 public:
  fftw_plan get(int dim, std::size_t n, int sign) {
    const auto key = std::make_tuple(dim, n, sign);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();

    // Planning scribbles on the arrays, so plan on scratch storage. The
    // unaligned flag lets the plan run on any caller buffer.
    const std::size_t total = dim == 1 ? n : n * n;
    std::vector<std::complex<double>> scratch(total);
    auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan plan = dim == 1
                         ? fftw_plan_dft_1d(static_cast<int>(n), buf, buf, sign, flags)
                         : fftw_plan_dft_2d(static_cast<int>(n), static_cast<int>(n), buf, buf,
                                            sign, flags);
    auto [pos, inserted] = plans_.emplace(key, PlanHandle(plan));
    return pos->second.get();
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, std::size_t, int>, PlanHandle> plans_;
};

PlanCache& cache() {
  static PlanCache instance;
  return instance;
}

void execute(std::vector<std::complex<double>>& data, int dim, std::size_t n, int sign) {
  fftw_plan plan = cache().get(dim, n, sign);
  auto* buf = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, buf, buf);
}

}  // namespace

void fft_forward(std::vector<std::complex<double>>& data, int dim, std::size_t n) {
  execute(data, dim, n, FFTW_FORWARD);
}

void fft_backward(std::vector<std::complex<double>>& data, int dim, std::size_t n) {
  execute(data, dim, n, FFTW_BACKWARD);
}

}  // namespace fraclap::detail
