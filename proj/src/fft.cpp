#include "fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>
#include <new>

#include <fftw3.h>

namespace beatscope::detail {

namespace {

// The FFTW planner is not re-entrant; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

class AlignedBuffer {
 public:
  explicit AlignedBuffer(std::size_t n) : n_(n), data_(fftw_alloc_complex(std::max<std::size_t>(n, 1))) {
    if (!data_) throw std::bad_alloc();
  }
  ~AlignedBuffer() { fftw_free(data_); }
  AlignedBuffer(const AlignedBuffer&) = delete;
  AlignedBuffer& operator=(const AlignedBuffer&) = delete;

  fftw_complex* get() noexcept { return data_; }
  std::complex<double>* as_std() noexcept { return reinterpret_cast<std::complex<double>*>(data_); }
  std::size_t size() const noexcept { return n_; }

 private:
  std::size_t n_;
  fftw_complex* data_;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  ~Plan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

int sign_of(FftDirection dir) { return dir == FftDirection::Forward ? FFTW_FORWARD : FFTW_BACKWARD; }

}  // namespace

std::vector<std::complex<double>> fft(std::span<const std::complex<double>> input, std::size_t n, FftDirection dir) {
  if (n == 0) return {};
  AlignedBuffer buf(n);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_dft_1d(static_cast<int>(n), buf.get(), buf.get(), sign_of(dir), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  std::fill(buf.as_std(), buf.as_std() + n, std::complex<double>{});
  std::copy_n(input.begin(), std::min(n, input.size()), buf.as_std());
  plan.execute();
  return {buf.as_std(), buf.as_std() + n};
}

void fft_axis(std::vector<std::complex<double>>& data, std::size_t rows, std::size_t cols, int axis,
              FftDirection dir) {
  AlignedBuffer buf(rows * cols);
  const int n = static_cast<int>(axis == 0 ? rows : cols);
  const int howmany = static_cast<int>(axis == 0 ? cols : rows);
  const int stride = axis == 0 ? static_cast<int>(cols) : 1;
  const int dist = axis == 0 ? 1 : static_cast<int>(cols);
  fftw_plan raw;
  {
    std::lock_guard lock(planner_mutex());
    raw = fftw_plan_many_dft(1, &n, howmany, buf.get(), nullptr, stride, dist, buf.get(), nullptr, stride, dist,
                             sign_of(dir), FFTW_ESTIMATE);
  }
  Plan plan(raw);
  std::copy(data.begin(), data.end(), buf.as_std());
  plan.execute();
  std::copy(buf.as_std(), buf.as_std() + rows * cols, data.begin());
}

}  // namespace beatscope::detail
