#include "detail/fft.hpp"

#include <algorithm>
#include <cstdint>
#include <mutex>

#include <fftw3.h>

namespace sphsparse::detail {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

int sign_of(FftPlan::Direction dir) {
  return dir == FftPlan::Direction::forward ? FFTW_FORWARD : FFTW_BACKWARD;
}

constexpr unsigned kFlags = FFTW_ESTIMATE;

bool aligned(const void* p) {
  return reinterpret_cast<std::uintptr_t>(p) % kFftAlignment == 0;
}

}  // namespace

FftPlan FftPlan::rows(int n, int howmany, Direction dir) {
  AlignedBuffer scratch(static_cast<std::size_t>(n) * howmany);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  fftw_plan p = fftw_plan_many_dft(1, &n, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n,
                                   sign_of(dir), kFlags);
  if (p == nullptr) throw Error("FFTW failed to create a 1-D plan");
  return FftPlan(p, static_cast<std::size_t>(n) * howmany);
}

FftPlan FftPlan::strided_2d(int n0, int stride0, int n1, int stride1, int howmany, int dist,
                            Direction dir) {
  const std::size_t extent =
      static_cast<std::size_t>(n0 - 1) * stride0 + static_cast<std::size_t>(n1 - 1) * stride1 +
      static_cast<std::size_t>(howmany - 1) * dist + 1;
  AlignedBuffer scratch(extent);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_iodim dims[2] = {{n0, stride0, stride0}, {n1, stride1, stride1}};
  fftw_iodim batch = {howmany, dist, dist};
  std::lock_guard lock(planner_mutex());
  fftw_plan p = fftw_plan_guru_dft(2, dims, 1, &batch, buf, buf, sign_of(dir), kFlags);
  if (p == nullptr) throw Error("FFTW failed to create a 2-D plan");
  return FftPlan(p, extent);
}

FftPlan::FftPlan(FftPlan&& other) noexcept : plan_(other.plan_), extent_(other.extent_) {
  other.plan_ = nullptr;
}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    this->~FftPlan();
    plan_ = other.plan_;
    extent_ = other.extent_;
    other.plan_ = nullptr;
  }
  return *this;
}

FftPlan::~FftPlan() {
  if (plan_ != nullptr) {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(plan_));
  }
}

void FftPlan::execute(Complex* data) const {
  if (aligned(data)) {
    auto* buf = reinterpret_cast<fftw_complex*>(data);
    fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
    return;
  }
  AlignedBuffer staged(data, data + extent_);
  auto* buf = reinterpret_cast<fftw_complex*>(staged.data());
  fftw_execute_dft(static_cast<fftw_plan>(plan_), buf, buf);
  std::copy(staged.begin(), staged.end(), data);
}

}  // namespace sphsparse::detail
