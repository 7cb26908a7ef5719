#pragma once

#include <cstddef>
#include <new>
#include <vector>

#include "sphsparse/types.hpp"

namespace sphsparse::detail {

inline constexpr std::size_t kFftAlignment = 64;

template <typename T>
struct AlignedAllocator {
  using value_type = T;
  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}
  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), std::align_val_t{kFftAlignment}));
  }
  void deallocate(T* p, std::size_t) noexcept {
    ::operator delete(p, std::align_val_t{kFftAlignment});
  }
  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

/// Complex scratch storage with the alignment FFTW's SIMD kernels expect.
using AlignedBuffer = std::vector<Complex, AlignedAllocator<Complex>>;

/// In-place complex FFTW plan. Executes on any buffer of the planned shape;
/// execution is re-entrant, only planning is serialised. Buffers that are not
/// kFftAlignment-aligned are staged through an aligned copy.
class FftPlan {
 public:
  enum class Direction { forward, backward };  // exp(-i...) and exp(+i...)

  /// Batched 1-D transforms: `howmany` contiguous rows of length n.
  static FftPlan rows(int n, int howmany, Direction dir);

  /// 2-D transforms over the axes (n0, stride0) x (n1, stride1), repeated
  /// `howmany` times with spacing `dist` between batches.
  static FftPlan strided_2d(int n0, int stride0, int n1, int stride1, int howmany, int dist,
                            Direction dir);

  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  ~FftPlan();

  void execute(Complex* data) const;

 private:
  FftPlan(void* plan, std::size_t extent) : plan_(plan), extent_(extent) {}
  void* plan_ = nullptr;
  std::size_t extent_ = 0;  // elements touched by one execution
};

}  // namespace sphsparse::detail
