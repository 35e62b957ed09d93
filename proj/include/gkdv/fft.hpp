#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <tuple>

namespace gkdv::fft {

using cplx = std::complex<double>;

namespace detail {

struct PlanDeleter {
  void operator()(fftw_plan_s* p) const noexcept { fftw_destroy_plan(p); }
};
using PlanHandle = std::unique_ptr<fftw_plan_s, PlanDeleter>;

// Planning is not thread-safe in FFTW; execution of an existing plan on
// fresh arrays is. Plans are built once with FFTW_ESTIMATE | FFTW_UNALIGNED
// so the chosen codelets (and hence the rounding) never depend on timing
// or on the alignment of the caller's buffers.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(int n0, int n1, int sign) {
    const auto key = std::make_tuple(n0, n1, sign);
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) return it->second.get();
    const std::size_t total = static_cast<std::size_t>(n0) * static_cast<std::size_t>(n1 > 0 ? n1 : 1);
    auto* in = fftw_alloc_complex(total);
    auto* out = fftw_alloc_complex(total);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = n1 > 0 ? fftw_plan_dft_2d(n0, n1, in, out, sign, flags)
                         : fftw_plan_dft_1d(n0, in, out, sign, flags);
    fftw_free(in);
    fftw_free(out);
    auto [pos, ok] = plans_.emplace(key, PlanHandle(p));
    return pos->second.get();
  }

 private:
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, PlanHandle> plans_;
};

inline void run(fftw_plan plan, std::span<const cplx> in, std::span<cplx> out) {
  // FFTW's new-array execute does not write the input of an out-of-place c2c plan.
  auto* src = reinterpret_cast<fftw_complex*>(const_cast<cplx*>(in.data()));
  fftw_execute_dft(plan, src, reinterpret_cast<fftw_complex*>(out.data()));
}

}  // namespace detail

/// Unnormalized forward DFT: out_k = sum_n in_n exp(-2 pi i k n / N).
inline void forward(std::span<const cplx> in, std::span<cplx> out) {
  detail::run(detail::PlanCache::instance().get(static_cast<int>(in.size()), 0, FFTW_FORWARD), in, out);
}

/// Unnormalized backward DFT: out_n = sum_k in_k exp(+2 pi i k n / N).
inline void backward(std::span<const cplx> in, std::span<cplx> out) {
  detail::run(detail::PlanCache::instance().get(static_cast<int>(in.size()), 0, FFTW_BACKWARD), in, out);
}

/// Row-major 2-D transforms of an n0 x n1 array.
inline void forward_2d(int n0, int n1, std::span<const cplx> in, std::span<cplx> out) {
  detail::run(detail::PlanCache::instance().get(n0, n1, FFTW_FORWARD), in, out);
}

inline void backward_2d(int n0, int n1, std::span<const cplx> in, std::span<cplx> out) {
  detail::run(detail::PlanCache::instance().get(n0, n1, FFTW_BACKWARD), in, out);
}

}  // namespace gkdv::fft
