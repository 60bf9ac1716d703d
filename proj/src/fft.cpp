#include "mimosar/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mimosar {

namespace {
// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  fftw_plan plan = nullptr;

  explicit Impl(std::size_t n) {
    std::lock_guard lock(planner_mutex());
    in = fftw_alloc_complex(n);
    out = fftw_alloc_complex(n);
    if (!in || !out) throw std::bad_alloc();
    plan = fftw_plan_dft_1d(static_cast<int>(n), in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan) throw std::runtime_error("fftw: planning failed");
  }
  ~Impl() {
    std::lock_guard lock(planner_mutex());
    if (plan) fftw_destroy_plan(plan);
    fftw_free(in);
    fftw_free(out);
  }
};

Fft::Fft(std::size_t points) : points_(points) {
  if (points == 0) throw std::invalid_argument("Fft: size must be positive");
  impl_ = std::make_unique<Impl>(points);
}

Fft::~Fft() = default;
Fft::Fft(Fft&&) noexcept = default;
Fft& Fft::operator=(Fft&&) noexcept = default;

void Fft::forward(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() > points_ || out.size() != points_) {
    throw std::invalid_argument("Fft::forward: size mismatch");
  }
  // std::complex<double> and fftw_complex are layout-compatible.
  auto* buf = reinterpret_cast<cplx*>(impl_->in);
  std::copy(in.begin(), in.end(), buf);
  std::fill(buf + in.size(), buf + points_, cplx{0.0, 0.0});
  fftw_execute(impl_->plan);
  const auto* res = reinterpret_cast<const cplx*>(impl_->out);
  std::copy(res, res + points_, out.begin());
}

void Fft::forward_shifted(std::span<const cplx> in, std::span<cplx> out) {
  if (in.size() > points_ || out.size() != points_) {
    throw std::invalid_argument("Fft::forward_shifted: size mismatch");
  }
  auto* buf = reinterpret_cast<cplx*>(impl_->in);
  std::copy(in.begin(), in.end(), buf);
  std::fill(buf + in.size(), buf + points_, cplx{0.0, 0.0});
  fftw_execute(impl_->plan);
  const auto* res = reinterpret_cast<const cplx*>(impl_->out);
  for (std::size_t k = 0; k < points_; ++k) out[shifted_index(k, points_)] = res[k];
}

Fft& fft_plan(std::size_t points) {
  thread_local std::map<std::size_t, Fft> cache;
  auto it = cache.find(points);
  if (it == cache.end()) it = cache.emplace(points, Fft(points)).first;
  return it->second;
}

}  // namespace mimosar
