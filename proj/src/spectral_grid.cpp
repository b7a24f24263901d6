#include "cascade/spectral_grid.hpp"

#include <mutex>
#include <sstream>

#include <fftw3.h>

namespace cascade {

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

namespace {

void check_grid_size(int k) {
  if (k < 2 || k % 2 != 0) throw Error("grid size K must be even and >= 2");
}

}  // namespace

SpectralGrid::SpectralGrid(int k) : k_(k) {
  check_grid_size(k);
  values_.assign(std::size_t(k) * k, cplx{});
}

Spectrum::Spectrum(int k) : k_(k) {
  check_grid_size(k);
  values_.assign(std::size_t(k) * k, cplx{});
}

std::size_t Spectrum::offset(ModeIndex j) const {
  if (!resolves(j)) {
    std::ostringstream msg;
    msg << "Spectrum: mode " << j << " not resolved by K=" << k_;
    throw Error(msg.str());
  }
  return std::size_t(array_index(j.j1, k_)) * k_ + std::size_t(array_index(j.j2, k_));
}

FourierTransform2d::FourierTransform2d(int k) : k_(k) {
  check_grid_size(k);
  std::vector<lcplx> scratch(static_cast<std::size_t>(k));
  auto* buf = reinterpret_cast<fftwl_complex*>(scratch.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  std::lock_guard lock(fftw_planner_mutex());
  forward_ = fftwl_plan_dft_1d(k, buf, buf, FFTW_FORWARD, flags);
  backward_ = fftwl_plan_dft_1d(k, buf, buf, FFTW_BACKWARD, flags);
  if (!forward_ || !backward_) throw Error("FFTW planning failed");
}

FourierTransform2d::~FourierTransform2d() {
  std::lock_guard lock(fftw_planner_mutex());
  for (fftwl_plan p : {forward_, backward_})
    if (p) fftwl_destroy_plan(p);
}

void FourierTransform2d::forward(std::span<cplx> data, std::span<const lcplx> post) const {
  const std::size_t k = std::size_t(k_);
  if (data.size() != k * k) throw Error("FourierTransform2d: size mismatch");
  if (!post.empty() && post.size() != data.size()) throw Error("FourierTransform2d: multiplier size mismatch");
  const long double scale = 1.0L / (static_cast<long double>(k) * static_cast<long double>(k));
  cplx* base = data.data();
#pragma omp parallel
  {
    std::vector<lcplx> buf(k);
    auto* b = reinterpret_cast<fftwl_complex*>(buf.data());
#pragma omp for schedule(static)
    for (std::size_t r = 0; r < k; ++r) {
      cplx* row = base + r * k;
      for (std::size_t i = 0; i < k; ++i) buf[i] = lcplx(row[i].real(), row[i].imag());
      fftwl_execute_dft(forward_, b, b);
      for (std::size_t i = 0; i < k; ++i) row[i] = cplx(double(buf[i].real()), double(buf[i].imag()));
    }
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < k; ++i) buf[i] = lcplx(base[i * k + c].real(), base[i * k + c].imag());
      fftwl_execute_dft(forward_, b, b);
      for (std::size_t i = 0; i < k; ++i) {
        lcplx v = buf[i] * scale;
        if (!post.empty()) v *= post[i * k + c];
        base[i * k + c] = cplx(double(v.real()), double(v.imag()));
      }
    }
  }
}

void FourierTransform2d::inverse(std::span<cplx> data, std::span<const lcplx> pre) const {
  const std::size_t k = std::size_t(k_);
  if (data.size() != k * k) throw Error("FourierTransform2d: size mismatch");
  if (!pre.empty() && pre.size() != data.size()) throw Error("FourierTransform2d: multiplier size mismatch");
  cplx* base = data.data();
#pragma omp parallel
  {
    std::vector<lcplx> buf(k);
    auto* b = reinterpret_cast<fftwl_complex*>(buf.data());
#pragma omp for schedule(static)
    for (std::size_t r = 0; r < k; ++r) {
      cplx* row = base + r * k;
      for (std::size_t i = 0; i < k; ++i) {
        buf[i] = lcplx(row[i].real(), row[i].imag());
        if (!pre.empty()) buf[i] *= pre[r * k + i];
      }
      fftwl_execute_dft(backward_, b, b);
      for (std::size_t i = 0; i < k; ++i) row[i] = cplx(double(buf[i].real()), double(buf[i].imag()));
    }
#pragma omp for schedule(static)
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t i = 0; i < k; ++i) buf[i] = lcplx(base[i * k + c].real(), base[i * k + c].imag());
      fftwl_execute_dft(backward_, b, b);
      for (std::size_t i = 0; i < k; ++i) base[i * k + c] = cplx(double(buf[i].real()), double(buf[i].imag()));
    }
  }
}

Spectrum FourierTransform2d::forward(const SpectralGrid& g) const {
  if (g.k() != k_) throw Error("FourierTransform2d: grid size mismatch");
  Spectrum s(k_);
  std::copy(g.values().begin(), g.values().end(), s.values().begin());
  forward(s.values());
  return s;
}

SpectralGrid FourierTransform2d::inverse(const Spectrum& s) const {
  if (s.k() != k_) throw Error("FourierTransform2d: grid size mismatch");
  SpectralGrid g(k_);
  std::copy(s.values().begin(), s.values().end(), g.values().begin());
  inverse(g.values());
  return g;
}

AmplitudeField fourier_modes(const SpectralGrid& g) {
  const FourierTransform2d fft(g.k());
  const Spectrum s = fft.forward(g);
  AmplitudeField out(g.k() / 2);
  for (std::size_t i = 0; i < s.values().size(); ++i) out.set(s.mode(i), s.values()[i]);
  return out;
}

SpectralGrid synthesize(int k, const AmplitudeField& coefficients) {
  Spectrum s(k);
  for (const auto& [j, a] : coefficients.amplitudes()) s.at(j) = a;
  const FourierTransform2d fft(k);
  return fft.inverse(s);
}

}  // namespace cascade
