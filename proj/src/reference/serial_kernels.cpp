#include <cmath>

#include <fftw3.h>

#include "cascade/reference.hpp"

namespace cascade::reference {

namespace {

std::vector<cplx> phases(int k, double dt) {
  std::vector<cplx> out(std::size_t(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const ModeIndex j{signed_frequency(a, k), signed_frequency(b, k)};
      out[std::size_t(a) * k + b] = std::exp(cplx{0.0, -double(norm_sq(j)) * dt});
    }
  return out;
}

}  // namespace

SerialSplitStep::SerialSplitStep(const NlsParams& params) : params_(params) {
  params_.validate();
  if (params_.dealias != Dealias::off) throw Error("SerialSplitStep: dealiasing not supported");
  const int k = params_.k;
  work_.resize(std::size_t(k) * k);
  half_phase_ = phases(k, 0.5 * params_.tau);
  full_phase_ = phases(k, params_.tau);
  auto* buf = reinterpret_cast<fftw_complex*>(work_.data());
  std::lock_guard lock(fftw_planner_mutex());
  forward_ = fftw_plan_dft_2d(k, k, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  backward_ = fftw_plan_dft_2d(k, k, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

SerialSplitStep::~SerialSplitStep() {
  std::lock_guard lock(fftw_planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  fftw_destroy_plan(static_cast<fftw_plan>(backward_));
}

void SerialSplitStep::step(Spectrum& state) {
  if (state.k() != params_.k) throw Error("SerialSplitStep: grid size mismatch");
  const bool strang = params_.splitting == Splitting::strang;
  const auto& first = strang ? half_phase_ : full_phase_;
  auto v = state.values();
  for (std::size_t i = 0; i < v.size(); ++i) work_[i] = v[i] * first[i];
  fftw_execute(static_cast<fftw_plan>(backward_));
  const double factor = double(params_.lambda) * params_.coupling * params_.tau;
  for (cplx& u : work_) u *= std::exp(cplx{0.0, -factor * std::norm(u)});
  fftw_execute(static_cast<fftw_plan>(forward_));
  const double scale = 1.0 / (double(params_.k) * params_.k);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = work_[i] * scale * (strang ? half_phase_[i] : cplx{1.0});
}

Spectrum serial_evolve(const Spectrum& u0, const NlsParams& params, long long steps) {
  SerialSplitStep solver(params);
  Spectrum s = u0;
  for (long long n = 0; n < steps; ++n) solver.step(s);
  return s;
}

}  // namespace cascade::reference
