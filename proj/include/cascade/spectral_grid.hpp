#pragma once

#include <complex>
#include <mutex>
#include <span>
#include <vector>

#include "cascade/amplitude_field.hpp"

typedef struct fftwl_plan_s* fftwl_plan;

namespace cascade {

/// Guards every FFTW planner call; the planner is not re-entrant.
std::mutex& fftw_planner_mutex();

/// Signed frequency in [-K/2, K/2) of array index i.
constexpr int signed_frequency(int index, int k) { return index < k / 2 ? index : index - k; }
constexpr int array_index(int freq, int k) { return freq < 0 ? freq + k : freq; }

/// K x K physical samples u(x) at x = 2 pi (i1, i2) / K, row-major in i1.
class SpectralGrid {
public:
  explicit SpectralGrid(int k);

  int k() const { return k_; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  cplx& at(int i1, int i2) { return values_[std::size_t(i1) * k_ + i2]; }
  cplx at(int i1, int i2) const { return values_[std::size_t(i1) * k_ + i2]; }

private:
  int k_;
  std::vector<cplx> values_;
};

/// Discrete Fourier coefficients u_j = K^-2 sum_x u(x) e^{-i j.x}, same
/// layout as SpectralGrid with wrap-around frequencies.
class Spectrum {
public:
  explicit Spectrum(int k);

  int k() const { return k_; }
  std::span<cplx> values() { return values_; }
  std::span<const cplx> values() const { return values_; }
  bool resolves(ModeIndex j) const {
    return j.j1 >= -k_ / 2 && j.j1 < k_ / 2 && j.j2 >= -k_ / 2 && j.j2 < k_ / 2;
  }
  cplx& at(ModeIndex j) { return values_[offset(j)]; }
  cplx at(ModeIndex j) const { return values_[offset(j)]; }
  ModeIndex mode(std::size_t offset) const {
    return {signed_frequency(int(offset / std::size_t(k_)), k_), signed_frequency(int(offset % std::size_t(k_)), k_)};
  }

private:
  std::size_t offset(ModeIndex j) const;

  int k_;
  std::vector<cplx> values_;
};

using lcplx = std::complex<long double>;

/// 2D transform as K row transforms followed by K column transforms, each
/// a 1D FFTW plan executed on its own slice. Slices are transformed in long
/// double: with double twiddles the round trip is off unitary by a fixed
/// ~1e-16 gain, and the mass of a split-step run drifts linearly at that
/// rate. Rows and columns are distributed over OpenMP threads; every slice
/// is computed by the same codelet whichever thread runs it, so results do
/// not depend on the thread count.
class FourierTransform2d {
public:
  explicit FourierTransform2d(int k);
  ~FourierTransform2d();
  FourierTransform2d(const FourierTransform2d&) = delete;
  FourierTransform2d& operator=(const FourierTransform2d&) = delete;

  int k() const { return k_; }

  /// Physical samples -> normalized coefficients, in place. A non-empty
  /// `post` multiplies every coefficient before it is rounded to double.
  void forward(std::span<cplx> data, std::span<const lcplx> post = {}) const;
  /// Coefficients -> physical samples, in place. A non-empty `pre`
  /// multiplies every coefficient in extended precision first.
  void inverse(std::span<cplx> data, std::span<const lcplx> pre = {}) const;

  Spectrum forward(const SpectralGrid& g) const;
  SpectralGrid inverse(const Spectrum& s) const;

private:
  int k_;
  fftwl_plan forward_ = nullptr;
  fftwl_plan backward_ = nullptr;
};

/// Every grid coefficient keyed by its integer mode (K^2 entries).
AmplitudeField fourier_modes(const SpectralGrid& g);

/// Samples of sum_j a_j e^{i j.x} on the K x K grid. Throws if a mode is not
/// resolved by the grid.
SpectralGrid synthesize(int k, const AmplitudeField& coefficients);

}  // namespace cascade
