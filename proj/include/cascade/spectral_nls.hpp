#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cascade/spectral_grid.hpp"

namespace cascade {

class BlowUpError : public Error {
public:
  using Error::Error;
};

enum class Splitting { strang, lie };
enum class Dealias { off, two_thirds };

std::string to_string(Splitting s);
std::string to_string(Dealias d);
Splitting parse_splitting(const std::string& s);
Dealias parse_dealias(const std::string& s);

/// i u_t + Lap u = lambda * coupling * |u|^2 u on the 2-torus.
/// Original form: coupling 1 and datum delta*u0. Rescaled form: coupling
/// eps = delta^2 and datum u0.
struct NlsParams {
  int lambda = 1;
  double coupling = 1.0;
  double tau = 1e-3;
  double t_final = 1.0;
  int k = 64;
  int record_stride = 1;
  Splitting splitting = Splitting::strang;
  Dealias dealias = Dealias::off;

  void validate() const;
  /// Canonical text used for hashing.
  std::string canonical() const;
};

/// u_j -> e^{-i |j|^2 dt} u_j.
void linear_step(Spectrum& s, double dt);
SpectralGrid linear_step(const SpectralGrid& g, double dt);

/// u(x) -> exp(-i lambda coupling dt |u(x)|^2) u(x). Returns false if a
/// non-finite sample was met.
bool nonlinear_step(SpectralGrid& g, double dt, int lambda, double coupling);

/// One split-step propagator; state is held in Fourier space between steps.
class SplitStepSolver {
public:
  explicit SplitStepSolver(const NlsParams& params);

  const NlsParams& params() const { return params_; }
  const FourierTransform2d& transform() const { return *fft_; }

  /// Advances `state` by one step of size tau. Throws BlowUpError on a
  /// non-finite value.
  void step(Spectrum& state) const;

private:

  NlsParams params_;
  std::unique_ptr<FourierTransform2d> fft_;
  std::vector<lcplx> half_phase_;
  std::vector<lcplx> full_phase_;
  std::vector<unsigned char> keep_;
};

/// Time series of a fixed list of modes. values[i][s] is mode i at
/// times[s].
struct ModeSeriesSet {
  std::vector<double> times;
  std::vector<ModeIndex> modes;
  std::vector<std::vector<cplx>> values;
  /// Amplitudes at or below this are indistinguishable from round-off.
  double noise_floor = 0.0;

  std::size_t index_of(ModeIndex j) const;
  const std::vector<cplx>& series(ModeIndex j) const { return values[index_of(j)]; }
};

struct EvolveResult {
  ModeSeriesSet series;
  std::vector<double> mass;  // discrete L2 mass at each record
  double max_relative_mass_drift = 0.0;
  /// Largest share of the mass carried by |j|_inf > K/4 at any record.
  double max_alias_fraction = 0.0;
  long long steps = 0;
  Spectrum final_state{2};
};

using SnapshotObserver = std::function<void(double t, const Spectrum& coefficients)>;

/// ceil(t_final / tau) steps; records the watched modes every
/// record_stride steps (and at t = 0 and at the final step).
EvolveResult evolve(const SpectralGrid& u0, const NlsParams& params, std::span<const ModeIndex> watch,
                    const SnapshotObserver& observer = {});
/// Starts from Fourier coefficients, so the t = 0 record is the datum itself.
EvolveResult evolve(const Spectrum& u0, const NlsParams& params, std::span<const ModeIndex> watch,
                    const SnapshotObserver& observer = {});

/// Coefficients of `a` placed on a K x K spectrum; throws if a mode is not
/// resolved.
Spectrum to_spectrum(int k, const AmplitudeField& a);

/// Alias-share and mass of a spectrum.
double spectral_mass(const Spectrum& s);
double alias_fraction(const Spectrum& s);

/// Flat binary checkpoint of the physical grid; layout in docs/formats.md.
void write_checkpoint(const std::string& path, const SpectralGrid& g, double t, std::uint64_t params_hash);

struct Checkpoint {
  SpectralGrid grid{2};
  double t = 0.0;
  std::uint64_t params_hash = 0;
};

Checkpoint read_checkpoint(const std::string& path);

}  // namespace cascade
