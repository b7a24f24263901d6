#pragma once

// Straightforward serial versions of the production kernels. They are slow
// on purpose and serve as test oracles and benchmark baselines.

#include <map>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cascade/lattice.hpp"
#include "cascade/resonant_system.hpp"
#include "cascade/spectral_nls.hpp"

namespace cascade::reference {

/// Every (k, l, m) in support^3 with j = k - l + m and matching norms.
TripleSet brute_force_resonances(ModeIndex j, const ModeSet& support);

/// One pass over support^3, grouped by target; only targets inside
/// `targets` are kept (modes without resonances map to an empty set).
std::map<ModeIndex, TripleSet> brute_force_resonance_table(const ModeSet& support, const ModeSet& targets);

/// da/dt by summing a_k conj(a_l) a_m over the full resonant set of every
/// box mode, degenerate triples included.
std::vector<cplx> direct_rhs(const BoxIndexer& box, std::span<const cplx> a, int lambda);

/// Single-threaded sum over the precomputed rectangle table.
void serial_rhs(const ResonantSystem& system, std::span<const cplx> a, std::span<cplx> out);

/// Split-step on a single fftw 2D plan, no OpenMP.
class SerialSplitStep {
public:
  explicit SerialSplitStep(const NlsParams& params);
  ~SerialSplitStep();
  SerialSplitStep(const SerialSplitStep&) = delete;
  SerialSplitStep& operator=(const SerialSplitStep&) = delete;

  void step(Spectrum& state);

private:
  NlsParams params_;
  std::vector<cplx> work_;
  std::vector<cplx> half_phase_;
  std::vector<cplx> full_phase_;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

Spectrum serial_evolve(const Spectrum& u0, const NlsParams& params, long long steps);

/// p! times the Taylor coefficient of order p: a Gaussian integer.
struct GaussianInteger {
  boost::multiprecision::cpp_int re;
  boost::multiprecision::cpp_int im;
  bool is_zero() const { return re == 0 && im == 0; }
};

/// Exact Taylor expansion of the resonant system about t = 0,
///   a_j(t) = sum_p scaled[j][p] t^p / p!,
/// for a datum of Gaussian integers, using the complete resonant sets (no
/// degenerate/rectangle split). Modes are tracked on the box of `radius`;
/// the expansion is exact for every mode whose order-p coefficients only
/// draw on modes inside the box.
class TaylorSeriesOracle {
public:
  TaylorSeriesOracle(const std::map<ModeIndex, GaussianInteger>& datum, int lambda, int order, int radius);

  int order() const { return order_; }
  /// Coefficient p! b_{j,p}; zero for untracked modes.
  const GaussianInteger& scaled(ModeIndex j, int p) const;
  /// Lowest p with a nonzero coefficient, or -1 if none up to order().
  int first_order(ModeIndex j) const;
  /// All modes with a nonzero coefficient at some order.
  ModeSet support() const;

private:
  int order_;
  std::map<ModeIndex, std::vector<GaussianInteger>> coeffs_;
  GaussianInteger zero_;
};

}  // namespace cascade::reference
