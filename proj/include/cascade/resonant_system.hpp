#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cascade/amplitude_field.hpp"

namespace cascade {

class DivergenceError : public Error {
public:
  using Error::Error;
};

class TruncationLeak : public Error {
public:
  using Error::Error;
};

/// Sources (k, l, m) of one resonant term, as dense box indices.
struct TermIndex {
  std::uint32_t k;
  std::uint32_t l;
  std::uint32_t m;
};

struct ConservedQuantities {
  double mass = 0.0;
  double h0 = 0.0;
  double z = 0.0;
};

/// The resonant amplitude system
///
///   i da_j/dt = lambda * sum_{(k,l,m) in I_j} a_k conj(a_l) a_m
///
/// truncated to the box max(|j1|,|j2|) <= R. The degenerate members of I_j
/// collapse to 2 M a_j - |a_j|^2 a_j with M the total mass; the remaining
/// rectangles are precomputed per target.
///
/// Rectangle terms of each target are stored in a canonical order: the
/// signed coordinate permutation that folds the target into 0 <= j2 <= j1
/// is applied to every corner and terms are sorted on the folded corners.
/// Targets related by a lattice symmetry therefore accumulate their sums in
/// the same order, and a symmetric state stays symmetric to the bit.
class ResonantSystem {
public:
  ResonantSystem(int radius, int lambda);

  int radius() const { return box_.radius(); }
  int lambda() const { return lambda_; }
  const BoxIndexer& box() const { return box_; }
  std::size_t size() const { return box_.size(); }

  /// Nondegenerate rectangles targeting box index j, in canonical order.
  std::span<const TermIndex> rectangles(std::size_t j) const;
  std::size_t rectangle_count() const { return terms_.size(); }
  /// Rectangles with all corners in the box and target outside it.
  std::span<const TermIndex> leaks() const { return leaks_; }

  /// da/dt on dense state; parallel over targets, bitwise independent of
  /// the thread count.
  void rhs(std::span<const cplx> a, std::span<cplx> out) const;

  /// Largest |a_k||a_l||a_m| over leaking rectangles.
  double leak_magnitude(std::span<const cplx> a) const;

  ConservedQuantities conserved(std::span<const cplx> a) const;

private:
  BoxIndexer box_;
  int lambda_;
  std::vector<std::size_t> offsets_;
  std::vector<TermIndex> terms_;
  std::vector<TermIndex> leaks_;
};

/// Sparse-field form. Throws TruncationLeak if a rectangle with all three
/// corners in the support of `a` targets a mode outside the box.
AmplitudeField rhs(const AmplitudeField& a, int lambda);

ConservedQuantities conserved_quantities(const AmplitudeField& a, int lambda);

/// Neumaier-compensated sum of |a_i|^2 in index order.
double compensated_mass(std::span<const cplx> a);

double l1_norm(std::span<const cplx> a);

struct Trajectory {
  int radius = 0;
  std::vector<double> times;  // slow time
  std::vector<std::vector<cplx>> states;  // dense over the box

  AmplitudeField field(std::size_t snapshot) const;
  cplx value(std::size_t snapshot, ModeIndex j) const;
};

struct IntegrateOptions {
  double t_final = 1.0;
  double dt = 1e-3;
  int stride = 1;
  /// Largest tolerated leak product at snapshot times.
  double leak_tolerance = 1e-12;
};

/// Classical fixed-step RK4. Aborts with DivergenceError once the l1 norm
/// exceeds ten times its initial value.
Trajectory integrate(const ResonantSystem& system, const AmplitudeField& a0,
                     const IntegrateOptions& opts);

}  // namespace cascade
