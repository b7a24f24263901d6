#pragma once

#include <complex>
#include <cstddef>
#include <limits>
#include <map>
#include <span>
#include <vector>

#include "cascade/lattice.hpp"

namespace cascade {

using cplx = std::complex<double>;

/// Dense lexicographic indexing of the box max(|j1|,|j2|) <= radius.
/// Index order equals ModeIndex order.
class BoxIndexer {
public:
  explicit BoxIndexer(int radius);

  int radius() const { return radius_; }
  std::size_t size() const { return std::size_t(side_) * side_; }
  bool contains(ModeIndex j) const { return max_abs(j) <= radius_; }
  std::size_t index(ModeIndex j) const {
    return std::size_t(j.j1 + radius_) * side_ + std::size_t(j.j2 + radius_);
  }
  ModeIndex mode(std::size_t i) const {
    return {int(i / side_) - radius_, int(i % side_) - radius_};
  }

private:
  int radius_;
  int side_;
};

/// Sparse map mode -> complex amplitude, confined to a truncation box.
class AmplitudeField {
public:
  static constexpr int kUnbounded = std::numeric_limits<int>::max();

  explicit AmplitudeField(int truncation_radius = kUnbounded);

  int truncation_radius() const { return radius_; }
  const std::map<ModeIndex, cplx>& amplitudes() const { return amps_; }
  std::size_t size() const { return amps_.size(); }

  /// Throws if j lies outside the truncation box.
  void set(ModeIndex j, cplx value);
  cplx get(ModeIndex j) const;
  bool contains(ModeIndex j) const { return amps_.contains(j); }

  /// Modes with nonzero amplitude.
  ModeSet support() const;

  /// Dense view on `box`; modes outside `box` are dropped.
  std::vector<cplx> to_dense(const BoxIndexer& box) const;
  /// Keeps every entry, zeros included, so the result has box.size() modes.
  static AmplitudeField from_dense(const BoxIndexer& box, std::span<const cplx> values);

private:
  int radius_;
  std::map<ModeIndex, cplx> amps_;
};

/// Unit amplitudes on the five-mode datum 1 + 2cos x1 + 2cos x2.
AmplitudeField five_mode_datum(int truncation_radius = AmplitudeField::kUnbounded);

/// Unit amplitudes on the closed square 2cos x1 + 2cos x2.
AmplitudeField nonresonant_square_datum(int truncation_radius = AmplitudeField::kUnbounded);

}  // namespace cascade
