#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cascade {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Fourier index of one mode on Z^2. Higher torus dimensions carry trailing
/// zero coordinates that never change, so only the first two are stored.
struct ModeIndex {
  int j1 = 0;
  int j2 = 0;

  constexpr auto operator<=>(const ModeIndex&) const = default;

  constexpr ModeIndex operator+(ModeIndex o) const { return {j1 + o.j1, j2 + o.j2}; }
  constexpr ModeIndex operator-(ModeIndex o) const { return {j1 - o.j1, j2 - o.j2}; }
  constexpr ModeIndex operator-() const { return {-j1, -j2}; }
};

constexpr std::int64_t norm_sq(ModeIndex j) {
  return std::int64_t{j.j1} * j.j1 + std::int64_t{j.j2} * j.j2;
}

constexpr std::int64_t dot(ModeIndex a, ModeIndex b) {
  return std::int64_t{a.j1} * b.j1 + std::int64_t{a.j2} * b.j2;
}

constexpr int max_abs(ModeIndex j) {
  const int a = j.j1 < 0 ? -j.j1 : j.j1;
  const int b = j.j2 < 0 ? -j.j2 : j.j2;
  return a > b ? a : b;
}

constexpr int l1_norm(ModeIndex j) {
  return (j.j1 < 0 ? -j.j1 : j.j1) + (j.j2 < 0 ? -j.j2 : j.j2);
}

std::ostream& operator<<(std::ostream& os, ModeIndex j);

struct ModeIndexHash {
  std::size_t operator()(ModeIndex j) const noexcept {
    return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(j.j1)) << 32) |
                                      std::uint32_t(j.j2));
  }
};

/// Ordered triple (k, l, m). Its target is k - l + m.
struct ResonantTriple {
  ModeIndex k;
  ModeIndex l;
  ModeIndex m;

  constexpr auto operator<=>(const ResonantTriple&) const = default;

  constexpr ModeIndex target() const { return k - l + m; }
};

using ModeSet = std::set<ModeIndex>;
using TripleSet = std::set<ResonantTriple>;

/// J_0, J_1, ... (pairwise disjoint) and their cumulative unions N^(k).
struct ModeSetSequence {
  std::vector<ModeSet> j_sets;
  std::vector<ModeSet> n_sets;
};

/// The five-mode datum support {(0,0), (+-1,0), (0,+-1)}.
ModeSet five_mode_support();

/// The closed square {|j| = 1}.
ModeSet unit_square_support();

/// Box max(|j1|,|j2|) <= radius, in lexicographic order.
ModeSet box(int radius);

/// Diamond |j1| + |j2| <= radius.
ModeSet diamond(int radius);

bool is_resonant(ModeIndex j, const ResonantTriple& t);

/// | |k - l + m|^2 - (|k|^2 - |l|^2 + |m|^2) |. Zero exactly on resonant
/// triples, otherwise an integer >= 1.
std::int64_t phase_gap(ModeIndex k, ModeIndex l, ModeIndex m);

/// All (k,l,m) in support^3 resonant with j. For each l the pair sum k + m
/// and the pair norm |k|^2 + |m|^2 are fixed, so one scan over k suffices.
TripleSet enumerate_resonances(ModeIndex j, const ModeSet& support);

/// Nondegenerate rectangles only: k != l and m != l.
bool is_rectangle(const ResonantTriple& t);

/// Combinatorial reachability: J_{k+1} are the targets outside N^(k) of
/// resonant triples drawn from N^(k).
ModeSetSequence generate_mode_sets(const ModeSet& j0, int n_iter);

/// N_*^(n): (0,+-2^p), (+-2^p,0) for n = 2p; (+-2^p,+-2^p) for n = 2p+1.
ModeSet extremal_modes(int n);

/// Generation index n with j in N_*^(n), or -1.
int extremal_generation(ModeIndex j);

/// The unordered pair {k, m} in N_*^(n-1) with j = k + m and k orthogonal to
/// m, i.e. (k, 0, m) is resonant with j. Returned with first < second.
std::pair<ModeIndex, ModeIndex> unique_generator(ModeIndex j, int n);

/// "j1 j2 | k1 k2 l1 l2 m1 m2" per triple, in set order.
std::string format_resonance_table(ModeIndex j, const TripleSet& triples);

/// "j1 j2" per mode, in set order.
std::string format_mode_set(const ModeSet& modes);

}  // namespace cascade
