#include "cascade/lattice.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <omp.h>

namespace cascade {

std::ostream& operator<<(std::ostream& os, ModeIndex j) {
  return os << '(' << j.j1 << ',' << j.j2 << ')';
}

ModeSet five_mode_support() {
  return {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}};
}

ModeSet unit_square_support() {
  return {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
}

ModeSet box(int radius) {
  ModeSet out;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b) out.insert({a, b});
  return out;
}

ModeSet diamond(int radius) {
  ModeSet out;
  for (int a = -radius; a <= radius; ++a)
    for (int b = -radius; b <= radius; ++b)
      if (l1_norm({a, b}) <= radius) out.insert({a, b});
  return out;
}

bool is_resonant(ModeIndex j, const ResonantTriple& t) {
  return t.target() == j &&
         norm_sq(t.k) - norm_sq(t.l) + norm_sq(t.m) == norm_sq(j);
}

std::int64_t phase_gap(ModeIndex k, ModeIndex l, ModeIndex m) {
  const std::int64_t kappa = norm_sq(k - l + m);
  const std::int64_t omega = norm_sq(k) - norm_sq(l) + norm_sq(m);
  return kappa > omega ? kappa - omega : omega - kappa;
}

bool is_rectangle(const ResonantTriple& t) { return t.k != t.l && t.m != t.l; }

TripleSet enumerate_resonances(ModeIndex j, const ModeSet& support) {
  const std::vector<ModeIndex> modes(support.begin(), support.end());
  const std::unordered_set<ModeIndex, ModeIndexHash> lookup(modes.begin(), modes.end());
  const auto n = static_cast<std::ptrdiff_t>(modes.size());
  std::vector<std::vector<ResonantTriple>> per_l(modes.size());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t il = 0; il < n; ++il) {
    const ModeIndex l = modes[il];
    const ModeIndex pair_sum = j + l;
    const std::int64_t pair_norm = norm_sq(j) + norm_sq(l);
    for (const ModeIndex k : modes) {
      const ModeIndex m = pair_sum - k;
      if (norm_sq(k) + norm_sq(m) != pair_norm) continue;
      if (lookup.contains(m)) per_l[il].push_back({k, l, m});
    }
  }

  TripleSet out;
  for (const auto& v : per_l) out.insert(v.begin(), v.end());
  return out;
}

namespace {

// Targets outside `current` of nondegenerate rectangles with all three
// source corners in `current`. The fourth corner m lies on the line through
// l orthogonal to k - l, so it is found by stepping along that line.
ModeSet next_generation(const ModeSet& current) {
  const std::vector<ModeIndex> modes(current.begin(), current.end());
  const std::unordered_set<ModeIndex, ModeIndexHash> lookup(modes.begin(), modes.end());
  int radius = 0;
  for (const ModeIndex j : modes) radius = std::max(radius, max_abs(j));

  const auto n = static_cast<std::ptrdiff_t>(modes.size());
  std::vector<ModeSet> per_l(modes.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t il = 0; il < n; ++il) {
    const ModeIndex l = modes[il];
    for (const ModeIndex k : modes) {
      if (k == l) continue;
      const ModeIndex d = k - l;
      const int g = std::gcd(d.j1, d.j2);
      const ModeIndex step{-d.j2 / g, d.j1 / g};
      // |l + s*step|_inf <= radius bounds s; the step has a nonzero
      // coordinate, so at most 2*radius+1 values survive.
      for (int s = -2 * radius; s <= 2 * radius; ++s) {
        if (s == 0) continue;
        const ModeIndex m{l.j1 + s * step.j1, l.j2 + s * step.j2};
        if (max_abs(m) > radius || !lookup.contains(m)) continue;
        const ModeIndex target = k - l + m;
        if (!lookup.contains(target)) per_l[il].insert(target);
      }
    }
  }

  ModeSet out;
  for (const auto& s : per_l) out.insert(s.begin(), s.end());
  return out;
}

}  // namespace

ModeSetSequence generate_mode_sets(const ModeSet& j0, int n_iter) {
  if (j0.empty()) throw Error("generate_mode_sets: empty initial set");
  if (n_iter < 0) throw Error("generate_mode_sets: negative iteration count");
  ModeSetSequence seq;
  seq.j_sets.push_back(j0);
  seq.n_sets.push_back(j0);
  for (int it = 0; it < n_iter; ++it) {
    ModeSet fresh = next_generation(seq.n_sets.back());
    ModeSet cumulative = seq.n_sets.back();
    cumulative.insert(fresh.begin(), fresh.end());
    seq.j_sets.push_back(std::move(fresh));
    seq.n_sets.push_back(std::move(cumulative));
  }
  return seq;
}

ModeSet extremal_modes(int n) {
  if (n < 0) throw Error("extremal_modes: negative generation");
  if (n >= 62) throw Error("extremal_modes: generation too large");
  const int p = n / 2;
  const int s = 1 << p;
  if (n % 2 == 0) return {{0, s}, {0, -s}, {s, 0}, {-s, 0}};
  return {{s, s}, {s, -s}, {-s, s}, {-s, -s}};
}

int extremal_generation(ModeIndex j) {
  const std::int64_t q = norm_sq(j);
  if (q == 0 || (q & (q - 1)) != 0) return -1;
  int n = 0;
  while ((std::int64_t{1} << n) < q) ++n;
  return extremal_modes(n).contains(j) ? n : -1;
}

std::pair<ModeIndex, ModeIndex> unique_generator(ModeIndex j, int n) {
  if (n < 1 || extremal_generation(j) != n) {
    std::ostringstream msg;
    msg << "unique_generator: " << j << " is not in N_*^(" << n << ")";
    throw Error(msg.str());
  }
  const ModeSet prev = extremal_modes(n - 1);
  std::vector<std::pair<ModeIndex, ModeIndex>> found;
  for (const ModeIndex k : prev)
    for (const ModeIndex m : prev)
      if (k < m && k + m == j && dot(k, m) == 0) found.emplace_back(k, m);
  if (found.size() != 1) throw Error("unique_generator: generator not unique");
  return found.front();
}

std::string format_resonance_table(ModeIndex j, const TripleSet& triples) {
  std::ostringstream os;
  for (const auto& t : triples) {
    os << j.j1 << ' ' << j.j2 << " | " << t.k.j1 << ' ' << t.k.j2 << ' ' << t.l.j1 << ' '
       << t.l.j2 << ' ' << t.m.j1 << ' ' << t.m.j2 << '\n';
  }
  return os.str();
}

std::string format_mode_set(const ModeSet& modes) {
  std::ostringstream os;
  for (const auto j : modes) os << j.j1 << ' ' << j.j2 << '\n';
  return os.str();
}

}  // namespace cascade
