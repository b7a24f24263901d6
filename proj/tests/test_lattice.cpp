#include <doctest.h>

#include <sstream>

#include "cascade/lattice.hpp"
#include "cascade/reference.hpp"

using namespace cascade;

namespace {

ModeSet diamond_or_square(int k) {
  const int p = k / 2;
  return k % 2 == 0 ? diamond(1 << p) : box(1 << p);
}

}  // namespace

TEST_CASE("resonance: trivial pairs are always present") {
  const ModeSet s = box(2);
  const ModeIndex j{1, 1};
  const TripleSet t = enumerate_resonances(j, s);
  for (const ModeIndex k : s) {
    CHECK(t.contains({k, k, j}));
    CHECK(t.contains({j, k, k}));
  }
}

TEST_CASE("resonance: geometric enumeration equals brute force on small boxes") {
  for (int r : {1, 2, 3, 4}) {
    const ModeSet s = box(r);
    for (const ModeIndex j : box(r + 1)) {
      CAPTURE(r);
      CAPTURE(j.j1);
      CAPTURE(j.j2);
      CHECK(enumerate_resonances(j, s) == reference::brute_force_resonances(j, s));
    }
  }
}

TEST_CASE("resonance: every enumerated triple satisfies both relations") {
  const ModeSet s = diamond(4);
  for (const ModeIndex j : box(3))
    for (const auto& t : enumerate_resonances(j, s)) {
      CHECK(t.target() == j);
      CHECK(phase_gap(t.k, t.l, t.m) == 0);
      CHECK(is_resonant(j, t));
    }
}

TEST_CASE("resonance: rectangle corners") {
  // (1,0) - (0,0) + (0,1) = (1,1) with a right angle at l.
  const ResonantTriple t{{1, 0}, {0, 0}, {0, 1}};
  CHECK(is_resonant({1, 1}, t));
  CHECK(is_rectangle(t));
  CHECK_FALSE(is_rectangle({{1, 0}, {1, 0}, {0, 1}}));
  CHECK(phase_gap({1, 0}, {0, 0}, {1, 0}) == 2);
}

TEST_CASE("resonance: empty support gives empty set") {
  CHECK(enumerate_resonances({0, 0}, ModeSet{}).empty());
}

TEST_CASE("mode sets: J_1 is the unit diagonal square") {
  const auto seq = generate_mode_sets(five_mode_support(), 1);
  REQUIRE(seq.j_sets.size() == 2);
  CHECK(seq.j_sets[1] == ModeSet{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}});
}

TEST_CASE("mode sets: alternating diamonds and squares") {
  const auto seq = generate_mode_sets(five_mode_support(), 5);
  for (int k = 0; k <= 5; ++k) {
    CAPTURE(k);
    CHECK(seq.n_sets[std::size_t(k)] == diamond_or_square(k));
  }
  for (std::size_t a = 0; a < seq.j_sets.size(); ++a)
    for (std::size_t b = a + 1; b < seq.j_sets.size(); ++b)
      for (const ModeIndex j : seq.j_sets[a]) CHECK_FALSE(seq.j_sets[b].contains(j));
}

TEST_CASE("mode sets: the closed square generates nothing") {
  const auto seq = generate_mode_sets(unit_square_support(), 3);
  for (std::size_t k = 1; k < seq.j_sets.size(); ++k) CHECK(seq.j_sets[k].empty());
}

TEST_CASE("mode sets: bad input") {
  CHECK_THROWS_AS(generate_mode_sets(ModeSet{}, 1), Error);
  CHECK_THROWS_AS(generate_mode_sets(five_mode_support(), -1), Error);
}

TEST_CASE("extremal modes and generations") {
  CHECK(extremal_modes(0) == ModeSet{{0, 1}, {0, -1}, {1, 0}, {-1, 0}});
  CHECK(extremal_modes(3) == ModeSet{{2, 2}, {2, -2}, {-2, 2}, {-2, -2}});
  CHECK(extremal_generation({0, 4}) == 4);
  CHECK(extremal_generation({-4, 4}) == 5);
  CHECK(extremal_generation({1, 2}) == -1);
  CHECK(extremal_generation({0, 0}) == -1);
  CHECK(extremal_generation({0, 3}) == -1);
  for (int n = 0; n < 10; ++n)
    for (const ModeIndex j : extremal_modes(n)) CHECK(extremal_generation(j) == n);
}

TEST_CASE("extremal modes have a unique orthogonal generator") {
  for (int n = 1; n <= 7; ++n)
    for (const ModeIndex j : extremal_modes(n)) {
      const auto [k, m] = unique_generator(j, n);
      CHECK(k + m == j);
      CHECK(dot(k, m) == 0);
      CHECK(extremal_modes(n - 1).contains(k));
      CHECK(extremal_modes(n - 1).contains(m));
      CHECK(k < m);
    }
  CHECK_THROWS_AS(unique_generator({1, 2}, 1), Error);
  CHECK_THROWS_AS(unique_generator({1, 1}, 2), Error);
}

TEST_CASE("text formats") {
  std::ostringstream os;
  os << ModeIndex{-3, 4};
  CHECK(os.str() == "(-3,4)");
  const TripleSet t{{{1, 0}, {0, 0}, {0, 1}}};
  CHECK(format_resonance_table({1, 1}, t) == "1 1 | 1 0 0 0 0 1\n");
  CHECK(format_mode_set({{0, 1}, {-1, 0}}) == "-1 0\n0 1\n");
}
