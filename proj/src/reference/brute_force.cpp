#include <vector>

#include "cascade/reference.hpp"

namespace cascade::reference {

namespace {

bool resonant(ModeIndex j, ModeIndex k, ModeIndex l, ModeIndex m) {
  return k - l + m == j && norm_sq(j) == norm_sq(k) - norm_sq(l) + norm_sq(m);
}

}  // namespace

TripleSet brute_force_resonances(ModeIndex j, const ModeSet& support) {
  TripleSet out;
  for (const ModeIndex k : support)
    for (const ModeIndex l : support)
      for (const ModeIndex m : support)
        if (resonant(j, k, l, m)) out.insert({k, l, m});
  return out;
}

std::map<ModeIndex, TripleSet> brute_force_resonance_table(const ModeSet& support, const ModeSet& targets) {
  std::map<ModeIndex, TripleSet> out;
  for (const ModeIndex j : targets) out[j];
  for (const ModeIndex k : support)
    for (const ModeIndex l : support)
      for (const ModeIndex m : support) {
        const ModeIndex j = k - l + m;
        if (norm_sq(j) != norm_sq(k) - norm_sq(l) + norm_sq(m)) continue;
        const auto it = out.find(j);
        if (it != out.end()) it->second.insert({k, l, m});
      }
  return out;
}

std::vector<cplx> direct_rhs(const BoxIndexer& box, std::span<const cplx> a, int lambda) {
  if (a.size() != box.size()) throw Error("direct_rhs: size mismatch");
  std::vector<cplx> out(box.size());
  const cplx factor{0.0, -double(lambda)};
  for (std::size_t ij = 0; ij < box.size(); ++ij) {
    const ModeIndex j = box.mode(ij);
    cplx sum{};
    for (std::size_t ik = 0; ik < box.size(); ++ik)
      for (std::size_t il = 0; il < box.size(); ++il) {
        const ModeIndex k = box.mode(ik);
        const ModeIndex l = box.mode(il);
        const ModeIndex m = j - k + l;
        if (!box.contains(m) || !resonant(j, k, l, m)) continue;
        sum += a[ik] * std::conj(a[il]) * a[box.index(m)];
      }
    out[ij] = factor * sum;
  }
  return out;
}

void serial_rhs(const ResonantSystem& system, std::span<const cplx> a, std::span<cplx> out) {
  if (a.size() != system.size() || out.size() != system.size()) throw Error("serial_rhs: size mismatch");
  double mass = 0.0;
  for (const cplx v : a) mass += std::norm(v);
  const cplx factor{0.0, -double(system.lambda())};
  for (std::size_t j = 0; j < system.size(); ++j) {
    cplx sum = (2.0 * mass - std::norm(a[j])) * a[j];
    for (const TermIndex& t : system.rectangles(j)) sum += a[t.k] * std::conj(a[t.l]) * a[t.m];
    out[j] = factor * sum;
  }
}

namespace {

using boost::multiprecision::cpp_int;

GaussianInteger times_conj_times(const GaussianInteger& x, const GaussianInteger& y, const GaussianInteger& z) {
  // x * conj(y)
  const cpp_int pr = x.re * y.re + x.im * y.im;
  const cpp_int pi = x.im * y.re - x.re * y.im;
  return {pr * z.re - pi * z.im, pr * z.im + pi * z.re};
}

}  // namespace

TaylorSeriesOracle::TaylorSeriesOracle(const std::map<ModeIndex, GaussianInteger>& datum, int lambda, int order,
                                       int radius)
    : order_(order) {
  if (lambda != 1 && lambda != -1) throw Error("TaylorSeriesOracle: lambda must be +1 or -1");
  if (order < 0) throw Error("TaylorSeriesOracle: negative order");
  const BoxIndexer box(radius);
  for (const auto& [j, v] : datum) {
    if (!box.contains(j)) throw Error("TaylorSeriesOracle: datum outside the box");
    if (!v.is_zero()) coeffs_[j].assign(std::size_t(order) + 1, GaussianInteger{});
    if (!v.is_zero()) coeffs_[j][0] = v;
  }

  std::vector<cpp_int> fact(std::size_t(order) + 1, 1);
  for (int p = 1; p <= order; ++p) fact[std::size_t(p)] = fact[std::size_t(p) - 1] * p;

  for (int p = 0; p < order; ++p) {
    std::vector<ModeIndex> live;
    for (const auto& [j, v] : coeffs_) live.push_back(j);
    std::map<ModeIndex, GaussianInteger> next;
    for (const ModeIndex k : live)
      for (const ModeIndex l : live)
        for (const ModeIndex m : live) {
          const ModeIndex j = k - l + m;
          if (!box.contains(j) || norm_sq(j) != norm_sq(k) - norm_sq(l) + norm_sq(m)) continue;
          const auto& bk = coeffs_.at(k);
          const auto& bl = coeffs_.at(l);
          const auto& bm = coeffs_.at(m);
          GaussianInteger acc;
          for (int q = 0; q <= p; ++q) {
            if (bk[std::size_t(q)].is_zero()) continue;
            for (int r = 0; q + r <= p; ++r) {
              const int s = p - q - r;
              if (bl[std::size_t(r)].is_zero() || bm[std::size_t(s)].is_zero()) continue;
              const cpp_int multinomial = fact[std::size_t(p)] / (fact[std::size_t(q)] * fact[std::size_t(r)] *
                                                                   fact[std::size_t(s)]);
              const GaussianInteger t =
                  times_conj_times(bk[std::size_t(q)], bl[std::size_t(r)], bm[std::size_t(s)]);
              acc.re += multinomial * t.re;
              acc.im += multinomial * t.im;
            }
          }
          if (acc.is_zero()) continue;
          auto& slot = next[j];
          slot.re += acc.re;
          slot.im += acc.im;
        }
    // B_{p+1} = -i lambda * sum
    for (auto& [j, v] : next) {
      if (v.is_zero()) continue;
      auto& series = coeffs_[j];
      if (series.empty()) series.assign(std::size_t(order) + 1, GaussianInteger{});
      series[std::size_t(p) + 1] = GaussianInteger{lambda * v.im, -lambda * v.re};
    }
  }
}

const GaussianInteger& TaylorSeriesOracle::scaled(ModeIndex j, int p) const {
  if (p < 0 || p > order_) throw Error("TaylorSeriesOracle: order out of range");
  const auto it = coeffs_.find(j);
  return it == coeffs_.end() ? zero_ : it->second[std::size_t(p)];
}

int TaylorSeriesOracle::first_order(ModeIndex j) const {
  const auto it = coeffs_.find(j);
  if (it == coeffs_.end()) return -1;
  for (int p = 0; p <= order_; ++p)
    if (!it->second[std::size_t(p)].is_zero()) return p;
  return -1;
}

ModeSet TaylorSeriesOracle::support() const {
  ModeSet out;
  for (const auto& [j, v] : coeffs_)
    for (const auto& c : v)
      if (!c.is_zero()) {
        out.insert(j);
        break;
      }
  return out;
}

}  // namespace cascade::reference
