#include "cascade/resonant_system.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace cascade {

namespace {

// Signed coordinate permutation taking a target into 0 <= j2 <= j1.
struct Fold {
  int s1 = 1;
  int s2 = 1;
  bool swap = false;

  explicit Fold(ModeIndex j) {
    s1 = j.j1 < 0 ? -1 : 1;
    s2 = j.j2 < 0 ? -1 : 1;
    swap = s1 * j.j1 < s2 * j.j2;
  }

  ModeIndex operator()(ModeIndex x) const {
    const ModeIndex y{s1 * x.j1, s2 * x.j2};
    return swap ? ModeIndex{y.j2, y.j1} : y;
  }
};

struct PendingTerm {
  std::uint32_t target;
  TermIndex term;
};

}  // namespace

double compensated_mass(std::span<const cplx> a) {
  double sum = 0.0;
  double carry = 0.0;
  for (const cplx& v : a) {
    const double x = v.real() * v.real() + v.imag() * v.imag();
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  return sum + carry;
}

double l1_norm(std::span<const cplx> a) {
  double s = 0.0;
  for (const cplx& v : a) s += std::abs(v);
  return s;
}

ResonantSystem::ResonantSystem(int radius, int lambda) : box_(radius), lambda_(lambda) {
  if (lambda != 1 && lambda != -1) throw Error("ResonantSystem: lambda must be +1 or -1");
  const auto n = static_cast<std::ptrdiff_t>(box_.size());
  std::vector<std::vector<PendingTerm>> inside(box_.size());
  std::vector<std::vector<TermIndex>> outside(box_.size());

#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t il = 0; il < n; ++il) {
    const ModeIndex l = box_.mode(std::size_t(il));
    for (std::size_t ik = 0; ik < box_.size(); ++ik) {
      const ModeIndex k = box_.mode(ik);
      if (k == l) continue;
      const ModeIndex d = k - l;
      const int g = std::gcd(d.j1, d.j2);
      const ModeIndex step{-d.j2 / g, d.j1 / g};
      for (int s = -2 * radius; s <= 2 * radius; ++s) {
        if (s == 0) continue;
        const ModeIndex m{l.j1 + s * step.j1, l.j2 + s * step.j2};
        if (!box_.contains(m)) continue;
        const TermIndex term{std::uint32_t(ik), std::uint32_t(il), std::uint32_t(box_.index(m))};
        const ModeIndex target = k - l + m;
        if (box_.contains(target))
          inside[il].push_back({std::uint32_t(box_.index(target)), term});
        else
          outside[il].push_back(term);
      }
    }
  }

  offsets_.assign(box_.size() + 1, 0);
  for (const auto& v : inside)
    for (const auto& p : v) ++offsets_[p.target + 1];
  std::partial_sum(offsets_.begin(), offsets_.end(), offsets_.begin());
  terms_.resize(offsets_.back());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& v : inside)
    for (const auto& p : v) terms_[fill[p.target]++] = p.term;
  for (const auto& v : outside) leaks_.insert(leaks_.end(), v.begin(), v.end());

#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    const Fold fold(box_.mode(std::size_t(j)));
    auto key = [&](const TermIndex& t) {
      return std::tuple{fold(box_.mode(t.k)), fold(box_.mode(t.l)), fold(box_.mode(t.m))};
    };
    std::sort(terms_.begin() + std::ptrdiff_t(offsets_[j]), terms_.begin() + std::ptrdiff_t(offsets_[j + 1]),
              [&](const TermIndex& a, const TermIndex& b) { return key(a) < key(b); });
  }
}

std::span<const TermIndex> ResonantSystem::rectangles(std::size_t j) const {
  return std::span<const TermIndex>(terms_).subspan(offsets_[j], offsets_[j + 1] - offsets_[j]);
}

void ResonantSystem::rhs(std::span<const cplx> a, std::span<cplx> out) const {
  if (a.size() != size() || out.size() != size()) throw Error("ResonantSystem::rhs: size mismatch");
  const double two_mass = 2.0 * compensated_mass(a);
  const double lam = lambda_;
  const auto n = static_cast<std::ptrdiff_t>(size());

#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double sr = 0.0;
    double si = 0.0;
    for (std::size_t t = offsets_[j]; t < offsets_[j + 1]; ++t) {
      const TermIndex& term = terms_[t];
      const cplx ak = a[term.k];
      const cplx al = a[term.l];
      const cplx am = a[term.m];
      // a_k * conj(a_l) * a_m
      const double pr = ak.real() * al.real() + ak.imag() * al.imag();
      const double pi = ak.imag() * al.real() - ak.real() * al.imag();
      sr += pr * am.real() - pi * am.imag();
      si += pr * am.imag() + pi * am.real();
    }
    const cplx aj = a[std::size_t(j)];
    const double self = aj.real() * aj.real() + aj.imag() * aj.imag();
    const double wr = (two_mass - self) * aj.real() + sr;
    const double wi = (two_mass - self) * aj.imag() + si;
    // -i * lambda * w
    out[std::size_t(j)] = cplx{lam * wi, -lam * wr};
  }
}

double ResonantSystem::leak_magnitude(std::span<const cplx> a) const {
  double worst = 0.0;
  for (const TermIndex& t : leaks_) worst = std::max(worst, std::abs(a[t.k]) * std::abs(a[t.l]) * std::abs(a[t.m]));
  return worst;
}

ConservedQuantities ResonantSystem::conserved(std::span<const cplx> a) const {
  ConservedQuantities q;
  q.mass = compensated_mass(a);
  std::vector<cplx> da(size());
  rhs(a, da);
  double h0 = 0.0;
  double z = 0.0;
  for (std::size_t j = 0; j < size(); ++j) {
    h0 += double(norm_sq(box_.mode(j))) * std::norm(a[j]);
    // da_j = -i lambda S_j, so lambda S_j = i da_j.
    const cplx lambda_sum = cplx{0.0, 1.0} * da[j];
    z += (std::conj(a[j]) * lambda_sum).real();
  }
  q.h0 = h0;
  q.z = 0.5 * z;
  return q;
}

namespace {

int enclosing_radius(const AmplitudeField& a) {
  if (a.truncation_radius() != AmplitudeField::kUnbounded) return a.truncation_radius();
  int r = 0;
  for (const auto& [j, v] : a.amplitudes()) r = std::max(r, max_abs(j));
  // every target of a triple from the support lies within 3r
  return 3 * r;
}

}  // namespace

AmplitudeField rhs(const AmplitudeField& a, int lambda) {
  const ResonantSystem system(enclosing_radius(a), lambda);
  const auto dense = a.to_dense(system.box());
  if (system.leak_magnitude(dense) > 0.0)
    throw TruncationLeak("rhs: a resonant rectangle inside the support targets a mode outside the truncation box");
  std::vector<cplx> out(system.size());
  system.rhs(dense, out);
  AmplitudeField result(a.truncation_radius());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const ModeIndex j = system.box().mode(i);
    if (out[i] != cplx{} || a.contains(j)) result.set(j, out[i]);
  }
  return result;
}

ConservedQuantities conserved_quantities(const AmplitudeField& a, int lambda) {
  const ResonantSystem system(enclosing_radius(a), lambda);
  return system.conserved(a.to_dense(system.box()));
}

AmplitudeField Trajectory::field(std::size_t snapshot) const {
  return AmplitudeField::from_dense(BoxIndexer(radius), states.at(snapshot));
}

cplx Trajectory::value(std::size_t snapshot, ModeIndex j) const {
  const BoxIndexer box(radius);
  if (!box.contains(j)) return {};
  return states.at(snapshot)[box.index(j)];
}

Trajectory integrate(const ResonantSystem& system, const AmplitudeField& a0,
                     const IntegrateOptions& opts) {
  if (!(opts.dt > 0.0) || !(opts.t_final > 0.0)) throw Error("integrate: dt and t_final must be positive");
  if (opts.stride < 1) throw Error("integrate: stride must be >= 1");
  for (const auto& [j, v] : a0.amplitudes()) {
    if (!system.box().contains(j) && v != cplx{}) {
      std::ostringstream msg;
      msg << "integrate: initial mode " << j << " outside truncation box R=" << system.radius();
      throw TruncationLeak(msg.str());
    }
  }

  const std::size_t n = system.size();
  std::vector<cplx> a = a0.to_dense(system.box());
  std::vector<cplx> k1(n), k2(n), k3(n), k4(n), stage(n);
  const double initial_l1 = l1_norm(a);
  const auto steps = static_cast<long long>(std::ceil(opts.t_final / opts.dt - 1e-9));
  const double dt = opts.dt;

  Trajectory traj;
  traj.radius = system.radius();
  traj.times.push_back(0.0);
  traj.states.push_back(a);

  auto check_leak = [&](double t) {
    const double leak = system.leak_magnitude(a);
    if (leak > opts.leak_tolerance) {
      std::ostringstream msg;
      msg << "integrate: truncation leak " << leak << " > " << opts.leak_tolerance << " at t=" << t
          << " (box R=" << system.radius() << ")";
      throw TruncationLeak(msg.str());
    }
  };
  check_leak(0.0);

  for (long long step = 1; step <= steps; ++step) {
    system.rhs(a, k1);
    for (std::size_t i = 0; i < n; ++i) stage[i] = a[i] + (0.5 * dt) * k1[i];
    system.rhs(stage, k2);
    for (std::size_t i = 0; i < n; ++i) stage[i] = a[i] + (0.5 * dt) * k2[i];
    system.rhs(stage, k3);
    for (std::size_t i = 0; i < n; ++i) stage[i] = a[i] + dt * k3[i];
    system.rhs(stage, k4);
    for (std::size_t i = 0; i < n; ++i)
      a[i] += (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);

    const double t = double(step) * dt;
    const double l1 = l1_norm(a);
    if (!std::isfinite(l1) || l1 > 10.0 * initial_l1) {
      std::ostringstream msg;
      msg << "integrate: l1 norm " << l1 << " exceeds 10x initial " << initial_l1 << " at t=" << t;
      throw DivergenceError(msg.str());
    }
    if (step % opts.stride == 0 || step == steps) {
      check_leak(t);
      traj.times.push_back(t);
      traj.states.push_back(a);
    }
  }
  return traj;
}

}  // namespace cascade
