#include "cascade/spectral_nls.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "cascade/resonant_system.hpp"

namespace cascade {

std::string to_string(Splitting s) { return s == Splitting::strang ? "strang" : "lie"; }
std::string to_string(Dealias d) { return d == Dealias::off ? "off" : "two_thirds"; }

Splitting parse_splitting(const std::string& s) {
  if (s == "strang") return Splitting::strang;
  if (s == "lie") return Splitting::lie;
  throw Error("unknown splitting '" + s + "' (expected strang|lie)");
}

Dealias parse_dealias(const std::string& s) {
  if (s == "off") return Dealias::off;
  if (s == "two_thirds") return Dealias::two_thirds;
  throw Error("unknown dealias '" + s + "' (expected off|two_thirds)");
}

void NlsParams::validate() const {
  if (lambda != 1 && lambda != -1) throw Error("NlsParams: lambda must be +1 or -1");
  if (!(coupling > 0.0)) throw Error("NlsParams: coupling must be positive");
  if (!(tau > 0.0)) throw Error("NlsParams: tau must be positive");
  if (!(t_final >= 0.0)) throw Error("NlsParams: t_final must be non-negative");
  if (k < 2 || k % 2 != 0) throw Error("NlsParams: K must be even and >= 2");
  if (record_stride < 1) throw Error("NlsParams: record_stride must be >= 1");
}

std::string NlsParams::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << lambda << ";coupling=" << coupling << ";tau=" << tau << ";t_final=" << t_final
     << ";k=" << k << ";record_stride=" << record_stride << ";splitting=" << to_string(splitting)
     << ";dealias=" << to_string(dealias);
  return os.str();
}

namespace {

// e^{-i|j|^2 dt} in long double. The tables are applied inside the
// extended-precision transform passes, so their modulus error (~1e-19) stays
// far below what a 1e5-step run can see in its mass.
std::vector<lcplx> dispersion_phase(int k, double dt) {
  std::vector<lcplx> phase(std::size_t(k) * k);
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      const ModeIndex j{signed_frequency(a, k), signed_frequency(b, k)};
      const long double theta = -static_cast<long double>(norm_sq(j)) * static_cast<long double>(dt);
      phase[std::size_t(a) * k + b] = {std::cos(theta), std::sin(theta)};
    }
  return phase;
}

bool nonlinear_kernel(std::span<cplx> u, double factor) {
  const auto n = static_cast<std::ptrdiff_t>(u.size());
  bool finite = true;
#pragma omp parallel for schedule(static) reduction(&& : finite)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const cplx v = u[std::size_t(i)];
    const double theta = -factor * (v.real() * v.real() + v.imag() * v.imag());
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    u[std::size_t(i)] = cplx{c * v.real() - s * v.imag(), s * v.real() + c * v.imag()};
    finite = finite && std::isfinite(theta);
  }
  return finite;
}

void multiply(std::span<cplx> data, std::span<const lcplx> phase) {
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const lcplx v = lcplx(data[std::size_t(i)].real(), data[std::size_t(i)].imag()) * phase[std::size_t(i)];
    data[std::size_t(i)] = cplx(double(v.real()), double(v.imag()));
  }
}

}  // namespace

void linear_step(Spectrum& s, double dt) { multiply(s.values(), dispersion_phase(s.k(), dt)); }

SpectralGrid linear_step(const SpectralGrid& g, double dt) {
  const FourierTransform2d fft(g.k());
  Spectrum s = fft.forward(g);
  linear_step(s, dt);
  return fft.inverse(s);
}

bool nonlinear_step(SpectralGrid& g, double dt, int lambda, double coupling) {
  return nonlinear_kernel(g.values(), double(lambda) * coupling * dt);
}

SplitStepSolver::SplitStepSolver(const NlsParams& params) : params_(params) {
  params_.validate();
  fft_ = std::make_unique<FourierTransform2d>(params_.k);
  half_phase_ = dispersion_phase(params_.k, 0.5 * params_.tau);
  full_phase_ = dispersion_phase(params_.k, params_.tau);
  const int k = params_.k;
  keep_.assign(std::size_t(k) * k, 1);
  if (params_.dealias == Dealias::two_thirds) {
    for (int a = 0; a < k; ++a)
      for (int b = 0; b < k; ++b) {
        const int fa = std::abs(signed_frequency(a, k));
        const int fb = std::abs(signed_frequency(b, k));
        keep_[std::size_t(a) * k + b] = (3 * fa <= k && 3 * fb <= k) ? 1 : 0;
      }
  }
}

void SplitStepSolver::step(Spectrum& state) const {
  if (state.k() != params_.k) throw Error("SplitStepSolver: grid size mismatch");
  const bool strang = params_.splitting == Splitting::strang;
  fft_->inverse(state.values(), strang ? half_phase_ : full_phase_);
  if (!nonlinear_kernel(state.values(), double(params_.lambda) * params_.coupling * params_.tau))
    throw BlowUpError("split-step: non-finite value in physical space (blow-up or instability)");
  if (strang)
    fft_->forward(state.values(), half_phase_);
  else
    fft_->forward(state.values());
  if (params_.dealias == Dealias::two_thirds) {
    auto v = state.values();
    for (std::size_t i = 0; i < v.size(); ++i)
      if (!keep_[i]) v[i] = cplx{};
  }
}

std::size_t ModeSeriesSet::index_of(ModeIndex j) const {
  for (std::size_t i = 0; i < modes.size(); ++i)
    if (modes[i] == j) return i;
  std::ostringstream msg;
  msg << "ModeSeriesSet: mode " << j << " not recorded";
  throw Error(msg.str());
}

double spectral_mass(const Spectrum& s) { return compensated_mass(s.values()); }

double alias_fraction(const Spectrum& s) {
  const int quarter = s.k() / 4;
  double high = 0.0;
  const auto v = s.values();
  for (std::size_t i = 0; i < v.size(); ++i)
    if (max_abs(s.mode(i)) > quarter) high += std::norm(v[i]);
  const double total = spectral_mass(s);
  return total > 0.0 ? high / total : 0.0;
}

Spectrum to_spectrum(int k, const AmplitudeField& a) {
  Spectrum s(k);
  for (const auto& [j, v] : a.amplitudes()) s.at(j) = v;
  return s;
}

EvolveResult evolve(const SpectralGrid& u0, const NlsParams& params, std::span<const ModeIndex> watch,
                    const SnapshotObserver& observer) {
  if (u0.k() != params.k) throw Error("evolve: datum grid size differs from params.k");
  const FourierTransform2d fft(u0.k());
  return evolve(fft.forward(u0), params, watch, observer);
}

EvolveResult evolve(const Spectrum& u0, const NlsParams& params, std::span<const ModeIndex> watch,
                    const SnapshotObserver& observer) {
  params.validate();
  if (u0.k() != params.k) throw Error("evolve: datum grid size differs from params.k");
  Spectrum probe(params.k);
  for (const ModeIndex j : watch)
    if (!probe.resolves(j)) {
      std::ostringstream msg;
      msg << "evolve: watch mode " << j << " not resolved by K=" << params.k;
      throw Error(msg.str());
    }

  const SplitStepSolver solver(params);
  EvolveResult out;
  out.series.modes.assign(watch.begin(), watch.end());
  out.series.values.resize(watch.size());
  out.series.noise_floor = 1e-13;
  Spectrum state = u0;

  const long long steps = params.t_final > 0.0 ? static_cast<long long>(std::ceil(params.t_final / params.tau - 1e-9)) : 0;
  out.steps = steps;
  double mass0 = 0.0;

  auto record = [&](double t) {
    out.series.times.push_back(t);
    for (std::size_t i = 0; i < watch.size(); ++i) out.series.values[i].push_back(state.at(watch[i]));
    const double m = spectral_mass(state);
    if (out.mass.empty()) mass0 = m;
    out.mass.push_back(m);
    if (mass0 > 0.0) out.max_relative_mass_drift = std::max(out.max_relative_mass_drift, std::abs(m - mass0) / mass0);
    out.max_alias_fraction = std::max(out.max_alias_fraction, alias_fraction(state));
    if (observer) observer(t, state);
  };

  record(0.0);
  for (long long step = 1; step <= steps; ++step) {
    solver.step(state);
    if (step % params.record_stride == 0 || step == steps) record(double(step) * params.tau);
  }
  out.final_state = std::move(state);
  return out;
}

static_assert(std::endian::native == std::endian::little, "checkpoint format is little-endian");

namespace {
constexpr char kCheckpointMagic[8] = {'N', 'L', 'S', 'C', 'K', 'P', 'T', '1'};
}

void write_checkpoint(const std::string& path, const SpectralGrid& g, double t, std::uint64_t params_hash) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("write_checkpoint: cannot open " + path);
  const std::uint32_t k = std::uint32_t(g.k());
  const std::uint32_t reserved = 0;
  os.write(kCheckpointMagic, sizeof kCheckpointMagic);
  os.write(reinterpret_cast<const char*>(&k), sizeof k);
  os.write(reinterpret_cast<const char*>(&reserved), sizeof reserved);
  os.write(reinterpret_cast<const char*>(&t), sizeof t);
  os.write(reinterpret_cast<const char*>(&params_hash), sizeof params_hash);
  os.write(reinterpret_cast<const char*>(g.values().data()), std::streamsize(g.values().size() * sizeof(cplx)));
  if (!os) throw Error("write_checkpoint: write failed for " + path);
}

Checkpoint read_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("read_checkpoint: cannot open " + path);
  char magic[8];
  std::uint32_t k = 0;
  std::uint32_t reserved = 0;
  Checkpoint c;
  is.read(magic, sizeof magic);
  is.read(reinterpret_cast<char*>(&k), sizeof k);
  is.read(reinterpret_cast<char*>(&reserved), sizeof reserved);
  is.read(reinterpret_cast<char*>(&c.t), sizeof c.t);
  is.read(reinterpret_cast<char*>(&c.params_hash), sizeof c.params_hash);
  if (!is || std::memcmp(magic, kCheckpointMagic, sizeof magic) != 0) throw Error("read_checkpoint: bad header in " + path);
  if (k < 2 || k % 2 != 0 || k > 65536) throw Error("read_checkpoint: bad grid size in " + path);
  c.grid = SpectralGrid(int(k));
  is.read(reinterpret_cast<char*>(c.grid.values().data()), std::streamsize(c.grid.values().size() * sizeof(cplx)));
  if (!is) throw Error("read_checkpoint: truncated payload in " + path);
  return c;
}

}  // namespace cascade
