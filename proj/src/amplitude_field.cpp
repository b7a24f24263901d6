#include "cascade/amplitude_field.hpp"

#include <sstream>

namespace cascade {

BoxIndexer::BoxIndexer(int radius) : radius_(radius), side_(2 * radius + 1) {
  if (radius < 0) throw Error("BoxIndexer: negative radius");
}

AmplitudeField::AmplitudeField(int truncation_radius) : radius_(truncation_radius) {
  if (truncation_radius < 0) throw Error("AmplitudeField: negative truncation radius");
}

void AmplitudeField::set(ModeIndex j, cplx value) {
  if (max_abs(j) > radius_) {
    std::ostringstream msg;
    msg << "AmplitudeField: mode " << j << " outside truncation box R=" << radius_;
    throw Error(msg.str());
  }
  amps_[j] = value;
}

cplx AmplitudeField::get(ModeIndex j) const {
  const auto it = amps_.find(j);
  return it == amps_.end() ? cplx{} : it->second;
}

ModeSet AmplitudeField::support() const {
  ModeSet out;
  for (const auto& [j, a] : amps_)
    if (a != cplx{}) out.insert(j);
  return out;
}

std::vector<cplx> AmplitudeField::to_dense(const BoxIndexer& box) const {
  std::vector<cplx> out(box.size());
  for (const auto& [j, a] : amps_)
    if (box.contains(j)) out[box.index(j)] = a;
  return out;
}

AmplitudeField AmplitudeField::from_dense(const BoxIndexer& box, std::span<const cplx> values) {
  if (values.size() != box.size()) throw Error("AmplitudeField::from_dense: size mismatch");
  AmplitudeField out(box.radius());
  for (std::size_t i = 0; i < values.size(); ++i) out.amps_.emplace_hint(out.amps_.end(), box.mode(i), values[i]);
  return out;
}

AmplitudeField five_mode_datum(int truncation_radius) {
  AmplitudeField a(truncation_radius);
  for (const ModeIndex j : five_mode_support()) a.set(j, 1.0);
  return a;
}

AmplitudeField nonresonant_square_datum(int truncation_radius) {
  AmplitudeField a(truncation_radius);
  for (const ModeIndex j : unit_square_support()) a.set(j, 1.0);
  return a;
}

}  // namespace cascade
