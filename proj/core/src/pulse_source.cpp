// SPDX-License-Identifier: Apache-2.0
#include "qkdsim/pulse_source.hpp"

#include <cmath>
#include <ostream>

#include "qkdsim/errors.hpp"

namespace qkd {

namespace {

bool is_canonical_split(const std::array<double, kNumClasses>& probs) {
  return std::abs(probs[0] - 0.25) < 1e-12 && std::abs(probs[1] - 0.25) < 1e-12 &&
         std::abs(probs[2] - 0.5) < 1e-12;
}

}  // namespace

PulsePlan make_pulse_plan(const ProtocolParams& params, std::int64_t slot_index,
                          IntensityClass cls, std::optional<Polarization> pol) {
  if (cls == IntensityClass::Vacuum && pol.has_value()) {
    throw ValidationError("pulse plan: vacuum pulses carry no polarization");
  }
  if (cls != IntensityClass::Vacuum && !pol.has_value()) {
    throw ValidationError("pulse plan: non-vacuum pulses require a polarization");
  }
  return PulsePlan{slot_index, cls, pol, params.intensity_of(cls)};
}

PulsePlan encode_pulse(const ProtocolParams& params, std::int64_t slot_index,
                       unsigned nibble) {
  nibble &= 0xF;
  unsigned class_bits = nibble >> 2;
  IntensityClass cls = class_bits == 0   ? IntensityClass::Vacuum
                       : class_bits == 1 ? IntensityClass::Decoy
                                         : IntensityClass::Signal;
  std::optional<Polarization> pol;
  if (cls != IntensityClass::Vacuum) {
    pol = static_cast<Polarization>(nibble & 0x3);
  }
  return PulsePlan{slot_index, cls, pol, params.intensity_of(cls)};
}

SourceStream::SourceStream(const ProtocolParams& params, std::uint64_t seed,
                           std::int64_t block_size)
    : params_(&params),
      stream_(seed, rng::StreamPurpose::Source),
      block_size_(block_size),
      nibble_path_(is_canonical_split(params.class_probs)) {
  if (block_size < 0) {
    throw ValidationError("source stream: block size must be >= 0");
  }
}

unsigned SourceStream::nibble_at(std::int64_t slot_index) const {
  // 64 nibbles per generator block: 4 words, 16 nibbles each.
  auto slot = static_cast<std::uint64_t>(slot_index);
  rng::Block block = stream_.block(slot >> 6);
  std::uint64_t word = block[(slot >> 4) & 0x3];
  return static_cast<unsigned>((word >> ((slot & 0xF) * 4)) & 0xF);
}

PulsePlan SourceStream::plan_at(std::int64_t slot_index) const {
  if (nibble_path_) {
    return encode_pulse(*params_, slot_index, nibble_at(slot_index));
  }
  // General split: lane 0 picks the class, lane 1 the state.
  rng::Block block = stream_.block(static_cast<std::uint64_t>(slot_index), 1);
  double u = rng::to_unit(block[0]);
  IntensityClass cls;
  if (u < params_->class_probs[0]) {
    cls = IntensityClass::Vacuum;
  } else if (u < params_->class_probs[0] + params_->class_probs[1]) {
    cls = IntensityClass::Decoy;
  } else {
    cls = IntensityClass::Signal;
  }
  std::optional<Polarization> pol;
  if (cls != IntensityClass::Vacuum) {
    pol = static_cast<Polarization>(block[1] & 0x3);
  }
  return PulsePlan{slot_index, cls, pol, params_->intensity_of(cls)};
}

std::vector<PulsePlan> SourceStream::generate_block(std::int64_t block_index) const {
  if (block_index < 0) {
    throw ValidationError("source stream: block index must be >= 0");
  }
  std::vector<PulsePlan> plans;
  plans.reserve(static_cast<std::size_t>(block_size_));
  std::int64_t first = block_index * block_size_;
  for (std::int64_t i = 0; i < block_size_; ++i) {
    plans.push_back(plan_at(first + i));
  }
  return plans;
}

ClassHistogram class_histogram(std::span<const PulsePlan> plans) {
  ClassHistogram h;
  for (const PulsePlan& plan : plans) {
    int k = static_cast<int>(plan.cls);
    ++h.per_class[k];
    if (plan.polarization.has_value()) {
      ++h.per_polarization[k][static_cast<int>(*plan.polarization)];
    }
    ++h.total;
  }
  return h;
}

void write_plan_dump(std::ostream& out, std::span<const PulsePlan> plans) {
  for (const PulsePlan& plan : plans) {
    out << plan.slot_index << ',' << to_string(plan.cls) << ',';
    if (plan.polarization.has_value()) {
      out << to_string(*plan.polarization);
    } else {
      out << '-';
    }
    out << '\n';
  }
}

}  // namespace qkd
