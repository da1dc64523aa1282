#include "pickands/constants.hpp"

#include "pickands/errors.hpp"

namespace pickands {

ConstantPolicy ConstantPolicy::shape() { return ConstantPolicy{}; }

ConstantPolicy ConstantPolicy::explicit_proof() {
  ConstantPolicy p;
  p.mode = ConstantMode::explicit_proof;
  p.theorem2_prefactor = 1.0 / 12.0;
  return p;
}

ConstantPolicy ConstantPolicy::calibrated() {
  using namespace calibrated_constants;
  ConstantPolicy p;
  p.mode = ConstantMode::calibrated;
  p.lemma1 = 1.0 / (kLemma1WorstRatio * kCalibrationSafety);
  p.lemma2 = 1.0 / (kLemma2WorstRatio * kCalibrationSafety);
  p.lemma2_max_H = kLemma2H;
  p.lemma3 = 1.0 / (kLemma3WorstRatio * kCalibrationSafety);
  p.theorem2_prefactor = 1.0 / 12.0;
  return p;
}

std::string_view to_string(ConstantMode mode) noexcept {
  switch (mode) {
    case ConstantMode::shape: return "shape";
    case ConstantMode::explicit_proof: return "explicit";
    case ConstantMode::calibrated: return "calibrated";
    case ConstantMode::custom: return "custom";
  }
  return "unknown";
}

ConstantMode parse_constant_mode(std::string_view text) {
  if (text == "shape") return ConstantMode::shape;
  if (text == "explicit") return ConstantMode::explicit_proof;
  if (text == "calibrated") return ConstantMode::calibrated;
  if (text == "custom") return ConstantMode::custom;
  throw PreconditionError("unknown constants mode: " + std::string(text));
}

ConstantPolicy policy_for(ConstantMode mode) {
  switch (mode) {
    case ConstantMode::explicit_proof: return ConstantPolicy::explicit_proof();
    case ConstantMode::calibrated: return ConstantPolicy::calibrated();
    case ConstantMode::shape:
    case ConstantMode::custom: break;
  }
  ConstantPolicy p = ConstantPolicy::shape();
  p.mode = mode;
  return p;
}

}  // namespace pickands
