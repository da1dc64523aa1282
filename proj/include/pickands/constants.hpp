#pragma once

#include <limits>
#include <string>
#include <string_view>

namespace pickands {

/// How the unspecified absolute constants behind the >> and big-Oh notation
/// are filled in.
///   shape      every >> constant is 1, big-Oh magnitude 1
///   explicit_proof  only constants that appear in the proof chain
///              (1/12, 1/40, the correction r/(u^2(1-r)))
///   calibrated lemma constants measured on a parameter grid and divided by
///              a safety factor; see calibrate_lemma_constants
enum class ConstantMode { shape, explicit_proof, calibrated, custom };

struct ConstantPolicy {
  ConstantMode mode = ConstantMode::shape;
  double lemma1 = 1.0;
  double lemma2 = 1.0;
  double lemma3 = 1.0;
  /// Largest H for which `lemma2` is valid.
  double lemma2_max_H = std::numeric_limits<double>::infinity();
  /// lemma1 applies once |b| sqrt(t) reaches this value.
  double lemma1_threshold = 3.0;
  /// Magnitude of the big-Oh term -c/(u^2 (1-r(j))) inside the Phi arguments.
  double big_oh_constant = 1.0;
  /// The >> constant multiplying n e^{-u^2/2}/u in the theorem2 product.
  double theorem2_prefactor = 1.0;

  static ConstantPolicy shape();
  static ConstantPolicy explicit_proof();
  static ConstantPolicy calibrated();
};

/// Values frozen from `calibrate_lemma_constants` on the default grid:
/// 1 / (worst observed ratio * kCalibrationSafety).
namespace calibrated_constants {
inline constexpr double kCalibrationSafety = 2.0;
inline constexpr double kLemma1WorstRatio = 1.1089487748827835;
inline constexpr double kLemma2WorstRatio = 1260.301818234831;
inline constexpr double kLemma2H = 3.0;
inline constexpr double kLemma3WorstRatio = 1.4838320215091119;
}  // namespace calibrated_constants

std::string_view to_string(ConstantMode mode) noexcept;
ConstantMode parse_constant_mode(std::string_view text);
ConstantPolicy policy_for(ConstantMode mode);

}  // namespace pickands
