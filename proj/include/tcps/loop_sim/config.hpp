#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "tcps/core/types.hpp"
#include "tcps/transport/packet.hpp"

namespace tcps {

/// Controller and plant constants for one step-response experiment.
struct LoopConfig {
  double kp = 1.0;
  double k1 = 1.0;
  double k2 = 1.25;
  double reference = 100.0;  // P_ref (haptic) or Y_ref (non-haptic)
  double delta_ms = 1.0;     // loop wait time
  double sweep = 100.0;      // X in cm (haptic) or total epochs (non-haptic)
  std::optional<double> step_at;
  std::size_t packet_size_B = kMinPacketBytes;
  Setting setting = Setting::Haptic;
  double robot_tau_ms = 0.0;
  std::uint64_t seed = 1;

  /// X/2 for the haptic sweep, epoch 50 for the non-haptic one, unless set.
  double step_location() const;
  /// Plant gain applied before the step divisor (k1; the camera plant has none).
  double plant_gain() const { return setting == Setting::Haptic ? k1 : 1.0; }
  double initial_y() const { return setting == Setting::Haptic ? 0.0 : reference; }
  /// First and one-past-last sweep coordinate.
  double first_coordinate() const { return setting == Setting::Haptic ? 0.0 : 1.0; }
  std::size_t loop_count() const;

  StepBand band() const { return {reference, k2, step_location()}; }

  /// Throws Error{InvalidArgument}: needs delta > 0, k2 > 1, kp*k1 > 0,
  /// a step inside the sweep, tau >= 0 and a legal packet size.
  void validate() const;
};

}  // namespace tcps
