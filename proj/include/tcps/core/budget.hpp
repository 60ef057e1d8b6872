#pragma once

#include <set>
#include <string>
#include <string_view>

namespace tcps {

enum class Modality { Video, Audio, Haptic };

Modality modality_from_string(std::string_view name);
std::string_view to_string(Modality m);

struct RttBudget {
  Modality modality = Modality::Video;
  double max_rtt_ms = 0.0;
};

/// Maximum permissible positive synchronization error relative to video.
struct SyncErrorTable {
  double audio_ms = 45.0;
  double haptic_ms = 125.0;
};

/// Video loop budget: a 1 mm/ms hand must not drift 1 mm ahead of its image.
inline constexpr double kVideoRttMs = 1.0;

/// Maximum round trip per feedback modality: the video budget plus the
/// modality's tolerated lag behind video.
RttBudget rtt_budget(Modality modality, const SyncErrorTable& sync = {});

/// Largest kinematic-video RTT (ms) that keeps the perceived hand/robot
/// mismatch under 1 mm for a hand speed (m/s) and display zoom factor.
double max_rtt_kvl(double hand_speed_mps, double zoom = 1.0);

enum class Level { Low, Medium, High };
Level level_from_string(std::string_view name);

/// Control loops that must be evaluated for a scenario; "kvl" is the
/// kinematic-video loop and "khl" the kinematic-haptic loop.
std::set<std::string> critical_loops(Level hand_speed, Level stiffness);

}  // namespace tcps
