#include "tcps/core/budget.hpp"

#include <cmath>

#include "tcps/error.hpp"

namespace tcps {

Modality modality_from_string(std::string_view name) {
  if (name == "video") return Modality::Video;
  if (name == "audio") return Modality::Audio;
  if (name == "haptic") return Modality::Haptic;
  throw Error(Errc::UnknownModality, std::string(name));
}

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::Video: return "video";
    case Modality::Audio: return "audio";
    case Modality::Haptic: return "haptic";
  }
  return "?";
}

RttBudget rtt_budget(Modality modality, const SyncErrorTable& sync) {
  switch (modality) {
    case Modality::Video: return {modality, kVideoRttMs};
    case Modality::Audio: return {modality, kVideoRttMs + sync.audio_ms};
    case Modality::Haptic: return {modality, kVideoRttMs + sync.haptic_ms};
  }
  throw Error(Errc::UnknownModality, "modality out of range");
}

double max_rtt_kvl(double hand_speed_mps, double zoom) {
  if (!(hand_speed_mps > 0.0) || !(zoom > 0.0) || zoom > 1.0 || !std::isfinite(hand_speed_mps)) {
    throw Error(Errc::NonPositiveInput, "need hand speed > 0 and 0 < zoom <= 1");
  }
  // 1 m/s == 1 mm/ms, so 1 mm of tolerated drift buys 1/(v*zoom) ms.
  return 1.0 / (hand_speed_mps * zoom);
}

Level level_from_string(std::string_view name) {
  if (name == "low") return Level::Low;
  if (name == "medium") return Level::Medium;
  if (name == "high") return Level::High;
  throw Error(Errc::InvalidArgument, "unknown level '" + std::string(name) + "'");
}

std::set<std::string> critical_loops(Level hand_speed, Level stiffness) {
  if (hand_speed == Level::High && stiffness == Level::High) return {"kvl", "khl"};
  if (hand_speed == Level::High && stiffness == Level::Low) return {"kvl"};
  if (hand_speed == Level::Medium && stiffness == Level::High) return {"khl"};
  return {"kvl"};
}

}  // namespace tcps
