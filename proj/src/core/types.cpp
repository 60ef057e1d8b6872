#include "tcps/core/types.hpp"

#include <string>

#include "tcps/error.hpp"

namespace tcps {

std::string_view to_string(Setting s) { return s == Setting::Haptic ? "haptic" : "non-haptic"; }

Setting setting_from_string(std::string_view s) {
  if (s == "haptic") return Setting::Haptic;
  if (s == "non-haptic" || s == "nonhaptic") return Setting::NonHaptic;
  throw Error(Errc::InvalidArgument, "unknown setting '" + std::string(s) + "'");
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::MalformedCurve: return "MalformedCurve";
    case Errc::NoStepDetected: return "NoStepDetected";
    case Errc::UnknownModality: return "UnknownModality";
    case Errc::NonPositiveInput: return "NonPositiveInput";
    case Errc::NegativeTau: return "NegativeTau";
    case Errc::PacketTooSmall: return "PacketTooSmall";
    case Errc::TruncatedPacket: return "TruncatedPacket";
    case Errc::ChecksumMismatch: return "ChecksumMismatch";
    case Errc::MalformedPacket: return "MalformedPacket";
    case Errc::ChannelClosed: return "ChannelClosed";
    case Errc::Timeout: return "Timeout";
    case Errc::SocketError: return "SocketError";
    case Errc::Unreachable: return "Unreachable";
    case Errc::NoGoodDelta: return "NoGoodDelta";
    case Errc::NonPositiveRiseTime: return "NonPositiveRiseTime";
    case Errc::TooShort: return "TooShort";
    case Errc::UnknownSubcommand: return "UnknownSubcommand";
    case Errc::ConfigParse: return "ConfigParse";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace tcps
