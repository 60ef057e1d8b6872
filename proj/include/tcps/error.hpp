#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tcps {

enum class Errc {
  InvalidArgument,
  MalformedCurve,
  NoStepDetected,
  UnknownModality,
  NonPositiveInput,
  NegativeTau,
  PacketTooSmall,
  TruncatedPacket,
  ChecksumMismatch,
  MalformedPacket,
  ChannelClosed,
  Timeout,
  SocketError,
  Unreachable,
  NoGoodDelta,
  NonPositiveRiseTime,
  TooShort,
  UnknownSubcommand,
  ConfigParse,
  Io,
};

std::string_view to_string(Errc code);

/// Every failure raised by the toolkit carries one of the codes above so that
/// callers (and the CLI exit-code mapping) can branch without string matching.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace tcps
