#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tcps/core/rng.hpp"

namespace tcps {

enum class PacketKind : std::uint32_t { Kinematic = 0, Haptic = 1 };

/// Kinematic command (operator -> teleoperator) or haptic/position feedback
/// (teleoperator -> operator). `value` is y for commands and P (or y') for
/// feedback.
struct Packet {
  PacketKind kind = PacketKind::Kinematic;
  std::uint32_t seq = 0;
  std::uint32_t epoch = 0;
  double x = 0.0;
  double value = 0.0;

  friend bool operator==(const Packet&, const Packet&) = default;
};

// Wire layout, all little-endian:
//   0  u32 kind
//   4  u32 seq
//   8  u32 epoch
//  12  i64 x * 1000
//  20  i64 value * 1000
//  28  padding (random bytes) up to size - 4
//  -4  u32 CRC-32 (IEEE, reflected polynomial 0xEDB88320) over bytes [0, size-4)
inline constexpr std::size_t kHeaderBytes = 28;
inline constexpr std::size_t kChecksumBytes = 4;
inline constexpr std::size_t kMinPacketBytes = kHeaderBytes + kChecksumBytes;
inline constexpr double kFixedPointScale = 1000.0;

/// Encodes to exactly `size_bytes` bytes. Padding bytes come from `rng`.
std::vector<std::uint8_t> encode(const Packet& packet, std::size_t size_bytes, Rng& rng);

/// Throws Error{TruncatedPacket} below the minimum size,
/// Error{ChecksumMismatch} on CRC failure and Error{MalformedPacket} for an
/// unknown kind.
Packet decode(std::span<const std::uint8_t> bytes);

/// The packet as it reads back after a trip through the fixed-point fields.
Packet quantized(const Packet& packet);

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes);

}  // namespace tcps
