#include "tcps/transport/packet.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <zlib.h>

#include "tcps/error.hpp"

namespace tcps {

namespace {

void put_u32(std::uint8_t* p, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}

void put_i64(std::uint8_t* p, std::int64_t v) {
  const auto u = static_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(u >> (8 * i));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
  return v;
}

std::int64_t get_i64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<std::int64_t>(v);
}

std::int64_t to_fixed(double v) {
  const double scaled = v * kFixedPointScale;
  if (!std::isfinite(scaled) || std::abs(scaled) > 9.0e18) {
    throw Error(Errc::InvalidArgument, "value out of fixed-point range");
  }
  return std::llround(scaled);
}

}  // namespace

std::uint32_t crc32_ieee(std::span<const std::uint8_t> bytes) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  return static_cast<std::uint32_t>(::crc32(crc, bytes.data(), static_cast<uInt>(bytes.size())));
}

std::vector<std::uint8_t> encode(const Packet& packet, std::size_t size_bytes, Rng& rng) {
  if (size_bytes < kMinPacketBytes) {
    throw Error(Errc::PacketTooSmall,
                "packet size " + std::to_string(size_bytes) + " < " + std::to_string(kMinPacketBytes));
  }
  std::vector<std::uint8_t> out(size_bytes);
  put_u32(&out[0], static_cast<std::uint32_t>(packet.kind));
  put_u32(&out[4], packet.seq);
  put_u32(&out[8], packet.epoch);
  put_i64(&out[12], to_fixed(packet.x));
  put_i64(&out[20], to_fixed(packet.value));
  const std::size_t crc_at = size_bytes - kChecksumBytes;
  for (std::size_t i = kHeaderBytes; i < crc_at; ++i) out[i] = static_cast<std::uint8_t>(rng() & 0xFF);
  put_u32(&out[crc_at], crc32_ieee(std::span(out).first(crc_at)));
  return out;
}

Packet decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kMinPacketBytes) {
    throw Error(Errc::TruncatedPacket, std::to_string(bytes.size()) + " bytes");
  }
  const std::size_t crc_at = bytes.size() - kChecksumBytes;
  if (crc32_ieee(bytes.first(crc_at)) != get_u32(&bytes[crc_at])) {
    throw Error(Errc::ChecksumMismatch, "CRC-32 does not match payload");
  }
  const std::uint32_t kind = get_u32(&bytes[0]);
  if (kind > static_cast<std::uint32_t>(PacketKind::Haptic)) {
    throw Error(Errc::MalformedPacket, "unknown packet kind " + std::to_string(kind));
  }
  Packet p;
  p.kind = static_cast<PacketKind>(kind);
  p.seq = get_u32(&bytes[4]);
  p.epoch = get_u32(&bytes[8]);
  p.x = static_cast<double>(get_i64(&bytes[12])) / kFixedPointScale;
  p.value = static_cast<double>(get_i64(&bytes[20])) / kFixedPointScale;
  return p;
}

Packet quantized(const Packet& packet) {
  Packet q = packet;
  q.x = static_cast<double>(to_fixed(packet.x)) / kFixedPointScale;
  q.value = static_cast<double>(to_fixed(packet.value)) / kFixedPointScale;
  return q;
}

}  // namespace tcps
