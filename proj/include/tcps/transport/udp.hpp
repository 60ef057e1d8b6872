#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <netinet/in.h>

namespace tcps {

struct Endpoint {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;

  /// Parses "host:port".
  static Endpoint parse(const std::string& text);
  std::string str() const { return host + ":" + std::to_string(port); }
};

struct Datagram {
  std::vector<std::uint8_t> bytes;
  sockaddr_in from{};
};

/// IPv4 datagram socket, one packet per datagram. Send and receive may be
/// called concurrently from different threads (one loop per direction).
class DatagramSocket {
 public:
  explicit DatagramSocket(const Endpoint& local);
  ~DatagramSocket();
  DatagramSocket(DatagramSocket&& other) noexcept;
  DatagramSocket& operator=(DatagramSocket&& other) noexcept;
  DatagramSocket(const DatagramSocket&) = delete;
  DatagramSocket& operator=(const DatagramSocket&) = delete;

  /// Port actually bound (useful after binding port 0).
  std::uint16_t local_port() const;

  void send_to(std::span<const std::uint8_t> bytes, const sockaddr_in& to) const;
  void send_to(std::span<const std::uint8_t> bytes, const Endpoint& to) const;

  /// Waits up to `deadline` for a datagram; nullopt on expiry.
  std::optional<Datagram> receive(std::chrono::microseconds deadline) const;
  std::optional<Datagram> try_receive() const { return receive(std::chrono::microseconds(0)); }

  static sockaddr_in resolve(const Endpoint& ep);

 private:
  int fd_ = -1;
};

}  // namespace tcps
