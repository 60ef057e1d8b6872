#include "tcps/transport/udp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <utility>

#include "tcps/error.hpp"

namespace tcps {

namespace {

constexpr std::size_t kMaxDatagram = 65536;

[[noreturn]] void fail(const std::string& what) {
  throw Error(Errc::SocketError, what + ": " + std::strerror(errno));
}

}  // namespace

Endpoint Endpoint::parse(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos || colon + 1 >= text.size()) {
    throw Error(Errc::InvalidArgument, "endpoint '" + text + "' is not host:port");
  }
  Endpoint ep;
  ep.host = text.substr(0, colon);
  try {
    const int port = std::stoi(text.substr(colon + 1));
    if (port < 0 || port > 65535) throw std::out_of_range("port");
    ep.port = static_cast<std::uint16_t>(port);
  } catch (const std::exception&) {
    throw Error(Errc::InvalidArgument, "endpoint '" + text + "' has a bad port");
  }
  return ep;
}

sockaddr_in DatagramSocket::resolve(const Endpoint& ep) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(ep.port);
  if (ep.host.empty() || ep.host == "0.0.0.0") {
    addr.sin_addr.s_addr = htonl(INADDR_ANY);
    return addr;
  }
  if (inet_pton(AF_INET, ep.host.c_str(), &addr.sin_addr) == 1) return addr;

  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(ep.host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) {
    throw Error(Errc::SocketError, "cannot resolve " + ep.host);
  }
  addr.sin_addr = reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr;
  freeaddrinfo(res);
  return addr;
}

DatagramSocket::DatagramSocket(const Endpoint& local) {
  fd_ = ::socket(AF_INET, SOCK_DGRAM, 0);
  if (fd_ < 0) fail("socket");
  const sockaddr_in addr = resolve(local);
  if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0) {
    ::close(fd_);
    fd_ = -1;
    fail("bind " + local.str());
  }
}

DatagramSocket::~DatagramSocket() {
  if (fd_ >= 0) ::close(fd_);
}

DatagramSocket::DatagramSocket(DatagramSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

DatagramSocket& DatagramSocket::operator=(DatagramSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

std::uint16_t DatagramSocket::local_port() const {
  sockaddr_in addr{};
  socklen_t len = sizeof addr;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0) fail("getsockname");
  return ntohs(addr.sin_port);
}

void DatagramSocket::send_to(std::span<const std::uint8_t> bytes, const sockaddr_in& to) const {
  const auto n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&to), sizeof to);
  if (n < 0) fail("sendto");
}

void DatagramSocket::send_to(std::span<const std::uint8_t> bytes, const Endpoint& to) const {
  send_to(bytes, resolve(to));
}

std::optional<Datagram> DatagramSocket::receive(std::chrono::microseconds deadline) const {
  pollfd pfd{fd_, POLLIN, 0};
  const auto us = std::max<std::int64_t>(0, deadline.count());
  const timespec ts{static_cast<time_t>(us / 1000000), static_cast<long>(us % 1000000) * 1000};
  const int ready = ::ppoll(&pfd, 1, &ts, nullptr);
  if (ready < 0) {
    if (errno == EINTR) return std::nullopt;
    fail("poll");
  }
  if (ready == 0) return std::nullopt;

  Datagram d;
  d.bytes.resize(kMaxDatagram);
  socklen_t len = sizeof d.from;
  const auto n = ::recvfrom(fd_, d.bytes.data(), d.bytes.size(), MSG_DONTWAIT,
                            reinterpret_cast<sockaddr*>(&d.from), &len);
  if (n < 0) {
    if (errno == EAGAIN || errno == EWOULDBLOCK) return std::nullopt;
    fail("recvfrom");
  }
  d.bytes.resize(static_cast<std::size_t>(n));
  return d;
}

}  // namespace tcps
