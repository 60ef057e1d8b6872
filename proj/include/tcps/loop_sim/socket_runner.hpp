#pragma once

#include <chrono>
#include <cstdint>
#include <limits>

#include "tcps/loop_sim/runner.hpp"
#include "tcps/transport/udp.hpp"

namespace tcps {

/// Sequence number of the kinematic packet that tells the plant to stop.
inline constexpr std::uint32_t kFinSeq = std::numeric_limits<std::uint32_t>::max();

struct SocketOptions {
  /// Give up when nothing arrives for this long.
  std::chrono::milliseconds timeout{2000};
};

/// Teleoperator side over a real socket. Answers every accepted command to
/// its sender until a stop packet arrives. Returns the plant log with times
/// relative to `epoch` (the first command's arrival when not given).
/// Throws Error{Timeout} when no command arrives within the timeout.
StepResponseCurve serve_plant(const LoopConfig& cfg, const DatagramSocket& socket, const SocketOptions& options = {});

/// Operator side over a real socket with a wall-clock wait of delta per loop.
/// The returned curve holds the feedback as seen by the operator (arrival
/// time, x, y, signal); the stop packet is sent when the sweep ends.
/// Throws Error{Timeout} if no feedback arrives for the timeout.
StepExperimentRecord run_socket_operator(const LoopConfig& cfg, const DatagramSocket& socket, const Endpoint& plant,
                                         const SocketOptions& options = {});

/// Both ends on loopback in separate threads; the plant log becomes the curve
/// and both sides share one clock origin.
StepExperimentRecord run_socket_experiment(const LoopConfig& cfg, const SocketOptions& options = {});

}  // namespace tcps
