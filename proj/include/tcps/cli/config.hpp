#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tcps/core/types.hpp"
#include "tcps/loop_sim/config.hpp"
#include "tcps/netsim/network_sim.hpp"
#include "tcps/qoc/qoc.hpp"
#include "tcps/transport/impaired_link.hpp"

namespace tcps::cli {

struct TopologyChannel {
  std::string name = "usnet-nw";  // "usnet-nw" or "custom"
  Topology topology;
  double traffic_rate_bps = 0.0;
  std::size_t traffic_pkt_bytes = 1250;
  NetSimOptions options;
};

struct SocketChannel {
  std::string listen = "0.0.0.0:0";
  std::string plant = "127.0.0.1:9000";
  double timeout_ms = 2000.0;
};

struct ChannelConfig {
  enum class Kind { Ideal, Impaired, Topology, Socket };
  Kind kind = Kind::Ideal;
  double one_way_ms = 0.5;  // ideal
  ChannelModel model = ChannelModel::ideal(0.5);
  TopologyChannel net;
  SocketChannel socket;
};

struct SicknessConfig {
  double fs_hz = 30.0;
  double duration_s = 100.0;
  double below_fraction = 0.82;
  std::optional<double> v_max_mps;  // unset: measured as QoC(g = 1) on the channel
  std::optional<std::string> trajectory;
};

struct NetsimSweep {
  std::vector<std::pair<NodeId, NodeId>> placements;
  std::vector<double> rates_bps;
  double g_spec = 0.9;
};

struct ExperimentConfig {
  LoopConfig loop;
  ChannelConfig channel;
  SearchConfig search;
  GoodnessLimits limits;
  SicknessConfig sickness;
  NetsimSweep netsim;
  std::uint64_t seed = 1;
  std::string outputs;

  /// Every field, defaults included. The output directory is left out so
  /// that manifests of identical runs compare equal wherever they are written.
  nlohmann::ordered_json resolved() const;
  void set_seed(std::uint64_t s);
};

/// Parses the JSON config text, then applies "a.b.c=value" overrides (value
/// read as JSON, else as a string). Unknown keys and wrong types are errors.
/// Throws Error{ConfigParse} with "<origin>:<line>: <message>".
ExperimentConfig parse_config(const std::string& text, const std::string& origin = "<config>",
                              const std::vector<std::string>& overrides = {});
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// A fresh simulated channel for `seed`. Throws Error{InvalidArgument} for
/// the socket variant.
std::unique_ptr<SimChannel> make_channel(const ChannelConfig& channel, std::uint64_t seed);

}  // namespace tcps::cli
