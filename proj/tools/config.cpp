#include "tcps/cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "tcps/error.hpp"
#include "tcps/transport/udp.hpp"

namespace tcps::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Best-effort line of a key path in the original text: each key is looked
// up after the position of its parent.
std::size_t line_of(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    const auto at = text.find('"' + key + '"', pos);
    if (at == std::string::npos) break;
    pos = at;
  }
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

class Node {
 public:
  Node(const json& value, std::vector<std::string> path, const std::string& text, const std::string& origin)
      : value_(value), path_(std::move(path)), text_(text), origin_(origin) {
    if (!value_.is_object()) fail("expected an object");
  }

  [[noreturn]] void fail(const std::string& message, const std::string& key = "") const {
    auto p = path_;
    if (!key.empty()) p.push_back(key);
    std::string dotted;
    for (const auto& k : p) dotted += (dotted.empty() ? "" : ".") + k;
    throw Error(Errc::ConfigParse, origin_ + ":" + std::to_string(line_of(text_, p)) + ": " +
                                       (dotted.empty() ? "" : dotted + ": ") + message);
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return value_.contains(key) && !value_.at(key).is_null();
  }

  template <class T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = value_.at(key).get<T>();
    } catch (const json::exception&) {
      fail("wrong type", key);
    }
  }

  template <class T>
  void read(const std::string& key, std::optional<T>& out) {
    if (!has(key)) return;
    T v{};
    read(key, v);
    out = v;
  }

  Node child(const std::string& key) {
    used_.insert(key);
    return Node(value_.at(key), extend(key), text_, origin_);
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return value_.at(key);
  }

  std::vector<std::string> extend(const std::string& key) const {
    auto p = path_;
    p.push_back(key);
    return p;
  }

  void finish() const {
    for (const auto& [key, v] : value_.items()) {
      if (!used_.contains(key)) fail("unknown key", key);
    }
  }

 private:
  const json& value_;
  std::vector<std::string> path_;
  const std::string& text_;
  const std::string& origin_;
  std::set<std::string> used_;
};

JitterModel read_jitter(Node n) {
  JitterModel j;
  std::string kind = "none";
  n.read("kind", kind);
  if (kind == "none") {
    j.kind = JitterModel::Kind::None;
  } else if (kind == "uniform") {
    j.kind = JitterModel::Kind::Uniform;
  } else if (kind == "truncated_normal") {
    j.kind = JitterModel::Kind::TruncatedNormal;
  } else {
    n.fail("unknown jitter kind '" + kind + "'", "kind");
  }
  n.read("max_ms", j.max_ms);
  n.read("mean_ms", j.mean_ms);
  n.read("stddev_ms", j.stddev_ms);
  n.finish();
  return j;
}

LinkDirection read_direction(Node n) {
  LinkDirection d;
  n.read("latency_ms", d.latency_ms);
  if (n.has("jitter")) d.jitter = read_jitter(n.child("jitter"));
  n.read("drop_prob", d.drop_prob);
  n.read("bandwidth_bps", d.bandwidth_bps);
  n.read("fifo", d.fifo);
  n.finish();
  try {
    d.validate();
  } catch (const Error& e) {
    n.fail(e.what());
  }
  return d;
}

Topology read_custom_topology(Node n) {
  Topology t;
  int count = 0;
  n.read("switches", count);
  if (count < 1) n.fail("need at least one switch", "switches");
  for (NodeId i = 0; i < count; ++i) {
    t.switches.push_back(i);
    t.hosts["h" + std::to_string(i)] = i;
  }
  double delay = 0.1, bw = 10e6;
  n.read("link_delay_ms", delay);
  n.read("link_bandwidth_bps", bw);
  std::vector<std::pair<NodeId, NodeId>> edges;
  n.read("links", edges);
  for (const auto& [a, b] : edges) t.links.push_back({a, b, delay, bw});
  n.finish();
  return t;
}

void read_channel(Node n, ChannelConfig& c) {
  std::string type = "ideal";
  n.read("type", type);
  if (type == "ideal") {
    c.kind = ChannelConfig::Kind::Ideal;
    n.read("one_way_ms", c.one_way_ms);
    if (!(c.one_way_ms >= 0.0)) n.fail("must be >= 0", "one_way_ms");
    c.model = ChannelModel::ideal(c.one_way_ms);
  } else if (type == "impaired") {
    c.kind = ChannelConfig::Kind::Impaired;
    if (n.has("symmetric")) c.model = ChannelModel::symmetric(read_direction(n.child("symmetric")));
    if (n.has("forward")) c.model.forward = read_direction(n.child("forward"));
    if (n.has("backward")) c.model.backward = read_direction(n.child("backward"));
  } else if (type == "topology") {
    c.kind = ChannelConfig::Kind::Topology;
    auto& net = c.net;
    double delay = 0.1, bw = 10e6;
    NodeId master = 1, slave = 6;
    if (n.has("topology") && n.raw("topology").is_object()) {
      net.name = "custom";
      net.topology = read_custom_topology(n.child("topology"));
    } else {
      n.read("topology", net.name);
      if (net.name != "usnet-nw") n.fail("unknown topology '" + net.name + "'", "topology");
      n.read("link_delay_ms", delay);
      n.read("link_bandwidth_bps", bw);
    }
    n.read("te_master", master);
    n.read("te_slave", slave);
    n.read("traffic_rate_bps", net.traffic_rate_bps);
    n.read("traffic_pkt_bytes", net.traffic_pkt_bytes);
    n.read("warmup_ms", net.options.warmup_ms);
    n.read("queue_capacity", net.options.queue_capacity);
    try {
      if (net.name == "usnet-nw") net.topology = usnet_nw(delay, bw, master, slave);
      net.topology.te_master = master;
      net.topology.te_slave = slave;
      net.topology.validate();
      for (const auto& f : all_pairs_flows(net.topology, net.traffic_rate_bps, net.traffic_pkt_bytes)) f.validate();
    } catch (const Error& e) {
      n.fail(e.what(), "topology");
    }
  } else if (type == "socket") {
    c.kind = ChannelConfig::Kind::Socket;
    n.read("listen", c.socket.listen);
    n.read("plant", c.socket.plant);
    n.read("timeout_ms", c.socket.timeout_ms);
    try {
      Endpoint::parse(c.socket.listen);
      Endpoint::parse(c.socket.plant);
    } catch (const Error& e) {
      n.fail(e.what());
    }
  } else {
    n.fail("unknown channel type '" + type + "'", "type");
  }
  n.finish();
}

void read_loop(Node n, LoopConfig& l) {
  n.read("kp", l.kp);
  n.read("k1", l.k1);
  n.read("k2", l.k2);
  n.read("reference", l.reference);
  n.read("delta_ms", l.delta_ms);
  n.read("sweep", l.sweep);
  n.read("step_at", l.step_at);
  n.read("packet_size_B", l.packet_size_B);
  if (n.has("setting")) {
    std::string s;
    n.read("setting", s);
    try {
      l.setting = setting_from_string(s);
    } catch (const Error& e) {
      n.fail(e.what(), "setting");
    }
  }
  n.read("robot_tau_ms", l.robot_tau_ms);
  n.finish();
}

void read_search(Node n, SearchConfig& s) {
  n.read("delta_min_ms", s.delta_min_ms);
  n.read("delta_max_ms", s.delta_max_ms);
  n.read("delta_step_ms", s.delta_step_ms);
  n.read("ci_halfwidth", s.ci_halfwidth);
  n.read("batch", s.batch);
  n.read("m_max", s.m_max);
  n.read("workers", s.workers);
  n.finish();
}

void read_sickness(Node n, SicknessConfig& s) {
  n.read("fs_hz", s.fs_hz);
  n.read("duration_s", s.duration_s);
  n.read("below_fraction", s.below_fraction);
  n.read("v_max_mps", s.v_max_mps);
  n.read("trajectory", s.trajectory);
  n.finish();
  if (!(s.fs_hz > 0.0)) n.fail("must be > 0", "fs_hz");
  if (!(s.duration_s > 0.0)) n.fail("must be > 0", "duration_s");
  if (!(s.below_fraction >= 0.0 && s.below_fraction <= 1.0)) n.fail("must lie in [0, 1]", "below_fraction");
  if (s.v_max_mps && !(*s.v_max_mps > 0.0)) n.fail("must be > 0", "v_max_mps");
}

void read_netsim(Node n, NetsimSweep& s) {
  n.read("placements", s.placements);
  n.read("rates_bps", s.rates_bps);
  n.read("g_spec", s.g_spec);
  n.finish();
  if (!(s.g_spec > 0.0 && s.g_spec <= 1.0)) n.fail("must lie in (0, 1]", "g_spec");
  for (double r : s.rates_bps) {
    if (!(r >= 0.0)) n.fail("rates must be >= 0", "rates_bps");
  }
}

void apply_override(json& root, const std::string& assignment, const std::string& origin) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw Error(Errc::ConfigParse, origin + ": override '" + assignment + "' is not key=value");
  }
  json::json_pointer ptr;
  std::stringstream keys(assignment.substr(0, eq));
  for (std::string key; std::getline(keys, key, '.');) ptr.push_back(key);
  const std::string text = assignment.substr(eq + 1);
  json value = json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;
  try {
    root[ptr] = value;
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigParse, origin + ": override '" + assignment + "': " + e.what());
  }
}

ordered_json direction_json(const LinkDirection& d) {
  static const char* kinds[] = {"none", "uniform", "truncated_normal"};
  return {{"latency_ms", d.latency_ms},
          {"jitter",
           {{"kind", kinds[static_cast<int>(d.jitter.kind)]},
            {"max_ms", d.jitter.max_ms},
            {"mean_ms", d.jitter.mean_ms},
            {"stddev_ms", d.jitter.stddev_ms}}},
          {"drop_prob", d.drop_prob},
          {"bandwidth_bps", d.bandwidth_bps},
          {"fifo", d.fifo}};
}

}  // namespace

void ExperimentConfig::set_seed(std::uint64_t s) {
  seed = s;
  loop.seed = s;
  search.seed = s;
}

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::vector<std::string>& overrides) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    // The library reports "... at line L, column C: ..."; keep it verbatim.
    std::string what = e.what();
    const auto at = what.find("line ");
    std::string line = "1";
    if (at != std::string::npos) line = what.substr(at + 5, what.find(',', at) - at - 5);
    throw Error(Errc::ConfigParse, origin + ":" + line + ": " + what);
  }
  for (const auto& o : overrides) apply_override(root, o, origin);

  ExperimentConfig cfg;
  Node top(root, {}, text, origin);
  if (top.has("loop")) read_loop(top.child("loop"), cfg.loop);
  if (top.has("channel")) read_channel(top.child("channel"), cfg.channel);
  if (top.has("search")) read_search(top.child("search"), cfg.search);
  if (top.has("limits")) {
    Node n = top.child("limits");
    n.read("overshoot_max_pct", cfg.limits.overshoot_max_pct);
    n.read("sse_max_pct", cfg.limits.sse_max_pct);
    n.finish();
  }
  if (top.has("sickness")) read_sickness(top.child("sickness"), cfg.sickness);
  if (top.has("netsim")) read_netsim(top.child("netsim"), cfg.netsim);
  std::uint64_t seed = 1;
  top.read("seed", seed);
  top.read("outputs", cfg.outputs);
  top.finish();
  cfg.set_seed(seed);

  try {
    cfg.loop.validate();
  } catch (const Error& e) {
    top.fail(e.what(), "loop");
  }
  try {
    cfg.search.validate();
  } catch (const Error& e) {
    top.fail(e.what(), "search");
  }
  try {
    cfg.limits.validate();
  } catch (const Error& e) {
    top.fail(e.what(), "limits");
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigParse, path + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path, overrides);
}

ordered_json ExperimentConfig::resolved() const {
  ordered_json out;
  out["seed"] = seed;
  out["loop"] = {{"kp", loop.kp},
                 {"k1", loop.k1},
                 {"k2", loop.k2},
                 {"reference", loop.reference},
                 {"delta_ms", loop.delta_ms},
                 {"sweep", loop.sweep},
                 {"step_at", loop.step_at ? ordered_json(*loop.step_at) : ordered_json(nullptr)},
                 {"packet_size_B", loop.packet_size_B},
                 {"setting", std::string(to_string(loop.setting))},
                 {"robot_tau_ms", loop.robot_tau_ms}};
  ordered_json ch;
  switch (channel.kind) {
    case ChannelConfig::Kind::Ideal:
      ch = {{"type", "ideal"}, {"one_way_ms", channel.one_way_ms}};
      break;
    case ChannelConfig::Kind::Impaired:
      ch = {{"type", "impaired"},
            {"forward", direction_json(channel.model.forward)},
            {"backward", direction_json(channel.model.backward)}};
      break;
    case ChannelConfig::Kind::Topology: {
      const auto& t = channel.net.topology;
      ordered_json links = ordered_json::array();
      for (const auto& l : t.links) {
        links.push_back({{"a", l.a}, {"b", l.b}, {"delay_ms", l.delay_ms}, {"bandwidth_bps", l.bandwidth_bps}});
      }
      ch = {{"type", "topology"},
            {"topology", channel.net.name},
            {"switches", t.switches.size()},
            {"links", links},
            {"te_master", t.te_master},
            {"te_slave", t.te_slave},
            {"traffic_rate_bps", channel.net.traffic_rate_bps},
            {"traffic_pkt_bytes", channel.net.traffic_pkt_bytes},
            {"warmup_ms", channel.net.options.warmup_ms},
            {"queue_capacity", channel.net.options.queue_capacity ? ordered_json(*channel.net.options.queue_capacity)
                                                                  : ordered_json(nullptr)}};
      break;
    }
    case ChannelConfig::Kind::Socket:
      ch = {{"type", "socket"},
            {"listen", channel.socket.listen},
            {"plant", channel.socket.plant},
            {"timeout_ms", channel.socket.timeout_ms}};
      break;
  }
  out["channel"] = ch;
  out["search"] = {{"delta_min_ms", search.delta_min_ms}, {"delta_max_ms", search.delta_max_ms},
                   {"delta_step_ms", search.delta_step_ms}, {"ci_halfwidth", search.ci_halfwidth},
                   {"batch", search.batch},               {"m_max", search.m_max},
                   {"workers", search.workers}};
  out["limits"] = {{"overshoot_max_pct", limits.overshoot_max_pct}, {"sse_max_pct", limits.sse_max_pct}};
  out["sickness"] = {{"fs_hz", sickness.fs_hz},
                     {"duration_s", sickness.duration_s},
                     {"below_fraction", sickness.below_fraction},
                     {"v_max_mps", sickness.v_max_mps ? ordered_json(*sickness.v_max_mps) : ordered_json(nullptr)},
                     {"trajectory", sickness.trajectory ? ordered_json(*sickness.trajectory) : ordered_json(nullptr)}};
  out["netsim"] = {{"placements", netsim.placements}, {"rates_bps", netsim.rates_bps}, {"g_spec", netsim.g_spec}};
  return out;
}

std::unique_ptr<SimChannel> make_channel(const ChannelConfig& channel, std::uint64_t seed) {
  switch (channel.kind) {
    case ChannelConfig::Kind::Ideal:
    case ChannelConfig::Kind::Impaired:
      return std::make_unique<ImpairedChannel>(channel.model, seed);
    case ChannelConfig::Kind::Topology: {
      const auto& net = channel.net;
      return std::make_unique<NetworkChannel>(
          net.topology, all_pairs_flows(net.topology, net.traffic_rate_bps, net.traffic_pkt_bytes), seed, net.options);
    }
    case ChannelConfig::Kind::Socket:
      break;
  }
  throw Error(Errc::InvalidArgument, "socket channels only run with the probe command");
}

}  // namespace tcps::cli
