#include "tcps/cli/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "tcps/cli/config.hpp"
#include "tcps/core/csv.hpp"
#include "tcps/core/metrics.hpp"
#include "tcps/cybersickness/cybersickness.hpp"
#include "tcps/error.hpp"
#include "tcps/loop_sim/socket_runner.hpp"

#ifndef TCPS_BUNDLED_CONFIG_DIR
#define TCPS_BUNDLED_CONFIG_DIR "configs"
#endif

namespace tcps::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

ordered_json opt(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

// "ideal" and friends name the bundled configs unless a file of that name exists.
std::string resolve_config_path(const std::string& name) {
  if (fs::exists(name) || name.find('/') != std::string::npos) return name;
  const char* dir = std::getenv("TCPS_CONFIG_DIR");
  return (fs::path(dir ? dir : TCPS_BUNDLED_CONFIG_DIR) / (name + ".json")).string();
}

class Run {
 public:
  Run(ExperimentConfig cfg, fs::path dir, std::ostream& out) : cfg_(std::move(cfg)), dir_(std::move(dir)), out_(out) {
    fs::create_directories(dir_);
  }

  ExperimentConfig& cfg() { return cfg_; }
  std::ostream& out() { return out_; }

  void write(const std::string& name, const std::function<void(std::ostream&)>& body) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error(Errc::Io, "cannot write " + (dir_ / name).string());
    body(f);
    if (!f) throw Error(Errc::Io, "failed writing " + (dir_ / name).string());
    artifacts_.push_back(name);
  }

  void write_json(const std::string& name, const ordered_json& j) {
    write(name, [&](std::ostream& o) { o << j.dump(2) << '\n'; });
  }

  void manifest(const std::string& command, const ordered_json& options) {
    ordered_json m;
    m["command"] = command;
    m["options"] = options;
    m["seed"] = cfg_.seed;
    m["config"] = cfg_.resolved();
    m["artifacts"] = artifacts_;
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << m.dump(2) << '\n';
    if (!f) throw Error(Errc::Io, "cannot write manifest");
  }

  TrialRunner runner() const {
    const auto channel = cfg_.channel;
    return step_trial_runner(
        cfg_.loop, [channel](std::uint64_t s) { return make_channel(channel, s); }, cfg_.limits);
  }

 private:
  ExperimentConfig cfg_;
  fs::path dir_;
  std::ostream& out_;
  std::vector<std::string> artifacts_;
};

ordered_json metrics_json(const StepResponseCurve& curve, const GoodnessLimits& limits) {
  const auto m = extract_metrics(curve, limits);
  ordered_json j{{"t0_ms", m.t0_ms},
                 {"t1_ms", opt(m.t1_ms)},
                 {"t2_ms", opt(m.t2_ms)},
                 {"rise_time_ms", opt(m.rise_time_ms)},
                 {"overshoot_pct", m.overshoot_pct},
                 {"steady_state_error_pct", m.steady_state_error_pct},
                 {"undershoot_pct", m.undershoot_pct},
                 {"settling_time_ms", opt(m.settling_time_ms)},
                 {"delta_y", m.delta_y},
                 {"is_good", m.is_good},
                 {"iae", iae(curve, m.t0_ms)}};
  j["qoc"] = m.rise_time_ms && *m.rise_time_ms > 0.0 ? ordered_json(qoc_value(*m.rise_time_ms)) : nullptr;
  return j;
}

ordered_json qoc_json(const QoCResult& r) {
  return {{"g_spec", r.g_spec},
          {"delta_opt_bar_ms", r.delta_opt_bar_ms},
          {"g_achieved", r.g_achieved},
          {"g_ci_halfwidth", r.g_ci_halfwidth},
          {"m", r.m},
          {"cap_exceeded", r.cap_exceeded},
          {"rise_time_mean_ms", r.rise_time_mean_ms},
          {"qoc", r.qoc},
          {"v_max_mps", r.v_max_mps}};
}

void write_operator_csv(std::ostream& o, const std::vector<OperatorSample>& trace) {
  o << "t_ms,x,y\n";
  for (const auto& s : trace) o << format_number(s.t_ms) << ',' << format_number(s.x) << ',' << format_number(s.y) << '\n';
}

void write_record(Run& run, const StepExperimentRecord& rec, const std::string& curve_name) {
  run.write(curve_name, [&](std::ostream& o) { write_curve_csv(o, rec.curve); });
  run.write("operator.csv", [&](std::ostream& o) { write_operator_csv(o, rec.operator_trace); });
  const auto m = metrics_json(rec.curve, run.cfg().limits);
  run.write_json("metrics.json", m);
  run.out() << "rise_time_ms=" << m["rise_time_ms"].dump() << " good=" << m["is_good"].dump()
            << " qoc=" << m["qoc"].dump() << '\n';
}

double resolve_v_max(Run& run, std::optional<double> flag) {
  if (flag) return *flag;
  if (run.cfg().sickness.v_max_mps) return *run.cfg().sickness.v_max_mps;
  const auto r = find_delta_opt_bar(run.runner(), 1.0, run.cfg().search);
  run.out() << "measured qoc(1)=" << format_number(r.qoc) << " v_max_mps=" << format_number(r.v_max_mps) << '\n';
  return r.v_max_mps;
}

HandTrajectory resolve_trajectory(Run& run, const std::optional<std::string>& flag, double v_threshold) {
  const auto& s = run.cfg().sickness;
  if (flag) return read_trajectory_csv(*flag);
  if (s.trajectory) return read_trajectory_csv(*s.trajectory);
  return synth_trajectory(s.fs_hz, s.duration_s, SpeedDist::bimodal(v_threshold, s.below_fraction), run.cfg().seed);
}

SocketOptions socket_options(const ExperimentConfig& cfg) {
  return {std::chrono::milliseconds(static_cast<std::int64_t>(cfg.channel.socket.timeout_ms))};
}

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::ConfigParse:
    case Errc::InvalidArgument:
    case Errc::UnknownSubcommand:
      return kExitConfig;
    default:
      return kExitExperiment;
  }
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Step-response evaluation of tactile control loops", "tcps"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_name;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> workers;
  std::string out_dir;
  app.add_option("-c,--config", config_name, "Config file, or a bundled name: ideal, testbed-overhead-like, "
                                             "usnet-nw, vrep-like");
  app.add_option("--set", sets, "Override a config key, e.g. --set loop.kp=0.6");
  app.add_option("--seed", seed, "Seed for every random stream");
  app.add_option("--workers", workers, "Parallel trial workers");
  app.add_option("-o,--out", out_dir, std::string("Output directory (default: $") + kOutDirEnv + " or ./tcps-out)");

  auto* step = app.add_subcommand("step", "One step-response run: curve, operator trace and metrics");
  auto* delta_opt = app.add_subcommand("delta-opt", "Smallest loop wait giving a good single run");
  double gspec = 1.0;
  auto* qoc = app.add_subcommand("qoc", "QoC at a goodness target");
  qoc->add_option("--gspec", gspec, "Target fraction of good curves")->required();
  std::vector<double> gspec_list;
  auto* curve = app.add_subcommand("curve", "Performance curve over goodness targets");
  curve->add_option("--gspec-list", gspec_list, "Comma-separated increasing targets")->delimiter(',')->required();
  std::optional<double> qoc_value_flag;
  auto* vmax = app.add_subcommand("vmax", "Maximum hand speed from a QoC value or a search");
  vmax->add_option("--qoc", qoc_value_flag, "QoC value; without it the search runs at --gspec");
  vmax->add_option("--gspec", gspec, "Target for the search (default 1)");
  auto* netsim = app.add_subcommand("netsim", "QoC over tactile endpoint placements and traffic rates");

  auto* sickness = app.add_subcommand("sickness", "Cybersickness exposure E");
  sickness->require_subcommand(1);
  std::optional<std::string> traj_flag;
  std::optional<double> vmax_flag;
  auto* s_predict = sickness->add_subcommand("predict", "Predicted E from the velocity histogram");
  auto* s_measure = sickness->add_subcommand("measure", "Measured E through the configured channel");
  auto* s_synth = sickness->add_subcommand("synth", "Write a synthetic hand trajectory");
  for (auto* sc : {s_predict, s_measure}) {
    sc->add_option("--trajectory", traj_flag, "Trajectory CSV (default: synthesized from the config)");
  }
  for (auto* sc : {s_predict, s_measure, s_synth}) sc->add_option("--vmax", vmax_flag, "V_max in m/s");

  auto* probe = app.add_subcommand("probe", "Step experiment over real UDP sockets");
  probe->require_subcommand(1);
  std::optional<std::string> listen_flag, plant_flag;
  auto* p_serve = probe->add_subcommand("serve", "Teleoperator side; answers until the operator stops");
  auto* p_measure = probe->add_subcommand("measure", "Operator side; drives the loop against a serving plant");
  probe->add_subcommand("loopback", "Both sides on this host");
  for (auto* sc : {p_serve, p_measure}) sc->add_option("--listen", listen_flag, "Local host:port");
  p_measure->add_option("--plant", plant_flag, "Plant host:port");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    ExperimentConfig cfg = config_name.empty() ? parse_config("{}", "<defaults>", sets)
                                               : load_config(resolve_config_path(config_name), sets);
    if (seed) cfg.set_seed(*seed);
    if (workers) cfg.search.workers = *workers;
    if (out_dir.empty()) out_dir = cfg.outputs;
    if (out_dir.empty()) {
      const char* env = std::getenv(kOutDirEnv);
      out_dir = env && *env ? env : "tcps-out";
    }
    Run run(cfg, out_dir, out);
    ordered_json options = ordered_json::object();

    if (*step) {
      const auto ch = make_channel(cfg.channel, cfg.seed);
      write_record(run, run_step_experiment(cfg.loop, *ch), "curve.csv");
      run.manifest("step", options);
    } else if (*delta_opt) {
      const double d = find_delta_opt(run.runner(), cfg.search);
      run.write_json("delta_opt.json", {{"delta_opt_ms", d}});
      out << "delta_opt_ms=" << format_number(d) << '\n';
      run.manifest("delta-opt", options);
    } else if (*qoc) {
      options["gspec"] = gspec;
      const auto r = find_delta_opt_bar(run.runner(), gspec, cfg.search);
      run.write_json("qoc.json", qoc_json(r));
      out << "qoc=" << format_number(r.qoc) << " v_max_mps=" << format_number(r.v_max_mps)
          << " delta_opt_bar_ms=" << format_number(r.delta_opt_bar_ms) << '\n';
      run.manifest("qoc", options);
    } else if (*curve) {
      options["gspec_list"] = gspec_list;
      const auto pc = perf_curve(run.runner(), gspec_list, cfg.search);
      run.write("perf_curve.csv", [&](std::ostream& o) { write_perf_curve_csv(o, pc); });
      write_perf_curve_csv(out, pc);
      run.manifest("curve", options);
    } else if (*vmax) {
      QoCResult r;
      if (qoc_value_flag) {
        options["qoc"] = *qoc_value_flag;
        r.qoc = *qoc_value_flag;
      } else {
        options["gspec"] = gspec;
        r = find_delta_opt_bar(run.runner(), gspec, cfg.search);
      }
      run.write_json("vmax.json", {{"qoc", r.qoc}, {"v_max_mps", v_max(r.qoc)}});
      out << "v_max_mps=" << format_number(v_max(r.qoc)) << '\n';
      run.manifest("vmax", options);
    } else if (*netsim) {
      if (cfg.channel.kind != ChannelConfig::Kind::Topology) {
        throw Error(Errc::InvalidArgument, "netsim needs a topology channel");
      }
      auto placements = cfg.netsim.placements;
      if (placements.empty()) placements = {{cfg.channel.net.topology.te_master, cfg.channel.net.topology.te_slave}};
      auto rates = cfg.netsim.rates_bps;
      if (rates.empty()) rates = {cfg.channel.net.traffic_rate_bps};
      std::vector<std::string> rows;
      for (const auto& [a, b] : placements) {
        for (double rate : rates) {
          ChannelConfig ch = cfg.channel;
          ch.net.topology.te_master = a;
          ch.net.topology.te_slave = b;
          ch.net.traffic_rate_bps = rate;
          ch.net.topology.validate();
          const auto runner =
              step_trial_runner(cfg.loop, [ch](std::uint64_t s) { return make_channel(ch, s); }, cfg.limits);
          std::string row = std::to_string(a) + ',' + std::to_string(b) + ',' + format_number(rate) + ',';
          try {
            const auto r = find_delta_opt_bar(runner, cfg.netsim.g_spec, cfg.search);
            row += format_number(r.delta_opt_bar_ms) + ',' + format_number(r.rise_time_mean_ms) + ',' +
                   format_number(r.qoc) + ',' + format_number(r.v_max_mps);
          } catch (const Error& e) {
            if (e.code() != Errc::NoGoodDelta) throw;
            row += ",,,";
          }
          out << row << '\n';
          rows.push_back(row);
        }
      }
      run.write("netsim.csv", [&](std::ostream& o) {
        o << "te_master,te_slave,rate_bps,delta_opt_ms,t_r_ms,qoc,v_max\n";
        for (const auto& r : rows) o << r << '\n';
      });
      options["g_spec"] = cfg.netsim.g_spec;
      run.manifest("netsim", options);
    } else if (*sickness) {
      if (*s_synth) {
        const double thr = resolve_v_max(run, vmax_flag);
        const auto& s = cfg.sickness;
        const auto t = synth_trajectory(s.fs_hz, s.duration_s, SpeedDist::bimodal(thr, s.below_fraction), cfg.seed);
        run.write("trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, t); });
        out << "samples=" << t.positions.size() << " below_fraction=" << format_number(fraction_below(t, thr)) << '\n';
        options["v_threshold_mps"] = thr;
        run.manifest("sickness synth", options);
      } else if (*s_predict) {
        const double v = resolve_v_max(run, vmax_flag);
        const auto t = resolve_trajectory(run, traj_flag, v);
        const double e = predict_E(t, v);
        run.write_json("predict.json", {{"v_max_mps", v}, {"predicted_E_pct", e}});
        out << "predicted_E_pct=" << format_number(e) << '\n';
        options["v_max_mps"] = v;
        if (traj_flag) options["trajectory"] = *traj_flag;
        run.manifest("sickness predict", options);
      } else {
        const double v = resolve_v_max(run, vmax_flag);
        const auto t = resolve_trajectory(run, traj_flag, v);
        const auto ch = make_channel(cfg.channel, cfg.seed);
        const auto r = sickness_report(t, v, *ch, cfg.loop.robot_tau_ms);
        run.write("report.txt", [&](std::ostream& o) { write_report(o, r); });
        run.write("histogram.csv", [&](std::ostream& o) { write_histogram_csv(o, r.error_histogram); });
        write_report(out, r);
        options["v_max_mps"] = v;
        if (traj_flag) options["trajectory"] = *traj_flag;
        run.manifest("sickness measure", options);
      }
    } else if (*probe) {
      const auto so = socket_options(cfg);
      if (*p_serve) {
        DatagramSocket sock(Endpoint::parse(listen_flag.value_or(cfg.channel.socket.listen)));
        out << "listening on port " << sock.local_port() << std::endl;
        const auto c = serve_plant(cfg.loop, sock, so);
        run.write("curve.csv", [&](std::ostream& o) { write_curve_csv(o, c); });
        run.write_json("metrics.json", metrics_json(c, cfg.limits));
        run.manifest("probe serve", options);
      } else if (*p_measure) {
        DatagramSocket sock(Endpoint::parse(listen_flag.value_or(cfg.channel.socket.listen)));
        const auto plant = Endpoint::parse(plant_flag.value_or(cfg.channel.socket.plant));
        write_record(run, run_socket_operator(cfg.loop, sock, plant, so), "feedback.csv");
        options["plant"] = plant.str();
        run.manifest("probe measure", options);
      } else {
        write_record(run, run_socket_experiment(cfg.loop, so), "curve.csv");
        run.manifest("probe loopback", options);
      }
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitExperiment;
  }
}

}  // namespace tcps::cli
