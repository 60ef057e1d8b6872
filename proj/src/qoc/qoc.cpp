#include "tcps/qoc/qoc.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>

#include "tcps/core/csv.hpp"
#include "tcps/core/rng.hpp"
#include "tcps/error.hpp"

namespace tcps {

double qoc_value(double rise_time_ms) {
  if (!(rise_time_ms > 0.0) || !std::isfinite(rise_time_ms)) {
    throw Error(Errc::NonPositiveRiseTime, "rise time must be > 0, got " + std::to_string(rise_time_ms));
  }
  return std::log10(kIdealRiseTimeMs / rise_time_ms);
}

double v_max(double qoc) { return std::min(1.0, std::pow(10.0, qoc)); }

double goodness_ci_halfwidth(double g, std::size_t m) {
  if (m == 0) return 1.0;
  return 1.96 * std::sqrt(g * (1.0 - g) / static_cast<double>(m));
}

void SearchConfig::validate() const {
  if (!(delta_min_ms > 0.0) || !(delta_step_ms > 0.0) || !(delta_max_ms >= delta_min_ms)) {
    throw Error(Errc::InvalidArgument, "search grid needs 0 < delta_min <= delta_max and step > 0");
  }
  if (!(ci_halfwidth > 0.0 && ci_halfwidth < 0.5)) {
    throw Error(Errc::InvalidArgument, "ci_halfwidth must lie in (0, 0.5)");
  }
  if (batch == 0 || m_max < batch) throw Error(Errc::InvalidArgument, "need batch >= 1 and m_max >= batch");
}

std::vector<double> SearchConfig::grid() const {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::floor((delta_max_ms - delta_min_ms) / delta_step_ms + 1e-9));
  for (std::size_t k = 0; k <= n; ++k) {
    out.push_back(std::round((delta_min_ms + static_cast<double>(k) * delta_step_ms) * 1e6) / 1e6);
  }
  return out;
}

std::uint64_t SearchConfig::trial_seed(std::size_t i) const { return mix_seed(seed, i); }

TrialRunner step_trial_runner(const LoopConfig& base, ChannelFactory channel, GoodnessLimits limits) {
  base.validate();
  limits.validate();
  return [base, channel = std::move(channel), limits](double delta_ms, std::uint64_t seed) {
    LoopConfig cfg = base;
    cfg.delta_ms = delta_ms;
    cfg.seed = seed;
    auto ch = channel(seed);
    const auto record = run_step_experiment(cfg, *ch);
    try {
      const auto m = extract_metrics(record.curve, limits);
      return TrialOutcome{m.is_good, m.rise_time_ms};
    } catch (const Error& e) {
      if (e.code() == Errc::NoStepDetected || e.code() == Errc::MalformedCurve) return TrialOutcome{};
      throw;
    }
  };
}

namespace {

// Runs trials [first, first + count) and returns the outcomes in index order,
// whatever the number of workers.
std::vector<TrialOutcome> run_batch(const TrialRunner& runner, double delta_ms, const SearchConfig& search,
                                    std::size_t first, std::size_t count) {
  std::vector<TrialOutcome> out(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(search.workers, static_cast<unsigned>(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = runner(delta_ms, search.trial_seed(first + i));
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < count; i += workers) out[i] = runner(delta_ms, search.trial_seed(first + i));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace

GoodnessEstimate estimate_goodness(const TrialRunner& runner, double delta_ms, const SearchConfig& search) {
  search.validate();
  if (!(delta_ms > 0.0)) throw Error(Errc::InvalidArgument, "delta must be > 0");

  GoodnessEstimate est;
  est.delta_ms = delta_ms;
  double rise_sum = 0.0;
  std::size_t rise_n = 0;
  for (;;) {
    const std::size_t count = std::min(search.batch, search.m_max - est.m);
    for (const auto& o : run_batch(runner, delta_ms, search, est.m, count)) {
      if (o.good) {
        ++est.good;
        if (o.rise_time_ms) {
          rise_sum += *o.rise_time_ms;
          ++rise_n;
        }
      }
    }
    est.m += count;
    est.g = static_cast<double>(est.good) / static_cast<double>(est.m);
    est.ci_halfwidth = goodness_ci_halfwidth(est.g, est.m);
    if (est.ci_halfwidth <= search.ci_halfwidth) break;
    if (est.m >= search.m_max) {
      est.cap_exceeded = true;
      break;
    }
  }
  if (rise_n > 0) est.rise_time_mean_ms = rise_sum / static_cast<double>(rise_n);
  return est;
}

double find_delta_opt(const TrialRunner& runner, const SearchConfig& search) {
  search.validate();
  for (double delta : search.grid()) {
    if (runner(delta, search.trial_seed(0)).good) return delta;
  }
  throw Error(Errc::NoGoodDelta, "no good curve up to delta = " + std::to_string(search.delta_max_ms) + " ms");
}

GoodnessTable::GoodnessTable(TrialRunner runner, SearchConfig search)
    : runner_(std::move(runner)), search_(search), grid_(search.grid()) {
  search_.validate();
}

const GoodnessEstimate& GoodnessTable::at(std::size_t grid_index) {
  auto it = cache_.find(grid_index);
  if (it == cache_.end()) {
    it = cache_.emplace(grid_index, estimate_goodness(runner_, grid_.at(grid_index), search_)).first;
  }
  return it->second;
}

QoCResult GoodnessTable::delta_opt_bar(double g_spec) {
  if (!(g_spec > 0.0 && g_spec <= 1.0)) throw Error(Errc::InvalidArgument, "g_spec must lie in (0, 1]");
  for (std::size_t i = 0; i < grid_.size(); ++i) {
    const GoodnessEstimate& est = at(i);
    if (est.g < g_spec || !est.rise_time_mean_ms) continue;
    QoCResult r;
    r.g_spec = g_spec;
    r.delta_opt_bar_ms = est.delta_ms;
    r.g_achieved = est.g;
    r.g_ci_halfwidth = est.ci_halfwidth;
    r.m = est.m;
    r.cap_exceeded = est.cap_exceeded;
    r.rise_time_mean_ms = *est.rise_time_mean_ms;
    r.qoc = qoc_value(r.rise_time_mean_ms);
    r.v_max_mps = v_max(r.qoc);
    return r;
  }
  throw Error(Errc::NoGoodDelta, "g >= " + std::to_string(g_spec) + " not reached up to delta = " +
                                     std::to_string(search_.delta_max_ms) + " ms");
}

QoCResult find_delta_opt_bar(const TrialRunner& runner, double g_spec, const SearchConfig& search) {
  return GoodnessTable(runner, search).delta_opt_bar(g_spec);
}

PerfCurve perf_curve(const TrialRunner& runner, const std::vector<double>& g_specs, const SearchConfig& search) {
  for (std::size_t i = 1; i < g_specs.size(); ++i) {
    if (!(g_specs[i] > g_specs[i - 1])) throw Error(Errc::InvalidArgument, "g_spec list must be strictly increasing");
  }
  GoodnessTable table(runner, search);
  PerfCurve curve;
  for (double g : g_specs) {
    PerfPoint p{g, std::nullopt};
    try {
      p.result = table.delta_opt_bar(g);
    } catch (const Error& e) {
      if (e.code() != Errc::NoGoodDelta) throw;
    }
    curve.points.push_back(p);
  }
  return curve;
}

std::vector<std::pair<double, Winner>> compare_curves(const PerfCurve& first, const PerfCurve& second) {
  if (first.points.size() != second.points.size()) {
    throw Error(Errc::InvalidArgument, "curves cover different g_spec targets");
  }
  std::vector<std::pair<double, Winner>> out;
  for (std::size_t i = 0; i < first.points.size(); ++i) {
    const auto& a = first.points[i];
    const auto& b = second.points[i];
    if (a.g_spec != b.g_spec) throw Error(Errc::InvalidArgument, "curves cover different g_spec targets");
    Winner w = Winner::Undetermined;
    if (a.result && b.result) {
      w = a.result->qoc > b.result->qoc ? Winner::First
          : a.result->qoc < b.result->qoc ? Winner::Second
                                          : Winner::Tie;
    } else if (a.result) {
      w = Winner::First;
    } else if (b.result) {
      w = Winner::Second;
    }
    out.emplace_back(a.g_spec, w);
  }
  return out;
}

void write_perf_curve_csv(std::ostream& out, const PerfCurve& curve) {
  out << "g_spec,delta_opt_ms,t_r_ms,qoc,v_max\n";
  for (const auto& p : curve.points) {
    out << format_number(p.g_spec) << ',';
    if (p.result) {
      out << format_number(p.result->delta_opt_bar_ms) << ',' << format_number(p.result->rise_time_mean_ms) << ','
          << format_number(p.result->qoc) << ',' << format_number(p.result->v_max_mps);
    } else {
      out << ",,,";
    }
    out << '\n';
  }
}

double iae(const StepResponseCurve& curve) { return iae(curve, extract_metrics(curve).t0_ms); }

double iae(const StepResponseCurve& curve, double t0_ms) {
  const auto& s = curve.samples;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].t_ms < t0_ms) continue;
    total += std::abs(curve.band.reference - s[i].signal) * (s[i + 1].t_ms - s[i].t_ms);
  }
  return total;
}

double quad_cost(const StepResponseCurve& curve, const std::vector<OperatorSample>& operator_trace, double r,
                 double q) {
  return quad_cost(curve, operator_trace, r, q, extract_metrics(curve).t0_ms);
}

double quad_cost(const StepResponseCurve& curve, const std::vector<OperatorSample>& operator_trace, double r, double q,
                 double t0) {
  double u_term = 0.0;
  for (std::size_t i = 0; i + 1 < operator_trace.size(); ++i) {
    if (operator_trace[i].t_ms < t0) continue;
    const double u = operator_trace[i + 1].y - operator_trace[i].y;
    u_term += u * u * (operator_trace[i + 1].t_ms - operator_trace[i].t_ms);
  }
  double s_term = 0.0;
  const auto& s = curve.samples;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].t_ms < t0) continue;
    const double e = curve.band.reference - s[i].signal;
    s_term += e * e * (s[i + 1].t_ms - s[i].t_ms);
  }
  return 0.5 * (r * u_term + q * s_term);
}

}  // namespace tcps
