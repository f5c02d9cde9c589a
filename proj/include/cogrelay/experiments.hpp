#pragma once

// Experiment configuration, CSV output and the sweep / grid / validate
// commands behind the command-line tool.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cogrelay/analytic.hpp"
#include "cogrelay/montecarlo.hpp"
#include "cogrelay/validation.hpp"

namespace cogrelay::experiments {

/// Bad configuration: unknown key, malformed value, invalid range.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepRange {
  double start = 0.0;
  double stop = 0.0;
  double step = 1.0;

  void validate(std::string_view what) const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
      throw ConfigError(std::string(what) + ": sweep bounds must be finite");
    if (!(step > 0.0)) throw ConfigError(std::string(what) + ": sweep step must be positive");
    if (stop < start) throw ConfigError(std::string(what) + ": sweep stop is below start");
  }

  /// start + k * step for every k with the value not past stop (with a
  /// small allowance so 0, 0.2, ..., 2.6 includes 2.6).
  std::vector<double> values() const {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
};

struct Region {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  void validate(std::string_view what) const {
    if (!(x_min <= x_max) || !(y_min <= y_max))
      throw ConfigError(std::string(what) + ": empty region");
  }
};

struct ExperimentConfig {
  std::string scenario = "reference";
  SystemParams params;   // linear SNRs
  Topology topology;
  SweepRange snr_sweep_db{0.0, 30.0, 2.0};
  SweepRange rate_sweep{0.2, 2.6, 0.2};
  std::vector<mc::Policy> policies;  // empty: command default
  std::uint64_t trials = 400000;
  std::uint64_t seed = 1;
  std::uint64_t positions = 50;      // 0 keeps the configured relay position
  Region position_region{0.1, 0.9, 0.1, 1.7};
  std::size_t grid_nx = 21;
  std::size_t grid_ny = 21;
  Region grid_region{-0.5, 1.5, 0.0, 2.0};
  analytic::D2PowerRule d2_rule = analytic::D2PowerRule::exact;
  unsigned workers = 0;              // 0: hardware concurrency
  std::string out;                   // empty or "-": standard output

  // validate command
  std::size_t validate_sets = 20;
  std::uint64_t validate_exact_trials = 10'000'000;
  std::uint64_t validate_bound_trials = 1'000'000;
  double validate_lambda_scale = 1.0;
  std::uint64_t pdf_samples = 1'000'000;
  std::size_t pdf_bins = 200;

  void validate() const {
    try {
      params.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    snr_sweep_db.validate("snr sweep");
    rate_sweep.validate("rate sweep");
    position_region.validate("position region");
    grid_region.validate("grid region");
    if (trials == 0) throw ConfigError("trials must be positive");
    if (grid_nx < 2 || grid_ny < 2) throw ConfigError("grid needs at least 2x2 cells");
    if (validate_sets == 0 || validate_exact_trials == 0 || validate_bound_trials == 0)
      throw ConfigError("validation sizes must be positive");
    if (!(validate_lambda_scale > 0.0)) throw ConfigError("validate_lambda_scale must be positive");
    if (pdf_samples < 100000) throw ConfigError("pdf_samples must be at least 100000");
    if (pdf_bins == 0) throw ConfigError("pdf_bins must be positive");
  }
};

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size() || !std::isfinite(x))
    throw ConfigError(std::string(key) + ": not a number: '" + std::string(v) + "'");
  return x;
}

inline std::uint64_t parse_u64(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size())
    throw ConfigError(std::string(key) + ": not a non-negative integer: '" + std::string(v) + "'");
  return x;
}

}  // namespace detail

inline std::vector<mc::Policy> parse_policy_list(std::string_view list) {
  std::vector<mc::Policy> out;
  while (!list.empty()) {
    const auto comma = list.find(',');
    const std::string_view item = detail::trim(list.substr(0, comma));
    if (!item.empty()) {
      try {
        out.push_back(mc::parse_policy(item));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
    if (comma == std::string_view::npos) break;
    list.remove_prefix(comma + 1);
  }
  if (out.empty()) throw ConfigError("policy list is empty");
  return out;
}

/// Applies one key=value setting. SNRs are given in dB and converted here.
inline void apply_setting(ExperimentConfig& c, std::string_view key, std::string_view raw) {
  using detail::parse_double;
  using detail::parse_u64;
  const std::string_view v = detail::trim(raw);
  auto num = [&] { return parse_double(key, v); };
  auto count = [&] { return parse_u64(key, v); };

  static const std::map<std::string_view, double Point::*> kCoord{{"x", &Point::x}, {"y", &Point::y}};
  static const std::map<std::string_view, Point Topology::*> kNode{
      {"pt", &Topology::primary_tx}, {"st", &Topology::secondary_tx}, {"pd", &Topology::primary_rx},
      {"sd", &Topology::secondary_rx}, {"relay", &Topology::relay}};

  if (key == "scenario") c.scenario = std::string(v);
  else if (key == "rate_primary") c.params.rate_primary = num();
  else if (key == "rate_secondary") c.params.rate_secondary = num();
  else if (key == "epsilon") c.params.outage_threshold = num();
  else if (key == "snr_primary_db") c.params.snr_primary = db_to_linear(num());
  else if (key == "snr_relay_max_db") c.params.snr_relay_max = db_to_linear(num());
  else if (key == "pathloss_exponent") c.params.pathloss_exponent = num();
  else if (key == "snr_start_db") c.snr_sweep_db.start = num();
  else if (key == "snr_stop_db") c.snr_sweep_db.stop = num();
  else if (key == "snr_step_db") c.snr_sweep_db.step = num();
  else if (key == "rate_start") c.rate_sweep.start = num();
  else if (key == "rate_stop") c.rate_sweep.stop = num();
  else if (key == "rate_step") c.rate_sweep.step = num();
  else if (key == "policies") c.policies = parse_policy_list(v);
  else if (key == "trials") c.trials = count();
  else if (key == "seed") c.seed = count();
  else if (key == "positions") c.positions = count();
  else if (key == "position_x_min") c.position_region.x_min = num();
  else if (key == "position_x_max") c.position_region.x_max = num();
  else if (key == "position_y_min") c.position_region.y_min = num();
  else if (key == "position_y_max") c.position_region.y_max = num();
  else if (key == "grid_nx") c.grid_nx = count();
  else if (key == "grid_ny") c.grid_ny = count();
  else if (key == "grid_x_min") c.grid_region.x_min = num();
  else if (key == "grid_x_max") c.grid_region.x_max = num();
  else if (key == "grid_y_min") c.grid_region.y_min = num();
  else if (key == "grid_y_max") c.grid_region.y_max = num();
  else if (key == "workers") c.workers = static_cast<unsigned>(count());
  else if (key == "out") c.out = std::string(v);
  else if (key == "validate_sets") c.validate_sets = count();
  else if (key == "validate_exact_trials") c.validate_exact_trials = count();
  else if (key == "validate_bound_trials") c.validate_bound_trials = count();
  else if (key == "validate_lambda_scale") c.validate_lambda_scale = num();
  else if (key == "pdf_samples") c.pdf_samples = count();
  else if (key == "pdf_bins") c.pdf_bins = count();
  else if (key == "d2_power") {
    if (v == "exact") c.d2_rule = analytic::D2PowerRule::exact;
    else if (v == "closed-form") c.d2_rule = analytic::D2PowerRule::closed_form;
    else throw ConfigError("d2_power: expected 'exact' or 'closed-form'");
  } else {
    // Node coordinates: pt_x, st_y, relay_x, ...
    const auto us = key.rfind('_');
    if (us != std::string_view::npos) {
      const auto node = kNode.find(key.substr(0, us));
      const auto coord = kCoord.find(key.substr(us + 1));
      if (node != kNode.end() && coord != kCoord.end()) {
        c.topology.*(node->second).*(coord->second) = num();
        return;
      }
    }
    throw ConfigError("unknown key: " + std::string(key));
  }
}

/// Parses "key=value" (used for --set overrides).
inline void apply_assignment(ExperimentConfig& c, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value: '" + std::string(line) + "'");
  apply_setting(c, detail::trim(line.substr(0, eq)), line.substr(eq + 1));
}

/// Flat key=value text; '#' starts a comment, blank lines are ignored.
inline void apply_config_text(ExperimentConfig& c, std::string_view text) {
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(c, line);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
}

inline void apply_config_file(ExperimentConfig& c, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    apply_config_text(c, ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// CSV

/// Shortest decimal that round-trips to the same double.
inline std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw std::runtime_error("float formatting failed");
  return std::string(buf.data(), p);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  CsvWriter& field(std::string_view s) {
    sep();
    out_ << s;
    return *this;
  }
  CsvWriter& field(double x) { return field(std::string_view(format_double(x))); }
  CsvWriter& field(std::uint64_t x) { return field(std::string_view(std::to_string(x))); }
  CsvWriter& empty() { return field(std::string_view{}); }
  void end_row() {
    out_ << '\n';
    first_ = true;
  }
  void row(std::initializer_list<std::string_view> cells) {
    for (auto c : cells) field(c);
    end_row();
  }

 private:
  void sep() {
    if (!first_) out_ << ',';
    first_ = false;
  }
  std::ostream& out_;
  bool first_ = true;
};

// ---------------------------------------------------------------------------
// Relay-position averaging

inline constexpr std::uint64_t kPositionStream = 0x706f'7331;  // "pos1"

/// Relay position k, uniform over the region; depends only on (seed, k).
inline Point random_relay_position(const Region& r, std::uint64_t seed, std::uint64_t k) {
  CounterRng rng(derive_seed(seed, kPositionStream), k);
  const double x = r.x_min + rng.uniform() * (r.x_max - r.x_min);
  const double y = r.y_min + rng.uniform() * (r.y_max - r.y_min);
  return {x, y};
}

/// Topologies the sweeps average over: the configured one when positions is
/// 0, otherwise `positions` random relay placements.
inline std::vector<Topology> averaging_topologies(const ExperimentConfig& c) {
  if (c.positions == 0) return {c.topology};
  std::vector<Topology> out;
  out.reserve(c.positions);
  for (std::uint64_t k = 0; k < c.positions; ++k) {
    Topology t = c.topology;
    t.relay = random_relay_position(c.position_region, c.seed, k);
    if (!t.is_valid()) throw ConfigError("random relay position coincides with a node");
    out.push_back(t);
  }
  return out;
}

/// Estimates averaged (with equal weights) over relay positions.
struct AveragedEstimate {
  double secondary = 0.0;
  double secondary_ci = 0.0;  // 1.96 sqrt(sum p_k (1 - p_k) / n) / K
  double primary = 0.0;
  double primary_ci = 0.0;
  std::array<double, kDecisionCount> decision_freq{};
  std::uint64_t trials_per_position = 0;
};

class PositionAverager {
 public:
  explicit PositionAverager(std::uint64_t trials_per_position) : n_(trials_per_position) {}

  void add(const mc::OutageResult& r) {
    ++k_;
    sec_ += r.secondary.p_hat;
    pri_ += r.primary.p_hat;
    sec_var_ += r.secondary.p_hat * (1.0 - r.secondary.p_hat);
    pri_var_ += r.primary.p_hat * (1.0 - r.primary.p_hat);
    for (std::size_t d = 0; d < kDecisionCount; ++d) freq_[d] += r.secondary.decision_freq[d];
  }

  AveragedEstimate result() const {
    AveragedEstimate e;
    if (k_ == 0) return e;
    const double k = static_cast<double>(k_);
    const double n = static_cast<double>(n_);
    e.secondary = sec_ / k;
    e.primary = pri_ / k;
    e.secondary_ci = 1.96 * std::sqrt(sec_var_ / n) / k;
    e.primary_ci = 1.96 * std::sqrt(pri_var_ / n) / k;
    for (std::size_t d = 0; d < kDecisionCount; ++d) e.decision_freq[d] = freq_[d] / k;
    e.trials_per_position = n_;
    return e;
  }

 private:
  std::uint64_t n_;
  std::uint64_t k_ = 0;
  double sec_ = 0.0, pri_ = 0.0, sec_var_ = 0.0, pri_var_ = 0.0;
  std::array<double, kDecisionCount> freq_{};
};

inline std::uint64_t trials_per_position(const ExperimentConfig& c, std::size_t positions) {
  const std::uint64_t k = std::max<std::uint64_t>(positions, 1);
  return (c.trials + k - 1) / k;
}

/// Trial seed of position k; shared by every policy and sweep point.
inline std::uint64_t position_trial_seed(std::uint64_t seed, std::uint64_t k) {
  return derive_seed(seed, k);
}

inline bool needs_split(const std::vector<mc::Policy>& policies) {
  return std::find(policies.begin(), policies.end(), mc::Policy::adaptive2) != policies.end();
}

/// One operating point: every policy averaged over the same positions with
/// the same trial seeds. `bounds` receives the mean analytic bound per policy
/// (NaN where none is defined).
inline std::vector<AveragedEstimate> run_operating_point(const ExperimentConfig& c,
                                                         const SystemParams& params,
                                                         const std::vector<Topology>& topologies,
                                                         const std::vector<mc::Policy>& policies,
                                                         std::vector<double>* bounds = nullptr) {
  const std::uint64_t n = trials_per_position(c, topologies.size());
  std::vector<PositionAverager> avg(policies.size(), PositionAverager(n));
  std::vector<double> bound_sum(policies.size(), 0.0);
  analytic::PowerOptions opt;
  opt.d2_rule = c.d2_rule;
  opt.solve_split = needs_split(policies);
  const Thresholds th = Thresholds::from(params);
  for (std::size_t k = 0; k < topologies.size(); ++k) {
    const mc::Scenario sc = mc::make_scenario(params, topologies[k], opt);
    const analytic::EffectiveSnrs g = analytic::effective_snrs(sc.powers, sc.variances);
    const bool silenced = sc.powers.secondary <= 0.0;
    for (std::size_t j = 0; j < policies.size(); ++j) {
      avg[j].add(mc::estimate_outage(sc, policies[j], n, position_trial_seed(c.seed, k), c.workers));
      if (!bounds) continue;
      if (silenced) bound_sum[j] += 1.0;
      else if (policies[j] == mc::Policy::adaptive1)
        bound_sum[j] += analytic::scheme1_breakdown(g, th.primary, th.secondary).total_secondary;
      else if (policies[j] == mc::Policy::direct)
        bound_sum[j] += analytic::cond_outage_D0(g.ss, g.ps, th.secondary);
      else bound_sum[j] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  std::vector<AveragedEstimate> out;
  out.reserve(policies.size());
  for (std::size_t j = 0; j < policies.size(); ++j) {
    out.push_back(avg[j].result());
    if (bounds) bounds->push_back(bound_sum[j] / static_cast<double>(topologies.size()));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

inline const std::vector<mc::Policy>& or_default(const std::vector<mc::Policy>& chosen,
                                                 const std::vector<mc::Policy>& fallback) {
  return chosen.empty() ? fallback : chosen;
}

inline constexpr std::string_view kSweepSnrHeader =
    "gamma_p_db,policy,outage_sec_mc,outage_sec_ci,outage_sec_bound,outage_pri_mc,"
    "freq_d0,freq_d1,freq_d2,freq_d3";

inline constexpr std::string_view kSweepRateHeader =
    "rate_p,rate_s,policy,gamma_s,cutoff_rate_p,outage_sec_mc,outage_sec_ci,outage_pri_mc,"
    "freq_d0,freq_d1,freq_d2,freq_d3";

inline constexpr std::string_view kGridHeader =
    "x,y,valid,outage_sec_mc,outage_sec_ci,outage_pri_mc,dominant_decision,"
    "freq_d0,freq_d1,freq_d2,freq_d3";

namespace detail {

inline void write_freqs(CsvWriter& w, const std::array<double, kDecisionCount>& f) {
  for (double x : f) w.field(x);
}

}  // namespace detail

/// Secondary outage versus primary SNR for each policy (default: all five).
inline void cmd_sweep_snr(const ExperimentConfig& c, std::ostream& out) {
  c.validate();
  static const std::vector<mc::Policy> kDefault(mc::kAllPolicies.begin(), mc::kAllPolicies.end());
  const auto& policies = or_default(c.policies, kDefault);
  const auto topologies = averaging_topologies(c);
  CsvWriter w(out);
  out << kSweepSnrHeader << '\n';
  for (double db : c.snr_sweep_db.values()) {
    SystemParams p = c.params;
    p.snr_primary = db_to_linear(db);
    std::vector<double> bounds;
    const auto est = run_operating_point(c, p, topologies, policies, &bounds);
    for (std::size_t j = 0; j < policies.size(); ++j) {
      w.field(db).field(mc::to_string(policies[j])).field(est[j].secondary).field(est[j].secondary_ci);
      if (std::isnan(bounds[j])) w.empty();
      else w.field(bounds[j]);
      w.field(est[j].primary);
      detail::write_freqs(w, est[j].decision_freq);
      w.end_row();
    }
  }
}

/// Secondary outage versus primary rate with R_s = R_p / 2 (default
/// policies: the two adaptive schemes).
inline void cmd_sweep_rate(const ExperimentConfig& c, std::ostream& out) {
  c.validate();
  static const std::vector<mc::Policy> kDefault{mc::Policy::adaptive1, mc::Policy::adaptive2};
  const auto& policies = or_default(c.policies, kDefault);
  const auto topologies = averaging_topologies(c);
  // gamma_s and the cutoff depend on the PT/ST/PD geometry only.
  const LinkVariances v0 = link_variances(topologies.front(), c.params.pathloss_exponent);
  const double cutoff = secondary_cutoff_rate(c.params, v0);
  CsvWriter w(out);
  out << kSweepRateHeader << '\n';
  for (double rate : c.rate_sweep.values()) {
    SystemParams p = c.params;
    p.rate_primary = rate;
    p.rate_secondary = rate / 2.0;
    const double gamma_s = secondary_power(p, v0);
    const auto est = run_operating_point(c, p, topologies, policies);
    for (std::size_t j = 0; j < policies.size(); ++j) {
      w.field(rate).field(p.rate_secondary).field(mc::to_string(policies[j])).field(gamma_s);
      w.field(cutoff).field(est[j].secondary).field(est[j].secondary_ci).field(est[j].primary);
      detail::write_freqs(w, est[j].decision_freq);
      w.end_row();
    }
  }
}

struct GridCell {
  Point relay;
  bool valid = false;
  mc::OutageResult result;
  Decision dominant = Decision::direct;
};

inline double grid_coordinate(double lo, double hi, std::size_t i, std::size_t n) {
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

/// Secondary outage of one policy (default adaptive2) with the relay on each
/// grid node. Every cell uses the same trial seed.
inline std::vector<GridCell> grid_position(const ExperimentConfig& c) {
  c.validate();
  const mc::Policy policy = c.policies.empty() ? mc::Policy::adaptive2 : c.policies.front();
  analytic::PowerOptions opt;
  opt.d2_rule = c.d2_rule;
  opt.solve_split = policy == mc::Policy::adaptive2;
  std::vector<GridCell> cells;
  cells.reserve(c.grid_nx * c.grid_ny);
  const Region& r = c.grid_region;
  for (std::size_t iy = 0; iy < c.grid_ny; ++iy) {
    for (std::size_t ix = 0; ix < c.grid_nx; ++ix) {
      GridCell cell;
      cell.relay = {grid_coordinate(r.x_min, r.x_max, ix, c.grid_nx),
                    grid_coordinate(r.y_min, r.y_max, iy, c.grid_ny)};
      Topology t = c.topology;
      t.relay = cell.relay;
      cell.valid = t.is_valid();
      if (cell.valid) {
        const mc::Scenario sc = mc::make_scenario(c.params, t, opt);
        cell.result = mc::estimate_outage(sc, policy, c.trials, c.seed, c.workers);
        const auto& f = cell.result.secondary.decision_freq;
        cell.dominant = static_cast<Decision>(std::max_element(f.begin(), f.end()) - f.begin());
      }
      cells.push_back(cell);
    }
  }
  return cells;
}

inline void cmd_grid_position(const ExperimentConfig& c, std::ostream& out) {
  const auto cells = grid_position(c);
  CsvWriter w(out);
  out << kGridHeader << '\n';
  for (const auto& cell : cells) {
    w.field(cell.relay.x).field(cell.relay.y).field(std::uint64_t{cell.valid});
    if (cell.valid) {
      w.field(cell.result.secondary.p_hat).field(cell.result.secondary.half_width_95);
      w.field(cell.result.primary.p_hat).field(to_string(cell.dominant));
      detail::write_freqs(w, cell.result.secondary.decision_freq);
    } else {
      for (int i = 0; i < 8; ++i) w.empty();
    }
    w.end_row();
  }
}

struct ValidationReport {
  std::vector<validation::CheckResult> checks;
  validation::DensityCheck density;
  bool passed() const {
    return density.fit_passed && density.integral_passed &&
           std::all_of(checks.begin(), checks.end(), [](const auto& r) { return r.passed; });
  }
};

inline ValidationReport run_validation(const ExperimentConfig& c) {
  c.validate();
  validation::GridSpec spec;
  spec.sets = c.validate_sets;
  validation::SimulationBudget budget{c.validate_exact_trials, c.validate_bound_trials, c.workers};
  ValidationReport rep;
  const auto sets = validation::random_grid(spec, c.seed);
  for (std::size_t i = 0; i < sets.size(); ++i) {
    auto r = validation::run_checks(sets[i], i, c.seed, budget, c.validate_lambda_scale);
    rep.checks.insert(rep.checks.end(), r.begin(), r.end());
  }
  // Secondary-to-PD interference quotient at the configured topology.
  const LinkVariances v = link_variances(c.topology, c.params.pathloss_exponent);
  const double num = std::max(secondary_power(c.params, v), 1.0) * v.sp;
  const double den = c.params.snr_primary * v.pp;
  rep.density = validation::check_quotient_density(num, den, c.pdf_samples, c.pdf_bins,
                                                    derive_seed(c.seed, 0xd15c), 0.01);
  return rep;
}

/// Human-readable report: one line per check and parameter set, then a
/// summary line per check name.
inline void write_validation_report(const ValidationReport& rep, std::uint64_t seed,
                                    std::ostream& out) {
  out << "# seed " << seed << '\n';
  out << "check,set,kind,analytic,simulated,z,trials,seed,result\n";
  std::map<std::string, std::pair<std::size_t, std::size_t>> summary;  // failures, total
  std::vector<std::string> order;
  for (const auto& r : rep.checks) {
    out << r.name << ',' << r.set << ',' << (r.kind == validation::CheckKind::exact ? "exact" : "upper")
        << ',' << format_double(r.analytic) << ',' << format_double(r.simulated) << ','
        << format_double(r.z()) << ',' << r.trials << ',' << r.seed << ','
        << (r.passed ? "PASS" : "FAIL") << '\n';
    auto [it, fresh] = summary.try_emplace(r.name, 0, 0);
    if (fresh) order.push_back(r.name);
    it->second.first += r.passed ? 0 : 1;
    it->second.second += 1;
  }
  const auto& d = rep.density;
  out << "# quotient density: num " << format_double(d.num) << " den " << format_double(d.den)
      << " samples " << d.samples << " seed " << d.seed << " cells " << d.merged_bins
      << " chi2 " << format_double(d.chi_square) << " p " << format_double(d.p_value) << '\n';
  for (const auto& name : order) {
    const auto [fail, total] = summary[name];
    out << (fail == 0 ? "PASS " : "FAIL ") << name << ": " << fail << " of " << total
        << " sets violate\n";
  }
  out << (d.fit_passed ? "PASS " : "FAIL ") << "quotient_density_chi_square: p = "
      << format_double(d.p_value) << '\n';
  out << (d.integral_passed ? "PASS " : "FAIL ") << "quotient_density_integral: "
      << format_double(d.integral) << '\n';
  out << (rep.passed() ? "OVERALL PASS" : "OVERALL FAIL") << '\n';
}

}  // namespace cogrelay::experiments
