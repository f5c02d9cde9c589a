#pragma once

// Monte Carlo trial engine. Trial i draws from CounterRng(seed, i), and the
// per-worker tallies are integer counts, so results do not depend on the
// number of workers or on scheduling.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "cogrelay/analytic.hpp"
#include "cogrelay/decision.hpp"
#include "cogrelay/model.hpp"
#include "cogrelay/random.hpp"

namespace cogrelay::mc {

enum class Policy {
  direct,          // never relay
  primary_only,    // relay x_p whenever it is decoded and feasible
  secondary_only,  // relay x_s whenever it is decoded
  adaptive1,
  adaptive2,
};

inline constexpr std::array kAllPolicies = {Policy::direct, Policy::primary_only,
                                            Policy::secondary_only, Policy::adaptive1,
                                            Policy::adaptive2};

constexpr std::string_view to_string(Policy p) noexcept {
  switch (p) {
    case Policy::direct: return "direct";
    case Policy::primary_only: return "primary_only";
    case Policy::secondary_only: return "secondary_only";
    case Policy::adaptive1: return "adaptive1";
    case Policy::adaptive2: return "adaptive2";
  }
  return "?";
}

inline Policy parse_policy(std::string_view name) {
  for (Policy p : kAllPolicies)
    if (to_string(p) == name) return p;
  throw std::invalid_argument("unknown policy: " + std::string(name));
}

/// Everything a trial needs, resolved once per (parameters, topology).
struct Scenario {
  SystemParams params;
  LinkVariances variances;
  Powers powers;
  Thresholds thresholds;
};

inline Scenario make_scenario(const SystemParams& params, const LinkVariances& variances,
                              const Powers& powers) {
  params.validate();
  variances.validate();
  return Scenario{params, variances, powers, Thresholds::from(params)};
}

inline Scenario make_scenario(const SystemParams& params, const Topology& topology,
                              const analytic::PowerOptions& opt = {}) {
  const LinkVariances v = link_variances(topology, params.pathloss_exponent);
  return make_scenario(params, v, analytic::resolve_powers(params, v, opt));
}

inline DecisionOutcome decide(Policy policy, const DecodeEvents& ev, const RelayingMetrics& m,
                              const Powers& pw) {
  switch (policy) {
    case Policy::direct:
      return detail::make_outcome(Decision::direct, pw);
    case Policy::primary_only:
      return detail::make_outcome(
          ev.primary && pw.assist_primary_feasible ? Decision::assist_primary : Decision::direct, pw);
    case Policy::secondary_only:
      return detail::make_outcome(ev.secondary ? Decision::assist_secondary : Decision::direct, pw);
    case Policy::adaptive1:
      return decide_scheme1(ev, m, pw);
    case Policy::adaptive2:
      return decide_scheme2(ev, m, pw);
  }
  throw std::invalid_argument("unknown policy");
}

/// Outcome of one trial.
struct TrialResult {
  Decision decision = Decision::direct;
  bool primary_outage = false;
  bool secondary_outage = false;
};

inline TrialResult run_trial(const Scenario& sc, Policy policy, const ChannelDraw& h) {
  if (sc.powers.secondary <= 0.0) {
    // Silenced secondary: the primary repeats interference-free.
    const double sinr_p = 2.0 * sc.powers.primary * h.pp;
    return {Decision::direct, sinr_p < sc.thresholds.primary, true};
  }
  const DecodeEvents ev = decode_events(h, sc.powers, sc.thresholds);
  const RelayingMetrics m = relaying_metrics(h, sc.powers);
  const DecisionOutcome out = decide(policy, ev, m, sc.powers);
  const SinrPair s = sinr_pair(h, sc.powers, out);
  return {out.decision, s.primary < sc.thresholds.primary, s.secondary < sc.thresholds.secondary};
}

struct OutageEstimate {
  double p_hat = 0.0;
  std::uint64_t trials = 0;
  double half_width_95 = 0.0;                        // normal-approximation CI
  std::array<double, kDecisionCount> decision_freq{};
};

inline double half_width_95(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

/// Binomial standard error of a proportion.
inline double standard_error(double p, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

struct OutageResult {
  OutageEstimate primary;
  OutageEstimate secondary;
};

inline unsigned default_workers() {
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs body(i, tally) for i in [0, n) across `workers` threads; each thread
/// fills its own Tally, and tallies are merged with `merge`. Tally merging
/// must be order-independent (integer counts).
template <class Tally, class Body, class Merge>
Tally parallel_tally(std::uint64_t n, unsigned workers, Body body, Merge merge) {
  constexpr std::uint64_t kChunk = 1 << 14;
  if (workers == 0) workers = default_workers();
  const std::uint64_t chunks = (n + kChunk - 1) / kChunk;
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, std::max<std::uint64_t>(chunks, 1)));
  std::atomic<std::uint64_t> next{0};
  Tally total{};
  std::mutex mu;
  auto work = [&] {
    Tally local{};
    for (std::uint64_t c = next++; c < chunks; c = next++) {
      const std::uint64_t end = std::min(n, (c + 1) * kChunk);
      for (std::uint64_t i = c * kChunk; i < end; ++i) body(i, local);
    }
    std::lock_guard lock(mu);
    merge(total, local);
  };
  if (workers <= 1) {
    work();
    return total;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();  // joins
  return total;
}

namespace detail {

struct OutageTally {
  std::uint64_t trials = 0;
  std::uint64_t primary = 0;
  std::uint64_t secondary = 0;
  std::array<std::uint64_t, kDecisionCount> decisions{};

  void add(const TrialResult& r) {
    ++trials;
    primary += r.primary_outage;
    secondary += r.secondary_outage;
    ++decisions[index_of(r.decision)];
  }
  void merge(const OutageTally& o) {
    trials += o.trials;
    primary += o.primary;
    secondary += o.secondary;
    for (std::size_t d = 0; d < kDecisionCount; ++d) decisions[d] += o.decisions[d];
  }
};

inline OutageEstimate to_estimate(std::uint64_t events, const OutageTally& t) {
  OutageEstimate e;
  e.trials = t.trials;
  if (t.trials == 0) return e;
  const double n = static_cast<double>(t.trials);
  e.p_hat = static_cast<double>(events) / n;
  e.half_width_95 = half_width_95(e.p_hat, t.trials);
  for (std::size_t d = 0; d < kDecisionCount; ++d)
    e.decision_freq[d] = static_cast<double>(t.decisions[d]) / n;
  return e;
}

}  // namespace detail

/// Primary and secondary outage of `policy` over `trials` independent draws.
inline OutageResult estimate_outage(const Scenario& sc, Policy policy, std::uint64_t trials,
                                    std::uint64_t seed, unsigned workers = 0) {
  if (trials == 0) throw std::invalid_argument("trial count must be positive");
  using detail::OutageTally;
  const OutageTally t = parallel_tally<OutageTally>(
      trials, workers,
      [&](std::uint64_t i, OutageTally& tally) {
        CounterRng rng(seed, i);
        tally.add(run_trial(sc, policy, sample_channels(rng, sc.variances)));
      },
      [](OutageTally& into, const OutageTally& from) { into.merge(from); });
  OutageResult r{detail::to_estimate(t.primary, t), detail::to_estimate(t.secondary, t)};
  if (sc.powers.secondary <= 0.0) {
    r.secondary.p_hat = 1.0;
    r.secondary.half_width_95 = 0.0;
  }
  return r;
}

inline OutageResult estimate_outage(const SystemParams& params, const Topology& topology,
                                    Policy policy, std::uint64_t trials, std::uint64_t seed,
                                    unsigned workers = 0) {
  analytic::PowerOptions opt;
  opt.solve_split = policy == Policy::adaptive2;
  return estimate_outage(make_scenario(params, topology, opt), policy, trials, seed, workers);
}

inline constexpr std::uint64_t kMinConditionedSamples = 10000;

struct ConditionalEstimate {
  std::uint64_t accepted = 0;
  std::uint64_t trials = 0;
  std::optional<OutageEstimate> primary;    // empty when too few accepted samples
  std::optional<OutageEstimate> secondary;
};

/// Outage conditioned on `policy` choosing `decision`, by rejection.
inline ConditionalEstimate estimate_conditional_outage(const Scenario& sc, Policy policy,
                                                       Decision decision, std::uint64_t trials,
                                                       std::uint64_t seed, unsigned workers = 0) {
  if (trials == 0) throw std::invalid_argument("trial count must be positive");
  using detail::OutageTally;
  const OutageTally t = parallel_tally<OutageTally>(
      trials, workers,
      [&](std::uint64_t i, OutageTally& tally) {
        CounterRng rng(seed, i);
        const TrialResult r = run_trial(sc, policy, sample_channels(rng, sc.variances));
        if (r.decision == decision) tally.add(r);
      },
      [](OutageTally& into, const OutageTally& from) { into.merge(from); });
  ConditionalEstimate c;
  c.accepted = t.trials;
  c.trials = trials;
  if (t.trials >= kMinConditionedSamples) {
    c.primary = detail::to_estimate(t.primary, t);
    c.secondary = detail::to_estimate(t.secondary, t);
  }
  return c;
}

struct PrimaryConstraintReport {
  double p_hat = 0.0;
  double half_width_95 = 0.0;
  double epsilon = 0.0;
  std::uint64_t trials = 0;
  bool secondary_active = false;
  bool satisfied = false;  // p_hat <= epsilon + 3 half-widths
};

/// Simulated primary outage against the outage target. Violations are
/// reported, not thrown.
inline PrimaryConstraintReport primary_constraint_check(const Scenario& sc, Policy policy,
                                                        std::uint64_t trials, std::uint64_t seed,
                                                        unsigned workers = 0) {
  const OutageResult r = estimate_outage(sc, policy, trials, seed, workers);
  PrimaryConstraintReport rep;
  rep.p_hat = r.primary.p_hat;
  rep.half_width_95 = r.primary.half_width_95;
  rep.epsilon = sc.params.outage_threshold;
  rep.trials = trials;
  rep.secondary_active = sc.powers.secondary > 0.0;
  rep.satisfied = rep.p_hat <= rep.epsilon + 3.0 * rep.half_width_95;
  return rep;
}

/// X = N / (I + 1) with N ~ Exp(num), I ~ Exp(den).
struct QuotientSampler {
  double num = 1.0;
  double den = 0.0;

  template <UniformSource G>
  double operator()(G& gen) const {
    const double n = sample_exponential(gen, num);
    const double i = den > 0.0 ? sample_exponential(gen, den) : 0.0;
    return n / (i + 1.0);
  }
};

/// Equal-width histogram on [0, upper) normalized as a density.
struct Histogram {
  double upper = 0.0;
  double width = 0.0;
  std::uint64_t total = 0;
  std::vector<std::uint64_t> counts;
  std::vector<double> density;

  double edge(std::size_t i) const { return static_cast<double>(i) * width; }
};

/// Histogram of `n` samples over [0, max sample]; every sample lands in a bin.
inline Histogram empirical_pdf(const QuotientSampler& sampler, std::uint64_t n, std::size_t bins,
                               std::uint64_t seed) {
  if (n < 100000) throw std::invalid_argument("empirical_pdf needs at least 1e5 samples");
  if (bins == 0) throw std::invalid_argument("empirical_pdf needs at least one bin");
  std::vector<double> xs(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    CounterRng rng(seed, i);
    xs[i] = sampler(rng);
  }
  Histogram h;
  const double top = *std::max_element(xs.begin(), xs.end());
  h.upper = std::nextafter(top, std::numeric_limits<double>::infinity());
  h.width = h.upper / static_cast<double>(bins);
  h.total = n;
  h.counts.assign(bins, 0);
  for (double x : xs) {
    auto b = static_cast<std::size_t>(x / h.width);
    ++h.counts[std::min(b, bins - 1)];
  }
  h.density.resize(bins);
  for (std::size_t b = 0; b < bins; ++b)
    h.density[b] = static_cast<double>(h.counts[b]) / (static_cast<double>(n) * h.width);
  return h;
}

}  // namespace cogrelay::mc
