#pragma once

// Analytic-vs-simulation checks: exactness of the shared-interferer MRC
// outage, dominance of every upper bound over its simulated counterpart, and
// a goodness-of-fit test of the quotient density.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "cogrelay/analytic.hpp"
#include "cogrelay/montecarlo.hpp"

namespace cogrelay::validation {

/// One randomized operating point. Transmit SNRs of PT and ST are folded into
/// the variances (both SNRs are 1), so every variance is an effective SNR.
struct ParameterSet {
  LinkVariances variances;
  Powers powers;
  Thresholds thresholds;
};

struct GridSpec {
  std::size_t sets = 20;
  double gain_min = 0.01;     // effective SNRs of the transmitter links
  double gain_max = 200.0;
  double lambda_min = 0.1;
  double lambda_max = 5.0;
  double relay_var_min = 0.1;  // sigma_rp^2, sigma_rs^2
  double relay_var_max = 2.0;
  double relay_snr_min = 0.1;
  double relay_snr_max = 100.0;
};

inline constexpr std::uint64_t kGridStream = 0x6772'6964;  // "grid"

namespace detail {

inline double log_uniform(CounterRng& rng, double lo, double hi) {
  return lo * std::exp(rng.uniform() * std::log(hi / lo));
}

inline double uniform(CounterRng& rng, double lo, double hi) {
  return lo + rng.uniform() * (hi - lo);
}

}  // namespace detail

/// Reproducible random parameter grid; set i depends only on (seed, i).
inline std::vector<ParameterSet> random_grid(const GridSpec& spec, std::uint64_t seed) {
  std::vector<ParameterSet> out;
  out.reserve(spec.sets);
  for (std::size_t i = 0; i < spec.sets; ++i) {
    CounterRng rng(derive_seed(seed, kGridStream), i);
    auto gain = [&] { return detail::log_uniform(rng, spec.gain_min, spec.gain_max); };
    ParameterSet s;
    s.variances.pp = gain();
    s.variances.ps = gain();
    s.variances.pr = gain();
    s.variances.sp = gain();
    s.variances.ss = gain();
    s.variances.sr = gain();
    s.variances.rp = detail::uniform(rng, spec.relay_var_min, spec.relay_var_max);
    s.variances.rs = detail::uniform(rng, spec.relay_var_min, spec.relay_var_max);
    s.powers.primary = 1.0;
    s.powers.secondary = 1.0;
    s.powers.relay_primary = detail::log_uniform(rng, spec.relay_snr_min, spec.relay_snr_max);
    s.powers.relay_secondary = detail::log_uniform(rng, spec.relay_snr_min, spec.relay_snr_max);
    s.powers.relay_both = s.powers.relay_primary;
    s.thresholds.primary = detail::uniform(rng, spec.lambda_min, spec.lambda_max);
    s.thresholds.secondary = detail::uniform(rng, spec.lambda_min, spec.lambda_max);
    out.push_back(s);
  }
  return out;
}

enum class CheckKind { exact, upper_bound };

/// Outcome of one check on one parameter set.
struct CheckResult {
  std::string name;
  std::size_t set = 0;
  CheckKind kind = CheckKind::upper_bound;
  double analytic = 0.0;
  double simulated = 0.0;
  double standard_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool passed = false;

  /// Discrepancy in standard errors; positive means the simulation exceeds
  /// the analytic value.
  double z() const {
    const double d = simulated - analytic;
    if (standard_error > 0.0) return d / standard_error;
    return d == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(), d);
  }
};

inline constexpr double kSigmaTolerance = 3.0;

/// Binomial standard error, floored at the resolution of one event in n.
inline double binomial_se(double p, std::uint64_t n) {
  return std::max(mc::standard_error(std::clamp(p, 0.0, 1.0), n), 1.0 / static_cast<double>(n));
}

inline CheckResult judge(std::string name, std::size_t set, CheckKind kind, double analytic,
                         double simulated, std::uint64_t trials, std::uint64_t seed) {
  CheckResult r{std::move(name), set, kind, analytic, simulated, 0.0, trials, seed, false};
  // Exactness is judged on the analytic value's spread, dominance on the
  // estimate's.
  r.standard_error = binomial_se(kind == CheckKind::exact ? analytic : simulated, trials);
  const double tol = kSigmaTolerance * r.standard_error;
  r.passed = kind == CheckKind::exact ? std::abs(simulated - analytic) <= tol
                                      : analytic >= simulated - tol;
  return r;
}

/// Fraction of trials for which pred(rng) holds; trial i uses CounterRng(seed, i).
template <class Pred>
double event_frequency(std::uint64_t trials, std::uint64_t seed, unsigned workers, Pred pred) {
  const auto count = mc::parallel_tally<std::uint64_t>(
      trials, workers,
      [&](std::uint64_t i, std::uint64_t& c) {
        CounterRng rng(seed, i);
        c += pred(rng) ? 1 : 0;
      },
      [](std::uint64_t& into, std::uint64_t from) { into += from; });
  return static_cast<double>(count) / static_cast<double>(trials);
}

struct SimulationBudget {
  std::uint64_t exact_trials = 10'000'000;  // shared-interferer exactness
  std::uint64_t bound_trials = 1'000'000;   // every dominance check
  unsigned workers = 0;
};

/// Analytic values are evaluated with both thresholds multiplied by
/// `lambda_scale`; the simulation always uses the true thresholds. A scale
/// other than 1 is a negative control that must trip the checks.
inline std::vector<CheckResult> run_checks(const ParameterSet& s, std::size_t index,
                                           std::uint64_t seed, const SimulationBudget& budget,
                                           double lambda_scale = 1.0) {
  using namespace analytic;
  const EffectiveSnrs g = effective_snrs(s.powers, s.variances);
  const double lp = s.thresholds.primary;
  const double ls = s.thresholds.secondary;
  const double alp = lp * lambda_scale;
  const double als = ls * lambda_scale;
  const LinkVariances& v = s.variances;
  const Powers& pw = s.powers;
  const std::uint64_t base = derive_seed(seed, index);
  auto sub = [&](std::uint64_t k) { return derive_seed(base, k); };
  const unsigned w = budget.workers;
  std::vector<CheckResult> out;

  {
    const std::uint64_t sd = sub(1);
    const std::uint64_t n = budget.exact_trials;
    const double sim = event_frequency(n, sd, w, [&](CounterRng& r) {
      const double u = sample_exponential(r, g.pp);
      const double x = sample_exponential(r, g.rp_primary);
      const double i = sample_exponential(r, g.sp);
      return (u + x) / (i + 1.0) < lp;
    });
    out.push_back(judge("mrc_shared_interferer_exact", index, CheckKind::exact,
                        cond_primary_outage_D1(g, alp), sim, n, sd));
  }

  const std::uint64_t n = budget.bound_trials;
  {
    const std::uint64_t sd = sub(2);
    const double sim = event_frequency(n, sd, w, [&](CounterRng& r) {
      const double x = sample_exponential(r, g.ss);
      const double i1 = sample_exponential(r, g.ps);
      const double i2 = sample_exponential(r, g.rs_primary);
      return x / (i1 + 1.0) + x / (i2 + 1.0) < ls;
    });
    out.push_back(judge("secondary_outage_d1_bound", index, CheckKind::upper_bound,
                        cond_secondary_outage_D1_upper(g, als), sim, n, sd));
  }
  {
    // a_p > a_s with the relay-to-SD gain shared by both metrics.
    const std::uint64_t sd = sub(3);
    const double sim = event_frequency(n, sd, w, [&](CounterRng& r) {
      const ChannelDraw h = sample_channels(r, v);
      const RelayingMetrics m = relaying_metrics(h, pw);
      return m.assist_primary > m.assist_secondary;
    });
    out.push_back(judge("quotient_comparison_bound_ap", index, CheckKind::upper_bound,
                        prob_ap_gt_as_upper(g), sim, n, sd));
  }
  {
    const std::uint64_t sd = sub(4);
    const double sim = event_frequency(n, sd, w, [&](CounterRng& r) {
      const ChannelDraw h = sample_channels(r, v);
      const RelayingMetrics m = relaying_metrics(h, pw);
      return m.assist_secondary > m.assist_primary;
    });
    out.push_back(judge("quotient_comparison_bound_as", index, CheckKind::upper_bound,
                        prob_as_gt_ap_upper(g), sim, n, sd));
  }
  {
    // Full scheme-1 pipeline: decision frequencies and secondary outage.
    const std::uint64_t sd = sub(5);
    const mc::Scenario sc{SystemParams{}, v, pw, s.thresholds};
    const mc::OutageResult r = mc::estimate_outage(sc, mc::Policy::adaptive1, n, sd, w);
    const auto& freq = r.secondary.decision_freq;
    out.push_back(judge("decision1_bound", index, CheckKind::upper_bound,
                        prob_decision1_upper(g, alp, als), freq[1], n, sd));
    out.push_back(judge("decision2_bound", index, CheckKind::upper_bound,
                        prob_decision2_upper(g, alp, als), freq[2], n, sd));
    out.push_back(judge("scheme1_secondary_outage_bound", index, CheckKind::upper_bound,
                        scheme1_breakdown(g, alp, als).total_secondary, r.secondary.p_hat, n, sd));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quotient density

struct DensityCheck {
  double num = 0.0;
  double den = 0.0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::size_t bins = 0;
  std::size_t merged_bins = 0;  // after pooling bins with expected count < 5
  double chi_square = 0.0;
  double p_value = 0.0;
  double integral = 0.0;        // of the analytic density over [0, inf)
  double histogram_mass = 0.0;  // sum of density * width
  bool fit_passed = false;
  bool integral_passed = false;
};

inline double integrate_quotient_pdf(double num, double den, double a, double b) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [&](double x) { return analytic::quotient_pdf(x, num, den); };
  return gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

inline DensityCheck check_quotient_density(double num, double den, std::uint64_t samples,
                                           std::size_t bins, std::uint64_t seed,
                                           double alpha = 0.01) {
  DensityCheck c{num, den, samples, seed, bins};
  const mc::Histogram h = mc::empirical_pdf(mc::QuotientSampler{num, den}, samples, bins, seed);
  double mass = 0.0;
  for (double d : h.density) mass += d * h.width;
  c.histogram_mass = mass;

  const double total = static_cast<double>(samples);
  double chi = 0.0;
  double pooled_obs = 0.0;
  double pooled_exp = 0.0;
  std::size_t cells = 0;
  for (std::size_t b = 0; b < bins; ++b) {
    const double hi = b + 1 == bins ? std::numeric_limits<double>::infinity() : h.edge(b + 1);
    pooled_exp += total * integrate_quotient_pdf(num, den, h.edge(b), hi);
    pooled_obs += static_cast<double>(h.counts[b]);
    if (pooled_exp >= 5.0) {
      chi += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
      pooled_obs = pooled_exp = 0.0;
      ++cells;
    }
  }
  if (pooled_exp > 0.0) {
    // Leftover tail joins the last full cell's statistic as its own term.
    chi += (pooled_obs - pooled_exp) * (pooled_obs - pooled_exp) / pooled_exp;
    ++cells;
  }
  c.merged_bins = cells;
  c.chi_square = chi;
  if (cells >= 2) {
    const boost::math::chi_squared dist(static_cast<double>(cells - 1));
    c.p_value = boost::math::cdf(boost::math::complement(dist, chi));
  }
  c.fit_passed = cells >= 2 && c.p_value > alpha;
  c.integral = integrate_quotient_pdf(num, den, 0.0, std::numeric_limits<double>::infinity());
  c.integral_passed = std::abs(c.integral - 1.0) <= 1e-8;
  return c;
}

}  // namespace cogrelay::validation
