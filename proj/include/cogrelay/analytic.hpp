#pragma once

// Closed-form outage probabilities, decision-probability bounds and the relay
// power solvers for the adaptive relaying schemes over Rayleigh fading.
//
// Every quantity gamma_a * |h_ab|^2 is exponential with mean
// g_ab = gamma_a * sigma_ab^2 (the "effective SNR"); the formulas below are
// written in those means.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "cogrelay/model.hpp"
#include "cogrelay/random.hpp"
#include "cogrelay/special.hpp"

namespace cogrelay::analytic {

struct EffectiveSnrs {
  double pp = 0.0;
  double ps = 0.0;
  double pr = 0.0;
  double sp = 0.0;
  double ss = 0.0;
  double sr = 0.0;
  double rp_primary = 0.0;    // relay -> PD at the assist-primary power
  double rs_primary = 0.0;    // relay -> SD at the assist-primary power
  double rp_secondary = 0.0;  // relay -> PD at the assist-secondary power
  double rs_secondary = 0.0;  // relay -> SD at the assist-secondary power
};

inline EffectiveSnrs effective_snrs(const Powers& pw, const LinkVariances& v) {
  return EffectiveSnrs{
      .pp = pw.primary * v.pp,
      .ps = pw.primary * v.ps,
      .pr = pw.primary * v.pr,
      .sp = pw.secondary * v.sp,
      .ss = pw.secondary * v.ss,
      .sr = pw.secondary * v.sr,
      .rp_primary = pw.relay_primary * v.rp,
      .rs_primary = pw.relay_primary * v.rs,
      .rp_secondary = pw.relay_secondary * v.rp,
      .rs_secondary = pw.relay_secondary * v.rs,
  };
}

inline double clamp_probability(double p) { return std::clamp(p, 0.0, 1.0); }

// ---------------------------------------------------------------------------
// Building blocks for ratios of exponentials

/// P(A < C) for independent exponentials with means `mean_a`, `mean_c`.
inline double prob_less(double mean_a, double mean_c) {
  if (mean_c <= 0.0) return 0.0;
  return mean_c / (mean_a + mean_c);
}

/// P(N >= (I + 1) x) for exponential N (mean `num`) and I (mean `den`).
inline double quotient_survival(double x, double num, double den) {
  if (x <= 0.0) return 1.0;
  if (num <= 0.0) return 0.0;
  return num * std::exp(-x / num) / (num + x * den);
}

/// Density of X = N / (I + 1), N and I exponential with means `num`, `den`.
inline double quotient_pdf(double x, double num, double den) {
  if (!(num > 0.0)) throw std::invalid_argument("quotient_pdf needs a positive numerator mean");
  if (x < 0.0) return 0.0;
  const double base = num + x * den;
  return std::exp(-x / num) / base * (1.0 + num * den / base);
}

/// Outage when both sub-slots repeat the first one over a static channel:
/// P(2 X < lambda) with X = N / (I + 1).
inline double cond_outage_D0(double direct, double interferer, double lambda) {
  if (lambda <= 0.0) return 0.0;
  if (direct <= 0.0) return 1.0;
  return clamp_probability(1.0 - quotient_survival(0.5 * lambda, direct, interferer));
}

/// P((U + W) / (I + 1) < lambda) for independent exponentials U, W, I with
/// means `direct`, `relayed`, `interferer`: the MRC outage when a relayed
/// copy arrives under the same interferer as the direct copy.
///
/// Survival is the divided difference [h(a) - h(r)] / (a - r) of
/// h(m) = m^2 exp(-lambda/m) / (m + lambda * interferer); for a ~ r it is
/// replaced by h' at the midpoint.
inline double combined_outage_shared_interferer(double direct, double relayed, double interferer,
                                                double lambda) {
  if (lambda <= 0.0) return 0.0;
  const double a = std::max(direct, 0.0);
  const double r = std::max(relayed, 0.0);
  if (a <= 0.0 && r <= 0.0) return 1.0;
  const double s = lambda * std::max(interferer, 0.0);
  auto h = [&](double m) { return m <= 0.0 ? 0.0 : m * m * std::exp(-lambda / m) / (m + s); };
  double survival = 0.0;
  if (std::abs(a - r) <= 1e-6 * std::max(a, r)) {
    const double m = 0.5 * (a + r);
    survival = std::exp(-lambda / m) * ((2.0 * m + lambda) * (m + s) - m * m) / ((m + s) * (m + s));
  } else {
    survival = (h(a) - h(r)) / (a - r);
  }
  return clamp_probability(1.0 - survival);
}

/// Exact primary outage when the relay forwards x_p (D = 1).
inline double cond_primary_outage_D1(const EffectiveSnrs& g, double lambda_p) {
  return combined_outage_shared_interferer(g.pp, g.rp_primary, g.sp, lambda_p);
}

/// Exact secondary outage when the relay forwards x_s (D = 2).
inline double cond_secondary_outage_D2(const EffectiveSnrs& g, double lambda_s) {
  return combined_outage_shared_interferer(g.ss, g.rs_secondary, g.ps, lambda_s);
}

/// 1 - exp(-L/d) (1 + ln(1 + L i / d) / i): the convolution of a direct-link
/// quotient with an independent copy of its numerator.
inline double convolution_phi(double direct, double interferer, double lambda) {
  if (lambda <= 0.0) return 0.0;
  if (direct <= 0.0) return 1.0;
  const double ratio = lambda / direct;
  const double log_term =
      interferer > 0.0 ? std::log1p(lambda * interferer / direct) / interferer : ratio;
  return -std::expm1(-ratio) - std::exp(-ratio) * log_term;
}

/// Upper bound on the secondary outage when the relay forwards x_p (D = 1),
/// phi * (g_rs + 1), clamped to [0, 1].
inline double cond_secondary_outage_D1_upper(const EffectiveSnrs& g, double lambda_s) {
  return clamp_probability(convolution_phi(g.ss, g.ps, lambda_s) * (g.rs_primary + 1.0));
}

/// Mirror bound for the primary outage when the relay forwards x_s (D = 2).
inline double cond_primary_outage_D2_upper(const EffectiveSnrs& g, double lambda_p) {
  return clamp_probability(convolution_phi(g.pp, g.sp, lambda_p) * (g.rp_secondary + 1.0));
}

/// Exact primary outage when the relay forwards x_s (D = 2):
/// P(U (1/(I1+1) + 1/(I2+1)) < lambda) with U ~ Exp(g_pp) and the two
/// interferers I1 ~ Exp(g_sp), I2 ~ Exp(g_rp). U is integrated in closed form,
/// the interferers by nested adaptive Gauss-Kronrod.
inline double cond_primary_outage_D2(double direct, double secondary_interferer,
                                     double relay_interferer, double lambda) {
  if (lambda <= 0.0) return 0.0;
  if (direct <= 0.0) return 1.0;
  const double k = lambda / direct;
  auto outage_given = [k](double i1, double i2) {
    const double harmonic = (i1 + 1.0) * (i2 + 1.0) / (i1 + i2 + 2.0);
    return -std::expm1(-k * harmonic);
  };
  using boost::math::quadrature::gauss_kronrod;
  constexpr double inf = std::numeric_limits<double>::infinity();
  constexpr double tol = 1e-10;
  auto inner = [&](double i1) {
    if (relay_interferer <= 0.0) return outage_given(i1, 0.0);
    auto f = [&](double i2) {
      return outage_given(i1, i2) * std::exp(-i2 / relay_interferer) / relay_interferer;
    };
    return gauss_kronrod<double, 31>::integrate(f, 0.0, inf, 12, tol);
  };
  if (secondary_interferer <= 0.0) return clamp_probability(inner(0.0));
  auto outer = [&](double i1) {
    return inner(i1) * std::exp(-i1 / secondary_interferer) / secondary_interferer;
  };
  return clamp_probability(gauss_kronrod<double, 31>::integrate(outer, 0.0, inf, 12, tol));
}

inline double cond_primary_outage_D2(const EffectiveSnrs& g, double lambda_p) {
  return cond_primary_outage_D2(g.pp, g.sp, g.rp_secondary, lambda_p);
}

// ---------------------------------------------------------------------------
// Decision-probability bounds

/// Upper bound on P(N1/(I1+1) > N2/(I2+1)) for independent exponentials,
/// (1 + i2)/i2 * e^x E1(x) with x = (1 + n2/n1) / i2. It does not depend on
/// the mean of I1, which is bounded out.
inline double quotient_exceeds_upper(double n1, double n2, double i2) {
  if (n1 <= 0.0) return 0.0;
  if (n2 <= 0.0) return 1.0;
  const double spread = 1.0 + n2 / n1;
  if (i2 <= 0.0) return clamp_probability(1.0 / spread);
  const double x = spread / i2;
  return clamp_probability((1.0 + i2) * x * expint_e1_scaled(x) / spread);
}

/// Upper bound on P(a_p > a_s).
inline double prob_ap_gt_as_upper(const EffectiveSnrs& g) {
  return quotient_exceeds_upper(g.ss, g.rs_secondary, g.ps);
}

/// Upper bound on P(a_s > a_p).
inline double prob_as_gt_ap_upper(const EffectiveSnrs& g) {
  return quotient_exceeds_upper(g.rs_secondary, g.ss, g.rs_primary);
}

namespace detail {

// Shared skeleton of the D = 1 / D = 2 bounds. `own` is the relay-side
// effective SNR of the signal being assisted, `other` that of the competing
// signal; `lambda_own`, `lambda_other` the matching thresholds.
inline double decision_upper(double own, double other, double lambda_own, double lambda_other,
                             double beats_direct, double beats_other) {
  const double decode_own = quotient_survival(lambda_own, own, other);
  const double decode_other = quotient_survival(lambda_other, other, own);
  const double product = lambda_own * lambda_other;
  double bound = 0.0;
  if (product < 1.0) {
    // Corner of the region where the relay decodes both signals.
    const double other_corner = lambda_other * (1.0 + lambda_own) / (1.0 - product);
    const double own_corner = lambda_own * (1.0 + lambda_other) / (1.0 - product);
    const double beyond_other = other > 0.0 ? std::exp(-other_corner / other) : 0.0;
    const double beyond_own = own > 0.0 ? std::exp(-own_corner / own) : 0.0;
    const double t1 = beats_direct * decode_own * beyond_other;
    const double t2 = beats_direct * (1.0 - decode_other) * (1.0 - beyond_other);
    const double t3 = beats_other * beats_direct * decode_other * beyond_own;
    bound = t1 + t2 + t3;
  } else {
    // Joint decoding without SIC is impossible; continuous limit of the above.
    bound = beats_direct * (1.0 - decode_other);
  }
  // The mode needs its own signal decoded, so P(decode_own) is also a bound.
  return clamp_probability(std::min(bound, decode_own));
}

}  // namespace detail

/// Upper bound on P(D = 1) under scheme 1.
inline double prob_decision1_upper(const EffectiveSnrs& g, double lambda_p, double lambda_s) {
  const double beats_direct = prob_less(g.rs_primary, g.ps);  // P(a_p > a_0)
  return detail::decision_upper(g.pr, g.sr, lambda_p, lambda_s, beats_direct,
                                prob_ap_gt_as_upper(g));
}

/// Upper bound on P(D = 2) under scheme 1 (roles of the two signals swapped).
inline double prob_decision2_upper(const EffectiveSnrs& g, double lambda_p, double lambda_s) {
  const double beats_direct = prob_less(g.ss, g.rs_secondary);  // P(a_s > a_0)
  return detail::decision_upper(g.sr, g.pr, lambda_s, lambda_p, beats_direct,
                                prob_as_gt_ap_upper(g));
}

// ---------------------------------------------------------------------------
// Combined outage

struct OutageBreakdown {
  std::array<double, 3> p_decision{};      // D = 0, 1, 2
  std::array<double, 3> cond_primary{};
  std::array<double, 3> cond_secondary{};
  double total_primary = 0.0;
  double total_secondary = 0.0;
};

/// Decision-weighted outage sums, clamped to [0, 1]. Returns {primary, secondary}.
inline std::pair<double, double> total_outage_upper(const std::array<double, 3>& p_decision,
                                                    const std::array<double, 3>& cond_primary,
                                                    const std::array<double, 3>& cond_secondary) {
  double sum = 0.0;
  for (double p : p_decision) {
    if (p < -1e-12 || p > 1.0 + 1e-12) throw std::invalid_argument("decision probability out of range");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("decision probabilities must sum to one");
  double pri = 0.0;
  double sec = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    pri += p_decision[i] * cond_primary[i];
    sec += p_decision[i] * cond_secondary[i];
  }
  return {clamp_probability(pri), clamp_probability(sec)};
}

/// Analytic outage bounds for scheme 1.
inline OutageBreakdown scheme1_breakdown(const EffectiveSnrs& g, double lambda_p, double lambda_s) {
  OutageBreakdown b;
  double p1 = prob_decision1_upper(g, lambda_p, lambda_s);
  double p2 = prob_decision2_upper(g, lambda_p, lambda_s);
  if (p1 + p2 > 1.0) {
    // Both bounds are loose; keep their ratio and leave no mass for D = 0.
    const double total = p1 + p2;
    p1 /= total;
    p2 /= total;
  }
  b.p_decision = {std::max(0.0, 1.0 - p1 - p2), p1, p2};
  b.cond_primary = {cond_outage_D0(g.pp, g.sp, lambda_p), cond_primary_outage_D1(g, lambda_p),
                    cond_primary_outage_D2(g, lambda_p)};
  b.cond_secondary = {cond_outage_D0(g.ss, g.ps, lambda_s), cond_secondary_outage_D1_upper(g, lambda_s),
                      cond_secondary_outage_D2(g, lambda_s)};
  std::tie(b.total_primary, b.total_secondary) =
      total_outage_upper(b.p_decision, b.cond_primary, b.cond_secondary);
  return b;
}

// ---------------------------------------------------------------------------
// Relay power solvers

/// Smallest relay SNR in [0, relay_max] that brings the exact D = 1 primary
/// outage down to `epsilon`; nullopt when even relay_max is not enough.
/// `pp`, `sp` are effective SNRs of the direct and interfering links at PD,
/// `relay_variance` is sigma_rp^2.
inline std::optional<double> relay_power_D1(double pp, double sp, double relay_variance,
                                            double lambda_p, double epsilon, double relay_max) {
  auto outage = [&](double relay_snr) {
    return combined_outage_shared_interferer(pp, relay_snr * relay_variance, sp, lambda_p);
  };
  if (outage(0.0) <= epsilon) return 0.0;
  if (outage(relay_max) > epsilon) return std::nullopt;
  double lo = 0.0;
  double hi = relay_max;
  for (int it = 0; it < 200 && hi - lo > 1e-6 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (outage(mid) <= epsilon ? hi : lo) = mid;
  }
  return hi;
}

/// Relay SNR for D = 2 from the phi'-bound: (epsilon/phi' - 1) / sigma_rp^2,
/// clamped to [0, relay_max].
inline double relay_power_d2_closed_form(double pp, double sp, double relay_variance,
                                         double lambda_p, double epsilon, double relay_max) {
  const double phi = convolution_phi(pp, sp, lambda_p);
  if (phi <= 0.0) return relay_max;
  const double num = (epsilon / phi - 1.0) / relay_variance;
  return std::clamp(num, 0.0, relay_max);
}

/// Largest relay SNR in [0, relay_max] keeping the exact D = 2 primary outage
/// at or below `epsilon`. Zero when even a silent relay misses the target.
inline double relay_power_D2(double pp, double sp, double relay_variance, double lambda_p,
                             double epsilon, double relay_max) {
  auto outage = [&](double relay_snr) {
    return cond_primary_outage_D2(pp, sp, relay_snr * relay_variance, lambda_p);
  };
  const double at_max = outage(relay_max) - epsilon;
  if (at_max <= 0.0) return relay_max;
  const double at_zero = outage(0.0) - epsilon;
  if (at_zero > 0.0) return 0.0;
  // Each evaluation is a nested quadrature, so use a bracketing solver that
  // converges in far fewer steps than bisection; keep the feasible end.
  boost::uintmax_t iters = 100;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      [&](double r) { return outage(r) - epsilon; }, 0.0, relay_max, at_zero, at_max,
      [](double a, double b) { return b - a <= 1e-6 * b; }, iters);
  (void)hi;
  return lo;
}

/// Seed of the sample set used by solve_power_split.
inline constexpr std::uint64_t kPowerSplitSeed = 0x5eed'a1fa'0000'0001ULL;

/// Smallest x_p share alpha in [0, 1] of the superposed relay power such that
/// the D = 3 primary outage, estimated on a fixed sample of the PD-side
/// channels, is at most `epsilon`. The same samples are reused for every
/// alpha, so the estimate is monotone in alpha and bisection is exact on it.
inline std::optional<double> solve_power_split(const LinkVariances& v, double snr_primary,
                                               double snr_secondary, double relay_snr,
                                               double lambda_p, double epsilon,
                                               std::uint64_t seed = kPowerSplitSeed,
                                               std::size_t draws = 100000) {
  if (draws == 0) throw std::invalid_argument("power split needs at least one draw");
  std::vector<double> first_slot(draws);
  std::vector<double> relay_gain(draws);
  for (std::size_t i = 0; i < draws; ++i) {
    CounterRng rng(seed, i);
    const double pp = sample_exponential(rng, v.pp);
    const double sp = sample_exponential(rng, v.sp);
    const double rp = sample_exponential(rng, v.rp);
    first_slot[i] = snr_primary * pp / (snr_secondary * sp + 1.0);
    relay_gain[i] = relay_snr * rp;
  }
  const auto allowed = static_cast<std::size_t>(std::floor(epsilon * static_cast<double>(draws)));
  auto within_target = [&](double alpha) {
    std::size_t outages = 0;
    for (std::size_t i = 0; i < draws; ++i) {
      const double w = relay_gain[i];
      if (first_slot[i] + alpha * w / ((1.0 - alpha) * w + 1.0) < lambda_p) ++outages;
    }
    return outages <= allowed;
  };
  if (within_target(0.0)) return 0.0;
  if (!within_target(1.0)) return std::nullopt;
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (within_target(mid) ? hi : lo) = mid;
  }
  return hi;
}

enum class D2PowerRule { exact, closed_form };

struct PowerOptions {
  D2PowerRule d2_rule = D2PowerRule::exact;
  bool solve_split = true;  // needed only for scheme 2
  std::uint64_t split_seed = kPowerSplitSeed;
  std::size_t split_draws = 100000;
};

/// Resolves every transmit SNR for one (parameters, topology) pair.
inline Powers resolve_powers(const SystemParams& params, const LinkVariances& v,
                             const PowerOptions& opt = {}) {
  params.validate();
  v.validate();
  const Thresholds th = Thresholds::from(params);
  Powers pw;
  pw.primary = params.snr_primary;
  pw.secondary = secondary_power(params, v);
  pw.relay_both = params.snr_relay_max;
  if (pw.secondary <= 0.0) {
    // Secondary silenced: the cognitive relay stays silent too.
    pw.relay_primary = 0.0;
    pw.relay_secondary = 0.0;
    pw.relay_both = 0.0;
    pw.assist_primary_feasible = false;
    pw.assist_both_feasible = false;
    return pw;
  }
  const double pp = pw.primary * v.pp;
  const double sp = pw.secondary * v.sp;
  const double eps = params.outage_threshold;
  const double rmax = params.snr_relay_max;

  if (auto r = relay_power_D1(pp, sp, v.rp, th.primary, eps, rmax)) {
    pw.relay_primary = *r;
    pw.assist_primary_feasible = true;
  } else {
    pw.relay_primary = rmax;
    pw.assist_primary_feasible = false;
  }

  pw.relay_secondary = opt.d2_rule == D2PowerRule::exact
                           ? relay_power_D2(pp, sp, v.rp, th.primary, eps, rmax)
                           : relay_power_d2_closed_form(pp, sp, v.rp, th.primary, eps, rmax);

  pw.assist_both_feasible = false;
  pw.alpha = 1.0;
  if (opt.solve_split) {
    if (auto a = solve_power_split(v, pw.primary, pw.secondary, rmax, th.primary, eps,
                                   opt.split_seed, opt.split_draws)) {
      pw.alpha = *a;
      pw.assist_both_feasible = true;
    }
  }
  return pw;
}

}  // namespace cogrelay::analytic
