#pragma once

// System model: parameters, geometry, per-link Rayleigh statistics, channel
// sampling and the secondary power allocation.
//
// All powers are SNRs (transmit power over noise power); noise is normalized
// to one throughout. dB values are converted at the CLI boundary only.

#include <cmath>
#include <concepts>
#include <stdexcept>
#include <string>

#include "cogrelay/random.hpp"

namespace cogrelay {

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

struct SystemParams {
  double rate_primary = 0.8;       // bits/s/Hz
  double rate_secondary = 0.2;     // bits/s/Hz
  double outage_threshold = 0.1;   // primary outage target, in (0, 1)
  double snr_primary = 100.0;      // linear
  double snr_relay_max = 100.0;    // linear
  double pathloss_exponent = 4.0;

  void validate() const {
    if (!(rate_primary >= 0.0) || !(rate_secondary >= 0.0))
      throw std::invalid_argument("rates must be non-negative");
    if (!(outage_threshold > 0.0 && outage_threshold < 1.0))
      throw std::invalid_argument("outage threshold must lie in (0, 1)");
    if (!(snr_primary >= 0.0) || !(snr_relay_max >= 0.0))
      throw std::invalid_argument("SNRs must be non-negative");
    if (!(pathloss_exponent > 0.0))
      throw std::invalid_argument("path-loss exponent must be positive");
  }
};

/// SINR threshold for rate R delivered over two sub-slots: 2^(2R) - 1.
inline double lambda_threshold(double rate) {
  if (!(rate >= 0.0)) throw std::invalid_argument("rate must be non-negative");
  return std::exp2(2.0 * rate) - 1.0;
}

/// Decoding thresholds for both links, computed once per parameter set.
struct Thresholds {
  double primary = 0.0;
  double secondary = 0.0;

  static Thresholds from(const SystemParams& params) {
    return {lambda_threshold(params.rate_primary), lambda_threshold(params.rate_secondary)};
  }
};

struct Point {
  double x = 0.0;
  double y = 0.0;
};

inline double distance(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

/// Nodes closer than this are treated as coincident.
inline constexpr double kCoincidenceTolerance = 1e-9;

struct Topology {
  Point primary_tx{0.0, 1.82};
  Point secondary_tx{0.0, 0.0};
  Point primary_rx{1.0, 1.82};
  Point secondary_rx{1.0, 0.0};
  Point relay{0.5, 0.91};

  /// True when every pair of nodes is separated by more than kCoincidenceTolerance.
  bool is_valid() const {
    const Point nodes[] = {primary_tx, secondary_tx, primary_rx, secondary_rx, relay};
    for (int i = 0; i < 5; ++i)
      for (int j = i + 1; j < 5; ++j)
        if (!(distance(nodes[i], nodes[j]) > kCoincidenceTolerance)) return false;
    return true;
  }
};

/// Rayleigh variances sigma^2 = d^(-beta) for every link the protocols use.
/// Naming: first letter transmitter, second receiver (p = primary,
/// s = secondary, r = relay); `ps` is primary transmitter to secondary receiver.
struct LinkVariances {
  double pp = 1.0;
  double ps = 1.0;
  double pr = 1.0;
  double sp = 1.0;
  double ss = 1.0;
  double sr = 1.0;
  double rp = 1.0;
  double rs = 1.0;

  void validate() const {
    for (double v : {pp, ps, pr, sp, ss, sr, rp, rs})
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("link variances must be positive and finite");
  }
};

inline LinkVariances link_variances(const Topology& topo, double pathloss_exponent) {
  if (!topo.is_valid()) throw std::invalid_argument("topology has coincident nodes");
  if (!(pathloss_exponent > 0.0)) throw std::invalid_argument("path-loss exponent must be positive");
  auto var = [&](Point a, Point b) { return std::pow(distance(a, b), -pathloss_exponent); };
  return LinkVariances{
      .pp = var(topo.primary_tx, topo.primary_rx),
      .ps = var(topo.primary_tx, topo.secondary_rx),
      .pr = var(topo.primary_tx, topo.relay),
      .sp = var(topo.secondary_tx, topo.primary_rx),
      .ss = var(topo.secondary_tx, topo.secondary_rx),
      .sr = var(topo.secondary_tx, topo.relay),
      .rp = var(topo.relay, topo.primary_rx),
      .rs = var(topo.relay, topo.secondary_rx),
  };
}

/// One block-static realization of all squared channel magnitudes |h_ab|^2.
struct ChannelDraw {
  double pp = 0.0;
  double ps = 0.0;
  double pr = 0.0;
  double sp = 0.0;
  double ss = 0.0;
  double sr = 0.0;
  double rp = 0.0;
  double rs = 0.0;
};

/// Transmit SNRs resolved for one (parameters, topology) pair.
struct Powers {
  double primary = 0.0;            // gamma_p
  double secondary = 0.0;          // gamma_s
  double relay_primary = 0.0;      // relay SNR when forwarding x_p
  double relay_secondary = 0.0;    // relay SNR when forwarding x_s
  double relay_both = 0.0;         // relay SNR when forwarding both (superposition)
  double alpha = 1.0;              // share of relay_both spent on x_p
  bool assist_primary_feasible = true;
  bool assist_both_feasible = false;
};

/// Slack term of the secondary power rule; non-positive means the secondary
/// cannot transmit without breaking the primary outage target.
inline double secondary_power_slack(const SystemParams& params, const LinkVariances& v) {
  const double lp = lambda_threshold(params.rate_primary);
  if (params.snr_primary <= 0.0) return -1.0;
  return std::exp(-lp / (2.0 * params.snr_primary * v.pp)) / (1.0 - params.outage_threshold) - 1.0;
}

/// Largest secondary SNR keeping the primary (repeating over both sub-slots)
/// at its outage target. Zero when the slack is non-positive.
inline double secondary_power(const SystemParams& params, const LinkVariances& v) {
  params.validate();
  const double rho = secondary_power_slack(params, v);
  if (rho <= 0.0) return 0.0;
  const double lp = lambda_threshold(params.rate_primary);
  // A zero-rate primary never fails; cap the secondary at the primary's SNR.
  if (lp <= 0.0) return params.snr_primary;
  return 2.0 * params.snr_primary * v.pp * rho / (lp * v.sp);
}

/// Primary SNR at which the secondary power rule switches on.
inline double secondary_cutoff_snr(const SystemParams& params, const LinkVariances& v) {
  const double lp = lambda_threshold(params.rate_primary);
  return lp / (2.0 * v.pp * std::log(1.0 / (1.0 - params.outage_threshold)));
}

/// Primary rate above which the secondary is silenced at the given primary SNR.
inline double secondary_cutoff_rate(const SystemParams& params, const LinkVariances& v) {
  const double lp = 2.0 * params.snr_primary * v.pp * std::log(1.0 / (1.0 - params.outage_threshold));
  return 0.5 * std::log2(1.0 + lp);
}

template <class G>
concept UniformSource = requires(G g) {
  { g.uniform() } -> std::convertible_to<double>;
};

/// Exponential variate with the given mean by inverse-CDF transform.
template <UniformSource G>
double sample_exponential(G& gen, double mean) {
  return -mean * std::log1p(-gen.uniform());
}

/// Draws all eight gains; |h_ab|^2 ~ Exponential(mean sigma_ab^2).
template <UniformSource G>
ChannelDraw sample_channels(G& gen, const LinkVariances& v) {
  ChannelDraw d;
  d.pp = sample_exponential(gen, v.pp);
  d.ps = sample_exponential(gen, v.ps);
  d.pr = sample_exponential(gen, v.pr);
  d.sp = sample_exponential(gen, v.sp);
  d.ss = sample_exponential(gen, v.ss);
  d.sr = sample_exponential(gen, v.sr);
  d.rp = sample_exponential(gen, v.rp);
  d.rs = sample_exponential(gen, v.rs);
  return d;
}

}  // namespace cogrelay
