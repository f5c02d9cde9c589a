#pragma once

// Adaptive relaying protocols: what the relay decodes during the first
// sub-slot, which relaying mode it picks, and the resulting MRC SINRs at both
// destinations after the second sub-slot.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string_view>

#include "cogrelay/model.hpp"

namespace cogrelay {

/// Relaying mode for the second sub-slot. Numeric values match the usual
/// D = 0..3 labels.
enum class Decision : std::uint8_t {
  direct = 0,            // transmitters repeat, relay silent
  assist_primary = 1,    // relay forwards x_p, ST repeats x_s
  assist_secondary = 2,  // relay forwards x_s, PT repeats x_p
  assist_both = 3,       // relay superposes x_p and x_s (SIC relay only)
};

inline constexpr std::size_t kDecisionCount = 4;

constexpr std::size_t index_of(Decision d) noexcept { return static_cast<std::size_t>(d); }

constexpr std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::direct: return "direct";
    case Decision::assist_primary: return "assist_primary";
    case Decision::assist_secondary: return "assist_secondary";
    case Decision::assist_both: return "assist_both";
  }
  return "?";
}

/// Relay decoding outcomes for one draw.
///   primary / secondary: decoded treating the other signal as noise.
///   primary_clean / secondary_clean: decodable once the other is removed.
struct DecodeEvents {
  bool primary = false;
  bool secondary = false;
  bool primary_clean = false;
  bool secondary_clean = false;

  /// Successive decoding of both signals: one decoded under interference,
  /// then the other decoded after cancellation.
  constexpr bool both_by_sic() const noexcept {
    return (primary && secondary_clean) || (secondary && primary_clean);
  }
  /// Decoded x_p under interference but cannot recover x_s afterwards.
  constexpr bool primary_only_by_sic() const noexcept { return primary && !secondary_clean; }
  constexpr bool secondary_only_by_sic() const noexcept { return secondary && !primary_clean; }
};

inline DecodeEvents decode_events(const ChannelDraw& h, const Powers& pw, const Thresholds& th) {
  const double rx_p = pw.primary * h.pr;
  const double rx_s = pw.secondary * h.sr;
  return DecodeEvents{
      .primary = rx_p >= th.primary * (rx_s + 1.0),
      .secondary = rx_s >= th.secondary * (rx_p + 1.0),
      .primary_clean = rx_p >= th.primary,
      .secondary_clean = rx_s >= th.secondary,
  };
}

/// Second-sub-slot SINR at SD under each relaying mode. The mode with the
/// largest value minimizes the combined secondary SINR shortfall.
struct RelayingMetrics {
  double direct = 0.0;            // ST repeats, PT interferes
  double assist_primary = 0.0;    // ST repeats, relay interferes
  double assist_secondary = 0.0;  // relay forwards x_s, PT interferes
  double assist_both = 0.0;       // relay's x_s share, x_p share interferes
};

inline RelayingMetrics relaying_metrics(const ChannelDraw& h, const Powers& pw) {
  const double signal = pw.secondary * h.ss;
  const double relay_both = pw.relay_both * h.rs;
  return RelayingMetrics{
      .direct = signal / (pw.primary * h.ps + 1.0),
      .assist_primary = signal / (pw.relay_primary * h.rs + 1.0),
      .assist_secondary = pw.relay_secondary * h.rs / (pw.primary * h.ps + 1.0),
      .assist_both = (1.0 - pw.alpha) * relay_both / (pw.alpha * relay_both + 1.0),
  };
}

struct DecisionOutcome {
  Decision decision = Decision::direct;
  double relay_snr = 0.0;  // relay SNR spent in the second sub-slot
  double alpha = 1.0;      // x_p share of relay_snr; used by assist_both only
};

namespace detail {

// Argmax with fixed tie priority assist_primary > assist_secondary >
// assist_both > direct. Unavailable modes never win.
inline Decision best_metric(const RelayingMetrics& m, bool primary_ok, bool both_ok) {
  Decision best = Decision::direct;
  double value = m.direct;
  if (both_ok && m.assist_both >= value) { best = Decision::assist_both; value = m.assist_both; }
  if (m.assist_secondary >= value) { best = Decision::assist_secondary; value = m.assist_secondary; }
  if (primary_ok && m.assist_primary >= value) { best = Decision::assist_primary; }
  return best;
}

inline DecisionOutcome make_outcome(Decision d, const Powers& pw) {
  switch (d) {
    case Decision::direct: return {Decision::direct, 0.0, 1.0};
    case Decision::assist_primary: return {d, pw.relay_primary, 1.0};
    case Decision::assist_secondary: return {d, pw.relay_secondary, 0.0};
    case Decision::assist_both: return {d, pw.relay_both, pw.alpha};
  }
  return {};
}

}  // namespace detail

/// Scheme 1: the relay decodes one signal at most per branch, no SIC.
/// An assist-primary outcome without a feasible relay power falls back to
/// direct transmission.
inline DecisionOutcome decide_scheme1(const DecodeEvents& ev, const RelayingMetrics& m,
                                      const Powers& pw) {
  const Decision best = detail::best_metric(m, /*primary_ok=*/true, /*both_ok=*/false);
  const bool d1 = ev.primary && ((!ev.secondary && m.assist_primary > m.direct) ||
                                 (ev.secondary && best == Decision::assist_primary));
  const bool d2 = ev.secondary && ((!ev.primary && m.assist_secondary > m.direct) ||
                                   (ev.primary && best == Decision::assist_secondary));
  if (d1) {
    return pw.assist_primary_feasible ? detail::make_outcome(Decision::assist_primary, pw)
                                      : detail::make_outcome(Decision::direct, pw);
  }
  if (d2) return detail::make_outcome(Decision::assist_secondary, pw);
  return detail::make_outcome(Decision::direct, pw);
}

/// Scheme 2: SIC relay that may also forward both signals at once.
/// Infeasible modes (no relay power meets the primary target) are removed
/// from the comparison.
inline DecisionOutcome decide_scheme2(const DecodeEvents& ev, const RelayingMetrics& m,
                                      const Powers& pw) {
  const bool both = ev.both_by_sic();
  const Decision best = detail::best_metric(m, pw.assist_primary_feasible, pw.assist_both_feasible);
  if (both && best == Decision::assist_both)
    return detail::make_outcome(Decision::assist_both, pw);
  if ((ev.secondary_only_by_sic() && m.assist_secondary > m.direct) ||
      (both && best == Decision::assist_secondary))
    return detail::make_outcome(Decision::assist_secondary, pw);
  if (pw.assist_primary_feasible &&
      ((ev.primary_only_by_sic() && m.assist_primary > m.direct) ||
       (both && best == Decision::assist_primary)))
    return detail::make_outcome(Decision::assist_primary, pw);
  return detail::make_outcome(Decision::direct, pw);
}

struct SinrPair {
  double primary = 0.0;
  double secondary = 0.0;
};

/// MRC SINRs after both sub-slots. Direct transmission repeats over a static
/// channel, so both receivers see twice their first-sub-slot SINR.
inline SinrPair sinr_pair(const ChannelDraw& h, const Powers& pw, const DecisionOutcome& out) {
  if (!(out.relay_snr >= 0.0) || !(out.alpha >= 0.0 && out.alpha <= 1.0))
    throw std::invalid_argument("decision outcome carries an invalid relay power or split");
  const double pd_first = pw.primary * h.pp / (pw.secondary * h.sp + 1.0);
  const double sd_first = pw.secondary * h.ss / (pw.primary * h.ps + 1.0);
  const double relay = out.relay_snr;
  switch (out.decision) {
    case Decision::direct:
      return {2.0 * pd_first, 2.0 * sd_first};
    case Decision::assist_primary:
      return {pd_first + relay * h.rp / (pw.secondary * h.sp + 1.0),
              sd_first + pw.secondary * h.ss / (relay * h.rs + 1.0)};
    case Decision::assist_secondary:
      return {pd_first + pw.primary * h.pp / (relay * h.rp + 1.0),
              sd_first + relay * h.rs / (pw.primary * h.ps + 1.0)};
    case Decision::assist_both: {
      const double a = out.alpha;
      return {pd_first + a * relay * h.rp / ((1.0 - a) * relay * h.rp + 1.0),
              sd_first + (1.0 - a) * relay * h.rs / (a * relay * h.rs + 1.0)};
    }
  }
  throw std::invalid_argument("unknown decision");
}

}  // namespace cogrelay
