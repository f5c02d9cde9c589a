#include <cmath>

#include <gtest/gtest.h>

#include "cogrelay/decision.hpp"
#include "cogrelay/montecarlo.hpp"

using namespace cogrelay;

namespace {

Powers unit_powers() {
  Powers pw;
  pw.primary = 1.0;
  pw.secondary = 1.0;
  pw.relay_primary = 1.0;
  pw.relay_secondary = 1.0;
  pw.relay_both = 1.0;
  pw.alpha = 0.5;
  pw.assist_primary_feasible = true;
  pw.assist_both_feasible = true;
  return pw;
}

ChannelDraw flat(double x = 1.0) { return {x, x, x, x, x, x, x, x}; }

// Random positive draw and powers for the property tests.
struct Generated {
  ChannelDraw h;
  Powers pw;
  Thresholds th;
};

Generated generate(std::uint64_t seed, std::uint64_t i) {
  CounterRng rng(seed, i);
  auto pos = [&] { return std::exp(-4.0 + 8.0 * rng.uniform()); };
  Generated g;
  g.h = {pos(), pos(), pos(), pos(), pos(), pos(), pos(), pos()};
  g.pw.primary = pos();
  g.pw.secondary = pos();
  g.pw.relay_primary = pos();
  g.pw.relay_secondary = pos();
  g.pw.relay_both = pos();
  g.pw.alpha = rng.uniform();
  g.pw.assist_primary_feasible = rng.uniform() < 0.8;
  g.pw.assist_both_feasible = rng.uniform() < 0.8;
  g.th = {0.05 + 3.0 * rng.uniform(), 0.05 + 3.0 * rng.uniform()};
  return g;
}

}  // namespace

TEST(DecodeEvents, ThresholdIsInclusive) {
  const Powers pw = unit_powers();
  ChannelDraw h = flat();
  h.pr = 6.0;
  h.sr = 2.0;
  const DecodeEvents ev = decode_events(h, pw, {2.0, 0.5});
  EXPECT_TRUE(ev.primary);  // 6 >= 2 * (2 + 1)
  EXPECT_FALSE(ev.secondary);  // 2 < 0.5 * 7
  EXPECT_TRUE(ev.primary_clean);
  EXPECT_TRUE(ev.secondary_clean);
  EXPECT_TRUE(ev.both_by_sic());
  EXPECT_FALSE(ev.primary_only_by_sic());
  EXPECT_FALSE(ev.secondary_only_by_sic());
}

TEST(DecodeEvents, SicNeedsCleanSecondStage) {
  const Powers pw = unit_powers();
  ChannelDraw h = flat();
  h.pr = 10.0;
  h.sr = 0.1;
  const DecodeEvents ev = decode_events(h, pw, {2.0, 0.5});
  EXPECT_TRUE(ev.primary);
  EXPECT_FALSE(ev.secondary_clean);
  EXPECT_FALSE(ev.both_by_sic());
  EXPECT_TRUE(ev.primary_only_by_sic());
}

TEST(RelayingMetrics, Formulas) {
  Powers pw = unit_powers();
  pw.secondary = 2.0;
  pw.relay_primary = 3.0;
  pw.relay_secondary = 4.0;
  pw.relay_both = 5.0;
  pw.alpha = 0.25;
  ChannelDraw h = flat();
  h.ss = 1.5;
  h.ps = 0.5;
  h.rs = 2.0;
  const RelayingMetrics m = relaying_metrics(h, pw);
  EXPECT_DOUBLE_EQ(m.direct, 3.0 / 1.5);
  EXPECT_DOUBLE_EQ(m.assist_primary, 3.0 / 7.0);
  EXPECT_DOUBLE_EQ(m.assist_secondary, 8.0 / 1.5);
  EXPECT_DOUBLE_EQ(m.assist_both, 0.75 * 10.0 / (0.25 * 10.0 + 1.0));
}

TEST(Scheme1, OnlyPrimaryDecoded) {
  Powers pw = unit_powers();
  DecodeEvents ev{true, false, true, false};
  RelayingMetrics m{1.0, 2.0, 5.0, 9.0};
  EXPECT_EQ(decide_scheme1(ev, m, pw).decision, Decision::assist_primary);
  m.assist_primary = 1.0;  // no strict improvement over direct
  EXPECT_EQ(decide_scheme1(ev, m, pw).decision, Decision::direct);
  m.assist_primary = 2.0;
  pw.assist_primary_feasible = false;
  EXPECT_EQ(decide_scheme1(ev, m, pw).decision, Decision::direct);
}

TEST(Scheme1, OnlySecondaryDecoded) {
  const Powers pw = unit_powers();
  const DecodeEvents ev{false, true, false, true};
  RelayingMetrics m{1.0, 9.0, 2.0, 9.0};
  const DecisionOutcome out = decide_scheme1(ev, m, pw);
  EXPECT_EQ(out.decision, Decision::assist_secondary);
  EXPECT_EQ(out.alpha, 0.0);
  m.assist_secondary = 0.5;
  EXPECT_EQ(decide_scheme1(ev, m, pw).decision, Decision::direct);
}

TEST(Scheme1, BothDecodedUsesArgmax) {
  const Powers pw = unit_powers();
  const DecodeEvents ev{true, true, true, true};
  EXPECT_EQ(decide_scheme1(ev, {1.0, 2.0, 3.0, 99.0}, pw).decision, Decision::assist_secondary);
  EXPECT_EQ(decide_scheme1(ev, {1.0, 3.0, 2.0, 99.0}, pw).decision, Decision::assist_primary);
  EXPECT_EQ(decide_scheme1(ev, {4.0, 3.0, 2.0, 99.0}, pw).decision, Decision::direct);
}

TEST(Scheme1, TiesFavourAssistPrimary) {
  const Powers pw = unit_powers();
  const DecodeEvents ev{true, true, true, true};
  EXPECT_EQ(decide_scheme1(ev, {1.0, 1.0, 1.0, 0.0}, pw).decision, Decision::assist_primary);
  EXPECT_EQ(decide_scheme1(ev, {1.0, 0.5, 1.0, 0.0}, pw).decision, Decision::assist_secondary);
}

TEST(Scheme1, NothingDecoded) {
  const Powers pw = unit_powers();
  EXPECT_EQ(decide_scheme1({}, {0.0, 5.0, 5.0, 5.0}, pw).decision, Decision::direct);
}

TEST(Scheme2, ForwardsBothWhenBest) {
  Powers pw = unit_powers();
  const DecodeEvents ev{true, false, true, true};  // SIC decodes both
  const RelayingMetrics m{1.0, 2.0, 3.0, 4.0};
  const DecisionOutcome out = decide_scheme2(ev, m, pw);
  EXPECT_EQ(out.decision, Decision::assist_both);
  EXPECT_EQ(out.alpha, pw.alpha);
  EXPECT_EQ(out.relay_snr, pw.relay_both);
  pw.assist_both_feasible = false;
  EXPECT_EQ(decide_scheme2(ev, m, pw).decision, Decision::assist_secondary);
}

TEST(Scheme2, InfeasiblePrimaryExcludedFromArgmax) {
  Powers pw = unit_powers();
  pw.assist_primary_feasible = false;
  const DecodeEvents ev{true, true, true, true};
  EXPECT_EQ(decide_scheme2(ev, {1.0, 5.0, 3.0, 2.0}, pw).decision, Decision::assist_secondary);
}

TEST(Scheme2, SingleDecodeBranches) {
  const Powers pw = unit_powers();
  EXPECT_EQ(decide_scheme2({true, false, true, false}, {1.0, 2.0, 9.0, 9.0}, pw).decision,
            Decision::assist_primary);
  EXPECT_EQ(decide_scheme2({false, true, false, true}, {1.0, 9.0, 2.0, 9.0}, pw).decision,
            Decision::assist_secondary);
  EXPECT_EQ(decide_scheme2({false, false, true, true}, {1.0, 9.0, 9.0, 9.0}, pw).decision,
            Decision::direct);
}

TEST(SinrPair, DirectDoublesFirstSubSlot) {
  Powers pw = unit_powers();
  pw.primary = 4.0;
  ChannelDraw h = flat(0.5);
  const SinrPair s = sinr_pair(h, pw, detail::make_outcome(Decision::direct, pw));
  EXPECT_DOUBLE_EQ(s.primary, 2.0 * 2.0 / 1.5);
  EXPECT_DOUBLE_EQ(s.secondary, 2.0 * 0.5 / 3.0);
}

TEST(SinrPair, RelayModes) {
  Powers pw = unit_powers();
  pw.relay_primary = 2.0;
  pw.relay_secondary = 3.0;
  pw.relay_both = 4.0;
  pw.alpha = 0.75;
  const ChannelDraw h = flat();
  // First sub-slot: both SINRs 1/2.
  const SinrPair d1 = sinr_pair(h, pw, detail::make_outcome(Decision::assist_primary, pw));
  EXPECT_DOUBLE_EQ(d1.primary, 0.5 + 2.0 / 2.0);
  EXPECT_DOUBLE_EQ(d1.secondary, 0.5 + 1.0 / 3.0);
  const SinrPair d2 = sinr_pair(h, pw, detail::make_outcome(Decision::assist_secondary, pw));
  EXPECT_DOUBLE_EQ(d2.primary, 0.5 + 1.0 / 4.0);
  EXPECT_DOUBLE_EQ(d2.secondary, 0.5 + 3.0 / 2.0);
  const SinrPair d3 = sinr_pair(h, pw, detail::make_outcome(Decision::assist_both, pw));
  EXPECT_DOUBLE_EQ(d3.primary, 0.5 + 3.0 / 2.0);
  EXPECT_DOUBLE_EQ(d3.secondary, 0.5 + 1.0 / 4.0);
}

TEST(SinrPair, RejectsBadOutcome) {
  const Powers pw = unit_powers();
  EXPECT_THROW(sinr_pair(flat(), pw, {Decision::assist_both, 1.0, 1.5}), std::invalid_argument);
  EXPECT_THROW(sinr_pair(flat(), pw, {Decision::assist_primary, -1.0, 1.0}), std::invalid_argument);
}

// Properties over random draws.
TEST(DecisionProperties, ModesRequireTheirDecodes) {
  for (std::uint64_t i = 0; i < 20000; ++i) {
    const Generated g = generate(17, i);
    const DecodeEvents ev = decode_events(g.h, g.pw, g.th);
    const RelayingMetrics m = relaying_metrics(g.h, g.pw);
    const Decision d1 = decide_scheme1(ev, m, g.pw).decision;
    ASSERT_NE(d1, Decision::assist_both);
    if (d1 == Decision::assist_primary) {
      ASSERT_TRUE(ev.primary);
      ASSERT_TRUE(g.pw.assist_primary_feasible);
      ASSERT_GT(m.assist_primary, m.direct);
    }
    if (d1 == Decision::assist_secondary) {
      ASSERT_TRUE(ev.secondary);
      ASSERT_GT(m.assist_secondary, m.direct);
    }
    const Decision d2 = decide_scheme2(ev, m, g.pw).decision;
    if (d2 == Decision::assist_both) {
      ASSERT_TRUE(ev.both_by_sic());
      ASSERT_TRUE(g.pw.assist_both_feasible);
    }
    // With SIC a signal may be recovered only after cancelling the other.
    if (d2 == Decision::assist_primary) {
      ASSERT_TRUE(ev.primary || ev.both_by_sic());
      ASSERT_TRUE(g.pw.assist_primary_feasible);
    }
    if (d2 == Decision::assist_secondary) {
      ASSERT_TRUE(ev.secondary || ev.both_by_sic());
    }
    // Whenever scheme 2 relays, the chosen metric beats direct.
    if (d2 != Decision::direct) {
      const double chosen[] = {m.direct, m.assist_primary, m.assist_secondary, m.assist_both};
      ASSERT_GE(chosen[index_of(d2)], m.direct);
    }
  }
}

TEST(DecisionProperties, BaselinePolicies) {
  for (std::uint64_t i = 0; i < 5000; ++i) {
    const Generated g = generate(23, i);
    const DecodeEvents ev = decode_events(g.h, g.pw, g.th);
    const RelayingMetrics m = relaying_metrics(g.h, g.pw);
    EXPECT_EQ(mc::decide(mc::Policy::direct, ev, m, g.pw).decision, Decision::direct);
    EXPECT_EQ(mc::decide(mc::Policy::primary_only, ev, m, g.pw).decision,
              ev.primary && g.pw.assist_primary_feasible ? Decision::assist_primary : Decision::direct);
    EXPECT_EQ(mc::decide(mc::Policy::secondary_only, ev, m, g.pw).decision,
              ev.secondary ? Decision::assist_secondary : Decision::direct);
  }
}

// Superposition split endpoints reduce to single-signal forwarding.
TEST(DecisionProperties, SplitEndpoints) {
  for (std::uint64_t i = 0; i < 2000; ++i) {
    const Generated g = generate(29, i);
    const double r = g.pw.relay_both;
    const SinrPair all_p = sinr_pair(g.h, g.pw, {Decision::assist_both, r, 1.0});
    const SinrPair one = sinr_pair(g.h, g.pw, {Decision::assist_primary, r, 1.0});
    EXPECT_NEAR(all_p.primary, one.primary - r * g.h.rp / (g.pw.secondary * g.h.sp + 1.0) + r * g.h.rp,
                1e-9 * all_p.primary);
    const SinrPair none_p = sinr_pair(g.h, g.pw, {Decision::assist_both, r, 0.0});
    const double pd_first = g.pw.primary * g.h.pp / (g.pw.secondary * g.h.sp + 1.0);
    EXPECT_DOUBLE_EQ(none_p.primary, pd_first);
  }
}
