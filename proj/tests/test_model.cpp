#include <cmath>
#include <cstdint>

#include <gtest/gtest.h>

#include "cogrelay/model.hpp"
#include "cogrelay/random.hpp"

using namespace cogrelay;

namespace {

// Reference values computed offline at 30 digits.
constexpr double kLambdaP = 2.03143313302079616;
constexpr double kLambdaS = 0.319507910772894259;
constexpr double kVarCross = 0.0537727101190372076;  // (1 + 1.82^2)^-2
constexpr double kGammaS = 182.875242247662761;
constexpr double kCutoffDb = 9.84094648433978168;
constexpr double kCutoffRate = 2.23207609883875525;

}  // namespace

TEST(Units, DbRoundTrip) {
  EXPECT_DOUBLE_EQ(db_to_linear(20.0), 100.0);
  EXPECT_DOUBLE_EQ(db_to_linear(0.0), 1.0);
  EXPECT_DOUBLE_EQ(db_to_linear(-10.0), 0.1);
  CounterRng rng(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double db = -40.0 + 80.0 * rng.uniform();
    EXPECT_NEAR(linear_to_db(db_to_linear(db)), db, 1e-12);
  }
}

TEST(Thresholds, ReferenceRates) {
  const Thresholds th = Thresholds::from(SystemParams{});
  EXPECT_NEAR(th.primary, kLambdaP, 1e-14);
  EXPECT_NEAR(th.secondary, kLambdaS, 1e-15);
  EXPECT_EQ(lambda_threshold(0.0), 0.0);
  EXPECT_DOUBLE_EQ(lambda_threshold(0.5), 1.0);
  EXPECT_THROW(lambda_threshold(-0.1), std::invalid_argument);
}

TEST(Params, Validation) {
  SystemParams p;
  EXPECT_NO_THROW(p.validate());
  p.outage_threshold = 1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.rate_primary = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.pathloss_exponent = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Topology, ReferenceVariances) {
  const LinkVariances v = link_variances(Topology{}, 4.0);
  EXPECT_DOUBLE_EQ(v.pp, 1.0);
  EXPECT_DOUBLE_EQ(v.ss, 1.0);
  EXPECT_NEAR(v.sp, kVarCross, 1e-16);
  EXPECT_NEAR(v.ps, kVarCross, 1e-16);
  // Relay at the centre: every relay link has d^2 = 0.25 + 0.91^2.
  const double d2 = 0.25 + 0.91 * 0.91;
  for (double x : {v.pr, v.sr, v.rp, v.rs}) EXPECT_NEAR(x, 1.0 / (d2 * d2), 1e-14);
}

TEST(Topology, CoincidentNodesRejected) {
  Topology t;
  t.relay = t.secondary_rx;
  EXPECT_FALSE(t.is_valid());
  EXPECT_THROW(link_variances(t, 4.0), std::invalid_argument);
  t.relay = {1.0, 1e-12};
  EXPECT_FALSE(t.is_valid());
  t.relay = {1.0, 1e-6};
  EXPECT_TRUE(t.is_valid());
}

TEST(SecondaryPower, ReferenceValue) {
  const LinkVariances v = link_variances(Topology{}, 4.0);
  EXPECT_NEAR(secondary_power(SystemParams{}, v), kGammaS, 1e-9);
}

TEST(SecondaryPower, CutoffSnr) {
  const LinkVariances v = link_variances(Topology{}, 4.0);
  const SystemParams p;
  const double cut = secondary_cutoff_snr(p, v);
  EXPECT_NEAR(linear_to_db(cut), kCutoffDb, 1e-12);
  SystemParams below = p;
  below.snr_primary = cut * (1.0 - 1e-9);
  EXPECT_EQ(secondary_power(below, v), 0.0);
  SystemParams above = p;
  above.snr_primary = cut * (1.0 + 1e-6);
  EXPECT_GT(secondary_power(above, v), 0.0);
}

TEST(SecondaryPower, CutoffRate) {
  const LinkVariances v = link_variances(Topology{}, 4.0);
  SystemParams p;
  EXPECT_NEAR(secondary_cutoff_rate(p, v), kCutoffRate, 1e-12);
  p.rate_primary = kCutoffRate + 1e-6;
  EXPECT_EQ(secondary_power(p, v), 0.0);
  p.rate_primary = kCutoffRate - 1e-3;
  EXPECT_GT(secondary_power(p, v), 0.0);
}

// With the secondary at its allotted power, the repeated direct primary link
// sits exactly at the outage target: 1 - e^{-L/(2 g_pp)} g_pp/(g_pp + L g_sp/2) = eps.
TEST(SecondaryPower, HitsTargetExactly) {
  CounterRng rng(11, 0);
  for (int i = 0; i < 200; ++i) {
    SystemParams p;
    p.snr_primary = db_to_linear(10.0 + 30.0 * rng.uniform());
    p.rate_primary = 0.1 + 1.5 * rng.uniform();
    p.outage_threshold = 0.01 + 0.3 * rng.uniform();
    LinkVariances v;
    v.pp = 0.2 + 2.0 * rng.uniform();
    v.sp = 0.01 + 0.5 * rng.uniform();
    const double gs = secondary_power(p, v);
    if (gs <= 0.0) continue;
    const double lp = lambda_threshold(p.rate_primary);
    const double a = p.snr_primary * v.pp;
    const double b = gs * v.sp;
    const double outage = 1.0 - std::exp(-lp / (2.0 * a)) * a / (a + 0.5 * lp * b);
    EXPECT_NEAR(outage, p.outage_threshold, 1e-12);
  }
}

TEST(Rng, CounterStreamsAreStable) {
  CounterRng a(42, 7);
  CounterRng b(42, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  CounterRng c(42, 8);
  CounterRng d(43, 7);
  CounterRng e(42, 7);
  EXPECT_NE(c(), e());
  CounterRng f(42, 7);
  EXPECT_NE(d(), f());
}

TEST(Rng, UniformRange) {
  CounterRng rng(1, 1);
  double sum = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Sampling, ExponentialMeans) {
  LinkVariances v{0.5, 1.0, 2.0, 0.05, 7.0, 0.3, 1.5, 0.8};
  constexpr int n = 400000;
  double s[8] = {};
  for (int i = 0; i < n; ++i) {
    CounterRng rng(9, i);
    const ChannelDraw d = sample_channels(rng, v);
    const double x[8] = {d.pp, d.ps, d.pr, d.sp, d.ss, d.sr, d.rp, d.rs};
    for (int k = 0; k < 8; ++k) s[k] += x[k];
  }
  const double m[8] = {v.pp, v.ps, v.pr, v.sp, v.ss, v.sr, v.rp, v.rs};
  // Exponential: sd = mean, so 5 sd of the sample mean is 5 m / sqrt(n).
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(s[k] / n, m[k], 5.0 * m[k] / std::sqrt(double(n)));
}
