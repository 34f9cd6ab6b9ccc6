#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <optional>

#include "loraeval/adr.hpp"
#include "support.hpp"

namespace loraeval {
namespace {

using testing::single_link;

const AdrPolicy kPolicy = AdrPolicy::from_tables(default_radio_tables());

std::optional<TxParams> fill_buffer(AdrState& state, double snr_max, int f, int p) {
  std::optional<TxParams> out;
  for (int n = 0; n < 19; ++n) {
    out = adr_add_measurement(state, snr_max - 1.0, f, p, kPolicy);
    EXPECT_FALSE(out.has_value());
  }
  return adr_add_measurement(state, snr_max, f, p, kPolicy);
}

TEST(AdrAlgorithm, ZeroMarginKeepsParameters) {
  AdrState state;
  EXPECT_EQ(fill_buffer(state, -10.0, 12, 14), (TxParams{12, 14}));
  EXPECT_TRUE(state.buffer.empty());
}

TEST(AdrAlgorithm, LargeMarginLowersSpreadingFactorFirst) {
  AdrState state;
  EXPECT_EQ(fill_buffer(state, 5.0, 12, 14), (TxParams{7, 14}));
}

TEST(AdrAlgorithm, NegativeMarginRaisesPower) {
  AdrState state;
  EXPECT_EQ(fill_buffer(state, -10.0, 7, 2), (TxParams{7, 10}));
}

TEST(AdrAlgorithm, LeftoverStepsLowerPowerAfterMinimumSf) {
  AdrState state;
  // margin = 20 - (-7.5) - 10 = 17.5 -> 5 steps, all spent on power from SF7.
  EXPECT_EQ(fill_buffer(state, 20.0, 7, 14), (TxParams{7, 4}));
  EXPECT_EQ(fill_buffer(state, 40.0, 7, 14), (TxParams{7, 2}));
}

TEST(AdrAlgorithm, TruncatesTowardZeroForBothSigns) {
  AdrState state;
  // margin -2.9 -> n = 0 (not -1)
  EXPECT_EQ(fill_buffer(state, -12.9, 12, 10), (TxParams{12, 10}));
  // margin 5.9 -> n = 1
  EXPECT_EQ(fill_buffer(state, 5.9 - 20.0 + 10.0, 12, 10), (TxParams{11, 10}));
  // margin -5.9 -> n = -1
  EXPECT_EQ(fill_buffer(state, -5.9 - 20.0 + 10.0, 12, 10), (TxParams{12, 12}));
}

TEST(AdrAlgorithm, ResetEmptiesBufferAndIsIdempotent) {
  AdrState state;
  for (int n = 0; n < 19; ++n) EXPECT_FALSE(adr_add_measurement(state, 0.0, 9, 8, kPolicy));
  EXPECT_EQ(state.buffer.size(), 19u);
  adr_reset(state);
  EXPECT_TRUE(state.buffer.empty());
  adr_reset(state);
  EXPECT_TRUE(state.buffer.empty());
  EXPECT_EQ(state.current_f, 9);
  EXPECT_EQ(state.current_p, 8);
  int yields = 0;
  for (int n = 0; n < 20; ++n) yields += adr_add_measurement(state, 0.0, kPolicy).has_value();
  EXPECT_EQ(yields, 1);
}

TEST(AdrAlgorithm, YieldsStayInsideAllowedSet) {
  Rng rng(3);
  AdrState state;
  int f = 12, p = 14, yields = 0;
  for (int n = 0; n < 20000; ++n) {
    const auto cmd = adr_add_measurement(state, rng.uniform(-40.0, 40.0), f, p, kPolicy);
    if (!cmd) continue;
    ++yields;
    f = cmd->sf;
    p = cmd->power_dbm;
    EXPECT_TRUE(is_valid_spreading_factor(f));
    EXPECT_TRUE(std::find(kPolicy.power_levels.begin(), kPolicy.power_levels.end(), p) != kPolicy.power_levels.end());
  }
  EXPECT_EQ(yields, 1000);
}

TEST(Backoff, PowerJumpsToMaximumAtLimitPlusDelay) {
  BackoffState state(BackoffParams{64, 32});
  TxParams tx{9, 6};
  for (int n = 1; n < 96; ++n) {
    tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
    EXPECT_EQ(tx, (TxParams{9, 6})) << "attempt " << n;
  }
  tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
  EXPECT_EQ(state.ack_counter, 96);
  EXPECT_EQ(tx, (TxParams{9, 16}));
}

TEST(Backoff, SpreadingFactorRisesEveryDelayAndCapsAtTwelve) {
  BackoffState state(BackoffParams{64, 32});
  TxParams tx{10, 6};
  for (long n = 1; n <= 300; ++n) {
    const TxParams before = tx;
    tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
    EXPECT_GE(tx.sf, before.sf);
    if (n == 128) {
      EXPECT_EQ(tx.sf, 11);
    }
    if (n == 160) {
      EXPECT_EQ(tx.sf, 12);
    }
    if (n == 192) {
      EXPECT_EQ(tx.sf, 12);
    }
    if (n != 128 && n != 160 && n != 96) {
      EXPECT_EQ(tx, before) << "attempt " << n;
    }
  }
  EXPECT_EQ(tx, (TxParams{12, 16}));
}

TEST(Backoff, AdrReceivedResetsWithoutChangingParameters) {
  BackoffState state;
  TxParams tx{8, 10};
  for (int n = 0; n < 70; ++n) tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
  EXPECT_EQ(backoff_step(state, BackoffEvent::adr_received, tx, kPolicy), tx);
  EXPECT_EQ(state.ack_counter, 0);
}

TEST(Backoff, RequestAcknowledgedOnlyResetsPastLimit) {
  BackoffState state;
  TxParams tx{8, 10};
  for (int n = 0; n < 64; ++n) tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
  EXPECT_FALSE(state.requesting());
  backoff_step(state, BackoffEvent::request_acknowledged, tx, kPolicy);
  EXPECT_EQ(state.ack_counter, 64);
  tx = backoff_step(state, BackoffEvent::uplink_attempt, tx, kPolicy);
  EXPECT_TRUE(state.requesting());
  backoff_step(state, BackoffEvent::request_acknowledged, tx, kPolicy);
  EXPECT_EQ(state.ack_counter, 0);
}

TEST(Backoff, RejectsNonPositiveParameters) {
  EXPECT_THROW(BackoffState(BackoffParams{0, 32}), std::invalid_argument);
  EXPECT_THROW(BackoffState(BackoffParams{64, 0}), std::invalid_argument);
}

TEST(AdrSimulation, UplinkCountsArePoisson) {
  const auto cfg = generate_scenario(50, 2, 2000.0, 21);
  const auto result = run_adr_simulation(cfg, 1e5, 8);
  for (std::size_t n : result.uplinks) EXPECT_LT(std::abs(static_cast<double>(n) - 100.0), 5 * 10.0);
  std::size_t uplink_events = 0;
  for (const auto& e : result.trace)
    uplink_events += e.kind == TraceKind::uplink_received || e.kind == TraceKind::uplink_lost;
  std::size_t total = 0;
  for (std::size_t n : result.uplinks) total += n;
  EXPECT_EQ(uplink_events, total);
}

TEST(AdrSimulation, ReplayIsDeterministic) {
  const auto cfg = generate_scenario(20, 2, 2000.0, 5);
  const auto a = run_adr_simulation(cfg, 2e5, 17);
  const auto b = run_adr_simulation(cfg, 2e5, 17);
  ASSERT_EQ(a.trace.size(), b.trace.size());
  for (std::size_t n = 0; n < a.trace.size(); ++n) {
    EXPECT_EQ(a.trace[n].time_s, b.trace[n].time_s);
    EXPECT_EQ(a.trace[n].ed, b.trace[n].ed);
    EXPECT_EQ(a.trace[n].kind, b.trace[n].kind);
    EXPECT_EQ(a.trace[n].max_snr_db, b.trace[n].max_snr_db);
  }
  EXPECT_EQ(a.final_config.ed_sf, b.final_config.ed_sf);
  EXPECT_EQ(a.final_config.ed_power, b.final_config.ed_power);
}

TEST(AdrSimulation, FinalParametersInsideAllowedSet) {
  const auto cfg = generate_scenario(40, 2, 5000.0, 6);
  const auto result = run_adr_simulation(cfg, 3e5, 2);
  EXPECT_TRUE(validate(result.final_config).empty());
  EXPECT_EQ(result.final_config.ed_positions, cfg.ed_positions);
}

TEST(AdrSimulation, CloseDeviceConvergesToSf7) {
  const auto cfg = single_link(20.0, 12, 16);
  const auto result = run_adr_simulation(cfg, 1e5, 4);
  EXPECT_EQ(result.final_config.ed_sf[0], 7);
  const auto first_update = std::find_if(result.trace.begin(), result.trace.end(),
                                         [](const TraceEvent& e) { return e.kind == TraceKind::adr_update; });
  ASSERT_NE(first_update, result.trace.end());
  EXPECT_EQ(first_update->sf, 7);
}

TEST(AdrSimulation, OutOfRangeDeviceBacksOffToSlowestMaximumPower) {
  const int f0 = 9;
  const auto cfg = single_link(1e6, f0, 8);
  const auto result = run_adr_simulation(cfg, 5e5, 11);
  EXPECT_EQ(result.final_config.ed_sf[0], 12);
  EXPECT_EQ(result.final_config.ed_power[0], 16);

  std::vector<std::pair<long, TxParams>> changes;
  long attempt = 0;
  for (const auto& e : result.trace) {
    if (e.kind == TraceKind::uplink_lost) ++attempt;
    EXPECT_NE(e.kind, TraceKind::uplink_received);
    if (e.kind == TraceKind::backoff_update) changes.emplace_back(attempt, TxParams{e.sf, e.power_dbm});
  }
  ASSERT_GE(attempt, 64 + 32 * (12 - f0 + 1));
  ASSERT_EQ(changes.size(), 4u);
  EXPECT_EQ(changes[0], (std::pair<long, TxParams>{96, {9, 16}}));
  EXPECT_EQ(changes[1], (std::pair<long, TxParams>{128, {10, 16}}));
  EXPECT_EQ(changes[2], (std::pair<long, TxParams>{160, {11, 16}}));
  EXPECT_EQ(changes[3], (std::pair<long, TxParams>{64 + 32 * (12 - f0 + 1), {12, 16}}));
}

TEST(AdrSimulation, RejectsNonPositiveDuration) {
  EXPECT_THROW(run_adr_simulation(single_link(100.0, 7, 14), 0.0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace loraeval
