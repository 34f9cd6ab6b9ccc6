#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "loraeval/network.hpp"
#include "support.hpp"

namespace loraeval {
namespace {

NetworkConfig ten_device_config() { return generate_scenario(10, 1, 1000.0, 3); }

TEST(Validate, AcceptsGeneratedConfig) { EXPECT_TRUE(validate(ten_device_config()).empty()); }

TEST(Validate, ReportsSpreadingFactorWithIndex) {
  auto cfg = ten_device_config();
  cfg.ed_sf[4] = 13;
  const auto issues = validate(cfg);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_EQ(issues[0].index, 4);
  EXPECT_NE(issues[0].message.find("spreading factor out of range at ED index 4"), std::string::npos);
}

TEST(Validate, ReportsZeroDistance) {
  auto cfg = ten_device_config();
  cfg.ed_positions[2] = cfg.gw_positions[0];
  const auto issues = validate(cfg);
  ASSERT_EQ(issues.size(), 1u);
  EXPECT_NE(issues[0].message.find("zero ED-GW distance"), std::string::npos);
  EXPECT_EQ(issues[0].index, 2);
}

TEST(Validate, ReportsEveryViolation) {
  auto cfg = ten_device_config();
  cfg.ed_sf[0] = 6;
  cfg.ed_sf[9] = 13;
  cfg.ed_power[3] = 15;
  cfg.packet_rate_hz = 0.0;
  cfg.channel.preamble_symbols = 5;
  cfg.path_loss.shadow_sigma_db = -1.0;
  EXPECT_EQ(validate(cfg).size(), 6u);
  EXPECT_THROW(require_valid(cfg), ValidationError);
}

TEST(Validate, LengthMismatchAndEmptyNetwork) {
  NetworkConfig cfg;
  EXPECT_GE(validate(cfg).size(), 2u);
  cfg = ten_device_config();
  cfg.ed_power.pop_back();
  EXPECT_FALSE(validate(cfg).empty());
}

TEST(DistanceMatrix, SimpleGeometry) {
  NetworkConfig cfg;
  cfg.ed_positions = {{0, 0}};
  cfg.gw_positions = {{3, 4}, {0, 40}};
  cfg.ed_sf = {7};
  cfg.ed_power = {14};
  const Matrix d = distance_matrix(cfg);
  EXPECT_DOUBLE_EQ(d(0, 0), 5.0);
  EXPECT_DOUBLE_EQ(d(0, 1), 40.0);
}

TEST(DistanceMatrix, SymmetricPlacement) {
  NetworkConfig cfg;
  cfg.ed_positions = {{-10, 0}, {10, 0}};
  cfg.gw_positions = {{0, 5}, {0, -5}};
  cfg.ed_sf = {7, 7};
  cfg.ed_power = {14, 14};
  const Matrix d = distance_matrix(cfg);
  EXPECT_DOUBLE_EQ(d(0, 0), d(1, 0));
  EXPECT_DOUBLE_EQ(d(0, 0), d(0, 1));
  EXPECT_DOUBLE_EQ(d(1, 1), d(0, 1));
}

TEST(DistanceMatrix, InvariantUnderRigidMotion) {
  const auto cfg = generate_scenario(30, 4, 1000.0, 11);
  const Matrix base = distance_matrix(cfg);
  auto moved = cfg;
  const double angle = 0.7, c = std::cos(angle), s = std::sin(angle);
  auto transform = [&](Point p) { return Point{c * p.x - s * p.y + 123.0, s * p.x + c * p.y - 45.0}; };
  for (auto& p : moved.ed_positions) p = transform(p);
  for (auto& p : moved.gw_positions) p = transform(p);
  const Matrix after = distance_matrix(moved);
  EXPECT_LT((after - base).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(GenerateScenario, SeedDeterminism) {
  const auto a = generate_scenario(10, 1, 1000.0, 42);
  const auto b = generate_scenario(10, 1, 1000.0, 42);
  EXPECT_EQ(a.ed_positions, b.ed_positions);
  EXPECT_EQ(a.gw_positions, b.gw_positions);
  EXPECT_EQ(a.ed_sf, b.ed_sf);
  EXPECT_EQ(a.ed_power, b.ed_power);
  const auto c = generate_scenario(10, 1, 1000.0, 43);
  EXPECT_NE(a.ed_positions, c.ed_positions);
}

TEST(GenerateScenario, PositionsInsideArea) {
  const auto cfg = generate_scenario(500, 4, 1000.0, 7);
  ASSERT_EQ(cfg.num_devices(), 500u);
  ASSERT_EQ(cfg.num_gateways(), 4u);
  for (const auto& p : cfg.ed_positions) {
    EXPECT_GE(p.x, 0.0);
    EXPECT_LE(p.x, 1000.0);
    EXPECT_GE(p.y, 0.0);
    EXPECT_LE(p.y, 1000.0);
  }
  EXPECT_TRUE(validate(cfg).empty());
}

TEST(GenerateScenario, SpreadingFactorHistogramIsUniform) {
  const auto cfg = generate_scenario(10000, 1, 1000.0, 2024);
  std::array<int, 6> counts{};
  for (int sf : cfg.ed_sf) ++counts[sf_index(sf)];
  const double p = 1.0 / 6.0, n = 10000.0;
  const double sd = std::sqrt(n * p * (1 - p));
  for (int c : counts) EXPECT_LT(std::abs(c - n * p), 5 * sd);
}

TEST(GenerateScenario, RejectsDegenerateArguments) {
  EXPECT_THROW(generate_scenario(0, 1, 1000.0, 1), std::invalid_argument);
  EXPECT_THROW(generate_scenario(1, 0, 1000.0, 1), std::invalid_argument);
  EXPECT_THROW(generate_scenario(1, 1, 0.0, 1), std::invalid_argument);
}

}  // namespace
}  // namespace loraeval
