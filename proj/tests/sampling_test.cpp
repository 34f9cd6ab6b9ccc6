#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "loraeval/sampling.hpp"
#include "support.hpp"

namespace loraeval {
namespace {

using testing::distance_for_rss;
using testing::phi;
using testing::single_link;

constexpr double kSigma = 3.57;

TEST(SampleRss, ZeroSigmaAboveSensitivityAlwaysReturnsMean) {
  Rng rng(1);
  for (int n = 0; n < 1000; ++n) EXPECT_EQ(sample_rss(-110.0, -124.0, 0.0, 1.0, rng), -110.0);
}

TEST(SampleRss, ZeroSigmaBelowSensitivityAlwaysMissed) {
  Rng rng(1);
  for (int n = 0; n < 1000; ++n) EXPECT_TRUE(is_missed(sample_rss(-125.0, -124.0, 0.0, 1.0, rng)));
}

TEST(SampleRss, SuccessRateMatchesPsi) {
  Rng rng(20240601);
  const int draws = 100000;
  int ok = 0;
  for (int n = 0; n < draws; ++n) ok += !is_missed(sample_rss(-124.0 + kSigma, -124.0, kSigma, 1.0, rng));
  EXPECT_NEAR(static_cast<double>(ok) / draws, 0.8413, 0.004);
}

TEST(SampleRss, SuccessRatePassesChiSquareAgainstPsiTimesZeta) {
  // One degree of freedom; 10.83 is the 0.1% critical value.
  Rng rng(99);
  const int draws = 100000;
  const double zeta = 0.7, p = phi(0.5) * zeta;
  int ok = 0;
  for (int n = 0; n < draws; ++n) ok += !is_missed(sample_rss(-130.0 + 0.5 * kSigma, -130.0, kSigma, zeta, rng));
  const double expected = draws * p;
  const double chi2 = (ok - expected) * (ok - expected) / (draws * p * (1 - p));
  EXPECT_LT(chi2, 10.83);
}

TEST(SampleRss, AcceptedValuesFollowTruncatedNormal) {
  Rng rng(5);
  const double z = -120.0, eta = -124.0;
  std::vector<double> kept;
  for (int n = 0; n < 100000; ++n) {
    const double rss = sample_rss(z, eta, kSigma, 1.0, rng);
    if (!is_missed(rss)) {
      EXPECT_GE(rss, eta);
      kept.push_back(rss);
    }
  }
  std::sort(kept.begin(), kept.end());
  const double lower = phi((eta - z) / kSigma);
  double d = 0.0;
  const auto m = static_cast<double>(kept.size());
  for (std::size_t idx = 0; idx < kept.size(); ++idx) {
    const double cdf = (phi((kept[idx] - z) / kSigma) - lower) / (1.0 - lower);
    d = std::max({d, std::abs(cdf - idx / m), std::abs(cdf - (idx + 1) / m)});
  }
  // Kolmogorov-Smirnov critical value at the 0.1% level.
  EXPECT_LT(d, 1.95 / std::sqrt(m));
}

TEST(SampleSnr, MissedAndOffset) {
  const auto tables = default_radio_tables();
  EXPECT_TRUE(is_missed(sample_snr(kMissed, tables)));
  EXPECT_DOUBLE_EQ(sample_snr(-120.0, tables), 24.75);
}

TEST(SampleSnr, SuccessfulSamplesClearDemodulationFloor) {
  const auto cfg = generate_scenario(50, 3, 4000.0, 8);
  const NetworkModel model(cfg);
  for (std::uint64_t draw = 0; draw < 50; ++draw) {
    const auto s = sample_matrix(model, 3, draw);
    for (Eigen::Index i = 0; i < s.rss.rows(); ++i)
      for (Eigen::Index k = 0; k < s.rss.cols(); ++k) {
        EXPECT_EQ(is_missed(s.rss(i, k)), is_missed(s.snr(i, k)));
        if (!is_missed(s.snr(i, k))) {
          const int sf = cfg.ed_sf[static_cast<std::size_t>(i)];
          EXPECT_GE(s.rss(i, k), sensitivity(cfg.tables, sf));
          EXPECT_GE(s.snr(i, k), min_snr(cfg.tables, sf));
        }
      }
  }
}

TEST(SampleMatrix, FixedSeedIsReproducible) {
  const auto cfg = generate_scenario(30, 2, 2000.0, 4);
  const auto a = sample_matrix(cfg, 1234);
  const auto b = sample_matrix(cfg, 1234);
  EXPECT_TRUE((a.rss.array() == b.rss.array()).all());
  const auto c = sample_matrix(cfg, 1235);
  EXPECT_FALSE((a.rss.array() == c.rss.array()).all());
}

TEST(SampleMatrix, SingleLinkMissRateMatchesPsi) {
  const PathLossParams pl;
  const auto cfg = single_link(distance_for_rss(-130.0 + 0.3 * kSigma, 10, pl), 9, 10);
  const NetworkModel model(cfg);
  const double psi = model.psi()(0, 0);
  const int draws = 100000;
  int missed = 0;
  for (int n = 0; n < draws; ++n) missed += is_missed(sample_matrix(model, 77, static_cast<std::uint64_t>(n)).rss(0, 0));
  const double sd = std::sqrt(draws * psi * (1 - psi));
  EXPECT_LT(std::abs(missed - draws * (1 - psi)), 3 * sd);
}

TEST(SampleMatrix, StrongLinksWithoutTrafficNeverMiss) {
  auto cfg = generate_scenario(20, 2, 10.0, 12);
  std::fill(cfg.ed_power.begin(), cfg.ed_power.end(), 16);
  cfg.packet_rate_hz = 0.0;
  const NetworkModel model(cfg);
  for (std::uint64_t draw = 0; draw < 20; ++draw) {
    const auto s = sample_matrix(model, 9, draw);
    EXPECT_FALSE(s.rss.array().isInf().any());
  }
}

}  // namespace
}  // namespace loraeval
