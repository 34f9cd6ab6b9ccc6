#ifndef LORAEVAL_SAMPLING_HPP
#define LORAEVAL_SAMPLING_HPP

// Per-packet RSS/SNR draws consistent with the analytic ψ·ζ reception
// probability. A missed packet is reported as -infinity.

#include <cmath>
#include <cstdint>
#include <limits>

#include "loraeval/analytics.hpp"
#include "loraeval/random.hpp"

namespace loraeval {

inline constexpr double kMissed = -std::numeric_limits<double>::infinity();

inline bool is_missed(double value) noexcept { return value == kMissed; }

/// Draws one packet's RSS at a gateway: rss = z - N(0, sigma), kept when it
/// reaches `sensitivity_dbm` and an independent Bernoulli(zeta) succeeds.
/// Both variates are always drawn so the stream position does not depend on
/// the outcome.
inline double sample_rss(double mean_rss_dbm, double sensitivity_dbm, double sigma_db,
                         double zeta, Rng& rng) {
  const double rss = mean_rss_dbm - sigma_db * rng.standard_normal();
  const bool not_corrupted = rng.bernoulli(zeta);
  return (rss >= sensitivity_dbm && not_corrupted) ? rss : kMissed;
}

inline double sample_rss(std::size_t i, std::size_t k, const NetworkModel& model, Rng& rng) {
  const auto& cfg = model.config();
  const auto ii = static_cast<Eigen::Index>(i);
  const auto kk = static_cast<Eigen::Index>(k);
  return sample_rss(model.mean_rss_matrix()(ii, kk), sensitivity(cfg.tables, cfg.ed_sf[i]),
                    cfg.path_loss.shadow_sigma_db, model.zeta()(ii, kk), rng);
}

/// SNR approximation for a sampled RSS; missed stays missed.
inline double sample_snr(double rss_dbm, const RadioTables& tables) {
  if (is_missed(rss_dbm)) return kMissed;
  return rss_dbm - snr_offset_db(tables);
}

struct SampledMatrices {
  Matrix rss;  // N x K, dBm or kMissed
  Matrix snr;  // N x K, dB or kMissed
};

/// One independent packet sample for every (ED, GW) pair. Each pair draws
/// from its own stream derived from (seed, draw, i, k), so the result does
/// not depend on evaluation order.
inline SampledMatrices sample_matrix(const NetworkModel& model, std::uint64_t seed,
                                     std::uint64_t draw = 0) {
  const auto& z = model.mean_rss_matrix();
  SampledMatrices out{Matrix(z.rows(), z.cols()), Matrix(z.rows(), z.cols())};
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    for (Eigen::Index k = 0; k < z.cols(); ++k) {
      Rng rng(derive_seed(seed, {draw, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(k)}));
      const double rss = sample_rss(static_cast<std::size_t>(i), static_cast<std::size_t>(k), model, rng);
      out.rss(i, k) = rss;
      out.snr(i, k) = sample_snr(rss, model.config().tables);
    }
  }
  return out;
}

inline SampledMatrices sample_matrix(const NetworkConfig& cfg, std::uint64_t seed) {
  return sample_matrix(NetworkModel(cfg), seed);
}

}  // namespace loraeval

#endif
