#ifndef LORAEVAL_TESTS_SUPPORT_HPP
#define LORAEVAL_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "loraeval/network.hpp"

namespace loraeval::testing {

/// One ED at (distance, 0) and one GW at the origin.
inline NetworkConfig single_link(double distance_m, int sf, int power_dbm) {
  NetworkConfig cfg;
  cfg.ed_positions = {{distance_m, 0.0}};
  cfg.gw_positions = {{0.0, 0.0}};
  cfg.ed_sf = {sf};
  cfg.ed_power = {power_dbm};
  return cfg;
}

/// Distance at which the mean RSS of `power_dbm` equals `target_dbm`.
inline double distance_for_rss(double target_dbm, int power_dbm, const PathLossParams& pl) {
  return pl.ref_distance_m *
         std::pow(10.0, (power_dbm - pl.ref_path_loss_db - target_dbm) / (10.0 * pl.exponent));
}

/// Standard normal CDF, written independently of the model code.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Airtime in microseconds from exact integer arithmetic:
///   T = (n_pr + 4.25 + n_pl) * 2^SF / B
///     = (4 n_pr + 17 + 4 n_pl) * 2^SF * 1e6 / (4 B)   [us]
/// with the payload symbol count's ceiling done by integer division.
inline double airtime_us_reference(int payload_bytes, int sf, int cr, int preamble, long bandwidth_hz,
                                   bool crc, bool implicit_header, bool low_data_rate) {
  const long numer = 8L * payload_bytes - 4L * sf + 28 + (crc ? 16 : 0) - (implicit_header ? 20 : 0);
  const long denom = 4L * (sf - (low_data_rate ? 2 : 0));
  long blocks = numer / denom;
  if (numer % denom != 0 && numer > 0) ++blocks;  // ceil for positive numerators
  const long n_payload = 8 + std::max(blocks * (cr + 4), 0L);
  const long quarter_symbols = 4L * preamble + 17 + 4L * n_payload;
  return static_cast<double>(quarter_symbols) * static_cast<double>(1L << sf) * 1e6 /
         (4.0 * static_cast<double>(bandwidth_hz));
}

}  // namespace loraeval::testing

#endif
