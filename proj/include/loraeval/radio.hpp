#ifndef LORAEVAL_RADIO_HPP
#define LORAEVAL_RADIO_HPP

// Per-link physics: airtime, deterministic path-loss RSS, and radio tables.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loraeval/error.hpp"

namespace loraeval {

inline constexpr int kMinSpreadingFactor = 7;
inline constexpr int kMaxSpreadingFactor = 12;
inline constexpr int kNumSpreadingFactors = kMaxSpreadingFactor - kMinSpreadingFactor + 1;
inline constexpr std::array<int, kNumSpreadingFactors> kSpreadingFactors{7, 8, 9, 10, 11, 12};

constexpr bool is_valid_spreading_factor(int sf) noexcept {
  return sf >= kMinSpreadingFactor && sf <= kMaxSpreadingFactor;
}

/// Position of `sf` in SF-indexed tables. Caller guarantees validity.
constexpr std::size_t sf_index(int sf) noexcept {
  return static_cast<std::size_t>(sf - kMinSpreadingFactor);
}

enum class LowDataRateMode { automatic, forced_on, forced_off };

/// Network-wide channel and framing parameters.
struct ChannelParams {
  double bandwidth_hz = 125e3;
  int preamble_symbols = 8;
  bool crc_enabled = true;
  // 0 if the explicit header is enabled, 1 otherwise (airtime formula convention).
  bool header_flag = true;
  LowDataRateMode low_data_rate = LowDataRateMode::automatic;
  int payload_bytes = 20;
  // CR 4/(4+r), shared by all devices.
  int coding_rate = 1;
  std::optional<double> noise_floor_dbm;
};

/// Per-device transmission parameters.
struct TransmissionConfig {
  int spreading_factor = 7;
  int tx_power_dbm = 14;
  int coding_rate = 1;
};

struct PathLossParams {
  double ref_path_loss_db = 127.41;
  double ref_distance_m = 40.0;
  double exponent = 2.08;
  double shadow_sigma_db = 3.57;
};

using SfTable = std::array<double, kNumSpreadingFactors>;
using SirTable = std::array<SfTable, kNumSpreadingFactors>;

/// Lookup tables for the radio model. The allowed transmit power set is the
/// key set of `power_draw_mw`.
struct RadioTables {
  SfTable sensitivity_dbm{};
  SfTable min_snr_db{};
  // sir_threshold_db[f_i][f_j]: required power advantage of the wanted
  // signal (SF f_i) over an interferer (SF f_j).
  SirTable sir_threshold_db{};
  std::map<int, double> power_draw_mw;

  std::vector<int> power_levels() const {
    std::vector<int> out;
    out.reserve(power_draw_mw.size());
    for (const auto& [p, mw] : power_draw_mw) out.push_back(p);
    return out;
  }
  bool has_power_level(int p) const { return power_draw_mw.count(p) != 0; }
  int min_power() const { return power_draw_mw.begin()->first; }
  int max_power() const { return power_draw_mw.rbegin()->first; }
};

// ---------------------------------------------------------------------------
// Default tables

/// SX1272 125 kHz gateway sensitivities, as used by FLoRa.
inline SfTable default_sensitivity_dbm() { return {-124.0, -127.0, -130.0, -133.0, -135.0, -137.0}; }

/// Minimum demodulation SNR per spreading factor.
inline SfTable default_min_snr_db() { return {-7.5, -10.0, -12.5, -15.0, -17.5, -20.0}; }

/// Co-channel SIR thresholds; rows are the wanted SF, columns the interferer SF.
inline SirTable default_sir_threshold_db() {
  return {{
      {6, -8, -9, -9, -9, -9},
      {-11, 6, -11, -12, -13, -13},
      {-15, -13, 6, -13, -14, -15},
      {-19, -18, -17, 6, -17, -18},
      {-22, -22, -21, -20, 6, -20},
      {-25, -25, -25, -24, -23, 6},
  }};
}

/// Illustrative transmit power draw (mW) for the 2..16 dBm grid: a 3.3 V
/// supply times a rising supply-current curve. Not a measurement; supply
/// measured values for the hardware being modeled.
inline std::map<int, double> example_power_draw_mw() {
  return {{2, 66.0},   {4, 72.6},   {6, 79.2},   {8, 89.1},
          {10, 102.3}, {12, 118.8}, {14, 145.2}, {16, 178.2}};
}

inline RadioTables default_radio_tables() {
  return {default_sensitivity_dbm(), default_min_snr_db(), default_sir_threshold_db(),
          example_power_draw_mw()};
}

// ---------------------------------------------------------------------------
// Table lookups

namespace detail {
inline void require_sf(int sf, const char* table) {
  if (!is_valid_spreading_factor(sf))
    throw LookupError(std::string(table) + " table has no entry for spreading factor " +
                      std::to_string(sf));
}
}  // namespace detail

inline double sensitivity(const RadioTables& t, int sf) {
  detail::require_sf(sf, "sensitivity");
  return t.sensitivity_dbm[sf_index(sf)];
}

inline double min_snr(const RadioTables& t, int sf) {
  detail::require_sf(sf, "min_snr");
  return t.min_snr_db[sf_index(sf)];
}

inline double sir_threshold(const RadioTables& t, int wanted_sf, int interferer_sf) {
  detail::require_sf(wanted_sf, "sir_threshold");
  detail::require_sf(interferer_sf, "sir_threshold");
  return t.sir_threshold_db[sf_index(wanted_sf)][sf_index(interferer_sf)];
}

inline double power_draw(const RadioTables& t, int tx_power_dbm) {
  auto it = t.power_draw_mw.find(tx_power_dbm);
  if (it == t.power_draw_mw.end())
    throw LookupError("power_draw table has no entry for " + std::to_string(tx_power_dbm) + " dBm");
  return it->second;
}

/// Mean of (sensitivity + minimum SNR) over all spreading factors; subtracting
/// it from a sampled RSS yields the approximated SNR.
inline double snr_offset_db(const RadioTables& t) {
  double sum = 0.0;
  for (std::size_t s = 0; s < kNumSpreadingFactors; ++s) sum += t.sensitivity_dbm[s] + t.min_snr_db[s];
  return sum / kNumSpreadingFactors;
}

// ---------------------------------------------------------------------------
// Airtime

inline bool low_data_rate_enabled(const ChannelParams& ch, int sf) {
  switch (ch.low_data_rate) {
    case LowDataRateMode::forced_on:
      return true;
    case LowDataRateMode::forced_off:
      return false;
    case LowDataRateMode::automatic:
      break;
  }
  return sf >= 11;
}

inline double symbol_time(int sf, double bandwidth_hz) {
  return std::ldexp(1.0, sf) / bandwidth_hz;
}

inline double symbol_time(const TransmissionConfig& cfg, const ChannelParams& ch) {
  return symbol_time(cfg.spreading_factor, ch.bandwidth_hz);
}

inline int payload_symbols(const TransmissionConfig& cfg, const ChannelParams& ch) {
  const int sf = cfg.spreading_factor;
  const int de = low_data_rate_enabled(ch, sf) ? 1 : 0;
  const int denom = 4 * (sf - 2 * de);
  if (denom <= 0) throw std::invalid_argument("payload_symbols: non-positive symbol divisor");
  const int numer = 8 * ch.payload_bytes - 4 * sf + 28 + 16 * (ch.crc_enabled ? 1 : 0) -
                    20 * (ch.header_flag ? 1 : 0);
  const int blocks = static_cast<int>(std::ceil(static_cast<double>(numer) / denom));
  const int coded = blocks * (cfg.coding_rate + 4);
  return 8 + (coded > 0 ? coded : 0);
}

inline double preamble_time(const TransmissionConfig& cfg, const ChannelParams& ch) {
  return (ch.preamble_symbols + 4.25) * symbol_time(cfg, ch);
}

/// Total airtime of one uplink in seconds.
inline double time_on_air(const TransmissionConfig& cfg, const ChannelParams& ch) {
  const double tsym = symbol_time(cfg, ch);
  return (ch.preamble_symbols + 4.25) * tsym + payload_symbols(cfg, ch) * tsym;
}

// ---------------------------------------------------------------------------
// Path loss

/// Log-distance mean RSS in dBm, fading excluded.
inline double mean_rss(double tx_power_dbm, double distance_m, const PathLossParams& pl) {
  if (!(distance_m > 0.0)) throw std::invalid_argument("mean_rss: distance must be positive");
  return tx_power_dbm - pl.ref_path_loss_db -
         10.0 * pl.exponent * std::log10(distance_m / pl.ref_distance_m);
}

}  // namespace loraeval

#endif
