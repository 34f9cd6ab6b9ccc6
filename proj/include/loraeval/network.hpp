#ifndef LORAEVAL_NETWORK_HPP
#define LORAEVAL_NETWORK_HPP

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "loraeval/error.hpp"
#include "loraeval/radio.hpp"
#include "loraeval/random.hpp"

namespace loraeval {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// Static network description: N end devices, K gateways, and the shared
/// channel, propagation, traffic and radio-table parameters.
struct NetworkConfig {
  std::vector<Point> ed_positions;
  std::vector<Point> gw_positions;
  std::vector<int> ed_sf;
  std::vector<int> ed_power;
  ChannelParams channel;
  PathLossParams path_loss;
  RadioTables tables = default_radio_tables();
  double packet_rate_hz = 0.001;

  std::size_t num_devices() const noexcept { return ed_positions.size(); }
  std::size_t num_gateways() const noexcept { return gw_positions.size(); }

  TransmissionConfig transmission(std::size_t i) const {
    return {ed_sf[i], ed_power[i], channel.coding_rate};
  }
};

struct ValidationOptions {
  // The closed-form model is well defined without traffic; scenario files
  // still require a positive rate.
  bool allow_zero_rate = false;
};

/// Returns every violated invariant; empty means valid.
inline std::vector<ValidationIssue> validate(const NetworkConfig& cfg,
                                             ValidationOptions opts = {}) {
  std::vector<ValidationIssue> issues;
  auto add = [&](std::string msg, long index = -1) { issues.push_back({std::move(msg), index}); };

  const std::size_t n = cfg.num_devices();
  const std::size_t k = cfg.num_gateways();
  if (n == 0) add("network has no end devices");
  if (k == 0) add("network has no gateways");
  if (cfg.ed_sf.size() != n)
    add("spreading factor vector has length " + std::to_string(cfg.ed_sf.size()) + ", expected " +
        std::to_string(n));
  if (cfg.ed_power.size() != n)
    add("power vector has length " + std::to_string(cfg.ed_power.size()) + ", expected " +
        std::to_string(n));

  const auto& ch = cfg.channel;
  if (!(ch.bandwidth_hz > 0.0) || !std::isfinite(ch.bandwidth_hz)) add("bandwidth must be positive");
  if (ch.preamble_symbols < 6) add("preamble must have at least 6 symbols");
  if (ch.payload_bytes < 0) add("payload size must be non-negative");
  if (ch.coding_rate < 1 || ch.coding_rate > 4) add("coding rate index must be in 1..4");

  const auto& pl = cfg.path_loss;
  if (!(pl.ref_distance_m > 0.0)) add("reference distance must be positive");
  if (!(pl.shadow_sigma_db >= 0.0)) add("shadow fading sigma must be non-negative");
  if (!std::isfinite(pl.ref_path_loss_db) || !std::isfinite(pl.exponent))
    add("path loss parameters must be finite");

  const bool rate_ok = cfg.packet_rate_hz > 0.0 || (opts.allow_zero_rate && cfg.packet_rate_hz == 0.0);
  if (!rate_ok || !std::isfinite(cfg.packet_rate_hz)) add("packet rate must be positive");

  if (cfg.tables.power_draw_mw.empty()) add("power draw table is empty");
  for (const auto& [p, mw] : cfg.tables.power_draw_mw)
    if (!(mw > 0.0)) add("power draw for " + std::to_string(p) + " dBm must be positive");
  for (std::size_t s = 0; s < kNumSpreadingFactors; ++s) {
    if (!std::isfinite(cfg.tables.sensitivity_dbm[s]) || !std::isfinite(cfg.tables.min_snr_db[s]))
      add("sensitivity/min SNR for spreading factor " + std::to_string(kSpreadingFactors[s]) +
          " must be finite");
    for (double w : cfg.tables.sir_threshold_db[s])
      if (!std::isfinite(w)) add("SIR threshold table must be finite");
  }

  for (std::size_t i = 0; i < cfg.ed_sf.size(); ++i)
    if (!is_valid_spreading_factor(cfg.ed_sf[i]))
      add("spreading factor out of range at ED index " + std::to_string(i) + " (got " +
              std::to_string(cfg.ed_sf[i]) + ")",
          static_cast<long>(i));
  for (std::size_t i = 0; i < cfg.ed_power.size(); ++i)
    if (!cfg.tables.has_power_level(cfg.ed_power[i]))
      add("transmit power not in the allowed set at ED index " + std::to_string(i) + " (got " +
              std::to_string(cfg.ed_power[i]) + " dBm)",
          static_cast<long>(i));

  for (std::size_t i = 0; i < n; ++i) {
    const Point& e = cfg.ed_positions[i];
    if (!std::isfinite(e.x) || !std::isfinite(e.y))
      add("non-finite position at ED index " + std::to_string(i), static_cast<long>(i));
    for (std::size_t g = 0; g < k; ++g)
      if (e == cfg.gw_positions[g])
        add("zero ED-GW distance at ED index " + std::to_string(i) + ", GW index " +
                std::to_string(g),
            static_cast<long>(i));
  }
  for (std::size_t g = 0; g < k; ++g) {
    const Point& p = cfg.gw_positions[g];
    if (!std::isfinite(p.x) || !std::isfinite(p.y))
      add("non-finite position at GW index " + std::to_string(g), static_cast<long>(g));
  }
  return issues;
}

/// Throws ValidationError listing every violation.
inline void require_valid(const NetworkConfig& cfg, ValidationOptions opts = {}) {
  auto issues = validate(cfg, opts);
  if (!issues.empty()) throw ValidationError(std::move(issues));
}

/// N x K Euclidean ED-GW distances in meters.
inline Matrix distance_matrix(const NetworkConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cfg.num_devices());
  const auto k = static_cast<Eigen::Index>(cfg.num_gateways());
  Matrix d(n, k);
  for (Eigen::Index g = 0; g < k; ++g) {
    const Point& gw = cfg.gw_positions[static_cast<std::size_t>(g)];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Point& ed = cfg.ed_positions[static_cast<std::size_t>(i)];
      d(i, g) = std::hypot(ed.x - gw.x, ed.y - gw.y);
    }
  }
  return d;
}

/// Random scenario: ED and GW positions uniform on [0, area_m]^2, each ED's
/// (SF, power) uniform over the allowed grid. Channel, propagation, traffic
/// and tables are copied from `base`. Deterministic in `seed`.
///
/// Draw order: per ED (x, y, SF, power), then per GW (x, y).
inline NetworkConfig generate_scenario(std::size_t n_ed, std::size_t n_gw, double area_m,
                                       std::uint64_t seed, const NetworkConfig& base = {}) {
  NetworkConfig cfg;
  cfg.channel = base.channel;
  cfg.path_loss = base.path_loss;
  cfg.tables = base.tables;
  cfg.packet_rate_hz = base.packet_rate_hz;

  const std::vector<int> powers = cfg.tables.power_levels();
  if (n_ed == 0 || n_gw == 0) throw std::invalid_argument("generate_scenario: need n_ed, n_gw >= 1");
  if (!(area_m > 0.0)) throw std::invalid_argument("generate_scenario: area must be positive");
  if (powers.empty()) throw std::invalid_argument("generate_scenario: empty power table");
  Rng rng(seed);
  cfg.ed_positions.reserve(n_ed);
  for (std::size_t i = 0; i < n_ed; ++i) {
    const double x = rng.uniform(0.0, area_m);
    const double y = rng.uniform(0.0, area_m);
    cfg.ed_positions.push_back({x, y});
    cfg.ed_sf.push_back(kSpreadingFactors[rng.below(kNumSpreadingFactors)]);
    cfg.ed_power.push_back(powers[rng.below(powers.size())]);
  }
  cfg.gw_positions.reserve(n_gw);
  for (std::size_t g = 0; g < n_gw; ++g) {
    const double x = rng.uniform(0.0, area_m);
    const double y = rng.uniform(0.0, area_m);
    cfg.gw_positions.push_back({x, y});
  }
  return cfg;
}

}  // namespace loraeval

#endif
