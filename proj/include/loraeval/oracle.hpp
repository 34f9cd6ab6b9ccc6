#ifndef LORAEVAL_ORACLE_HPP
#define LORAEVAL_ORACLE_HPP

// Packet-level Monte-Carlo reference for the analytic model: explicit packet
// timelines, per-packet fading and pairwise capture tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "loraeval/analytics.hpp"
#include "loraeval/random.hpp"

namespace loraeval {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

struct OracleResult {
  std::vector<std::int64_t> sent;
  std::vector<std::int64_t> received;  // by at least one gateway
  Vector pdr_emp;                      // received / sent, 0 when nothing was sent
  Vector ee_emp;                       // bits/mJ from pdr_emp
  CountMatrix per_gw_received;         // N x K
};

struct OracleOptions {
  // When false, overlapping packets never corrupt each other; only the
  // sensitivity test applies.
  bool capture_checks = true;
};

/// Simulates every uplink in [0, duration_s).
///
/// Each device emits packets with exponential inter-arrival times. Packet i
/// from device a is lost at gateway g unless its faded RSS reaches the
/// sensitivity of its SF and, for every packet from another device whose
/// airtime overlaps i's vulnerable window (from the start of its last five
/// preamble symbols to its end), the capture test passes:
///   (z_a - z_b) + D >= sir_threshold(sf_a, sf_b),  D ~ N(0, 2 sigma).
/// Fading and capture noise are drawn independently per gateway. A packet is
/// received if any gateway keeps it. Packets still on air at duration_s are
/// not counted (but still interfere).
inline OracleResult run_oracle(const NetworkConfig& cfg, double duration_s, std::uint64_t seed,
                               OracleOptions opts = {}) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("run_oracle: duration must be positive");
  const NetworkModel model(cfg);
  const Matrix& z = model.mean_rss_matrix();
  const Vector& toa = model.time_on_air();
  const auto n = static_cast<std::size_t>(cfg.num_devices());
  const auto k = static_cast<Eigen::Index>(cfg.num_gateways());
  const double sigma = cfg.path_loss.shadow_sigma_db;
  const int guard_symbols = cfg.channel.preamble_symbols - 5;

  struct Packet {
    double start;
    std::size_t ed;
  };
  std::vector<Packet> packets;
  for (std::size_t i = 0; i < n; ++i) {
    Rng traffic(derive_seed(seed, {0, i}));
    for (double t = traffic.exponential(cfg.packet_rate_hz); t < duration_s;
         t += traffic.exponential(cfg.packet_rate_hz))
      packets.push_back({t, i});
  }
  std::sort(packets.begin(), packets.end(), [](const Packet& a, const Packet& b) {
    return a.start != b.start ? a.start < b.start : a.ed < b.ed;
  });

  std::vector<double> vulnerable_offset(n), sensitivity_of(n);
  for (std::size_t i = 0; i < n; ++i) {
    vulnerable_offset[i] = guard_symbols * symbol_time(cfg.transmission(i), cfg.channel);
    sensitivity_of[i] = sensitivity(cfg.tables, cfg.ed_sf[i]);
  }
  const double max_toa = toa.maxCoeff();

  OracleResult out;
  out.sent.assign(n, 0);
  out.received.assign(n, 0);
  out.per_gw_received = CountMatrix::Zero(static_cast<Eigen::Index>(n), k);

  // Every packet gets its own stream: fading for all gateways first, then
  // capture noise. Turning capture checks off therefore leaves the fading
  // draws untouched.
  std::vector<std::uint64_t> packet_seq(n, 0);
  std::vector<std::size_t> interferers;
  std::vector<double> faded(static_cast<std::size_t>(k));
  for (std::size_t idx = 0; idx < packets.size(); ++idx) {
    const auto [start, a] = packets[idx];
    const auto ai = static_cast<Eigen::Index>(a);
    const std::uint64_t seq = packet_seq[a]++;
    const double end = start + toa(ai);
    if (end > duration_s) continue;
    ++out.sent[a];

    interferers.clear();
    if (opts.capture_checks) {
      const double window_start = start + vulnerable_offset[a];
      auto first = std::lower_bound(packets.begin(), packets.end(), window_start - max_toa,
                                    [](const Packet& p, double t) { return p.start < t; });
      for (auto it = first; it != packets.end() && it->start < end; ++it) {
        if (it->ed == a) continue;
        if (it->start + toa(static_cast<Eigen::Index>(it->ed)) > window_start)
          interferers.push_back(it->ed);
      }
    }

    Rng rng(derive_seed(seed, {1, a, seq}));
    for (Eigen::Index g = 0; g < k; ++g)
      faded[static_cast<std::size_t>(g)] = z(ai, g) - sigma * rng.standard_normal();

    bool any = false;
    for (Eigen::Index g = 0; g < k; ++g) {
      bool ok = faded[static_cast<std::size_t>(g)] >= sensitivity_of[a];
      for (std::size_t b : interferers) {
        const auto bi = static_cast<Eigen::Index>(b);
        const double noise_difference = 2.0 * sigma * rng.standard_normal();
        ok = ok && (z(ai, g) - z(bi, g)) + noise_difference >=
                       cfg.tables.sir_threshold_db[sf_index(cfg.ed_sf[a])][sf_index(cfg.ed_sf[b])];
      }
      if (ok) {
        ++out.per_gw_received(ai, g);
        any = true;
      }
    }
    if (any) ++out.received[a];
  }

  out.pdr_emp.resize(static_cast<Eigen::Index>(n));
  out.ee_emp.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    out.pdr_emp(ii) = out.sent[i] > 0 ? static_cast<double>(out.received[i]) / out.sent[i] : 0.0;
    out.ee_emp(ii) = energy_efficiency(cfg.channel.payload_bytes, out.pdr_emp(ii),
                                       power_draw(cfg.tables, cfg.ed_power[i]), toa(ii));
  }
  return out;
}

struct ErrorStats {
  double mae = 0.0;
  double sde = 0.0;  // population standard deviation of (a - b)
};

inline ErrorStats mae_sde(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("mae_sde: length mismatch");
  if (a.empty()) return {};
  const auto count = static_cast<double>(a.size());
  double abs_sum = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    abs_sum += std::abs(a[i] - b[i]);
    sum += a[i] - b[i];
  }
  const double mean = sum / count;
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sq += (a[i] - b[i] - mean) * (a[i] - b[i] - mean);
  return {abs_sum / count, std::sqrt(sq / count)};
}

inline ErrorStats mae_sde(const Vector& a, const Vector& b) {
  return mae_sde(std::span<const double>(a.data(), static_cast<std::size_t>(a.size())),
                 std::span<const double>(b.data(), static_cast<std::size_t>(b.size())));
}

}  // namespace loraeval

#endif
