#ifndef LORAEVAL_ADR_HPP
#define LORAEVAL_ADR_HPP

// Network-server ADR (SNR-margin driven), device-side ADR backoff, and an
// uplink event loop that runs both against sampled receptions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iterator>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "loraeval/analytics.hpp"
#include "loraeval/random.hpp"
#include "loraeval/sampling.hpp"

namespace loraeval {

struct TxParams {
  int sf = 12;
  int power_dbm = 14;

  friend bool operator==(const TxParams&, const TxParams&) = default;
};

/// Everything ADR needs to know about the allowed parameter space.
struct AdrPolicy {
  int min_sf = kMinSpreadingFactor;
  int max_sf = kMaxSpreadingFactor;
  std::vector<int> power_levels{2, 4, 6, 8, 10, 12, 14, 16};  // ascending
  SfTable min_snr_db = default_min_snr_db();
  double device_margin_db = 10.0;
  std::size_t buffer_size = 20;

  static AdrPolicy from_tables(const RadioTables& tables) {
    AdrPolicy policy;
    policy.power_levels = tables.power_levels();
    policy.min_snr_db = tables.min_snr_db;
    return policy;
  }

  int min_power() const { return power_levels.front(); }
  int max_power() const { return power_levels.back(); }

  // Neighbouring level in the allowed set; the default grid is 2 dB apart.
  int power_below(int p) const {
    auto it = std::lower_bound(power_levels.begin(), power_levels.end(), p);
    return it == power_levels.begin() ? p : *std::prev(it);
  }
  int power_above(int p) const {
    auto it = std::upper_bound(power_levels.begin(), power_levels.end(), p);
    return it == power_levels.end() ? p : *it;
  }
};

/// Network-server side ADR state for one device.
struct AdrState {
  std::vector<double> buffer;
  int current_f = 12;
  int current_p = 14;
};

inline void adr_reset(AdrState& state) { state.buffer.clear(); }

/// Pushes the best-gateway SNR of one received uplink sent with (f, p).
/// Once the buffer holds `buffer_size` values, computes the margin against
/// the demodulation floor of f, converts it to 3 dB steps (truncated toward
/// zero), spends positive steps lowering SF then power and negative steps
/// raising power, and yields the result. The buffer is cleared on yield.
inline std::optional<TxParams> adr_add_measurement(AdrState& state, double snr_max_db, int f, int p,
                                                   const AdrPolicy& policy) {
  state.current_f = f;
  state.current_p = p;
  state.buffer.push_back(snr_max_db);
  if (state.buffer.size() < policy.buffer_size) return std::nullopt;

  const double snr_max = *std::max_element(state.buffer.begin(), state.buffer.end());
  const double margin = snr_max - policy.min_snr_db[sf_index(f)] - policy.device_margin_db;
  auto steps = static_cast<long>(std::trunc(margin / 3.0));

  while (steps > 0 && f > policy.min_sf) {
    --f;
    --steps;
  }
  while (steps > 0 && p > policy.min_power()) {
    p = policy.power_below(p);
    --steps;
  }
  while (steps < 0 && p < policy.max_power()) {
    p = policy.power_above(p);
    ++steps;
  }

  state.current_f = f;
  state.current_p = p;
  state.buffer.clear();
  return TxParams{f, p};
}

inline std::optional<TxParams> adr_add_measurement(AdrState& state, double snr_max_db,
                                                   const AdrPolicy& policy) {
  return adr_add_measurement(state, snr_max_db, state.current_f, state.current_p, policy);
}

// ---------------------------------------------------------------------------
// Backoff

struct BackoffParams {
  int limit = 64;
  int delay = 32;
};

struct BackoffState {
  long ack_counter = 0;
  int limit = 64;
  int delay = 32;

  BackoffState() = default;
  explicit BackoffState(BackoffParams params) : limit(params.limit), delay(params.delay) {
    if (limit <= 0 || delay <= 0) throw std::invalid_argument("backoff limit and delay must be positive");
  }

  bool requesting() const noexcept { return ack_counter > limit; }
};

enum class BackoffEvent { uplink_attempt, adr_received, request_acknowledged };

/// Advances the backoff counter for one event and returns the device's
/// (possibly relaxed) transmission parameters.
inline TxParams backoff_step(BackoffState& state, BackoffEvent event, TxParams current,
                             const AdrPolicy& policy) {
  switch (event) {
    case BackoffEvent::adr_received:
      state.ack_counter = 0;
      return current;
    case BackoffEvent::request_acknowledged:
      if (state.ack_counter > state.limit) state.ack_counter = 0;
      return current;
    case BackoffEvent::uplink_attempt:
      break;
  }

  ++state.ack_counter;
  TxParams next = current;
  const long threshold = static_cast<long>(state.limit) + state.delay;
  if (state.ack_counter == threshold) {
    next.power_dbm = policy.max_power();
  } else if (state.ack_counter > threshold && (state.ack_counter - state.limit) % state.delay == 0) {
    next.sf = std::min(current.sf + 1, policy.max_sf);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Event loop

enum class TraceKind { uplink_received, uplink_lost, adr_update, backoff_update, request_ack };

inline const char* to_string(TraceKind kind) {
  switch (kind) {
    case TraceKind::uplink_received:
      return "uplink_received";
    case TraceKind::uplink_lost:
      return "uplink_lost";
    case TraceKind::adr_update:
      return "adr_update";
    case TraceKind::backoff_update:
      return "backoff_update";
    case TraceKind::request_ack:
      return "request_ack";
  }
  return "unknown";
}

struct TraceEvent {
  double time_s = 0.0;
  std::size_t ed = 0;
  TraceKind kind = TraceKind::uplink_lost;
  int sf = 0;
  int power_dbm = 0;
  std::optional<double> max_snr_db;
};

struct AdrSimulationResult {
  std::vector<TraceEvent> trace;
  NetworkConfig final_config;
  std::vector<std::size_t> uplinks;  // per ED
};

/// Runs ADR and backoff for every device over [0, duration_s).
///
/// Each device generates uplinks with exponential inter-arrival times at the
/// configured rate. Per uplink, in order: receptions are sampled at every
/// gateway; if any gateway decoded it, the network server pushes the best
/// SNR into that device's ADR buffer; the device's backoff counter advances
/// and is reset whenever the uplink got through (an outstanding parameter
/// request counts as acknowledged); any parameter change takes effect from the
/// next uplink, after which the analytic state of the network is refreshed.
///
/// Random streams are derived per device from `seed`, so traces are
/// reproducible.
inline AdrSimulationResult run_adr_simulation(const NetworkConfig& cfg, double duration_s,
                                              std::uint64_t seed, BackoffParams backoff = {}) {
  if (!(duration_s > 0.0)) throw std::invalid_argument("run_adr_simulation: duration must be positive");
  require_valid(cfg);
  NetworkModel model(cfg);
  const std::size_t n = cfg.num_devices();
  const std::size_t k = cfg.num_gateways();
  const AdrPolicy policy = AdrPolicy::from_tables(cfg.tables);

  std::vector<Rng> traffic, radio;
  std::vector<AdrState> ns(n);
  std::vector<BackoffState> dev(n, BackoffState(backoff));
  traffic.reserve(n);
  radio.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    traffic.emplace_back(derive_seed(seed, {0, i}));
    radio.emplace_back(derive_seed(seed, {1, i}));
    ns[i].current_f = cfg.ed_sf[i];
    ns[i].current_p = cfg.ed_power[i];
  }

  using Pending = std::pair<double, std::size_t>;
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> queue;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = traffic[i].exponential(cfg.packet_rate_hz);
    if (t < duration_s) queue.emplace(t, i);
  }

  AdrSimulationResult out;
  out.uplinks.assign(n, 0);
  while (!queue.empty()) {
    const auto [t, i] = queue.top();
    queue.pop();
    ++out.uplinks[i];

    const auto& current_cfg = model.config();
    const TxParams sent{current_cfg.ed_sf[i], current_cfg.ed_power[i]};

    std::optional<double> best_snr;
    for (std::size_t g = 0; g < k; ++g) {
      const double snr = sample_snr(sample_rss(i, g, model, radio[i]), current_cfg.tables);
      if (!is_missed(snr) && (!best_snr || snr > *best_snr)) best_snr = snr;
    }
    out.trace.push_back({t, i, best_snr ? TraceKind::uplink_received : TraceKind::uplink_lost,
                         sent.sf, sent.power_dbm, best_snr});

    std::optional<TxParams> command;
    if (best_snr) command = adr_add_measurement(ns[i], *best_snr, sent.sf, sent.power_dbm, policy);

    TxParams next = backoff_step(dev[i], BackoffEvent::uplink_attempt, sent, policy);
    if (best_snr) {
      if (dev[i].requesting()) {
        backoff_step(dev[i], BackoffEvent::request_acknowledged, next, policy);
        out.trace.push_back({t, i, TraceKind::request_ack, next.sf, next.power_dbm, std::nullopt});
      }
      backoff_step(dev[i], BackoffEvent::adr_received, next, policy);
    }
    if (command) {
      next = *command;
      out.trace.push_back({t, i, TraceKind::adr_update, next.sf, next.power_dbm, std::nullopt});
    } else if (next != sent) {
      // The server sees the new data rate on the next uplink; measurements
      // taken under the old parameters are discarded.
      adr_reset(ns[i]);
      out.trace.push_back({t, i, TraceKind::backoff_update, next.sf, next.power_dbm, std::nullopt});
    }
    if (next != sent) model.set_device_params(i, next.sf, next.power_dbm);

    const double t_next = t + traffic[i].exponential(cfg.packet_rate_hz);
    if (t_next < duration_s) queue.emplace(t_next, i);
  }

  out.final_config = model.config();
  return out;
}

}  // namespace loraeval

#endif
