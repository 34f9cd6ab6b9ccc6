#ifndef LORAEVAL_ANALYTICS_HPP
#define LORAEVAL_ANALYTICS_HPP

// Closed-form reliability, interference and energy-efficiency model,
// evaluated as dense matrix operations over all ED/GW pairs.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "loraeval/network.hpp"
#include "loraeval/radio.hpp"

namespace loraeval {

/// Probability that RSS = z - N(0, sigma) reaches the sensitivity floor.
/// sigma == 0 degenerates to a step at z == sensitivity.
inline double reception_prob(double mean_rss_dbm, double sensitivity_dbm, double sigma_db) {
  const double margin = mean_rss_dbm - sensitivity_dbm;
  if (sigma_db == 0.0) return margin >= 0.0 ? 1.0 : 0.0;
  return 0.5 + 0.5 * std::erf(margin / (std::numbers::sqrt2 * sigma_db));
}

/// Length of the window in which a start of j's transmission overlaps the
/// part of i's packet after its last five preamble symbols begin.
inline double interference_interval(double toa_i, double toa_j, double symbol_time_i,
                                    int preamble_symbols) {
  return toa_j + toa_i - (preamble_symbols - 5) * symbol_time_i;
}

inline double interference_prob(double rate_hz, double interval_s) {
  return -std::expm1(-rate_hz * interval_s);
}

/// Probability that i's signal is captured-over by j at a gateway, given the
/// mean RSS difference z_i - z_j. The noise difference is modeled with
/// erf denominator 2*sqrt(2)*sigma (i.e. a N(0, 2 sigma) variate).
inline double corruption_prob(double rss_difference_db, double sir_threshold_db, double sigma_db) {
  const double x = sir_threshold_db - rss_difference_db;
  if (sigma_db == 0.0) return x > 0.0 ? 1.0 : 0.0;
  return 0.5 + 0.5 * std::erf(x / (2.0 * std::numbers::sqrt2 * sigma_db));
}

// ---------------------------------------------------------------------------
// Per-pair convenience forms over a configuration.

inline double interference_interval(std::size_t i, std::size_t j, const NetworkConfig& cfg) {
  const auto ti = cfg.transmission(i);
  const auto tj = cfg.transmission(j);
  return interference_interval(time_on_air(ti, cfg.channel), time_on_air(tj, cfg.channel),
                               symbol_time(ti, cfg.channel), cfg.channel.preamble_symbols);
}

inline double interference_prob(std::size_t i, std::size_t j, const NetworkConfig& cfg) {
  return interference_prob(cfg.packet_rate_hz, interference_interval(i, j, cfg));
}

inline double capture_corruption_prob(std::size_t i, std::size_t j, std::size_t k,
                                      const NetworkConfig& cfg) {
  const Point& gw = cfg.gw_positions[k];
  const auto& ei = cfg.ed_positions[i];
  const auto& ej = cfg.ed_positions[j];
  const double zi = mean_rss(cfg.ed_power[i], std::hypot(ei.x - gw.x, ei.y - gw.y), cfg.path_loss);
  const double zj = mean_rss(cfg.ed_power[j], std::hypot(ej.x - gw.x, ej.y - gw.y), cfg.path_loss);
  return corruption_prob(zi - zj, sir_threshold(cfg.tables, cfg.ed_sf[i], cfg.ed_sf[j]),
                         cfg.path_loss.shadow_sigma_db);
}

// ---------------------------------------------------------------------------

struct EvaluationResult {
  Matrix rss_mean;  // N x K, dBm, fading excluded
  Matrix psi;       // N x K
  Matrix zeta;      // N x K
  Matrix pdr_gw;    // N x K
  Vector pdr;       // N
  Vector ee;        // N, bits/mJ
  Vector toa;       // N, seconds
};

/// Bits delivered per millijoule: 8 L pdr / (e_p T).
inline double energy_efficiency(int payload_bytes, double pdr, double power_draw_mw, double toa_s) {
  return 8.0 * payload_bytes * pdr / (power_draw_mw * toa_s);
}

/// Precomputed model state for one configuration. Holds the mean-RSS matrix,
/// airtimes and pairwise interference probabilities so that repeated
/// evaluations, and single-device parameter changes, avoid recomputing
/// everything.
class NetworkModel {
public:
  explicit NetworkModel(NetworkConfig cfg) : cfg_(std::move(cfg)) {
    require_valid(cfg_, {.allow_zero_rate = true});
    const auto n = static_cast<Eigen::Index>(cfg_.num_devices());
    distance_ = distance_matrix(cfg_);
    log_distance_term_ = 10.0 * cfg_.path_loss.exponent *
                         (distance_.array() / cfg_.path_loss.ref_distance_m).log10();
    z_.resize(n, distance_.cols());
    toa_.resize(n);
    tsym_.resize(n);
    psi_.resize(n, distance_.cols());
    for (Eigen::Index i = 0; i < n; ++i) refresh_device(i);
    interference_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) refresh_interference_row(i);
    build_zeta();
  }

  const NetworkConfig& config() const noexcept { return cfg_; }

  /// Changes one device's spreading factor and power. Its ψ row and airtime
  /// are refreshed, and every pairwise factor involving it is recomputed
  /// before ζ is re-reduced (each device's ζ depends on every other device).
  void set_device_params(std::size_t device, int sf, int tx_power_dbm) {
    if (!is_valid_spreading_factor(sf)) throw std::invalid_argument("set_device_params: bad SF");
    if (!cfg_.tables.has_power_level(tx_power_dbm))
      throw std::invalid_argument("set_device_params: power not in allowed set");
    if (cfg_.ed_sf[device] == sf && cfg_.ed_power[device] == tx_power_dbm) return;
    cfg_.ed_sf[device] = sf;
    cfg_.ed_power[device] = tx_power_dbm;
    const auto i = static_cast<Eigen::Index>(device);
    refresh_device(i);
    refresh_interference_row(i);
    for (Eigen::Index r = 0; r < interference_.rows(); ++r)
      if (r != i) interference_(r, i) = pair_interference(r, i);
    update_zeta(i);
  }

  const Matrix& mean_rss_matrix() const noexcept { return z_; }
  const Matrix& psi() const noexcept { return psi_; }
  const Matrix& zeta() const noexcept { return zeta_; }
  const Matrix& interference() const noexcept { return interference_; }
  const Vector& time_on_air() const noexcept { return toa_; }

  EvaluationResult result() const {
    EvaluationResult r;
    r.rss_mean = z_;
    r.psi = psi_;
    r.zeta = zeta_;
    r.pdr_gw = (psi_.array() * zeta_.array()).matrix();
    // 1 - prod(1 - x) accumulated as p += x (1 - p): exact for one gateway and
    // free of cancellation when every x is tiny.
    r.pdr = Vector::Zero(r.pdr_gw.rows());
    for (Eigen::Index k = 0; k < r.pdr_gw.cols(); ++k)
      r.pdr.array() += r.pdr_gw.col(k).array() * (1.0 - r.pdr.array());
    r.pdr = r.pdr.array().max(0.0).min(1.0).matrix();
    r.toa = toa_;
    r.ee.resize(r.pdr.size());
    for (Eigen::Index i = 0; i < r.pdr.size(); ++i) {
      const auto idx = static_cast<std::size_t>(i);
      r.ee(i) = energy_efficiency(cfg_.channel.payload_bytes, r.pdr(i),
                                  power_draw(cfg_.tables, cfg_.ed_power[idx]), toa_(i));
    }
    return r;
  }

private:
  void refresh_device(Eigen::Index i) {
    const auto idx = static_cast<std::size_t>(i);
    const auto tx = cfg_.transmission(idx);
    const auto& pl = cfg_.path_loss;
    z_.row(i) = (static_cast<double>(tx.tx_power_dbm) - pl.ref_path_loss_db -
                 log_distance_term_.row(i).array())
                    .matrix();
    toa_(i) = loraeval::time_on_air(tx, cfg_.channel);
    tsym_(i) = symbol_time(tx, cfg_.channel);
    const double eta = sensitivity(cfg_.tables, tx.spreading_factor);
    const double sigma = pl.shadow_sigma_db;
    psi_.row(i) = z_.row(i).unaryExpr([&](double z) { return reception_prob(z, eta, sigma); });
  }

  double pair_interference(Eigen::Index i, Eigen::Index j) const {
    return interference_prob(cfg_.packet_rate_hz,
                             interference_interval(toa_(i), toa_(j), tsym_(i),
                                                   cfg_.channel.preamble_symbols));
  }

  void refresh_interference_row(Eigen::Index i) {
    for (Eigen::Index j = 0; j < interference_.cols(); ++j)
      interference_(i, j) = (i == j) ? 0.0 : pair_interference(i, j);
  }

  double sir_threshold_of(Eigen::Index i, Eigen::Index j) const {
    return cfg_.tables.sir_threshold_db[sf_index(cfg_.ed_sf[static_cast<std::size_t>(i)])]
                                       [sf_index(cfg_.ed_sf[static_cast<std::size_t>(j)])];
  }

  // 1 - h_ij * P(i corrupted by j at gateway g); 1 on the diagonal.
  double survive_entry(Eigen::Index i, Eigen::Index j, Eigen::Index g) const {
    if (i == j) return 1.0;
    return 1.0 - interference_(i, j) * corruption_prob(z_(i, g) - z_(j, g), sir_threshold_of(i, j),
                                                        cfg_.path_loss.shadow_sigma_db);
  }

  void build_zeta() {
    const Eigen::Index n = z_.rows();
    const Eigen::Index k = z_.cols();
    const double sigma = cfg_.path_loss.shadow_sigma_db;

    Eigen::ArrayXXd omega(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) omega(i, j) = sir_threshold_of(i, j);

    survive_.assign(static_cast<std::size_t>(k), Eigen::ArrayXXd(n, n));
    for (Eigen::Index g = 0; g < k; ++g) {
      const Eigen::ArrayXd zg = z_.col(g).array();
      // rss_difference(i, j) = z_ig - z_jg
      const Eigen::ArrayXXd rss_difference = zg.replicate(1, n) - zg.transpose().replicate(n, 1);
      const Eigen::ArrayXXd corrupt = (omega - rss_difference).unaryExpr([sigma](double x) {
        return corruption_prob(0.0, x, sigma);
      });
      auto& survive = survive_[static_cast<std::size_t>(g)];
      survive = 1.0 - interference_.array() * corrupt;
      survive.matrix().diagonal().setOnes();
    }
    reduce_zeta();
  }

  // Refreshes the survival factors that involve `device` (its row and column).
  void update_zeta(Eigen::Index device) {
    const Eigen::Index n = z_.rows();
    for (Eigen::Index g = 0; g < z_.cols(); ++g) {
      auto& survive = survive_[static_cast<std::size_t>(g)];
      for (Eigen::Index j = 0; j < n; ++j) {
        survive(device, j) = survive_entry(device, j, g);
        survive(j, device) = survive_entry(j, device, g);
      }
    }
    reduce_zeta();
  }

  void reduce_zeta() {
    zeta_.resize(z_.rows(), z_.cols());
    for (Eigen::Index g = 0; g < z_.cols(); ++g)
      zeta_.col(g) = survive_[static_cast<std::size_t>(g)].rowwise().prod().max(0.0).min(1.0).matrix();
  }

  NetworkConfig cfg_;
  Matrix distance_;
  Eigen::ArrayXXd log_distance_term_;
  Matrix z_;
  Vector toa_;
  Vector tsym_;
  Matrix psi_;
  Matrix interference_;  // h_ij, zero diagonal
  Matrix zeta_;
  std::vector<Eigen::ArrayXXd> survive_;  // per gateway, N x N
};

inline Matrix psi_matrix(const NetworkConfig& cfg) { return NetworkModel(cfg).psi(); }

inline Matrix zeta_matrix(const NetworkConfig& cfg) { return NetworkModel(cfg).zeta(); }

/// Full analytic evaluation. Throws ValidationError for invalid configs.
inline EvaluationResult evaluate(const NetworkConfig& cfg) { return NetworkModel(cfg).result(); }

}  // namespace loraeval

#endif
