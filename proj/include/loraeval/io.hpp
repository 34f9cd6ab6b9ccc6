#ifndef LORAEVAL_IO_HPP
#define LORAEVAL_IO_HPP

// Scenario files (versioned JSON) and CSV/JSON exports of results.

#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "loraeval/adr.hpp"
#include "loraeval/analytics.hpp"
#include "loraeval/error.hpp"
#include "loraeval/network.hpp"
#include "loraeval/oracle.hpp"
#include "loraeval/sampling.hpp"

namespace loraeval {

inline constexpr int kScenarioVersion = 1;

namespace detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline std::string line_col(std::string_view text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

/// Field access with path-addressed errors.
class Reader {
public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

  const std::string& path() const { return path_; }
  const json& node() const { return node_; }

  void expect_object() const {
    if (!node_.is_object()) fail("expected an object");
  }
  void expect_array() const {
    if (!node_.is_array()) fail("expected an array");
  }

  void reject_unknown(std::initializer_list<std::string_view> known) const {
    for (const auto& [key, value] : node_.items()) {
      bool found = false;
      for (auto k : known) found = found || key == k;
      if (!found) throw ParseError(child_path(key) + ": unknown field");
    }
  }

  bool has(const std::string& key) const { return node_.contains(key) && !node_.at(key).is_null(); }

  Reader child(const std::string& key) const { return {node_.at(key), child_path(key)}; }
  Reader at(std::size_t i) const { return {node_.at(i), path_ + "[" + std::to_string(i) + "]"}; }

  double number() const {
    if (!node_.is_number()) fail("expected a number");
    return node_.get<double>();
  }
  int integer() const {
    if (!node_.is_number_integer()) fail("expected an integer");
    return node_.get<int>();
  }
  bool flag() const {
    if (node_.is_boolean()) return node_.get<bool>();
    if (node_.is_number_integer()) {
      const auto v = node_.get<long>();
      if (v == 0 || v == 1) return v == 1;
    }
    fail("expected 0, 1, true or false");
  }
  std::string string() const {
    if (!node_.is_string()) fail("expected a string");
    return node_.get<std::string>();
  }

  void read(const std::string& key, double& out) const {
    if (has(key)) out = child(key).number();
  }
  void read(const std::string& key, int& out) const {
    if (has(key)) out = child(key).integer();
  }
  void read_flag(const std::string& key, bool& out) const {
    if (has(key)) out = child(key).flag();
  }

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(path_ + ": " + what); }

private:
  std::string child_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json& node_;
  std::string path_;
};

inline int parse_sf_key(const Reader& table, const std::string& key) {
  int sf = 0;
  try {
    std::size_t used = 0;
    sf = std::stoi(key, &used);
    if (used != key.size()) sf = 0;
  } catch (const std::exception&) {
    sf = 0;
  }
  if (!is_valid_spreading_factor(sf))
    throw ParseError(table.path() + "." + key + ": key must be a spreading factor 7..12");
  return sf;
}

inline void read_sf_table(const Reader& r, SfTable& table) {
  r.expect_object();
  for (const auto& [key, value] : r.node().items())
    table[sf_index(parse_sf_key(r, key))] = r.child(key).number();
}

inline const char* to_string(LowDataRateMode mode) {
  switch (mode) {
    case LowDataRateMode::forced_on:
      return "on";
    case LowDataRateMode::forced_off:
      return "off";
    case LowDataRateMode::automatic:
      break;
  }
  return "auto";
}

/// Fixed-point formatting independent of stream state and locale.
inline std::string fixed(double value, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, value);
  std::string s(buf);
  // "-0.000" -> "0.000"
  if (s.front() == '-' && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

inline std::string probability(double v) { return fixed(v, 6); }
inline std::string decibels(double v) { return is_missed(v) ? std::string{} : fixed(v, 3); }

inline ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (is_missed(m(i, j)))
        row.push_back(nullptr);
      else
        row.push_back(m(i, j));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline ordered_json vector_json(const Vector& v) {
  ordered_json out = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Scenario files

/// Parses a scenario document. Omitted sections and fields keep their
/// defaults (the standard evaluation parameters), so a minimal file only
/// lists devices and gateways. Throws ParseError with a line or field
/// address; the result is not validated.
inline NetworkConfig parse_scenario(std::string_view text) {
  using detail::Reader;
  detail::json doc;
  try {
    doc = detail::json::parse(text.begin(), text.end());
  } catch (const detail::json::parse_error& e) {
    throw ParseError("syntax error at " + detail::line_col(text, e.byte > 0 ? e.byte - 1 : 0) + ": " +
                     e.what());
  }

  const Reader root(doc, "");
  root.expect_object();
  root.reject_unknown({"version", "channel", "path_loss", "traffic", "tables", "devices", "gateways"});
  if (root.has("version")) {
    const int version = root.child("version").integer();
    if (version != kScenarioVersion)
      root.child("version").fail("unsupported version " + std::to_string(version));
  }

  NetworkConfig cfg;
  if (root.has("channel")) {
    const Reader ch = root.child("channel");
    ch.expect_object();
    ch.reject_unknown({"bandwidth_hz", "preamble_symbols", "crc", "header_flag", "low_data_rate",
                       "payload_bytes", "coding_rate", "noise_floor_dbm"});
    ch.read("bandwidth_hz", cfg.channel.bandwidth_hz);
    ch.read("preamble_symbols", cfg.channel.preamble_symbols);
    ch.read_flag("crc", cfg.channel.crc_enabled);
    ch.read_flag("header_flag", cfg.channel.header_flag);
    ch.read("payload_bytes", cfg.channel.payload_bytes);
    ch.read("coding_rate", cfg.channel.coding_rate);
    if (ch.has("noise_floor_dbm")) cfg.channel.noise_floor_dbm = ch.child("noise_floor_dbm").number();
    if (ch.has("low_data_rate")) {
      const Reader de = ch.child("low_data_rate");
      const std::string mode = de.string();
      if (mode == "auto")
        cfg.channel.low_data_rate = LowDataRateMode::automatic;
      else if (mode == "on")
        cfg.channel.low_data_rate = LowDataRateMode::forced_on;
      else if (mode == "off")
        cfg.channel.low_data_rate = LowDataRateMode::forced_off;
      else
        de.fail("expected \"auto\", \"on\" or \"off\"");
    }
  }

  if (root.has("path_loss")) {
    const Reader pl = root.child("path_loss");
    pl.expect_object();
    pl.reject_unknown({"ref_path_loss_db", "ref_distance_m", "exponent", "shadow_sigma_db"});
    pl.read("ref_path_loss_db", cfg.path_loss.ref_path_loss_db);
    pl.read("ref_distance_m", cfg.path_loss.ref_distance_m);
    pl.read("exponent", cfg.path_loss.exponent);
    pl.read("shadow_sigma_db", cfg.path_loss.shadow_sigma_db);
  }

  if (root.has("traffic")) {
    const Reader tr = root.child("traffic");
    tr.expect_object();
    tr.reject_unknown({"packet_rate_hz"});
    tr.read("packet_rate_hz", cfg.packet_rate_hz);
  }

  if (root.has("tables")) {
    const Reader tb = root.child("tables");
    tb.expect_object();
    tb.reject_unknown({"sensitivity_dbm", "min_snr_db", "sir_threshold_db", "power_draw_mw"});
    if (tb.has("sensitivity_dbm")) detail::read_sf_table(tb.child("sensitivity_dbm"), cfg.tables.sensitivity_dbm);
    if (tb.has("min_snr_db")) detail::read_sf_table(tb.child("min_snr_db"), cfg.tables.min_snr_db);
    if (tb.has("sir_threshold_db")) {
      const Reader sir = tb.child("sir_threshold_db");
      sir.expect_array();
      if (sir.node().size() != kNumSpreadingFactors) sir.fail("expected 6 rows (SF 7..12)");
      for (std::size_t r = 0; r < kNumSpreadingFactors; ++r) {
        const Reader row = sir.at(r);
        row.expect_array();
        if (row.node().size() != kNumSpreadingFactors) row.fail("expected 6 columns (SF 7..12)");
        for (std::size_t c = 0; c < kNumSpreadingFactors; ++c)
          cfg.tables.sir_threshold_db[r][c] = row.at(c).number();
      }
    }
    if (tb.has("power_draw_mw")) {
      // Replaces the whole table: its keys define the allowed power set.
      const Reader pw = tb.child("power_draw_mw");
      pw.expect_object();
      cfg.tables.power_draw_mw.clear();
      for (const auto& [key, value] : pw.node().items()) {
        int dbm = 0;
        try {
          std::size_t used = 0;
          dbm = std::stoi(key, &used);
          if (used != key.size()) throw std::invalid_argument(key);
        } catch (const std::exception&) {
          throw ParseError(pw.path() + "." + key + ": key must be an integer dBm setting");
        }
        cfg.tables.power_draw_mw[dbm] = pw.child(key).number();
      }
    }
  }

  if (root.has("devices")) {
    const Reader devices = root.child("devices");
    devices.expect_array();
    for (std::size_t i = 0; i < devices.node().size(); ++i) {
      const Reader d = devices.at(i);
      d.expect_object();
      d.reject_unknown({"x", "y", "f", "p"});
      for (const char* key : {"x", "y", "f", "p"})
        if (!d.has(key)) d.fail(std::string("missing field \"") + key + "\"");
      cfg.ed_positions.push_back({d.child("x").number(), d.child("y").number()});
      cfg.ed_sf.push_back(d.child("f").integer());
      cfg.ed_power.push_back(d.child("p").integer());
    }
  }
  if (root.has("gateways")) {
    const Reader gateways = root.child("gateways");
    gateways.expect_array();
    for (std::size_t g = 0; g < gateways.node().size(); ++g) {
      const Reader gw = gateways.at(g);
      gw.expect_object();
      gw.reject_unknown({"x", "y"});
      for (const char* key : {"x", "y"})
        if (!gw.has(key)) gw.fail(std::string("missing field \"") + key + "\"");
      cfg.gw_positions.push_back({gw.child("x").number(), gw.child("y").number()});
    }
  }
  return cfg;
}

inline NetworkConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return parse_scenario(text);
  } catch (const ParseError& e) {
    throw ParseError(path + ": " + e.what());
  }
}

/// Writes every field explicitly, so the file is self-describing and
/// write(parse(write(cfg))) is byte-identical to write(cfg).
inline std::string write_scenario(const NetworkConfig& cfg) {
  using detail::ordered_json;
  ordered_json doc;
  doc["version"] = kScenarioVersion;

  ordered_json ch;
  ch["bandwidth_hz"] = cfg.channel.bandwidth_hz;
  ch["preamble_symbols"] = cfg.channel.preamble_symbols;
  ch["crc"] = cfg.channel.crc_enabled ? 1 : 0;
  ch["header_flag"] = cfg.channel.header_flag ? 1 : 0;
  ch["low_data_rate"] = detail::to_string(cfg.channel.low_data_rate);
  ch["payload_bytes"] = cfg.channel.payload_bytes;
  ch["coding_rate"] = cfg.channel.coding_rate;
  if (cfg.channel.noise_floor_dbm) ch["noise_floor_dbm"] = *cfg.channel.noise_floor_dbm;
  doc["channel"] = std::move(ch);

  doc["path_loss"] = {{"ref_path_loss_db", cfg.path_loss.ref_path_loss_db},
                      {"ref_distance_m", cfg.path_loss.ref_distance_m},
                      {"exponent", cfg.path_loss.exponent},
                      {"shadow_sigma_db", cfg.path_loss.shadow_sigma_db}};
  doc["traffic"] = {{"packet_rate_hz", cfg.packet_rate_hz}};

  ordered_json tables;
  ordered_json sens, snr, pw;
  for (int sf : kSpreadingFactors) {
    sens[std::to_string(sf)] = cfg.tables.sensitivity_dbm[sf_index(sf)];
    snr[std::to_string(sf)] = cfg.tables.min_snr_db[sf_index(sf)];
  }
  ordered_json sir = ordered_json::array();
  for (const auto& row : cfg.tables.sir_threshold_db) {
    ordered_json r = ordered_json::array();
    for (double w : row) r.push_back(w);
    sir.push_back(std::move(r));
  }
  for (const auto& [p, mw] : cfg.tables.power_draw_mw) pw[std::to_string(p)] = mw;
  tables["sensitivity_dbm"] = std::move(sens);
  tables["min_snr_db"] = std::move(snr);
  tables["sir_threshold_db"] = std::move(sir);
  tables["power_draw_mw"] = std::move(pw);
  doc["tables"] = std::move(tables);

  ordered_json devices = ordered_json::array();
  for (std::size_t i = 0; i < cfg.num_devices(); ++i)
    devices.push_back({{"x", cfg.ed_positions[i].x},
                       {"y", cfg.ed_positions[i].y},
                       {"f", i < cfg.ed_sf.size() ? cfg.ed_sf[i] : 0},
                       {"p", i < cfg.ed_power.size() ? cfg.ed_power[i] : 0}});
  doc["devices"] = std::move(devices);
  ordered_json gateways = ordered_json::array();
  for (const auto& gw : cfg.gw_positions) gateways.push_back({{"x", gw.x}, {"y", gw.y}});
  doc["gateways"] = std::move(gateways);

  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Result exports

/// CSV columns: id,sf,power_dbm,pdr,ee_bits_per_mj,pdr_gw0..pdr_gw{K-1}
inline void write_evaluation_csv(std::ostream& os, const NetworkConfig& cfg, const EvaluationResult& r) {
  os << "id,sf,power_dbm,pdr,ee_bits_per_mj";
  for (Eigen::Index g = 0; g < r.pdr_gw.cols(); ++g) os << ",pdr_gw" << g;
  os << '\n';
  for (Eigen::Index i = 0; i < r.pdr.size(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    os << i << ',' << cfg.ed_sf[idx] << ',' << cfg.ed_power[idx] << ',' << detail::probability(r.pdr(i))
       << ',' << detail::fixed(r.ee(i), 6);
    for (Eigen::Index g = 0; g < r.pdr_gw.cols(); ++g) os << ',' << detail::probability(r.pdr_gw(i, g));
    os << '\n';
  }
}

inline void write_evaluation_json(std::ostream& os, const NetworkConfig& cfg, const EvaluationResult& r) {
  detail::ordered_json doc;
  doc["n_ed"] = cfg.num_devices();
  doc["n_gw"] = cfg.num_gateways();
  doc["sf"] = cfg.ed_sf;
  doc["power_dbm"] = cfg.ed_power;
  doc["toa_s"] = detail::vector_json(r.toa);
  doc["rss_mean_dbm"] = detail::matrix_json(r.rss_mean);
  doc["psi"] = detail::matrix_json(r.psi);
  doc["zeta"] = detail::matrix_json(r.zeta);
  doc["pdr_gw"] = detail::matrix_json(r.pdr_gw);
  doc["pdr"] = detail::vector_json(r.pdr);
  doc["ee_bits_per_mj"] = detail::vector_json(r.ee);
  os << doc.dump(2) << '\n';
}

/// CSV columns: id,sf,power_dbm,rss_gw0..,snr_gw0..; a missed packet is an
/// empty cell.
inline void write_samples_csv(std::ostream& os, const NetworkConfig& cfg, const SampledMatrices& s) {
  os << "id,sf,power_dbm";
  for (Eigen::Index g = 0; g < s.rss.cols(); ++g) os << ",rss_gw" << g;
  for (Eigen::Index g = 0; g < s.snr.cols(); ++g) os << ",snr_gw" << g;
  os << '\n';
  for (Eigen::Index i = 0; i < s.rss.rows(); ++i) {
    const auto idx = static_cast<std::size_t>(i);
    os << i << ',' << cfg.ed_sf[idx] << ',' << cfg.ed_power[idx];
    for (Eigen::Index g = 0; g < s.rss.cols(); ++g) os << ',' << detail::decibels(s.rss(i, g));
    for (Eigen::Index g = 0; g < s.snr.cols(); ++g) os << ',' << detail::decibels(s.snr(i, g));
    os << '\n';
  }
}

inline void write_samples_json(std::ostream& os, const NetworkConfig& cfg, const SampledMatrices& s) {
  detail::ordered_json doc;
  doc["n_ed"] = cfg.num_devices();
  doc["n_gw"] = cfg.num_gateways();
  doc["rss_dbm"] = detail::matrix_json(s.rss);
  doc["snr_db"] = detail::matrix_json(s.snr);
  os << doc.dump(2) << '\n';
}

/// CSV columns: time_s,ed_id,event,f,p,max_snr_db
inline void write_trace_csv(std::ostream& os, const std::vector<TraceEvent>& trace) {
  os << "time_s,ed_id,event,f,p,max_snr_db\n";
  for (const auto& e : trace) {
    os << detail::fixed(e.time_s, 6) << ',' << e.ed << ',' << to_string(e.kind) << ',' << e.sf << ','
       << e.power_dbm << ',';
    if (e.max_snr_db) os << detail::fixed(*e.max_snr_db, 3);
    os << '\n';
  }
}

/// Side-by-side analytic vs. simulated metrics, then an error summary table.
inline void write_oracle_csv(std::ostream& os, const NetworkConfig& cfg, const EvaluationResult& analytic,
                             const OracleResult& oracle) {
  os << "id,sf,power_dbm,sent,received,pdr_analytic,pdr_oracle,ee_analytic,ee_oracle\n";
  for (std::size_t i = 0; i < cfg.num_devices(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    os << i << ',' << cfg.ed_sf[i] << ',' << cfg.ed_power[i] << ',' << oracle.sent[i] << ','
       << oracle.received[i] << ',' << detail::probability(analytic.pdr(ii)) << ','
       << detail::probability(oracle.pdr_emp(ii)) << ',' << detail::fixed(analytic.ee(ii), 6) << ','
       << detail::fixed(oracle.ee_emp(ii), 6) << '\n';
  }
  const auto pdr = mae_sde(analytic.pdr, oracle.pdr_emp);
  const auto ee = mae_sde(analytic.ee, oracle.ee_emp);
  os << "\nmetric,mae,sde\n";
  os << "pdr," << detail::fixed(pdr.mae, 6) << ',' << detail::fixed(pdr.sde, 6) << '\n';
  os << "ee," << detail::fixed(ee.mae, 6) << ',' << detail::fixed(ee.sde, 6) << '\n';
}

}  // namespace loraeval

#endif
