#ifndef LORAEVAL_CLI_HPP
#define LORAEVAL_CLI_HPP

// Command implementations behind the `loraeval` executable. Each command
// writes to a file (or the supplied stream when no path is given) and returns
// a process exit code:
//   0 ok, 1 I/O or parse error, 2 validation error, 3 internal error.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "loraeval/adr.hpp"
#include "loraeval/analytics.hpp"
#include "loraeval/error.hpp"
#include "loraeval/io.hpp"
#include "loraeval/network.hpp"
#include "loraeval/oracle.hpp"
#include "loraeval/sampling.hpp"

namespace loraeval::cli {

enum ExitCode : int { kOk = 0, kIoError = 1, kValidationError = 2, kInternalError = 3 };

enum class Format { csv, json };

struct Streams {
  std::ostream& out = std::cout;
  std::ostream& err = std::cerr;
};

namespace detail {

class IoFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Runs `body` with the output stream: the file at `path`, or `fallback`.
inline void with_output(const std::string& path, std::ostream& fallback,
                        const std::function<void(std::ostream&)>& body) {
  if (path.empty() || path == "-") {
    body(fallback);
    return;
  }
  std::ostringstream buffer;
  body(buffer);
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoFailure("cannot open '" + path + "' for writing");
  file << buffer.str();
  if (!file) throw IoFailure("failed writing '" + path + "'");
}

inline int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const IoFailure& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const ValidationError& e) {
    err << "invalid scenario:\n";
    for (const auto& issue : e.issues()) err << "  " << issue.message << '\n';
    return kValidationError;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kValidationError;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

inline NetworkConfig load_valid(const std::string& path) {
  NetworkConfig cfg = load_scenario(path);
  require_valid(cfg);
  return cfg;
}

}  // namespace detail

struct EvaluateOptions {
  std::string scenario;
  Format format = Format::csv;
  std::string out;
};

inline int cmd_evaluate(const EvaluateOptions& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    const NetworkConfig cfg = detail::load_valid(opt.scenario);
    const EvaluationResult result = evaluate(cfg);
    detail::with_output(opt.out, io.out, [&](std::ostream& os) {
      if (opt.format == Format::csv)
        write_evaluation_csv(os, cfg, result);
      else
        write_evaluation_json(os, cfg, result);
    });
  });
}

struct SampleOptions {
  std::string scenario;
  std::uint64_t seed = 0;
  Format format = Format::csv;
  std::string out;
};

inline int cmd_sample(const SampleOptions& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    const NetworkConfig cfg = detail::load_valid(opt.scenario);
    const SampledMatrices samples = sample_matrix(NetworkModel(cfg), opt.seed);
    detail::with_output(opt.out, io.out, [&](std::ostream& os) {
      if (opt.format == Format::csv)
        write_samples_csv(os, cfg, samples);
      else
        write_samples_json(os, cfg, samples);
    });
  });
}

struct AdrSimOptions {
  std::string scenario;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  BackoffParams backoff;
  std::string out;        // trace CSV
  std::string final_out;  // final assignment, scenario format
};

inline int cmd_adr_sim(const AdrSimOptions& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    const NetworkConfig cfg = detail::load_valid(opt.scenario);
    const AdrSimulationResult sim = run_adr_simulation(cfg, opt.duration_s, opt.seed, opt.backoff);
    detail::with_output(opt.out, io.out, [&](std::ostream& os) { write_trace_csv(os, sim.trace); });
    if (!opt.final_out.empty())
      detail::with_output(opt.final_out, io.out,
                          [&](std::ostream& os) { os << write_scenario(sim.final_config); });
  });
}

struct OracleOptionsCli {
  std::string scenario;
  double duration_s = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline int cmd_oracle(const OracleOptionsCli& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    const NetworkConfig cfg = detail::load_valid(opt.scenario);
    const EvaluationResult analytic = evaluate(cfg);
    const OracleResult oracle = run_oracle(cfg, opt.duration_s, opt.seed);
    detail::with_output(opt.out, io.out,
                        [&](std::ostream& os) { write_oracle_csv(os, cfg, analytic, oracle); });
  });
}

struct GenerateOptions {
  std::size_t n_ed = 10;
  std::size_t n_gw = 1;
  double area_m = 1000.0;
  std::uint64_t seed = 0;
  std::string out;
};

inline int cmd_generate(const GenerateOptions& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    const NetworkConfig cfg = generate_scenario(opt.n_ed, opt.n_gw, opt.area_m, opt.seed);
    require_valid(cfg);
    detail::with_output(opt.out, io.out, [&](std::ostream& os) { os << write_scenario(cfg); });
  });
}

struct BenchOptions {
  std::vector<std::size_t> n_ed{10, 50, 100, 200, 500};
  std::vector<std::size_t> n_gw{1, 5};
  int reps = 20;
  double area_m = 1000.0;
  std::uint64_t seed = 0;
  std::string out;
};

struct BenchCell {
  std::size_t n_ed = 0;
  std::size_t n_gw = 0;
  int reps = 0;
  double mean_ms = 0.0;
  double min_ms = 0.0;
  double max_ms = 0.0;
};

/// Wall time of a full `evaluate` (model construction included) on a
/// generated scenario, after one warm-up call.
inline BenchCell bench_cell(std::size_t n_ed, std::size_t n_gw, int reps, double area_m, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("bench: reps must be >= 1");
  const NetworkConfig cfg = generate_scenario(n_ed, n_gw, area_m, seed);
  volatile double sink = evaluate(cfg).pdr.sum();
  BenchCell cell{n_ed, n_gw, reps, 0.0, 0.0, 0.0};
  double total = 0.0;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    const EvaluationResult result = evaluate(cfg);
    const auto t1 = std::chrono::steady_clock::now();
    sink = sink + result.pdr(0);
    const double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    total += ms;
    cell.min_ms = r == 0 ? ms : std::min(cell.min_ms, ms);
    cell.max_ms = std::max(cell.max_ms, ms);
  }
  cell.mean_ms = total / reps;
  return cell;
}

inline int cmd_bench(const BenchOptions& opt, Streams io = {}) {
  return detail::guarded(io.err, [&] {
    std::vector<BenchCell> cells;
    for (std::size_t n : opt.n_ed)
      for (std::size_t k : opt.n_gw) cells.push_back(bench_cell(n, k, opt.reps, opt.area_m, opt.seed));
    detail::with_output(opt.out, io.out, [&](std::ostream& os) {
      os << "n_ed,n_gw,reps,mean_ms,min_ms,max_ms\n";
      for (const auto& c : cells)
        os << c.n_ed << ',' << c.n_gw << ',' << c.reps << ',' << loraeval::detail::fixed(c.mean_ms, 3)
           << ',' << loraeval::detail::fixed(c.min_ms, 3) << ',' << loraeval::detail::fixed(c.max_ms, 3)
           << '\n';
    });
  });
}

}  // namespace loraeval::cli

#endif
