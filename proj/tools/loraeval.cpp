// loraeval: analytic LoRaWAN network evaluation from the command line.

#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "loraeval/cli.hpp"

namespace {

using loraeval::cli::Format;

const std::map<std::string, Format> kFormats{{"csv", Format::csv}, {"json", Format::json}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Analytic LoRaWAN network evaluation: PDR, energy efficiency, ADR and Monte-Carlo validation"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Random seed (required by stochastic commands)");

  std::string scenario, out;
  Format format = Format::csv;
  double duration = 0.0;

  auto* evaluate = app.add_subcommand("evaluate", "Closed-form PDR/EE for every device");
  evaluate->add_option("--scenario", scenario, "Scenario file")->required();
  evaluate->add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(kFormats));
  evaluate->add_option("--out", out, "Output path (stdout if omitted)");

  auto* sample = app.add_subcommand("sample", "One sampled RSS/SNR matrix");
  sample->add_option("--scenario", scenario, "Scenario file")->required();
  sample->add_option("--format", format, "Output format")->transform(CLI::CheckedTransformer(kFormats));
  sample->add_option("--out", out, "Output path (stdout if omitted)");

  loraeval::BackoffParams backoff;
  std::string final_out;
  auto* adr = app.add_subcommand("adr-sim", "Run ADR and backoff over sampled uplinks");
  adr->add_option("--scenario", scenario, "Scenario file")->required();
  adr->add_option("--duration", duration, "Simulated time in seconds")->required();
  adr->add_option("--limit", backoff.limit, "ADR_ACK_LIMIT")->capture_default_str();
  adr->add_option("--delay", backoff.delay, "ADR_ACK_DELAY")->capture_default_str();
  adr->add_option("--out", out, "Trace CSV path (stdout if omitted)");
  adr->add_option("--final", final_out, "Write final (SF, power) assignment as a scenario file");

  auto* oracle = app.add_subcommand("oracle", "Packet-level simulation side by side with the analytic model");
  oracle->add_option("--scenario", scenario, "Scenario file")->required();
  oracle->add_option("--duration", duration, "Simulated time in seconds")->required();
  oracle->add_option("--out", out, "Output path (stdout if omitted)");

  loraeval::cli::GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Write a random scenario file");
  generate->add_option("--n-ed", gen.n_ed, "Number of end devices")->capture_default_str();
  generate->add_option("--n-gw", gen.n_gw, "Number of gateways")->capture_default_str();
  generate->add_option("--area", gen.area_m, "Side of the square area in meters")->capture_default_str();
  generate->add_option("--out", out, "Output path (stdout if omitted)");

  loraeval::cli::BenchOptions bench;
  auto* bench_cmd = app.add_subcommand("bench", "Time evaluate over generated scenarios");
  bench_cmd->add_option("--n-ed", bench.n_ed, "Device counts (comma separated)")->delimiter(',');
  bench_cmd->add_option("--n-gw", bench.n_gw, "Gateway counts (comma separated)")->delimiter(',');
  bench_cmd->add_option("--reps", bench.reps, "Repetitions per cell")->capture_default_str();
  bench_cmd->add_option("--area", bench.area_m, "Side of the square area in meters");
  bench_cmd->add_option("--out", out, "Output path (stdout if omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return loraeval::cli::kIoError;
  }

  auto need_seed = [&](const char* command) {
    if (seed_opt->count() == 0) {
      std::cerr << "error: " << command << " requires --seed\n";
      return false;
    }
    return true;
  };

  if (*evaluate) return loraeval::cli::cmd_evaluate({scenario, format, out});
  if (*sample) {
    if (!need_seed("sample")) return loraeval::cli::kIoError;
    return loraeval::cli::cmd_sample({scenario, seed, format, out});
  }
  if (*adr) {
    if (!need_seed("adr-sim")) return loraeval::cli::kIoError;
    return loraeval::cli::cmd_adr_sim({scenario, duration, seed, backoff, out, final_out});
  }
  if (*oracle) {
    if (!need_seed("oracle")) return loraeval::cli::kIoError;
    return loraeval::cli::cmd_oracle({scenario, duration, seed, out});
  }
  if (*generate) {
    if (!need_seed("generate")) return loraeval::cli::kIoError;
    gen.seed = seed;
    gen.out = out;
    return loraeval::cli::cmd_generate(gen);
  }
  if (*bench_cmd) {
    bench.seed = seed;
    bench.out = out;
    return loraeval::cli::cmd_bench(bench);
  }
  return loraeval::cli::kInternalError;
}
