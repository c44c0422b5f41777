#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uwmimo/config.hpp"
#include "uwmimo/scenarios.hpp"

namespace sc = uwmimo::scenario;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::vector<std::string> overrides;
};

sc::ScenarioConfig resolve(const Options& o) {
  sc::ScenarioConfig config = o.config_path.empty() ? sc::ScenarioConfig{} : sc::load_config(o.config_path);
  for (const auto& kv : o.overrides) sc::apply_override(config, kv);
  if (o.seed) config.seed = *o.seed;
  config.validate();
  return config;
}

void emit(const sc::CsvTable& table, const std::string& out) {
  if (out.empty() || out == "-") {
    table.write(std::cout);
  } else {
    table.save(out);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cooperative underwater MIMO simulator: synchronization, channel, SNR, throughput and modem BER"};
  app.require_subcommand(1);

  Options opts;
  bool dump_config = false;
  app.add_flag("--print-config", dump_config, "print the resolved configuration and exit");

  using Runner = std::function<sc::CsvTable(const sc::ScenarioConfig&)>;
  const std::vector<std::tuple<std::string, std::string, Runner>> commands{
      {"sync-error", "frequency and time synchronization error vs estimation error", sc::run_sync_error_sweep},
      {"snr-trace", "SNR vs time after synchronization for one deployment", sc::run_snr_trace},
      {"comm-time", "mean effective communication time vs node count", sc::run_comm_time_sweep},
      {"throughput", "mean throughput upper bound vs node count", sc::run_throughput_sweep},
      {"baseband-ber", "modem BER vs distance for beamforming and Alamouti", sc::run_baseband_ber},
  };

  std::vector<std::pair<CLI::App*, Runner>> subs;
  for (const auto& [name, help, run] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "key = value config file")->check(CLI::ExistingFile);
    sub->add_option("--seed", opts.seed, "RNG seed (overrides the config)");
    sub->add_option("--out", opts.out, "CSV output path; '-' or omitted writes to stdout");
    sub->add_option("--set", opts.overrides, "override a config key, key=value (repeatable)");
    subs.emplace_back(sub, run);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    const auto config = resolve(opts);
    if (dump_config) {
      std::cout << sc::render_config(config);
      return 0;
    }
    for (const auto& [sub, run] : subs) {
      if (sub->parsed()) emit(run(config), opts.out);
    }
  } catch (const std::exception& e) {
    std::cerr << "uwmimo: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
