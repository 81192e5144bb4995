// Command-line front end: batch scenario runs, UART calculator, PPG test
// signal generator and the live gateway.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "chamberline/gateway.hpp"
#include "chamberline/scenario.hpp"
#include "chamberline/simulation.hpp"
#include "chamberline/uart_link.hpp"
#include "chamberline/vitals.hpp"

namespace {

using namespace chamberline;

constexpr int kExitParseError = 1;
constexpr int kExitAssertion = 2;

GatewayServer* g_server = nullptr;

void on_signal(int) {
  if (g_server != nullptr) g_server->stop();
}

void add_sim_options(CLI::App& app, SimConfig& config) {
  app.add_option("--fosc", config.link.f_osc_hz, "Oscillator frequency in Hz")
      ->check(CLI::PositiveNumber);
  app.add_option("--baud", config.link.target_baud, "Target baud rate")
      ->check(CLI::PositiveNumber);
  app.add_flag("--u2x", config.link.u2x, "Use the double-speed UART divisor");
  app.add_option("--vref", config.vref_mv, "ADC reference in millivolts")
      ->check(CLI::PositiveNumber);
  app.add_option("--capacity", config.capacity, "Patient queue capacity")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", config.seed, "Sensor noise seed");
}

int cmd_run(const std::string& path, const SimConfig& config, bool json, bool assert_bounds,
            const std::string& log_path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << fmt::format("{}: cannot open\n", path);
    return kExitParseError;
  }
  std::stringstream text;
  text << in.rdbuf();

  const auto scenario = load_scenario(text.str());
  if (!scenario) {
    std::cerr << fmt::format("{}:{}: {}\n", path, scenario.error().line, scenario.error().reason);
    return kExitParseError;
  }

  const RunResult result = run(*scenario, config);
  if (log_path == "-") {
    std::cout << format_log(result.log);
  } else if (!log_path.empty()) {
    std::ofstream(log_path) << format_log(result.log);
  }
  std::cout << (json ? report_json(result.report) + "\n" : report_table(result.report));

  if (assert_bounds) {
    const auto violations = check_bounds(result.report);
    for (const auto& v : violations) std::cerr << "violation: " << v << '\n';
    if (!violations.empty()) return kExitAssertion;
  }
  return 0;
}

int cmd_uart_calc(const std::vector<std::uint32_t>& foscs, const std::vector<std::uint32_t>& bauds,
                  bool u2x) {
  std::cout << fmt::format("{:>10} {:>7} {:>3} {:>5} {:>10} {:>9} {:>6}\n", "f_osc", "baud",
                           "u2x", "ubrr", "actual", "error%", "usable");
  for (const auto f : foscs) {
    for (const auto b : bauds) {
      const LinkStatus s = link_status({f, b, u2x});
      if (!s.reachable) {
        std::cout << fmt::format("{:>10} {:>7} {:>3} {:>5} {:>10} {:>9} {:>6}\n", f, b,
                                 u2x ? 1 : 0, "-", "-", "-", "no");
        continue;
      }
      std::cout << fmt::format("{:>10} {:>7} {:>3} {:>5} {:>10.2f} {:>+8.2f}% {:>6}\n", f, b,
                               u2x ? 1 : 0, s.ubrr, s.actual_baud, s.error_pct,
                               s.usable ? "yes" : "no");
    }
  }
  return 0;
}

int cmd_synth_ppg(const PpgParams& params) {
  std::cout << "t_ms,value\n";
  for (const auto& s : synth_ppg(params)) std::cout << s.t_ms << ',' << s.value << '\n';
  return 0;
}

int cmd_serve(const SimConfig& config, std::uint16_t port, bool paused) {
  GatewayServer server(config, gateway_port_from_env(port), paused);
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << fmt::format("chamberline gateway listening on port {}\n", server.port());
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Patient queue and vitals kiosk simulator"};
  app.require_subcommand(1);

  SimConfig run_config;
  std::string scenario_path;
  std::string log_path;
  bool json = false;
  bool assert_bounds = false;
  auto* run_cmd = app.add_subcommand("run", "Play a scenario file and report metrics");
  run_cmd->add_option("file", scenario_path, "Scenario file")->required();
  add_sim_options(*run_cmd, run_config);
  run_cmd->add_flag("--json", json, "Print the report as one JSON line");
  run_cmd->add_flag("--assert", assert_bounds, "Exit 2 when a performance bound is violated");
  run_cmd->add_option("--log", log_path, "Write the event log to a file ('-' for stdout)");

  std::vector<std::uint32_t> foscs;
  std::vector<std::uint32_t> bauds;
  bool calc_u2x = false;
  auto* uart_cmd = app.add_subcommand("uart-calc", "UBRR, actual baud and error table");
  uart_cmd->add_option("--fosc", foscs, "Oscillator frequency in Hz (repeatable)")
      ->required()
      ->check(CLI::PositiveNumber);
  uart_cmd->add_option("--baud", bauds, "Target baud rate (repeatable)")
      ->required()
      ->check(CLI::PositiveNumber);
  uart_cmd->add_flag("--u2x", calc_u2x, "Double-speed mode");

  PpgParams ppg;
  auto* ppg_cmd = app.add_subcommand("synth-ppg", "Emit a synthetic pulse waveform as CSV");
  ppg_cmd->add_option("--bpm", ppg.bpm, "Heart rate")->check(CLI::Range(20, 250));
  ppg_cmd->add_option("--duration", ppg.duration_ms, "Duration in ms");
  ppg_cmd->add_option("--fs", ppg.fs_hz, "Sample rate in Hz")->check(CLI::Range(50, 1000));
  ppg_cmd->add_option("--noise", ppg.noise_amp, "Noise as a fraction of pulse amplitude")
      ->check(CLI::Range(0.0, 1.0));
  ppg_cmd->add_option("--seed", ppg.seed, "Noise seed");

  SimConfig serve_config;
  std::uint16_t port = kDefaultGatewayPort;
  bool start_paused = false;
  auto* serve_cmd = app.add_subcommand("serve", "Run the live gateway (CHAMBERLINE_PORT overrides --port)");
  serve_cmd->add_option("--port", port, "TCP port");
  add_sim_options(*serve_cmd, serve_config);
  serve_cmd->add_flag("--paused", start_paused, "Start with the virtual clock paused");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return cmd_run(scenario_path, run_config, json, assert_bounds, log_path);
    if (*uart_cmd) return cmd_uart_calc(foscs, bauds, calc_u2x);
    if (*ppg_cmd) return cmd_synth_ppg(ppg);
    if (*serve_cmd) return cmd_serve(serve_config, port, start_paused);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
