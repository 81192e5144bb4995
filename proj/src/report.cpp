#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "chamberline/simulation.hpp"

namespace chamberline {

namespace {

std::string mhz(std::uint32_t hz) { return fmt::format("{:g} MHz", hz / 1e6); }

}  // namespace

std::string report_table(const MetricsReport& r) {
  const std::string temp = r.max_abs_temp_error_deci_c
                               ? fmt::format("+/-{:.1f} C (max abs error)",
                                             *r.max_abs_temp_error_deci_c / 10.0)
                               : "n/a";
  const std::string pulse =
      r.max_abs_bpm_error ? fmt::format("+/-{} BPM (max abs error)", *r.max_abs_bpm_error) : "n/a";
  const std::string latency =
      r.max_latency_ms ? fmt::format("{} ms (max)", *r.max_latency_ms) : "n/a";
  const std::string where = fmt::format("at {} bps ({}{})", r.link.target_baud,
                                        mhz(r.link.f_osc_hz), r.link.u2x ? ", U2X" : "");
  const std::string uart = r.uart_error_pct ? fmt::format("{:+.2f}% {}", *r.uart_error_pct, where)
                                            : fmt::format("unreachable {}", where);

  std::string out = "System Performance Summary\n";
  out += fmt::format("{:<27}{}\n", "Metric", "Observation");
  out += fmt::format("{:<27}{}\n", std::string(25, '-'), std::string(32, '-'));
  out += fmt::format("{:<27}{}\n", "Temperature accuracy", temp);
  out += fmt::format("{:<27}{}\n", "Pulse accuracy", pulse);
  out += fmt::format("{:<27}{}\n", "Button-to-display latency", latency);
  out += fmt::format("{:<27}{}\n", "UART error", uart);
  out += fmt::format("{:<27}{}\n", "Operation mode", "Offline, stand-alone");
  return out;
}

std::string report_json(const MetricsReport& r) {
  const auto opt = [](const auto& v) -> nlohmann::json {
    if (v) return *v;
    return nullptr;
  };
  nlohmann::ordered_json j;
  j["max_abs_temp_error_deci_c"] = opt(r.max_abs_temp_error_deci_c);
  j["max_abs_bpm_error"] = opt(r.max_abs_bpm_error);
  j["max_latency_ms"] = opt(r.max_latency_ms);
  j["uart_error_pct"] = opt(r.uart_error_pct);
  j["patients_processed"] = r.patients_processed;
  j["queue_overflows"] = r.queue_overflows;
  j["registrations"] = r.registrations;
  j["patients_cleared"] = r.patients_cleared;
  j["queued_at_end"] = r.queued_at_end;
  return j.dump();
}

std::vector<std::string> check_bounds(const MetricsReport& r) {
  std::vector<std::string> out;
  if (r.max_abs_temp_error_deci_c && *r.max_abs_temp_error_deci_c > kTempToleranceDeciC) {
    out.push_back(fmt::format("temperature error {:.1f} C exceeds 1.0 C",
                              *r.max_abs_temp_error_deci_c / 10.0));
  }
  if (r.max_abs_bpm_error && *r.max_abs_bpm_error > kBpmTolerance) {
    out.push_back(fmt::format("pulse error {} BPM exceeds {} BPM", *r.max_abs_bpm_error,
                              kBpmTolerance));
  }
  if (r.max_latency_ms && *r.max_latency_ms >= kLatencyBoundMs) {
    out.push_back(fmt::format("latency {} ms is not below {} ms", *r.max_latency_ms,
                              kLatencyBoundMs));
  }
  if (!r.uart_error_pct || std::abs(*r.uart_error_pct) > kLinkErrorLimitPct) {
    out.push_back("UART link outside the 2% usability window");
  }
  return out;
}

}  // namespace chamberline
