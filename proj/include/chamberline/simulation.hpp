#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chamberline/booth_fsm.hpp"
#include "chamberline/commands.hpp"
#include "chamberline/doctor_fsm.hpp"
#include "chamberline/patient_queue.hpp"
#include "chamberline/scenario.hpp"
#include "chamberline/uart_link.hpp"
#include "chamberline/vitals.hpp"

namespace chamberline {

inline constexpr std::uint64_t kTempSampleSpacingMs = 10;
inline constexpr std::uint64_t kTempWindowMs = kTempSampleSpacingMs * kTempAveragingWindow;
inline constexpr std::uint64_t kPulseWindowMs = 10'000;

struct SimConfig {
  UartConfig link;
  int vref_mv = kDefaultVrefMv;
  std::size_t capacity = kDefaultQueueCapacity;
  std::uint64_t seed = 1;
  LatencyModel latency;
  int pulse_fs_hz = 100;
  double pulse_noise = 0.05;
};

/// What the emulated patient's body presents to the sensors.
struct SensorTruth {
  double temp_c = 36.6;
  int bpm = 72;
  bool finger_on = true;

  bool operator==(const SensorTruth&) const = default;
};

struct LogEntry {
  std::uint64_t t_ms = 0;
  std::string source;
  std::string text;

  bool operator==(const LogEntry&) const = default;
};

[[nodiscard]] std::string format_log_entry(const LogEntry& entry);
[[nodiscard]] std::string format_log(const std::vector<LogEntry>& log);

struct MetricsReport {
  std::optional<int> max_abs_temp_error_deci_c;
  std::optional<int> max_abs_bpm_error;
  std::optional<std::uint64_t> max_latency_ms;
  std::optional<double> uart_error_pct;  // empty when the baud is unreachable
  std::uint64_t patients_processed = 0;
  std::uint64_t queue_overflows = 0;
  // Bookkeeping for the conservation check:
  // processed + still queued + overflows + cleared == registrations.
  std::uint64_t registrations = 0;
  std::uint64_t patients_cleared = 0;
  std::uint64_t queued_at_end = 0;
  UartConfig link;

  bool operator==(const MetricsReport&) const = default;
};

/// Booth, doctor, queue and link on one virtual clock.
///
/// External commands are applied at now(); advance_to() runs the internal
/// work that falls due on the way (sensor captures finishing, booth
/// timeouts) in timestamp order.
class Simulation {
 public:
  explicit Simulation(const SimConfig& config = {});

  void advance_to(std::uint64_t t_ms);
  void apply(const SimCommand& command);
  /// Runs internal work until nothing more is scheduled.
  void settle();

  [[nodiscard]] std::uint64_t now() const noexcept { return now_ms_; }
  [[nodiscard]] const BoothState& booth() const noexcept { return booth_; }
  [[nodiscard]] const LcdBuffer& booth_lcd() const noexcept { return booth_lcd_; }
  [[nodiscard]] const DoctorState& doctor() const noexcept { return doctor_; }
  [[nodiscard]] const PatientQueue& queue() const noexcept { return queue_; }
  [[nodiscard]] const UartConfig& link() const noexcept { return link_; }
  [[nodiscard]] const SensorTruth& truth() const noexcept { return truth_; }
  [[nodiscard]] const std::vector<LogEntry>& log() const noexcept { return log_; }
  [[nodiscard]] MetricsReport report() const;

 private:
  enum class Capture { Temperature, Pulse };
  struct PendingCapture {
    Capture kind = Capture::Temperature;
    std::uint64_t done_ms = 0;
    int value = 0;
  };

  std::optional<std::uint64_t> next_internal() const;
  void run_internal(std::uint64_t t_ms);
  void step_booth(const BoothEvent& event);
  void start_capture(Capture kind);
  std::uint64_t next_seed();
  void log(std::string source, std::string text);

  SimConfig config_;
  UartConfig link_;
  PatientQueue queue_;
  BoothState booth_;
  LcdBuffer booth_lcd_;
  DoctorState doctor_;
  SensorTruth truth_;
  std::optional<PendingCapture> pending_;
  std::uint64_t now_ms_ = 0;
  std::uint64_t captures_ = 0;
  std::vector<LogEntry> log_;

  std::optional<int> max_temp_err_;
  std::optional<int> max_bpm_err_;
  std::optional<std::uint64_t> max_latency_;
  std::uint64_t processed_ = 0;
  std::uint64_t overflows_ = 0;
  std::uint64_t registrations_ = 0;
  std::uint64_t cleared_ = 0;
};

struct RunResult {
  MetricsReport report;
  std::vector<LogEntry> log;
};

/// Plays a scenario start to finish, then lets pending work settle.
[[nodiscard]] RunResult run(const Scenario& scenario, const SimConfig& config = {});

/// Fixed-width table with one row per headline metric.
[[nodiscard]] std::string report_table(const MetricsReport& report);
[[nodiscard]] std::string report_json(const MetricsReport& report);

/// Human-readable list of bounds the report breaks; empty when all hold.
[[nodiscard]] std::vector<std::string> check_bounds(const MetricsReport& report);

inline constexpr int kTempToleranceDeciC = 10;
inline constexpr int kBpmTolerance = 3;
inline constexpr std::uint64_t kLatencyBoundMs = 1200;

}  // namespace chamberline
