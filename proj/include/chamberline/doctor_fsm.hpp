#pragma once

#include <cstdint>
#include <optional>

#include "chamberline/lcd.hpp"
#include "chamberline/patient_queue.hpp"
#include "chamberline/uart_link.hpp"

namespace chamberline {

/// Machine-side terms of the button-to-display delay. Transmit time comes
/// from the link itself.
struct LatencyModel {
  double debounce_ms = 20.0;
  double lcd_ms_per_char = 2.0;

  [[nodiscard]] double lcd_update_ms() const { return lcd_ms_per_char * kLcdCols * kLcdRows; }
};

struct DoctorState {
  LcdBuffer display = LcdBuffer::of("Doctor Ready", "Press Next");
  std::optional<PatientRecord> current;
  std::optional<std::uint64_t> last_latency_ms;
  std::optional<Frame> last_frame;

  bool operator==(const DoctorState&) const = default;
};

enum class DoctorOutcome {
  Displayed,
  QueueEmpty,
  LinkError,
};

struct DoctorStep {
  DoctorState state;
  DoctorOutcome outcome = DoctorOutcome::Displayed;
  std::uint64_t latency_ms = 0;
};

/// Two-row summary: "S<serial> A<age> T<temp>" / "P<bpm> <name>".
[[nodiscard]] LcdBuffer render_patient(const PatientRecord& record);

/// Handles one press of the Next button.
///
/// The request crosses the booth/doctor link, so an unusable link shows
/// "LINK ERROR" and leaves the queue alone. Otherwise the head record is
/// dequeued, framed, sent, decoded on the doctor side and displayed.
[[nodiscard]] DoctorStep press_next(const DoctorState& state, PatientQueue& queue,
                                    const UartConfig& link, const LatencyModel& latency = {});

}  // namespace chamberline
