#include "chamberline/doctor_fsm.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

namespace chamberline {

namespace {

std::uint64_t to_ms(double ms) { return static_cast<std::uint64_t>(std::llround(ms)); }

}  // namespace

LcdBuffer render_patient(const PatientRecord& r) {
  const std::string temp =
      r.temp_deci_c != 0 ? fmt::format("{}.{}", r.temp_deci_c / 10, r.temp_deci_c % 10) : "--";
  const std::string bpm = r.bpm != 0 ? std::to_string(r.bpm) : "--";
  return LcdBuffer::of(fmt::format("S{} A{} T{}", r.serial, r.age, temp),
                       fmt::format("P{} {}", bpm, r.name_code));
}

DoctorStep press_next(const DoctorState& state, PatientQueue& queue, const UartConfig& link,
                      const LatencyModel& latency) {
  DoctorStep step{state, DoctorOutcome::Displayed, 0};
  DoctorState& s = step.state;
  const double local_ms = latency.debounce_ms + latency.lcd_update_ms();

  const LinkStatus status = link_status(link);
  if (!status.usable) {
    s.display = LcdBuffer::of("LINK ERROR", status.reachable
                                                ? fmt::format("Baud err {:+.2f}%", status.error_pct)
                                                : std::string("Baud unreachable"));
    s.current.reset();
    step.outcome = DoctorOutcome::LinkError;
    step.latency_ms = to_ms(local_ms);
    s.last_latency_ms = step.latency_ms;
    return step;
  }

  auto head = queue.dequeue();
  if (!head) {
    s.display = LcdBuffer::of("No Patients", "");
    s.current.reset();
    step.outcome = DoctorOutcome::QueueEmpty;
    step.latency_ms = to_ms(local_ms);
    s.last_latency_ms = step.latency_ms;
    return step;
  }

  // Usable links always deliver; decode what actually went over the wire.
  const auto delivered = channel_transmit(encode_frame(*head), link);
  const auto received = decode_frame(delivered->frame);
  s.current = *received;
  s.display = render_patient(*received);
  s.last_frame = delivered->frame;
  step.latency_ms = to_ms(local_ms + delivered->tx_time_ms);
  s.last_latency_ms = step.latency_ms;
  return step;
}

}  // namespace chamberline
