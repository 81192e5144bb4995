#include "chamberline/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/format.h>

#include "chamberline/rng.hpp"

namespace chamberline {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::string_view to_string(DoctorOutcome outcome) {
  switch (outcome) {
    case DoctorOutcome::Displayed: return "displayed";
    case DoctorOutcome::QueueEmpty: return "queue-empty";
    case DoctorOutcome::LinkError: return "link-error";
  }
  return "unknown";
}

std::string lcd_text(const LcdBuffer& lcd) {
  return fmt::format("|{}|{}|", lcd.rows[0], lcd.rows[1]);
}

}  // namespace

std::string format_log_entry(const LogEntry& e) {
  return fmt::format("{:>9} {:<6} {}", e.t_ms, e.source, e.text);
}

std::string format_log(const std::vector<LogEntry>& log) {
  std::string out;
  for (const auto& e : log) {
    out += format_log_entry(e);
    out += '\n';
  }
  return out;
}

Simulation::Simulation(const SimConfig& config)
    : config_(config),
      link_(config.link),
      queue_(config.capacity),
      booth_lcd_(render_lcd(booth_)) {}

void Simulation::log(std::string source, std::string text) {
  log_.push_back({now_ms_, std::move(source), std::move(text)});
}

std::uint64_t Simulation::next_seed() { return splitmix64(config_.seed ^ splitmix64(++captures_)); }

std::optional<std::uint64_t> Simulation::next_internal() const {
  std::optional<std::uint64_t> next = booth_next_deadline(booth_);
  if (pending_ && (!next || pending_->done_ms < *next)) next = pending_->done_ms;
  return next;
}

void Simulation::advance_to(std::uint64_t t_ms) {
  while (const auto next = next_internal()) {
    if (*next > t_ms) break;
    run_internal(*next);
  }
  now_ms_ = std::max(now_ms_, t_ms);
}

void Simulation::settle() {
  while (const auto next = next_internal()) run_internal(*next);
}

void Simulation::run_internal(std::uint64_t t_ms) {
  now_ms_ = std::max(now_ms_, t_ms);
  if (pending_ && pending_->done_ms <= now_ms_) {
    const PendingCapture done = *pending_;
    pending_.reset();
    if (done.kind == Capture::Temperature) {
      step_booth(TempMeasured{done.value, now_ms_});
    } else {
      step_booth(PulseMeasured{done.value, now_ms_});
    }
    return;
  }
  step_booth(Tick{now_ms_});
}

void Simulation::step_booth(const BoothEvent& event) {
  const BoothPhase before = booth_.phase;
  BoothStep step = booth_step(booth_, event, queue_);
  booth_ = std::move(step.state);
  if (step.lcd != booth_lcd_ || booth_.phase != before) {
    booth_lcd_ = step.lcd;
    log("booth", fmt::format("{:<15} {}", to_string(booth_.phase), lcd_text(booth_lcd_)));
  }

  switch (step.effect.kind) {
    case BoothEffectKind::None:
      break;
    case BoothEffectKind::StartTempMeasurement:
      start_capture(Capture::Temperature);
      break;
    case BoothEffectKind::StartPulseMeasurement:
      start_capture(Capture::Pulse);
      break;
    case BoothEffectKind::Enqueue: {
      ++registrations_;
      const auto& r = *step.effect.record;
      log("queue", fmt::format("enqueue serial={} name={} age={} temp={} bpm={} count={}",
                               r.serial, r.name_code, r.age, r.temp_deci_c, r.bpm,
                               queue_.size()));
      break;
    }
    case BoothEffectKind::QueueFull:
      ++registrations_;
      ++overflows_;
      log("queue", fmt::format("full, registration rejected count={}", queue_.size()));
      break;
  }
}

void Simulation::start_capture(Capture kind) {
  XorShift64Star rng(next_seed());
  PendingCapture capture{kind, now_ms_, 0};

  if (kind == Capture::Temperature) {
    const auto truth = static_cast<int>(std::llround(truth_.temp_c * 10.0));
    const int ideal = deci_celsius_to_adc(truth, config_.vref_mv);
    std::vector<AdcSample> window;
    window.reserve(kTempAveragingWindow);
    for (std::size_t i = 0; i < kTempAveragingWindow; ++i) {
      const int noisy = std::clamp(ideal + static_cast<int>(rng.between(-1, 1)), 0, kAdcMax);
      window.push_back({noisy, now_ms_ + i * kTempSampleSpacingMs});
    }
    capture.value = average_temperature(window, config_.vref_mv).value();
    capture.done_ms = now_ms_ + kTempWindowMs;
    const int err = std::abs(capture.value - truth);
    max_temp_err_ = std::max(max_temp_err_.value_or(0), err);
    log("sensor", fmt::format("temp capture deci_c={} truth={} done_at={}", capture.value, truth,
                              capture.done_ms));
  } else {
    std::vector<AdcSample> wave;
    if (truth_.finger_on) {
      wave = synth_ppg({truth_.bpm, kPulseWindowMs, config_.pulse_fs_hz, config_.pulse_noise,
                        rng.next()});
    } else {
      // No finger: the photodiode sees only the baseline.
      const auto n = kPulseWindowMs * static_cast<std::uint64_t>(config_.pulse_fs_hz) / 1000;
      for (std::uint64_t i = 0; i < n; ++i) {
        const double v = kPpgBaseline + rng.symmetric() * config_.pulse_noise *
                                            (kPpgPeak - kPpgBaseline);
        wave.push_back({static_cast<int>(std::lround(v)),
                        i * 1000 / static_cast<std::uint64_t>(config_.pulse_fs_hz)});
      }
    }
    for (auto& s : wave) s.t_ms += now_ms_;
    const auto bpm = estimate_bpm(wave);
    capture.value = bpm ? *bpm : 0;
    capture.done_ms = now_ms_ + kPulseWindowMs;
    if (truth_.finger_on) {
      max_bpm_err_ = std::max(max_bpm_err_.value_or(0), std::abs(capture.value - truth_.bpm));
    }
    log("sensor", fmt::format("pulse capture bpm={} truth={} finger={} done_at={}",
                              bpm ? std::to_string(*bpm) : std::string(to_string(bpm.error())),
                              truth_.bpm, truth_.finger_on ? "on" : "off", capture.done_ms));
  }
  pending_ = capture;
}

void Simulation::apply(const SimCommand& command) {
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cmd::Key>) {
          log("input", fmt::format("key {}", c.k));
          step_booth(KeyPress{c.k, now_ms_});
        } else if constexpr (std::is_same_v<T, cmd::PressNext>) {
          const DoctorStep step = press_next(doctor_, queue_, link_, config_.latency);
          const bool changed = step.state.display != doctor_.display;
          doctor_ = step.state;
          if (step.outcome == DoctorOutcome::Displayed) ++processed_;
          max_latency_ = std::max(max_latency_.value_or(0), step.latency_ms);
          log("doctor", fmt::format("press {} latency={}ms", to_string(step.outcome),
                                    step.latency_ms));
          if (changed) log("doctor", lcd_text(doctor_.display));
        } else if constexpr (std::is_same_v<T, cmd::PowerLoss>) {
          cleared_ += queue_.size();
          log("power", fmt::format("loss cleared={}", queue_.size()));
          queue_.power_loss();
          pending_.reset();
          booth_ = BoothState{};
          booth_.now_ms = now_ms_;
          booth_.phase_since_ms = now_ms_;
          booth_lcd_ = render_lcd(booth_);
          doctor_ = DoctorState{};
          log("booth", fmt::format("{:<15} {}", to_string(booth_.phase), lcd_text(booth_lcd_)));
          log("doctor", lcd_text(doctor_.display));
        } else if constexpr (std::is_same_v<T, cmd::SetTempC>) {
          truth_.temp_c = c.v;
          log("sensor", fmt::format("truth temp_c={}", c.v));
        } else if constexpr (std::is_same_v<T, cmd::SetBpm>) {
          truth_.bpm = c.v;
          log("sensor", fmt::format("truth bpm={}", c.v));
        } else if constexpr (std::is_same_v<T, cmd::Finger>) {
          truth_.finger_on = c.on;
          log("sensor", fmt::format("finger {}", c.on ? "on" : "off"));
        } else if constexpr (std::is_same_v<T, cmd::SetLink>) {
          link_ = c.link;
          const LinkStatus s = link_status(link_);
          log("link", fmt::format("f_osc={} baud={} u2x={} ubrr={} error={:+.2f}% usable={}",
                                  link_.f_osc_hz, link_.target_baud, link_.u2x ? 1 : 0, s.ubrr,
                                  s.error_pct, s.usable ? 1 : 0));
        }
      },
      command);
}

MetricsReport Simulation::report() const {
  MetricsReport r;
  r.max_abs_temp_error_deci_c = max_temp_err_;
  r.max_abs_bpm_error = max_bpm_err_;
  r.max_latency_ms = max_latency_;
  const LinkStatus s = link_status(link_);
  if (s.reachable) r.uart_error_pct = s.error_pct;
  r.patients_processed = processed_;
  r.queue_overflows = overflows_;
  r.registrations = registrations_;
  r.patients_cleared = cleared_;
  r.queued_at_end = queue_.size();
  r.link = link_;
  return r;
}

RunResult run(const Scenario& scenario, const SimConfig& config) {
  Simulation sim(config);
  for (const auto& event : scenario.events) {
    sim.advance_to(event.t_ms);
    sim.apply(event.command);
  }
  sim.settle();
  return {sim.report(), sim.log()};
}

}  // namespace chamberline
