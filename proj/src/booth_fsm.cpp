#include "chamberline/booth_fsm.hpp"

#include <algorithm>
#include <charconv>

#include <fmt/format.h>

namespace chamberline {

bool is_keypad_key(char key) noexcept { return kKeypadKeys.find(key) != std::string_view::npos; }

std::string_view multitap_cycle(char key) noexcept {
  switch (key) {
    case '0': return " 0";
    case '1': return "1";
    case '2': return "ABC2";
    case '3': return "DEF3";
    case '4': return "GHI4";
    case '5': return "JKL5";
    case '6': return "MNO6";
    case '7': return "PQRS7";
    case '8': return "TUV8";
    case '9': return "WXYZ9";
    default: return "";
  }
}

char MultitapContext::candidate() const noexcept {
  const auto cycle = multitap_cycle(key);
  if (cycle.empty() || presses <= 0) return 0;
  return cycle[static_cast<std::size_t>(presses - 1) % cycle.size()];
}

MultitapResult multitap_flush(MultitapContext ctx) {
  if (!ctx.pending()) return {ctx, std::nullopt};
  return {MultitapContext{}, ctx.candidate()};
}

MultitapResult multitap_expire(MultitapContext ctx, std::uint64_t t_ms) {
  if (ctx.pending() && t_ms > ctx.deadline_ms) return multitap_flush(ctx);
  return {ctx, std::nullopt};
}

MultitapResult multitap_decode(MultitapContext ctx, char key, std::uint64_t t_ms) {
  if (multitap_cycle(key).empty()) return {ctx, std::nullopt};
  if (ctx.pending() && ctx.key == key && t_ms <= ctx.deadline_ms) {
    ++ctx.presses;
    ctx.deadline_ms = t_ms + kMultitapTimeoutMs;
    return {ctx, std::nullopt};
  }
  auto committed = multitap_flush(ctx);
  committed.context = MultitapContext{key, 1, t_ms + kMultitapTimeoutMs};
  return committed;
}

std::string_view to_string(BoothPhase phase) {
  switch (phase) {
    case BoothPhase::Idle: return "Idle";
    case BoothPhase::EnterName: return "EnterName";
    case BoothPhase::EnterAge: return "EnterAge";
    case BoothPhase::EnterMobile: return "EnterMobile";
    case BoothPhase::MeasureTemp: return "MeasureTemp";
    case BoothPhase::MeasurePulse: return "MeasurePulse";
    case BoothPhase::ShowSerial: return "ShowSerial";
    case BoothPhase::QueueFullNotice: return "QueueFullNotice";
  }
  return "Unknown";
}

namespace {

bool is_entry_phase(BoothPhase p) {
  return p == BoothPhase::EnterName || p == BoothPhase::EnterAge || p == BoothPhase::EnterMobile;
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

void enter(BoothState& s, BoothPhase phase) {
  s.phase = phase;
  s.phase_since_ms = s.now_ms;
  s.error_until_ms.reset();
  s.multitap = {};
}

void reset_to_idle(BoothState& s) {
  const auto now = s.now_ms;
  s = BoothState{};
  s.now_ms = now;
  s.phase_since_ms = now;
}

void append_name_char(BoothState& s, std::optional<char> c) {
  // Name codes are [A-Z0-9]; the space on key 0 is never stored.
  if (c && *c != ' ' && s.name.size() < kMaxNameLength) s.name.push_back(*c);
}

void reject(BoothState& s) { s.error_until_ms = s.now_ms + kErrorDwellMs; }

std::optional<int> parse_age(const std::string& digits) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) return std::nullopt;
  if (value < kMinAge || value > kMaxAge) return std::nullopt;
  return value;
}

BoothEffect on_name_key(BoothState& s, char key) {
  if (is_digit(key)) {
    auto r = multitap_decode(s.multitap, key, s.now_ms);
    append_name_char(s, r.emitted);
    s.multitap = s.name.size() < kMaxNameLength ? r.context : MultitapContext{};
  } else if (key == '#') {
    auto r = multitap_flush(s.multitap);
    s.multitap = r.context;
    append_name_char(s, r.emitted);
    if (s.name.empty()) {
      reject(s);
    } else {
      enter(s, BoothPhase::EnterAge);
    }
  } else if (key == 'D') {
    if (s.multitap.pending()) {
      s.multitap = {};
    } else if (!s.name.empty()) {
      s.name.pop_back();
    }
  }
  return {};
}

BoothEffect on_digits_key(BoothState& s, char key, std::string& buffer, std::size_t max_len) {
  if (is_digit(key)) {
    if (buffer.size() < max_len) buffer.push_back(key);
  } else if (key == 'D') {
    if (!buffer.empty()) buffer.pop_back();
  } else if (key == '#') {
    if (s.phase == BoothPhase::EnterAge) {
      if (parse_age(buffer)) {
        enter(s, BoothPhase::EnterMobile);
      } else {
        reject(s);
      }
    } else if (valid_mobile(buffer)) {
      enter(s, BoothPhase::MeasureTemp);
      return {BoothEffectKind::StartTempMeasurement, std::nullopt};
    } else {
      reject(s);
    }
  }
  return {};
}

BoothEffect on_key(BoothState& s, char key) {
  if (!is_keypad_key(key)) return {};
  if (s.phase == BoothPhase::Idle) {
    if (key == '*') enter(s, BoothPhase::EnterName);
    return {};
  }
  if (!is_entry_phase(s.phase)) return {};

  s.error_until_ms.reset();
  if (key == 'C') {
    reset_to_idle(s);
    return {};
  }
  switch (s.phase) {
    case BoothPhase::EnterName: return on_name_key(s, key);
    case BoothPhase::EnterAge: return on_digits_key(s, key, s.age, kMaxAgeDigits);
    case BoothPhase::EnterMobile: return on_digits_key(s, key, s.mobile, kMobileLength);
    default: return {};
  }
}

BoothEffect on_pulse(BoothState& s, int bpm, PatientQueue& queue) {
  s.bpm = std::clamp(bpm, 0, kMaxBpm);
  const Registration data{s.name, parse_age(s.age).value_or(0), s.mobile, s.temp_deci_c, s.bpm};
  auto serial = queue.enqueue(data);
  if (!serial) {
    enter(s, BoothPhase::QueueFullNotice);
    return {BoothEffectKind::QueueFull, std::nullopt};
  }
  s.serial = *serial;
  enter(s, BoothPhase::ShowSerial);
  return {BoothEffectKind::Enqueue,
          PatientRecord{*serial, data.name_code, data.age, data.mobile, data.temp_deci_c, data.bpm}};
}

void on_tick(BoothState& s) {
  if (s.phase == BoothPhase::EnterName) {
    auto r = multitap_expire(s.multitap, s.now_ms);
    s.multitap = r.context;
    append_name_char(s, r.emitted);
  }
  if (s.error_until_ms && s.now_ms >= *s.error_until_ms) s.error_until_ms.reset();
  if ((s.phase == BoothPhase::ShowSerial || s.phase == BoothPhase::QueueFullNotice) &&
      s.now_ms >= s.phase_since_ms + kSerialDwellMs) {
    reset_to_idle(s);
  }
}

std::uint64_t event_time(const BoothEvent& e) {
  return std::visit([](const auto& ev) { return ev.t_ms; }, e);
}

}  // namespace

BoothStep booth_step(const BoothState& state, const BoothEvent& event, PatientQueue& queue) {
  BoothState s = state;
  s.now_ms = std::max(s.now_ms, event_time(event));
  BoothEffect effect;

  if (const auto* key = std::get_if<KeyPress>(&event)) {
    effect = on_key(s, key->key);
  } else if (const auto* temp = std::get_if<TempMeasured>(&event)) {
    if (s.phase == BoothPhase::MeasureTemp) {
      s.temp_deci_c = std::clamp(temp->temp_deci_c, kMinTempDeciC, kMaxTempDeciC);
      enter(s, BoothPhase::MeasurePulse);
      effect = {BoothEffectKind::StartPulseMeasurement, std::nullopt};
    }
  } else if (const auto* pulse = std::get_if<PulseMeasured>(&event)) {
    if (s.phase == BoothPhase::MeasurePulse) effect = on_pulse(s, pulse->bpm, queue);
  } else {
    on_tick(s);
  }

  LcdBuffer lcd = render_lcd(s);
  return {std::move(s), std::move(lcd), std::move(effect)};
}

namespace {

std::string rightmost(const std::string& text) {
  return text.size() <= kLcdCols ? text : text.substr(text.size() - kLcdCols);
}

char spinner(const BoothState& s) {
  constexpr std::string_view kFrames = "|/-\\";
  return kFrames[((s.now_ms - s.phase_since_ms) / kSpinnerFrameMs) % kFrames.size()];
}

std::string vitals_line(const BoothState& s) {
  const std::string bpm = s.bpm > 0 ? std::to_string(s.bpm) : "--";
  return fmt::format("T{}.{}C BPM {}", s.temp_deci_c / 10, s.temp_deci_c % 10, bpm);
}

}  // namespace

LcdBuffer render_lcd(const BoothState& s) {
  std::string top;
  std::string bottom;
  switch (s.phase) {
    case BoothPhase::Idle:
      top = "Press * to Start";
      break;
    case BoothPhase::EnterName:
      top = "Enter Name:";
      bottom = s.name;
      if (s.multitap.pending()) bottom.push_back(s.multitap.candidate());
      bottom = rightmost(bottom);
      break;
    case BoothPhase::EnterAge:
      top = "Enter Age:";
      bottom = rightmost(s.age);
      break;
    case BoothPhase::EnterMobile:
      top = "Enter Mobile:";
      bottom = rightmost(s.mobile);
      break;
    case BoothPhase::MeasureTemp:
      top = "Measuring Temp...";
      bottom = fmt::format("Please wait {}", spinner(s));
      break;
    case BoothPhase::MeasurePulse:
      top = "Place Finger on Sensor";
      bottom = fmt::format("Sensor {}", spinner(s));
      break;
    case BoothPhase::ShowSerial:
      top = fmt::format("Your Serial: {}", s.serial);
      bottom = vitals_line(s);
      break;
    case BoothPhase::QueueFullNotice:
      top = "Queue Full";
      bottom = "Please Try Later";
      break;
  }
  if (s.error_until_ms && s.now_ms < *s.error_until_ms) bottom = "Invalid, Retry";
  return LcdBuffer::of(top, bottom);
}

std::optional<std::uint64_t> booth_next_deadline(const BoothState& s) {
  std::optional<std::uint64_t> next;
  const auto consider = [&](std::uint64_t t) {
    if (t > s.now_ms && (!next || t < *next)) next = t;
  };
  if (s.multitap.pending()) consider(s.multitap.deadline_ms + 1);
  if (s.error_until_ms) consider(*s.error_until_ms);
  switch (s.phase) {
    case BoothPhase::ShowSerial:
    case BoothPhase::QueueFullNotice:
      consider(s.phase_since_ms + kSerialDwellMs);
      break;
    case BoothPhase::MeasureTemp:
    case BoothPhase::MeasurePulse: {
      const auto frames = (s.now_ms - s.phase_since_ms) / kSpinnerFrameMs;
      consider(s.phase_since_ms + (frames + 1) * kSpinnerFrameMs);
      break;
    }
    default:
      break;
  }
  return next;
}

}  // namespace chamberline
