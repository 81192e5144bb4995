#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "chamberline/lcd.hpp"
#include "chamberline/patient_queue.hpp"

namespace chamberline {

inline constexpr std::uint64_t kMultitapTimeoutMs = 1000;
inline constexpr std::uint64_t kErrorDwellMs = 1500;
inline constexpr std::uint64_t kSerialDwellMs = 5000;
inline constexpr std::uint64_t kSpinnerFrameMs = 1000;
inline constexpr std::size_t kMaxAgeDigits = 3;

[[nodiscard]] bool is_keypad_key(char key) noexcept;
inline constexpr std::string_view kKeypadKeys = "0123456789ABCD*#";

// --- multi-tap ----------------------------------------------------------

/// Characters cycled by repeated presses of a digit key ("" for non-digits).
[[nodiscard]] std::string_view multitap_cycle(char key) noexcept;

struct MultitapContext {
  char key = 0;  // 0 when nothing is pending
  int presses = 0;
  std::uint64_t deadline_ms = 0;

  [[nodiscard]] bool pending() const noexcept { return key != 0; }
  [[nodiscard]] char candidate() const noexcept;

  bool operator==(const MultitapContext&) const = default;
};

struct MultitapResult {
  MultitapContext context;
  std::optional<char> emitted;
};

/// Same key at or before the deadline cycles the candidate; a different key,
/// or the same key after the deadline, commits it and starts over.
[[nodiscard]] MultitapResult multitap_decode(MultitapContext ctx, char key, std::uint64_t t_ms);
/// Commits the pending candidate once t_ms is past its deadline.
[[nodiscard]] MultitapResult multitap_expire(MultitapContext ctx, std::uint64_t t_ms);
/// Commits the pending candidate unconditionally.
[[nodiscard]] MultitapResult multitap_flush(MultitapContext ctx);

// --- booth state machine ------------------------------------------------

enum class BoothPhase {
  Idle,
  EnterName,
  EnterAge,
  EnterMobile,
  MeasureTemp,
  MeasurePulse,
  ShowSerial,
  QueueFullNotice,
};

inline constexpr std::array kAllBoothPhases{
    BoothPhase::Idle,        BoothPhase::EnterName,    BoothPhase::EnterAge,
    BoothPhase::EnterMobile, BoothPhase::MeasureTemp,  BoothPhase::MeasurePulse,
    BoothPhase::ShowSerial,  BoothPhase::QueueFullNotice,
};

[[nodiscard]] std::string_view to_string(BoothPhase phase);

struct BoothState {
  BoothPhase phase = BoothPhase::Idle;
  std::string name;
  std::string age;
  std::string mobile;
  MultitapContext multitap;
  int temp_deci_c = 0;
  int bpm = 0;
  std::uint32_t serial = 0;
  std::uint64_t now_ms = 0;
  std::uint64_t phase_since_ms = 0;
  std::optional<std::uint64_t> error_until_ms;

  bool operator==(const BoothState&) const = default;
};

struct KeyPress {
  char key = 0;
  std::uint64_t t_ms = 0;
};
struct TempMeasured {
  int temp_deci_c = 0;
  std::uint64_t t_ms = 0;
};
struct PulseMeasured {
  int bpm = 0;  // 0 when no pulse could be estimated
  std::uint64_t t_ms = 0;
};
struct Tick {
  std::uint64_t t_ms = 0;
};

using BoothEvent = std::variant<KeyPress, TempMeasured, PulseMeasured, Tick>;

enum class BoothEffectKind {
  None,
  StartTempMeasurement,
  StartPulseMeasurement,
  Enqueue,
  QueueFull,
};

struct BoothEffect {
  BoothEffectKind kind = BoothEffectKind::None;
  std::optional<PatientRecord> record;  // set for Enqueue

  bool operator==(const BoothEffect&) const = default;
};

struct BoothStep {
  BoothState state;
  LcdBuffer lcd;
  BoothEffect effect;
};

/// One transition of the registration flow:
///   Idle -*-> EnterName -#-> EnterAge -#-> EnterMobile -#-> MeasureTemp
///   -temp-> MeasurePulse -bpm-> ShowSerial | QueueFullNotice -5 s-> Idle
/// 'D' is backspace and 'C' cancels while entering text. The queue is only
/// touched when a pulse reading completes.
[[nodiscard]] BoothStep booth_step(const BoothState& state, const BoothEvent& event,
                                   PatientQueue& queue);

[[nodiscard]] LcdBuffer render_lcd(const BoothState& state);

/// Earliest future time at which a Tick would change the state or display.
[[nodiscard]] std::optional<std::uint64_t> booth_next_deadline(const BoothState& state);

}  // namespace chamberline
