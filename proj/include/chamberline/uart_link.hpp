#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include "chamberline/patient_queue.hpp"
#include "chamberline/result.hpp"

namespace chamberline {

inline constexpr int kUbrrMax = 4095;
// Total baud mismatch an 8N1 AVR receiver tolerates.
inline constexpr double kLinkErrorLimitPct = 2.0;

struct UartConfig {
  std::uint32_t f_osc_hz = 8'000'000;
  std::uint32_t target_baud = 9600;
  bool u2x = false;

  bool operator==(const UartConfig&) const = default;
};

enum class UartError { BaudUnreachable };

[[nodiscard]] constexpr std::uint32_t baud_divisor(bool u2x) noexcept { return u2x ? 8U : 16U; }

/// round(f_osc / (k * baud)) - 1 with k = 16, or 8 in double-speed mode.
[[nodiscard]] Result<int, UartError> ubrr_for(std::uint32_t f_osc_hz, std::uint32_t target_baud,
                                              bool u2x);
[[nodiscard]] double actual_baud(std::uint32_t f_osc_hz, int ubrr, bool u2x);
/// Signed percentage deviation of the generated baud from the target.
[[nodiscard]] Result<double, UartError> baud_error_pct(std::uint32_t f_osc_hz,
                                                       std::uint32_t target_baud, bool u2x);

/// Derived view of a UartConfig: register value, real rate, error and
/// whether a receiver would lock onto it.
struct LinkStatus {
  bool reachable = false;
  int ubrr = 0;
  double actual_baud = 0.0;
  double error_pct = 0.0;
  bool usable = false;

  bool operator==(const LinkStatus&) const = default;
};

[[nodiscard]] LinkStatus link_status(const UartConfig& config);

// --- frame codec --------------------------------------------------------

inline constexpr std::uint8_t kFrameSof = 0x7E;
inline constexpr std::uint8_t kFrameVersion = 0x01;
inline constexpr std::size_t kFrameBytes = 3 + kRecordBytes + 1;

using Frame = std::array<std::uint8_t, kFrameBytes>;

enum class FrameError {
  BadSof,
  BadVersion,
  BadLength,
  BadCrc,
  BadField,
};

[[nodiscard]] std::string_view to_string(FrameError error);

/// CRC-8/ATM: poly 0x07, init 0x00, no reflection, no final xor.
[[nodiscard]] std::uint8_t crc8_atm(std::span<const std::uint8_t> bytes) noexcept;

/// Layout: SOF, version, length=26, payload, CRC over version..payload.
/// Payload is serial(u16 BE), name(8, space padded), age(u8), mobile(11),
/// temp_deci_c(i16 BE), bpm(u8), flags(bit0 temp measured, bit1 bpm measured).
[[nodiscard]] Frame encode_frame(const PatientRecord& record);

/// Checks run in order: SOF, version, length, CRC, field ranges.
[[nodiscard]] Result<PatientRecord, FrameError> decode_frame(std::span<const std::uint8_t> bytes);

[[nodiscard]] std::string frame_hex(const Frame& frame);

// --- channel ------------------------------------------------------------

struct Delivered {
  Frame frame{};
  double tx_time_ms = 0.0;
};

enum class LinkError { LinkUnusable };

/// 8N1 line time for n bytes at the given baud, in milliseconds.
[[nodiscard]] constexpr double line_time_ms(std::size_t bytes, double baud) {
  return static_cast<double>(bytes) * 10.0 / baud * 1000.0;
}

/// All-or-nothing channel: intact delivery when |error| <= 2 %, otherwise the
/// receiver never syncs.
[[nodiscard]] Result<Delivered, LinkError> channel_transmit(const Frame& frame,
                                                            const UartConfig& config);

}  // namespace chamberline
