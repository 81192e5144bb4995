#include "chamberline/uart_link.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace chamberline {

Result<int, UartError> ubrr_for(std::uint32_t f_osc_hz, std::uint32_t target_baud, bool u2x) {
  if (target_baud == 0) return Err{UartError::BaudUnreachable};
  const std::uint64_t denom = static_cast<std::uint64_t>(baud_divisor(u2x)) * target_baud;
  // Half-up rounding of f_osc / denom in integers.
  const std::uint64_t divisor = (2 * static_cast<std::uint64_t>(f_osc_hz) + denom) / (2 * denom);
  if (divisor < 1) return Err{UartError::BaudUnreachable};
  return static_cast<int>(std::min<std::uint64_t>(divisor - 1, kUbrrMax));
}

double actual_baud(std::uint32_t f_osc_hz, int ubrr, bool u2x) {
  return static_cast<double>(f_osc_hz) / (baud_divisor(u2x) * (static_cast<double>(ubrr) + 1.0));
}

Result<double, UartError> baud_error_pct(std::uint32_t f_osc_hz, std::uint32_t target_baud,
                                         bool u2x) {
  const auto ubrr = ubrr_for(f_osc_hz, target_baud, u2x);
  if (!ubrr) return Err{ubrr.error()};
  const double actual = actual_baud(f_osc_hz, *ubrr, u2x);
  return 100.0 * (actual - target_baud) / target_baud;
}

LinkStatus link_status(const UartConfig& config) {
  LinkStatus status;
  const auto ubrr = ubrr_for(config.f_osc_hz, config.target_baud, config.u2x);
  if (!ubrr) return status;
  status.reachable = true;
  status.ubrr = *ubrr;
  status.actual_baud = actual_baud(config.f_osc_hz, *ubrr, config.u2x);
  status.error_pct =
      100.0 * (status.actual_baud - config.target_baud) / static_cast<double>(config.target_baud);
  status.usable = std::abs(status.error_pct) <= kLinkErrorLimitPct;
  return status;
}

std::string_view to_string(FrameError error) {
  switch (error) {
    case FrameError::BadSof: return "bad start-of-frame";
    case FrameError::BadVersion: return "bad version";
    case FrameError::BadLength: return "bad length";
    case FrameError::BadCrc: return "bad crc";
    case FrameError::BadField: return "bad field";
  }
  return "unknown";
}

std::uint8_t crc8_atm(std::span<const std::uint8_t> bytes) noexcept {
  std::uint8_t crc = 0x00;
  for (const std::uint8_t b : bytes) {
    crc ^= b;
    for (int bit = 0; bit < 8; ++bit) {
      crc = (crc & 0x80) ? static_cast<std::uint8_t>((crc << 1) ^ 0x07)
                         : static_cast<std::uint8_t>(crc << 1);
    }
  }
  return crc;
}

namespace {

// Payload offsets.
constexpr std::size_t kHeader = 3;
constexpr std::size_t kSerialAt = kHeader;
constexpr std::size_t kNameAt = kSerialAt + 2;
constexpr std::size_t kAgeAt = kNameAt + kMaxNameLength;
constexpr std::size_t kMobileAt = kAgeAt + 1;
constexpr std::size_t kTempAt = kMobileAt + kMobileLength;
constexpr std::size_t kBpmAt = kTempAt + 2;
constexpr std::size_t kFlagsAt = kBpmAt + 1;
constexpr std::size_t kCrcAt = kFlagsAt + 1;
static_assert(kCrcAt == kHeader + kRecordBytes);

constexpr std::uint8_t kFlagTemp = 0x01;
constexpr std::uint8_t kFlagBpm = 0x02;

std::uint8_t flags_for(int temp_deci_c, int bpm) {
  return static_cast<std::uint8_t>((temp_deci_c != 0 ? kFlagTemp : 0) | (bpm != 0 ? kFlagBpm : 0));
}

}  // namespace

Frame encode_frame(const PatientRecord& r) {
  Frame f{};
  f[0] = kFrameSof;
  f[1] = kFrameVersion;
  f[2] = static_cast<std::uint8_t>(kRecordBytes);

  f[kSerialAt] = static_cast<std::uint8_t>(r.serial >> 8);
  f[kSerialAt + 1] = static_cast<std::uint8_t>(r.serial);
  for (std::size_t i = 0; i < kMaxNameLength; ++i) {
    f[kNameAt + i] = i < r.name_code.size() ? static_cast<std::uint8_t>(r.name_code[i]) : ' ';
  }
  f[kAgeAt] = static_cast<std::uint8_t>(r.age);
  for (std::size_t i = 0; i < kMobileLength; ++i) {
    f[kMobileAt + i] = i < r.mobile.size() ? static_cast<std::uint8_t>(r.mobile[i]) : ' ';
  }
  const auto temp = static_cast<std::uint16_t>(static_cast<std::int16_t>(r.temp_deci_c));
  f[kTempAt] = static_cast<std::uint8_t>(temp >> 8);
  f[kTempAt + 1] = static_cast<std::uint8_t>(temp);
  f[kBpmAt] = static_cast<std::uint8_t>(r.bpm);
  f[kFlagsAt] = flags_for(r.temp_deci_c, r.bpm);

  f[kCrcAt] = crc8_atm(std::span<const std::uint8_t>(f).subspan(1, kCrcAt - 1));
  return f;
}

Result<PatientRecord, FrameError> decode_frame(std::span<const std::uint8_t> bytes) {
  if (bytes.empty() || bytes[0] != kFrameSof) return Err{FrameError::BadSof};
  if (bytes.size() < 2 || bytes[1] != kFrameVersion) return Err{FrameError::BadVersion};
  if (bytes.size() != kFrameBytes || bytes[2] != kRecordBytes) return Err{FrameError::BadLength};
  if (crc8_atm(bytes.subspan(1, kCrcAt - 1)) != bytes[kCrcAt]) return Err{FrameError::BadCrc};

  PatientRecord r;
  r.serial = static_cast<std::uint32_t>(bytes[kSerialAt]) << 8 | bytes[kSerialAt + 1];

  std::string name(reinterpret_cast<const char*>(&bytes[kNameAt]), kMaxNameLength);
  const auto end = name.find_last_not_of(' ');
  name.resize(end == std::string::npos ? 0 : end + 1);
  r.name_code = std::move(name);

  r.age = bytes[kAgeAt];
  r.mobile.assign(reinterpret_cast<const char*>(&bytes[kMobileAt]), kMobileLength);
  r.temp_deci_c = static_cast<std::int16_t>(bytes[kTempAt] << 8 | bytes[kTempAt + 1]);
  r.bpm = bytes[kBpmAt];

  if (bytes[kFlagsAt] != flags_for(r.temp_deci_c, r.bpm)) return Err{FrameError::BadField};
  if (!valid_record(r)) return Err{FrameError::BadField};
  return r;
}

std::string frame_hex(const Frame& frame) {
  std::string out;
  out.reserve(frame.size() * 2);
  for (const std::uint8_t b : frame) out += fmt::format("{:02X}", b);
  return out;
}

Result<Delivered, LinkError> channel_transmit(const Frame& frame, const UartConfig& config) {
  const LinkStatus status = link_status(config);
  if (!status.usable) return Err{LinkError::LinkUnusable};
  return Delivered{frame, line_time_ms(frame.size(), status.actual_baud)};
}

}  // namespace chamberline
