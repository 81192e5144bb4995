#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chamberline/result.hpp"

namespace chamberline {

inline constexpr std::size_t kDefaultQueueCapacity = 64;
inline constexpr std::size_t kMaxNameLength = 8;
inline constexpr std::size_t kMobileLength = 11;
inline constexpr int kMinAge = 1;
inline constexpr int kMaxAge = 120;
// Plausible LM35 window once a temperature has been measured; 0 means unmeasured.
inline constexpr int kMinTempDeciC = 200;
inline constexpr int kMaxTempDeciC = 450;
inline constexpr int kMaxBpm = 250;
inline constexpr std::uint32_t kMaxSerial = 0xFFFF;

/// Bytes per record in the packed firmware layout:
/// 2 serial + 8 name + 1 age + 11 mobile + 2 temp + 1 bpm + 1 flags.
inline constexpr std::size_t kRecordBytes = 26;

/// Everything the booth collects before a serial is assigned.
struct Registration {
  std::string name_code;
  int age = 0;
  std::string mobile;
  int temp_deci_c = 0;
  int bpm = 0;

  bool operator==(const Registration&) const = default;
};

struct PatientRecord {
  std::uint32_t serial = 0;
  std::string name_code;
  int age = 0;
  std::string mobile;
  int temp_deci_c = 0;
  int bpm = 0;

  bool operator==(const PatientRecord&) const = default;
};

[[nodiscard]] bool valid_name_code(std::string_view name);
[[nodiscard]] bool valid_mobile(std::string_view mobile);
[[nodiscard]] bool valid_registration(const Registration& data);
[[nodiscard]] bool valid_record(const PatientRecord& record);

enum class QueueError {
  Full,
  Empty,
  InvalidRecord,
  SerialExhausted,
};

[[nodiscard]] std::string_view to_string(QueueError error);

/// Bounded circular FIFO of patient records.
///
/// Serials are assigned on enqueue from a counter that only moves forward
/// until power_loss() wipes the volatile state. Failed operations leave the
/// queue untouched.
class PatientQueue {
 public:
  explicit PatientQueue(std::size_t capacity = kDefaultQueueCapacity);

  Result<std::uint32_t, QueueError> enqueue(const Registration& data);
  Result<PatientRecord, QueueError> dequeue();

  /// Volatile-memory model: drops every record and restarts serials at 1.
  void power_loss();

  [[nodiscard]] std::size_t capacity() const noexcept { return slots_.size(); }
  [[nodiscard]] std::size_t size() const noexcept { return count_; }
  [[nodiscard]] bool empty() const noexcept { return count_ == 0; }
  [[nodiscard]] bool full() const noexcept { return count_ == slots_.size(); }
  [[nodiscard]] std::uint32_t next_serial() const noexcept { return next_serial_; }

  /// Record i positions behind the head (0 = next to be dequeued).
  [[nodiscard]] const PatientRecord& at(std::size_t i) const;
  [[nodiscard]] std::vector<std::uint32_t> serials() const;

  bool operator==(const PatientQueue&) const = default;

 private:
  std::vector<PatientRecord> slots_;
  std::size_t head_ = 0;
  std::size_t count_ = 0;
  std::uint32_t next_serial_ = 1;
};

/// How many records of record_bytes fit in sram_budget_bytes.
[[nodiscard]] constexpr std::size_t max_capacity(std::size_t record_bytes,
                                                 std::size_t sram_budget_bytes) {
  return record_bytes == 0 ? 0 : sram_budget_bytes / record_bytes;
}

}  // namespace chamberline
