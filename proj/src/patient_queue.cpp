#include "chamberline/patient_queue.hpp"

#include <algorithm>
#include <stdexcept>

namespace chamberline {

namespace {

bool is_upper_alnum(char c) {
  return (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9');
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool valid_vitals(int temp_deci_c, int bpm) {
  const bool temp_ok =
      temp_deci_c == 0 || (temp_deci_c >= kMinTempDeciC && temp_deci_c <= kMaxTempDeciC);
  return temp_ok && bpm >= 0 && bpm <= kMaxBpm;
}

}  // namespace

bool valid_name_code(std::string_view name) {
  return !name.empty() && name.size() <= kMaxNameLength &&
         std::all_of(name.begin(), name.end(), is_upper_alnum);
}

bool valid_mobile(std::string_view mobile) {
  return mobile.size() == kMobileLength && std::all_of(mobile.begin(), mobile.end(), is_digit);
}

bool valid_registration(const Registration& data) {
  return valid_name_code(data.name_code) && data.age >= kMinAge && data.age <= kMaxAge &&
         valid_mobile(data.mobile) && valid_vitals(data.temp_deci_c, data.bpm);
}

bool valid_record(const PatientRecord& r) {
  return r.serial >= 1 && r.serial <= kMaxSerial &&
         valid_registration({r.name_code, r.age, r.mobile, r.temp_deci_c, r.bpm});
}

std::string_view to_string(QueueError error) {
  switch (error) {
    case QueueError::Full: return "queue full";
    case QueueError::Empty: return "queue empty";
    case QueueError::InvalidRecord: return "invalid record";
    case QueueError::SerialExhausted: return "serial counter exhausted";
  }
  return "unknown";
}

PatientQueue::PatientQueue(std::size_t capacity) : slots_(capacity) {
  if (capacity == 0) throw std::invalid_argument("PatientQueue: capacity must be positive");
}

Result<std::uint32_t, QueueError> PatientQueue::enqueue(const Registration& data) {
  if (!valid_registration(data)) return Err{QueueError::InvalidRecord};
  if (full()) return Err{QueueError::Full};
  if (next_serial_ > kMaxSerial) return Err{QueueError::SerialExhausted};

  const std::uint32_t serial = next_serial_++;
  slots_[(head_ + count_) % slots_.size()] =
      PatientRecord{serial, data.name_code, data.age, data.mobile, data.temp_deci_c, data.bpm};
  ++count_;
  return serial;
}

Result<PatientRecord, QueueError> PatientQueue::dequeue() {
  if (empty()) return Err{QueueError::Empty};
  PatientRecord out = std::move(slots_[head_]);
  slots_[head_] = PatientRecord{};
  head_ = (head_ + 1) % slots_.size();
  --count_;
  return out;
}

void PatientQueue::power_loss() {
  std::fill(slots_.begin(), slots_.end(), PatientRecord{});
  head_ = 0;
  count_ = 0;
  next_serial_ = 1;
}

const PatientRecord& PatientQueue::at(std::size_t i) const {
  if (i >= count_) throw std::out_of_range("PatientQueue::at");
  return slots_[(head_ + i) % slots_.size()];
}

std::vector<std::uint32_t> PatientQueue::serials() const {
  std::vector<std::uint32_t> out;
  out.reserve(count_);
  for (std::size_t i = 0; i < count_; ++i) out.push_back(at(i).serial);
  return out;
}

}  // namespace chamberline
