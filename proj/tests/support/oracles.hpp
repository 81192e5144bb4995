#pragma once
// Independent reference models used to check the implementation. Nothing in
// here calls into the code paths it is used to verify.

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace oracle {

/// Unbounded FIFO restricted by a capacity check, with a serial counter.
struct ListQueue {
  std::size_t capacity;
  std::deque<std::pair<std::uint32_t, std::string>> items;
  std::uint32_t next = 1;

  std::optional<std::uint32_t> push(const std::string& tag) {
    if (items.size() == capacity) return std::nullopt;
    items.emplace_back(next, tag);
    return next++;
  }
  std::optional<std::pair<std::uint32_t, std::string>> pop() {
    if (items.empty()) return std::nullopt;
    auto front = items.front();
    items.pop_front();
    return front;
  }
};

/// UBRR by exhaustive search over every register value: the one whose
/// divisor is nearest to f/(k*baud), ties going to the larger divisor.
inline std::optional<int> ubrr_nearest_divisor(double f_osc, double baud, bool u2x) {
  const double k = u2x ? 8.0 : 16.0;
  const double ideal = f_osc / (k * baud);
  std::optional<int> best;
  double best_gap = 0;
  for (int ubrr = 0; ubrr <= 4095; ++ubrr) {
    const double gap = std::abs((ubrr + 1) - ideal);
    if (!best || gap < best_gap || (gap == best_gap && ubrr > *best)) {
      best = ubrr;
      best_gap = gap;
    }
  }
  if (ideal < 0.5) return std::nullopt;
  return best;
}

inline double error_pct(double f_osc, double baud, bool u2x, int ubrr) {
  const double actual = f_osc / ((u2x ? 8.0 : 16.0) * (ubrr + 1));
  return 100.0 * (actual - baud) / baud;
}

/// CRC as GF(2) polynomial long division: message bits (MSB first) followed
/// by eight zero bits, divided by x^8 + x^2 + x + 1.
inline std::uint8_t crc8_long_division(const std::vector<std::uint8_t>& bytes) {
  std::vector<int> bits;
  for (auto b : bytes) {
    for (int i = 7; i >= 0; --i) bits.push_back((b >> i) & 1);
  }
  bits.insert(bits.end(), 8, 0);
  const int poly[9] = {1, 0, 0, 0, 0, 0, 1, 1, 1};
  for (std::size_t i = 0; i + 8 < bits.size(); ++i) {
    if (bits[i] == 0) continue;
    for (int j = 0; j < 9; ++j) bits[i + j] ^= poly[j];
  }
  std::uint8_t crc = 0;
  for (std::size_t i = bits.size() - 8; i < bits.size(); ++i) {
    crc = static_cast<std::uint8_t>((crc << 1) | bits[i]);
  }
  return crc;
}

/// Times at which an ideal raised-cosine pulse train (pulse over the first
/// 20% of each period) first reaches the midpoint between baseline and peak.
inline std::vector<double> ideal_crossings(int bpm, double duration_ms) {
  const double period = 60'000.0 / bpm;
  std::vector<double> out;
  for (double t = 0.05 * period; t < duration_ms; t += period) out.push_back(t);
  return out;
}

}  // namespace oracle
