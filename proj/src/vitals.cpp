#include "chamberline/vitals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chamberline/rng.hpp"

namespace chamberline {

std::string_view to_string(VitalsError error) {
  switch (error) {
    case VitalsError::EmptyWindow: return "empty sample window";
    case VitalsError::OutOfRange: return "beat interval out of range";
    case VitalsError::InsufficientBeats: return "insufficient beats";
  }
  return "unknown";
}

int lm35_to_deci_celsius(int adc, int vref_mv) {
  const auto scaled = static_cast<std::int64_t>(adc) * vref_mv;
  return static_cast<int>((scaled + 512) / 1024);
}

int deci_celsius_to_adc(int temp_deci_c, int vref_mv) {
  const double adc = std::floor(static_cast<double>(temp_deci_c) * 1024.0 / vref_mv + 0.5);
  return std::clamp(static_cast<int>(adc), 0, kAdcMax);
}

Result<int, VitalsError> average_temperature(std::span<const AdcSample> samples, int vref_mv) {
  if (samples.empty()) return Err{VitalsError::EmptyWindow};
  std::int64_t sum = 0;
  for (const auto& s : samples) sum += s.value;
  const auto n = static_cast<std::int64_t>(samples.size());
  const auto mean = static_cast<int>((2 * sum + n) / (2 * n));
  return lm35_to_deci_celsius(mean, vref_mv);
}

std::vector<std::uint64_t> detect_beats(std::span<const AdcSample> waveform, int threshold,
                                        int refractory_ms) {
  std::vector<std::uint64_t> beats;
  bool below = false;
  for (const auto& s : waveform) {
    if (s.value < threshold) {
      below = true;
      continue;
    }
    if (!below) continue;
    below = false;
    if (beats.empty() || s.t_ms - beats.back() >= static_cast<std::uint64_t>(refractory_ms)) {
      beats.push_back(s.t_ms);
    }
  }
  return beats;
}

Result<int, VitalsError> bpm_from_interval(int t_beat_ms) {
  if (t_beat_ms < kMinBeatIntervalMs || t_beat_ms > kMaxBeatIntervalMs) {
    return Err{VitalsError::OutOfRange};
  }
  return (60'000 + t_beat_ms / 2) / t_beat_ms;
}

Result<int, VitalsError> estimate_bpm(std::span<const AdcSample> waveform, int threshold,
                                      int refractory_ms) {
  const auto beats = detect_beats(waveform, threshold, refractory_ms);
  if (beats.size() < 3) return Err{VitalsError::InsufficientBeats};

  std::vector<std::uint64_t> intervals;
  intervals.reserve(beats.size() - 1);
  for (std::size_t i = 1; i < beats.size(); ++i) intervals.push_back(beats[i] - beats[i - 1]);
  std::sort(intervals.begin(), intervals.end());

  const std::size_t mid = intervals.size() / 2;
  const double median = intervals.size() % 2 == 1
                            ? static_cast<double>(intervals[mid])
                            : 0.5 * static_cast<double>(intervals[mid - 1] + intervals[mid]);
  if (median < kMinBeatIntervalMs || median > kMaxBeatIntervalMs) {
    return Err{VitalsError::OutOfRange};
  }
  return static_cast<int>(std::floor(60'000.0 / median + 0.5));
}

std::vector<AdcSample> synth_ppg(const PpgParams& p) {
  if (p.bpm < 20 || p.bpm > 250) throw std::invalid_argument("synth_ppg: bpm outside [20, 250]");
  if (p.fs_hz < 50 || p.fs_hz > 1000) {
    throw std::invalid_argument("synth_ppg: fs_hz outside [50, 1000]");
  }
  if (p.noise_amp < 0.0) throw std::invalid_argument("synth_ppg: negative noise");

  constexpr double kPulseFraction = 0.2;
  constexpr double kAmplitude = kPpgPeak - kPpgBaseline;

  XorShift64Star rng(p.seed);
  const std::uint64_t n = p.duration_ms * static_cast<std::uint64_t>(p.fs_hz) / 1000;
  // Phase is (i * bpm mod 60 * fs) / (60 * fs): exact, no drift over long captures.
  const auto cycle = static_cast<std::uint64_t>(60) * static_cast<std::uint64_t>(p.fs_hz);

  std::vector<AdcSample> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double phase = static_cast<double>((i * static_cast<std::uint64_t>(p.bpm)) % cycle) /
                         static_cast<double>(cycle);
    double v = kPpgBaseline;
    if (phase < kPulseFraction) {
      v += kAmplitude * 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * phase / kPulseFraction));
    }
    if (p.noise_amp > 0.0) v += rng.symmetric() * p.noise_amp * kAmplitude;
    const int value = std::clamp(static_cast<int>(std::floor(v + 0.5)), 0, kAdcMax);
    out.push_back({value, i * 1000 / static_cast<std::uint64_t>(p.fs_hz)});
  }
  return out;
}

}  // namespace chamberline
