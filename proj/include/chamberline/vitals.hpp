#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "chamberline/result.hpp"

namespace chamberline {

inline constexpr int kDefaultVrefMv = 5000;
inline constexpr int kAdcMax = 1023;
inline constexpr std::size_t kTempAveragingWindow = 16;

// Synthetic PPG shape, in ADC counts.
inline constexpr int kPpgBaseline = 400;
inline constexpr int kPpgPeak = 700;
inline constexpr int kDefaultBeatThreshold = 550;
inline constexpr int kRefractoryMs = 240;

// Physiological inter-beat window: 250 BPM down to 20 BPM.
inline constexpr int kMinBeatIntervalMs = 240;
inline constexpr int kMaxBeatIntervalMs = 3000;

struct AdcSample {
  int value = 0;  // 10-bit
  std::uint64_t t_ms = 0;

  bool operator==(const AdcSample&) const = default;
};

struct VitalsReading {
  int temp_deci_c = 0;
  int bpm = 0;
};

enum class VitalsError {
  EmptyWindow,
  OutOfRange,
  InsufficientBeats,
};

[[nodiscard]] std::string_view to_string(VitalsError error);

/// LM35 reading in tenths of a degree. The sensor gives 10 mV/degC, so one
/// millivolt is one deci-degree; adc * vref / 1024 rounded half-up.
[[nodiscard]] int lm35_to_deci_celsius(int adc, int vref_mv = kDefaultVrefMv);

/// Inverse of lm35_to_deci_celsius: the ADC count a perfect LM35 at
/// temp_deci_c would produce, clamped to the converter range.
[[nodiscard]] int deci_celsius_to_adc(int temp_deci_c, int vref_mv = kDefaultVrefMv);

/// Converts the half-up rounded mean of the window.
[[nodiscard]] Result<int, VitalsError> average_temperature(std::span<const AdcSample> samples,
                                                           int vref_mv = kDefaultVrefMv);

/// Timestamps of rising threshold crossings, spaced at least refractory_ms.
/// A crossing needs a sample below threshold followed by one at or above it,
/// so a trace that starts above threshold does not open with a beat.
[[nodiscard]] std::vector<std::uint64_t> detect_beats(std::span<const AdcSample> waveform,
                                                      int threshold = kDefaultBeatThreshold,
                                                      int refractory_ms = kRefractoryMs);

/// round(60000 / t_beat_ms) for intervals in [240, 3000] ms.
[[nodiscard]] Result<int, VitalsError> bpm_from_interval(int t_beat_ms);

/// BPM from the median inter-beat interval; needs at least three beats.
[[nodiscard]] Result<int, VitalsError> estimate_bpm(std::span<const AdcSample> waveform,
                                                    int threshold = kDefaultBeatThreshold,
                                                    int refractory_ms = kRefractoryMs);

struct PpgParams {
  int bpm = 60;
  std::uint64_t duration_ms = 10'000;
  int fs_hz = 100;
  double noise_amp = 0.0;  // fraction of the 300-count pulse amplitude
  std::uint64_t seed = 1;
};

/// Deterministic pulse train: raised-cosine pulses over the first 20% of each
/// period on a flat baseline, plus seeded uniform noise. Requires bpm in
/// [20, 250] and fs_hz in [50, 1000].
[[nodiscard]] std::vector<AdcSample> synth_ppg(const PpgParams& params);

}  // namespace chamberline
