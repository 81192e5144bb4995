#pragma once

#include <string>
#include <variant>

#include "chamberline/uart_link.hpp"

namespace chamberline {

/// External stimuli understood by the simulation, whether they come from a
/// scenario file or a live gateway client.
namespace cmd {

struct Key {
  char k = 0;
  bool operator==(const Key&) const = default;
};
struct PressNext {
  bool operator==(const PressNext&) const = default;
};
struct PowerLoss {
  bool operator==(const PowerLoss&) const = default;
};
struct SetTempC {
  double v = 0.0;
  bool operator==(const SetTempC&) const = default;
};
struct SetBpm {
  int v = 0;
  bool operator==(const SetBpm&) const = default;
};
struct Finger {
  bool on = true;
  bool operator==(const Finger&) const = default;
};
struct SetLink {
  UartConfig link;
  bool operator==(const SetLink&) const = default;
};

}  // namespace cmd

using SimCommand = std::variant<cmd::Key, cmd::PressNext, cmd::PowerLoss, cmd::SetTempC,
                                cmd::SetBpm, cmd::Finger, cmd::SetLink>;

// Ground-truth ranges accepted for the emulated body.
inline constexpr double kMinTruthTempC = 0.0;
inline constexpr double kMaxTruthTempC = 150.0;
inline constexpr int kMinTruthBpm = 20;
inline constexpr int kMaxTruthBpm = 250;

/// Empty when the command is acceptable, otherwise the reason it is not.
[[nodiscard]] std::string validate(const SimCommand& command);

}  // namespace chamberline
