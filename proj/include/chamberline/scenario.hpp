#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "chamberline/commands.hpp"
#include "chamberline/result.hpp"

namespace chamberline {

struct ScenarioEvent {
  std::uint64_t t_ms = 0;
  SimCommand command;

  bool operator==(const ScenarioEvent&) const = default;
};

struct Scenario {
  std::vector<ScenarioEvent> events;
};

struct ParseError {
  int line = 0;  // 1-based
  std::string reason;
};

/// Line format: `<t_ms> <target> <action>[ <key>=<value>...]`
///
///   0     booth  key k=*
///   12000 doctor press
///   13000 power  loss
///   0     sensor set_temp_c v=36.6
///   0     sensor set_bpm v=72
///   0     sensor finger v=on
///
/// `#` starts a comment; blank lines are skipped. Times must not decrease.
[[nodiscard]] Result<Scenario, ParseError> load_scenario(std::string_view text);

/// Inverse of load_scenario, one event per line.
[[nodiscard]] std::string format_scenario(const Scenario& scenario);

}  // namespace chamberline
