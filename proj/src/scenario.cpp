#include "chamberline/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "chamberline/booth_fsm.hpp"

namespace chamberline {

std::string validate(const SimCommand& command) {
  return std::visit(
      [](const auto& c) -> std::string {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cmd::Key>) {
          if (!is_keypad_key(c.k)) return fmt::format("'{}' is not a keypad key", c.k);
        } else if constexpr (std::is_same_v<T, cmd::SetTempC>) {
          if (!(c.v >= kMinTruthTempC && c.v <= kMaxTruthTempC)) {
            return fmt::format("temperature {} outside [{}, {}]", c.v, kMinTruthTempC,
                               kMaxTruthTempC);
          }
        } else if constexpr (std::is_same_v<T, cmd::SetBpm>) {
          if (c.v < kMinTruthBpm || c.v > kMaxTruthBpm) {
            return fmt::format("bpm {} outside [{}, {}]", c.v, kMinTruthBpm, kMaxTruthBpm);
          }
        } else if constexpr (std::is_same_v<T, cmd::SetLink>) {
          if (c.link.f_osc_hz == 0 || c.link.target_baud == 0) {
            return "oscillator and baud must be positive";
          }
        }
        return {};
      },
      command);
}

namespace {

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
  // from_chars for double is missing on older libstdc++.
  std::string copy(s);
  std::istringstream in(copy);
  in.imbue(std::locale::classic());
  in >> out;
  return !in.fail() && in.eof();
}

using Args = std::map<std::string, std::string, std::less<>>;

Result<SimCommand, std::string> build(std::string_view target, std::string_view action,
                                      const Args& args) {
  const auto arg = [&](std::string_view key) -> const std::string* {
    const auto it = args.find(key);
    return it == args.end() ? nullptr : &it->second;
  };
  const auto expect_args = [&](std::size_t n) { return args.size() == n; };

  if (target == "booth" && action == "key") {
    const auto* k = arg("k");
    if (!k || !expect_args(1) || k->size() != 1) return Err{std::string("expected k=<key>")};
    return SimCommand{cmd::Key{(*k)[0]}};
  }
  if (target == "doctor" && action == "press") {
    if (!expect_args(0)) return Err{std::string("press takes no arguments")};
    return SimCommand{cmd::PressNext{}};
  }
  if (target == "power" && action == "loss") {
    if (!expect_args(0)) return Err{std::string("loss takes no arguments")};
    return SimCommand{cmd::PowerLoss{}};
  }
  if (target == "sensor") {
    const auto* v = arg("v");
    if (!v || !expect_args(1)) return Err{std::string("expected v=<value>")};
    if (action == "set_temp_c") {
      double value = 0;
      if (!parse_double(*v, value)) return Err{"bad temperature '" + *v + "'"};
      return SimCommand{cmd::SetTempC{value}};
    }
    if (action == "set_bpm") {
      int value = 0;
      if (!parse_number(*v, value)) return Err{"bad bpm '" + *v + "'"};
      return SimCommand{cmd::SetBpm{value}};
    }
    if (action == "finger") {
      if (*v != "on" && *v != "off") return Err{std::string("finger expects v=on|off")};
      return SimCommand{cmd::Finger{*v == "on"}};
    }
  }
  return Err{fmt::format("unknown action '{} {}'", target, action)};
}

}  // namespace

Result<Scenario, ParseError> load_scenario(std::string_view text) {
  Scenario scenario;
  int line_no = 0;
  std::uint64_t last_t = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line =
        text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;

    // Comments start at a token beginning with '#', so "k=#" stays a value.
    auto tokens = split_ws(line);
    const auto comment = std::find_if(tokens.begin(), tokens.end(),
                                      [](std::string_view tok) { return tok.front() == '#'; });
    tokens.erase(comment, tokens.end());
    if (tokens.empty()) continue;
    const auto fail = [&](std::string reason) {
      return Err{ParseError{line_no, std::move(reason)}};
    };
    if (tokens.size() < 3) return fail("expected '<t_ms> <target> <action>'");

    std::uint64_t t = 0;
    if (!parse_number(tokens[0], t)) return fail(fmt::format("bad time '{}'", tokens[0]));
    if (!scenario.events.empty() && t < last_t) {
      return fail(fmt::format("time {} precedes previous event at {}", t, last_t));
    }

    Args args;
    for (std::size_t i = 3; i < tokens.size(); ++i) {
      const auto eq = tokens[i].find('=');
      if (eq == std::string_view::npos || eq == 0) {
        return fail(fmt::format("expected key=value, got '{}'", tokens[i]));
      }
      args.emplace(std::string(tokens[i].substr(0, eq)), std::string(tokens[i].substr(eq + 1)));
    }

    auto command = build(tokens[1], tokens[2], args);
    if (!command) return fail(command.error());
    if (auto why = validate(*command); !why.empty()) return fail(std::move(why));

    scenario.events.push_back({t, std::move(*command)});
    last_t = t;
  }
  return scenario;
}

std::string format_scenario(const Scenario& scenario) {
  std::string out;
  for (const auto& e : scenario.events) {
    const std::string body = std::visit(
        [](const auto& c) -> std::string {
          using T = std::decay_t<decltype(c)>;
          if constexpr (std::is_same_v<T, cmd::Key>) return fmt::format("booth key k={}", c.k);
          if constexpr (std::is_same_v<T, cmd::PressNext>) return "doctor press";
          if constexpr (std::is_same_v<T, cmd::PowerLoss>) return "power loss";
          if constexpr (std::is_same_v<T, cmd::SetTempC>) {
            return fmt::format("sensor set_temp_c v={}", c.v);
          }
          if constexpr (std::is_same_v<T, cmd::SetBpm>) return fmt::format("sensor set_bpm v={}", c.v);
          if constexpr (std::is_same_v<T, cmd::Finger>) {
            return fmt::format("sensor finger v={}", c.on ? "on" : "off");
          }
          // Links are configured per run, not per scenario line.
          return "# set_link not representable";
        },
        e.command);
    out += fmt::format("{} {}\n", e.t_ms, body);
  }
  return out;
}

}  // namespace chamberline
