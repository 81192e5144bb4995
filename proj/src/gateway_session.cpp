#include <cstdlib>
#include <limits>

#include <fmt/format.h>

#include "chamberline/gateway.hpp"

namespace chamberline {

namespace {

using nlohmann::json;

const json& require_object(const json& args, std::string_view name) {
  if (!args.is_object()) throw std::invalid_argument(fmt::format("{} expects an object", name));
  return args;
}

template <typename T>
T field(const json& args, const char* key) {
  const auto it = args.find(key);
  if (it == args.end()) throw std::invalid_argument(fmt::format("missing field '{}'", key));
  if constexpr (std::is_same_v<T, bool>) {
    if (!it->is_boolean()) throw std::invalid_argument(fmt::format("'{}' must be boolean", key));
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!it->is_number()) throw std::invalid_argument(fmt::format("'{}' must be a number", key));
  } else if constexpr (std::is_integral_v<T>) {
    if (!it->is_number_integer() || (std::is_unsigned_v<T> && it->get<std::int64_t>() < 0)) {
      throw std::invalid_argument(fmt::format("'{}' must be a non-negative integer", key));
    }
    if constexpr (sizeof(T) < sizeof(std::int64_t)) {
      const auto wide = it->get<std::int64_t>();
      if (wide > static_cast<std::int64_t>(std::numeric_limits<T>::max())) {
        throw std::invalid_argument(fmt::format("'{}' is too large", key));
      }
    }
  } else {
    if (!it->is_string()) throw std::invalid_argument(fmt::format("'{}' must be a string", key));
  }
  return it->get<T>();
}

ClientCommand build(const std::string& name, const json& args) {
  if (name == "key") {
    const auto k = field<std::string>(require_object(args, name), "k");
    if (k.size() != 1) throw std::invalid_argument("'k' must be a single key");
    return SimCommand{cmd::Key{k[0]}};
  }
  if (name == "press_next") return SimCommand{cmd::PressNext{}};
  if (name == "power_loss") return SimCommand{cmd::PowerLoss{}};
  if (name == "set_temp_c") return SimCommand{cmd::SetTempC{field<double>(require_object(args, name), "v")}};
  if (name == "set_bpm") return SimCommand{cmd::SetBpm{field<int>(require_object(args, name), "v")}};
  if (name == "finger") return SimCommand{cmd::Finger{field<bool>(require_object(args, name), "on")}};
  if (name == "set_link") {
    const auto& a = require_object(args, name);
    return SimCommand{cmd::SetLink{UartConfig{field<std::uint32_t>(a, "f_osc"),
                                              field<std::uint32_t>(a, "baud"),
                                              field<bool>(a, "u2x")}}};
  }
  if (name == "pause") return cmd::Pause{};
  if (name == "resume") return cmd::Resume{};
  if (name == "step") return cmd::Step{field<std::uint64_t>(require_object(args, name), "ms")};
  throw std::invalid_argument(fmt::format("unknown command '{}'", name));
}

json rows(const LcdBuffer& lcd) { return json::array({lcd.rows[0], lcd.rows[1]}); }

}  // namespace

Result<ClientCommand, std::string> parse_client_command(std::string_view line) {
  const json j = json::parse(line, nullptr, false);
  if (j.is_discarded()) return Err{std::string("malformed JSON")};
  if (!j.is_object() || j.size() != 1) {
    return Err{std::string("expected an object with exactly one command")};
  }
  try {
    auto command = build(j.begin().key(), j.begin().value());
    if (const auto* sim = std::get_if<SimCommand>(&command)) {
      if (auto why = validate(*sim); !why.empty()) return Err{std::move(why)};
    }
    return command;
  } catch (const std::exception& e) {
    return Err{std::string(e.what())};
  }
}

std::string encode_client_command(const ClientCommand& command) {
  json j = std::visit(
      [](const auto& c) -> json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, cmd::Pause>) return {{"pause", json::object()}};
        if constexpr (std::is_same_v<T, cmd::Resume>) return {{"resume", json::object()}};
        if constexpr (std::is_same_v<T, cmd::Step>) return {{"step", {{"ms", c.ms}}}};
        if constexpr (std::is_same_v<T, SimCommand>) {
          return std::visit(
              [](const auto& s) -> json {
                using S = std::decay_t<decltype(s)>;
                if constexpr (std::is_same_v<S, cmd::Key>) {
                  return {{"key", {{"k", std::string(1, s.k)}}}};
                }
                if constexpr (std::is_same_v<S, cmd::PressNext>) {
                  return {{"press_next", json::object()}};
                }
                if constexpr (std::is_same_v<S, cmd::PowerLoss>) {
                  return {{"power_loss", json::object()}};
                }
                if constexpr (std::is_same_v<S, cmd::SetTempC>) return {{"set_temp_c", {{"v", s.v}}}};
                if constexpr (std::is_same_v<S, cmd::SetBpm>) return {{"set_bpm", {{"v", s.v}}}};
                if constexpr (std::is_same_v<S, cmd::Finger>) return {{"finger", {{"on", s.on}}}};
                if constexpr (std::is_same_v<S, cmd::SetLink>) {
                  return {{"set_link",
                           {{"f_osc", s.link.f_osc_hz},
                            {"baud", s.link.target_baud},
                            {"u2x", s.link.u2x}}}};
                }
              },
              c);
        }
      },
      command);
  return j.dump();
}

bool Snapshot::same_state(const Snapshot& o) const {
  return paused == o.paused && booth_phase == o.booth_phase && booth_lcd == o.booth_lcd &&
         doctor_lcd == o.doctor_lcd && doctor_last_latency_ms == o.doctor_last_latency_ms &&
         doctor_last_frame == o.doctor_last_frame && queue_count == o.queue_count &&
         queue_capacity == o.queue_capacity && queue_next_serial == o.queue_next_serial &&
         queue_serials == o.queue_serials && link == o.link && link_status == o.link_status &&
         sensor == o.sensor;
}

Snapshot take_snapshot(const Simulation& sim, bool paused) {
  Snapshot s;
  s.t_ms = sim.now();
  s.paused = paused;
  s.booth_phase = sim.booth().phase;
  s.booth_lcd = sim.booth_lcd();
  s.doctor_lcd = sim.doctor().display;
  s.doctor_last_latency_ms = sim.doctor().last_latency_ms;
  s.doctor_last_frame = sim.doctor().last_frame;
  s.queue_count = sim.queue().size();
  s.queue_capacity = sim.queue().capacity();
  s.queue_next_serial = sim.queue().next_serial();
  s.queue_serials = sim.queue().serials();
  s.link = sim.link();
  s.link_status = link_status(sim.link());
  s.sensor = sim.truth();
  return s;
}

json to_json(const Snapshot& s) {
  json j;
  j["t_ms"] = s.t_ms;
  j["paused"] = s.paused;
  j["booth"] = {{"phase", to_string(s.booth_phase)}, {"lcd", rows(s.booth_lcd)}};
  j["doctor"] = {
      {"lcd", rows(s.doctor_lcd)},
      {"last_latency_ms",
       s.doctor_last_latency_ms ? json(*s.doctor_last_latency_ms) : json(nullptr)},
      {"last_frame", s.doctor_last_frame ? json(frame_hex(*s.doctor_last_frame)) : json(nullptr)},
  };
  j["queue"] = {{"count", s.queue_count},
                {"capacity", s.queue_capacity},
                {"next_serial", s.queue_next_serial},
                {"serials", s.queue_serials}};
  j["link"] = {{"f_osc", s.link.f_osc_hz},
               {"baud", s.link.target_baud},
               {"u2x", s.link.u2x},
               {"error_pct", s.link_status.reachable ? json(s.link_status.error_pct) : json(nullptr)},
               {"usable", s.link_status.usable}};
  j["sensor"] = {{"temp_c", s.sensor.temp_c},
                 {"bpm", s.sensor.bpm},
                 {"finger", s.sensor.finger_on}};
  return j;
}

GatewaySession::GatewaySession(const SimConfig& config, bool paused)
    : sim_(config), paused_(paused) {}

void GatewaySession::handle(const ClientCommand& command) {
  std::visit(
      [this](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SimCommand>) {
          sim_.apply(c);
        } else if constexpr (std::is_same_v<T, cmd::Pause>) {
          paused_ = true;
        } else if constexpr (std::is_same_v<T, cmd::Resume>) {
          paused_ = false;
        } else if constexpr (std::is_same_v<T, cmd::Step>) {
          sim_.advance_to(sim_.now() + c.ms);
        }
      },
      command);
}

void GatewaySession::elapse(std::uint64_t wall_ms) {
  if (!paused_ && wall_ms > 0) sim_.advance_to(sim_.now() + wall_ms);
}

std::uint16_t gateway_port_from_env(std::uint16_t fallback) {
  const char* env = std::getenv("CHAMBERLINE_PORT");
  if (env == nullptr || *env == '\0') return fallback;
  char* end = nullptr;
  const long value = std::strtol(env, &end, 10);
  if (*end != '\0' || value < 0 || value > 65535) return fallback;
  return static_cast<std::uint16_t>(value);
}

}  // namespace chamberline
