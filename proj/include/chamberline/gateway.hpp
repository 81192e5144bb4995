#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "chamberline/result.hpp"
#include "chamberline/simulation.hpp"

namespace chamberline {

inline constexpr std::uint16_t kDefaultGatewayPort = 7878;
inline constexpr std::chrono::milliseconds kHeartbeat{250};

namespace cmd {
struct Pause {
  bool operator==(const Pause&) const = default;
};
struct Resume {
  bool operator==(const Resume&) const = default;
};
struct Step {
  std::uint64_t ms = 0;
  bool operator==(const Step&) const = default;
};
}  // namespace cmd

using ClientCommand = std::variant<SimCommand, cmd::Pause, cmd::Resume, cmd::Step>;

/// Parses one newline-delimited message, e.g. {"key":{"k":"*"}} or
/// {"set_link":{"f_osc":8000000,"baud":9600,"u2x":false}}.
[[nodiscard]] Result<ClientCommand, std::string> parse_client_command(std::string_view line);
[[nodiscard]] std::string encode_client_command(const ClientCommand& command);

/// Immutable copy of everything a client may render.
struct Snapshot {
  std::uint64_t t_ms = 0;
  bool paused = false;
  BoothPhase booth_phase = BoothPhase::Idle;
  LcdBuffer booth_lcd;
  LcdBuffer doctor_lcd;
  std::optional<std::uint64_t> doctor_last_latency_ms;
  std::optional<Frame> doctor_last_frame;
  std::size_t queue_count = 0;
  std::size_t queue_capacity = 0;
  std::uint32_t queue_next_serial = 1;
  std::vector<std::uint32_t> queue_serials;
  UartConfig link;
  LinkStatus link_status;
  SensorTruth sensor;

  /// Equality ignoring the clock; used to detect state changes.
  [[nodiscard]] bool same_state(const Snapshot& other) const;
};

[[nodiscard]] Snapshot take_snapshot(const Simulation& sim, bool paused);
[[nodiscard]] nlohmann::json to_json(const Snapshot& snapshot);

/// Single-threaded heart of the gateway. All commands and clock movement go
/// through here, in order, so a session replays exactly like a batch run.
class GatewaySession {
 public:
  explicit GatewaySession(const SimConfig& config = {}, bool paused = false);

  void handle(const ClientCommand& command);
  /// Moves virtual time forward with the wall clock unless paused.
  void elapse(std::uint64_t wall_ms);

  [[nodiscard]] bool paused() const noexcept { return paused_; }
  [[nodiscard]] const Simulation& simulation() const noexcept { return sim_; }
  [[nodiscard]] Snapshot snapshot() const { return take_snapshot(sim_, paused_); }

 private:
  Simulation sim_;
  bool paused_ = false;
};

/// Newline-delimited JSON over plain TCP.
///
/// Reader threads only queue raw lines; the run() loop owns the session,
/// applies lines in arrival order and is the only writer to sockets.
/// Every client receives every snapshot; errors go only to the sender.
class GatewayServer {
 public:
  GatewayServer(const SimConfig& config, std::uint16_t port, bool start_paused = false);
  ~GatewayServer();

  GatewayServer(const GatewayServer&) = delete;
  GatewayServer& operator=(const GatewayServer&) = delete;

  /// Bound port (useful when constructed with port 0).
  [[nodiscard]] std::uint16_t port() const noexcept { return port_; }

  /// Blocks until stop() is called.
  void run();
  void stop();

 private:
  struct Client;
  struct Inbound {
    Client* client = nullptr;
    int line = 0;
    std::string text;
  };

  void accept_loop();
  void read_loop(Client* client);
  void broadcast(const std::string& line);

  GatewaySession session_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> stopping_{false};

  std::mutex mutex_;  // guards clients_ and inbox_
  std::vector<std::shared_ptr<Client>> clients_;
  std::vector<Inbound> inbox_;
};

/// Port from CHAMBERLINE_PORT when set and valid, otherwise fallback.
[[nodiscard]] std::uint16_t gateway_port_from_env(std::uint16_t fallback);

}  // namespace chamberline
