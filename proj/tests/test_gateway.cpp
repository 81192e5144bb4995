#include <doctest.h>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <thread>

#include "chamberline/gateway.hpp"
#include "support/script.hpp"

using namespace chamberline;
using nlohmann::json;

namespace {

ClientCommand parse_ok(std::string_view line) {
  auto c = parse_client_command(line);
  REQUIRE_MESSAGE(c, line);
  return *c;
}

/// Blocking line-oriented TCP client with a receive deadline.
class LineClient {
 public:
  explicit LineClient(std::uint16_t port) {
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    REQUIRE(::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  }
  ~LineClient() { ::close(fd_); }

  void send(const std::string& line) {
    const std::string data = line + "\n";
    REQUIRE(::send(fd_, data.data(), data.size(), MSG_NOSIGNAL) ==
            static_cast<ssize_t>(data.size()));
  }

  std::optional<json> next(std::chrono::milliseconds timeout = std::chrono::seconds(5)) {
    const auto deadline = std::chrono::steady_clock::now() + timeout;
    for (;;) {
      if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
        const auto line = buffer_.substr(0, nl);
        buffer_.erase(0, nl + 1);
        return json::parse(line);
      }
      const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(
          deadline - std::chrono::steady_clock::now());
      if (left.count() <= 0) return std::nullopt;
      pollfd p{fd_, POLLIN, 0};
      if (::poll(&p, 1, static_cast<int>(left.count())) <= 0) continue;
      char chunk[4096];
      const auto n = ::recv(fd_, chunk, sizeof chunk, 0);
      if (n <= 0) return std::nullopt;
      buffer_.append(chunk, static_cast<std::size_t>(n));
    }
  }

  /// Skips messages until pred holds.
  template <typename Pred>
  std::optional<json> until(Pred pred) {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (std::chrono::steady_clock::now() < deadline) {
      auto m = next();
      if (!m) break;
      if (pred(*m)) return m;
    }
    return std::nullopt;
  }

 private:
  int fd_ = -1;
  std::string buffer_;
};

}  // namespace

TEST_CASE("parse every command") {
  CHECK(parse_ok(R"({"key":{"k":"*"}})") == ClientCommand{SimCommand{cmd::Key{'*'}}});
  CHECK(parse_ok(R"({"press_next":{}})") == ClientCommand{SimCommand{cmd::PressNext{}}});
  CHECK(parse_ok(R"({"power_loss":{}})") == ClientCommand{SimCommand{cmd::PowerLoss{}}});
  CHECK(parse_ok(R"({"set_temp_c":{"v":37.5}})") == ClientCommand{SimCommand{cmd::SetTempC{37.5}}});
  CHECK(parse_ok(R"({"set_bpm":{"v":80}})") == ClientCommand{SimCommand{cmd::SetBpm{80}}});
  CHECK(parse_ok(R"({"finger":{"on":false}})") == ClientCommand{SimCommand{cmd::Finger{false}}});
  CHECK(parse_ok(R"({"set_link":{"f_osc":1000000,"baud":38400,"u2x":true}})") ==
        ClientCommand{SimCommand{cmd::SetLink{{1'000'000, 38400, true}}}});
  CHECK(parse_ok(R"({"pause":{}})") == ClientCommand{cmd::Pause{}});
  CHECK(parse_ok(R"({"resume":{}})") == ClientCommand{cmd::Resume{}});
  CHECK(parse_ok(R"({"step":{"ms":250}})") == ClientCommand{cmd::Step{250}});
}

TEST_CASE("malformed commands are rejected") {
  for (const char* line : {
           "", "not json", "[]", "{}", R"({"press_next":{},"pause":{}})", R"({"jump":{}})",
           R"({"key":{}})", R"({"key":{"k":"**"}})", R"({"key":{"k":"E"}})", R"({"key":"*"})",
           R"({"set_bpm":{"v":"72"}})", R"({"set_bpm":{"v":400}})", R"({"set_temp_c":{"v":-1}})",
           R"({"finger":{"on":1}})", R"({"step":{"ms":-5}})", R"({"step":{"ms":1.5}})",
           R"({"set_link":{"f_osc":8000000,"baud":9600}})",
           R"({"set_link":{"f_osc":8000000,"baud":0,"u2x":false}})"}) {
    const auto c = parse_client_command(line);
    CHECK_MESSAGE(!c, line);
    if (!c) CHECK_FALSE(c.error().empty());
  }
}

TEST_CASE("encode and parse round trip") {
  const std::vector<ClientCommand> all{
      SimCommand{cmd::Key{'#'}},         SimCommand{cmd::PressNext{}},
      SimCommand{cmd::PowerLoss{}},      SimCommand{cmd::SetTempC{38.25}},
      SimCommand{cmd::SetBpm{120}},      SimCommand{cmd::Finger{true}},
      SimCommand{cmd::SetLink{{8'000'000, 19200, true}}},
      cmd::Pause{},                      cmd::Resume{},
      cmd::Step{1000}};
  for (const auto& c : all) {
    CHECK(parse_ok(encode_client_command(c)) == c);
  }
}

TEST_CASE("session drives the booth") {
  GatewaySession session;
  session.handle(SimCommand{cmd::Key{'*'}});
  CHECK(session.snapshot().booth_phase == BoothPhase::EnterName);
  const auto j = to_json(session.snapshot());
  CHECK(j["booth"]["phase"] == "EnterName");
  CHECK(j["booth"]["lcd"][0] == "Enter Name:     ");
  CHECK(j["queue"]["capacity"] == 64);
  CHECK(j["doctor"]["last_frame"].is_null());
}

TEST_CASE("session link fault") {
  GatewaySession session;
  session.handle(SimCommand{cmd::SetLink{{1'000'000, 38400, false}}});
  session.handle(SimCommand{cmd::PressNext{}});
  const auto j = to_json(session.snapshot());
  CHECK(j["link"]["usable"] == false);
  CHECK(j["doctor"]["lcd"][0] == "LINK ERROR      ");
}

TEST_CASE("pause holds the clock and step moves it") {
  GatewaySession session({}, true);
  session.elapse(500);
  CHECK(session.snapshot().t_ms == 0);
  session.handle(cmd::Step{100});
  CHECK(session.snapshot().t_ms == 100);
  session.handle(cmd::Resume{});
  session.elapse(50);
  CHECK(session.snapshot().t_ms == 150);
  session.handle(cmd::Pause{});
  CHECK(session.snapshot().paused);
}

TEST_CASE("session replays a scenario exactly like a batch run") {
  script::Writer w;
  for (int i = 1; i <= 3; ++i) w.register_patient(script::numbered_patient(i));
  w.press();
  w.power_loss();
  w.register_patient(script::numbered_patient(4));
  w.press();
  w.press();
  const auto scenario = load_scenario(w.text());
  REQUIRE(scenario);

  const auto batch = run(*scenario);

  GatewaySession session({}, true);
  for (const auto& e : scenario->events) {
    session.handle(cmd::Step{e.t_ms - session.simulation().now()});
    session.handle(e.command);
  }
  // Drain pending work the same way run() does.
  session.handle(cmd::Step{60'000});
  CHECK(session.simulation().report() == batch.report);
  CHECK(session.simulation().log() == batch.log);
}

TEST_CASE("port from environment") {
  ::setenv("CHAMBERLINE_PORT", "9123", 1);
  CHECK(gateway_port_from_env(7878) == 9123);
  ::setenv("CHAMBERLINE_PORT", "nope", 1);
  CHECK(gateway_port_from_env(7878) == 7878);
  ::setenv("CHAMBERLINE_PORT", "70000", 1);
  CHECK(gateway_port_from_env(7878) == 7878);
  ::unsetenv("CHAMBERLINE_PORT");
  CHECK(gateway_port_from_env(7878) == 7878);
}

TEST_CASE("live server") {
  GatewayServer server({}, 0, true);
  std::thread loop([&] { server.run(); });

  {
    LineClient a(server.port());
    const auto hello = a.next();
    REQUIRE(hello);
    CHECK((*hello)["t_ms"] == 0);
    CHECK((*hello)["paused"] == true);

    a.send(R"({"key":{"k":"*"}})");
    const auto entered =
        a.until([](const json& m) { return m.contains("booth") && m["booth"]["phase"] == "EnterName"; });
    REQUIRE(entered);

    a.send(R"({"step":{"ms":100}})");
    const auto stepped = a.until([](const json& m) { return m.value("t_ms", 0) == 100; });
    REQUIRE(stepped);

    a.send(R"({"press_next":{}})");
    a.send("garbage");
    const auto err = a.until([](const json& m) { return m.contains("error"); });
    REQUIRE(err);
    CHECK((*err)["line"] == 4);

    // A second client sees the same state and gets its own errors only.
    LineClient b(server.port());
    const auto b_hello = b.next();
    REQUIRE(b_hello);
    CHECK((*b_hello)["doctor"]["lcd"][0] == "No Patients     ");
    CHECK((*b_hello)["t_ms"] == 100);

    b.send(R"({"set_bpm":{"v":95}})");
    const auto both = a.until([](const json& m) { return m.contains("sensor") && m["sensor"]["bpm"] == 95; });
    REQUIRE(both);
  }

  server.stop();
  loop.join();
}
