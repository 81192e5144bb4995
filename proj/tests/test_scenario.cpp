#include <doctest.h>

#include "chamberline/scenario.hpp"

using namespace chamberline;

TEST_CASE("single line") {
  const auto s = load_scenario("0 booth key k=*");
  REQUIRE(s);
  REQUIRE(s->events.size() == 1);
  CHECK(s->events[0].t_ms == 0);
  CHECK(s->events[0].command == SimCommand{cmd::Key{'*'}});
}

TEST_CASE("comments and blank lines are skipped") {
  const auto s = load_scenario("# header\n0 booth key k=*\n\n  \n10 doctor press  # trailing\n");
  REQUIRE(s);
  CHECK(s->events.size() == 2);

  const auto hash_key = load_scenario("5 booth key k=# # confirm");
  REQUIRE(hash_key);
  CHECK(hash_key->events[0].command == SimCommand{cmd::Key{'#'}});
}

TEST_CASE("every action") {
  const auto s = load_scenario(
      "0 sensor set_temp_c v=36.6\n"
      "0 sensor set_bpm v=72\n"
      "0 sensor finger v=off\n"
      "1 doctor press\n"
      "2 power loss\r\n");
  REQUIRE(s);
  REQUIRE(s->events.size() == 5);
  CHECK(s->events[0].command == SimCommand{cmd::SetTempC{36.6}});
  CHECK(s->events[1].command == SimCommand{cmd::SetBpm{72}});
  CHECK(s->events[2].command == SimCommand{cmd::Finger{false}});
  CHECK(s->events[3].command == SimCommand{cmd::PressNext{}});
  CHECK(s->events[4].command == SimCommand{cmd::PowerLoss{}});
  CHECK(load_scenario(format_scenario(*s))->events == s->events);
}

TEST_CASE("parse errors carry the line number") {
  const auto check_error = [](std::string_view text, int line) {
    const auto s = load_scenario(text);
    REQUIRE_FALSE(s);
    CHECK(s.error().line == line);
    CHECK_FALSE(s.error().reason.empty());
  };
  check_error("10 booth key k=1\n5 doctor press", 2);
  check_error("x booth key k=1", 1);
  check_error("# c\n0 booth key", 2);
  check_error("0 booth key k=E", 1);
  check_error("0 booth key k=12", 1);
  check_error("0 booth jump", 1);
  check_error("0 doctor press now", 1);
  check_error("0 sensor set_bpm v=fast", 1);
  check_error("0 sensor set_bpm v=300", 1);
  check_error("0 sensor set_temp_c v=-5", 1);
  check_error("0 sensor finger v=maybe", 1);
  check_error("0 sensor set_bpm 72", 1);
  check_error("0 booth", 1);
}

TEST_CASE("equal timestamps are allowed") {
  const auto s = load_scenario("5 booth key k=*\n5 booth key k=2\n");
  REQUIRE(s);
  CHECK(s->events.size() == 2);
}
