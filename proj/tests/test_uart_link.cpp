#include <doctest.h>

#include <random>

#include "chamberline/uart_link.hpp"
#include "support/oracles.hpp"

using namespace chamberline;

namespace {

constexpr std::uint32_t kFoscs[] = {1'000'000, 8'000'000};
constexpr std::uint32_t kBauds[] = {2400, 4800, 9600, 19200, 38400, 57600, 115200};

PatientRecord random_record(std::mt19937& rng) {
  const auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  constexpr std::string_view kAlnum = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  PatientRecord r;
  r.serial = static_cast<std::uint32_t>(pick(1, 65535));
  const int len = pick(1, 8);
  for (int i = 0; i < len; ++i) r.name_code.push_back(kAlnum[pick(0, 35)]);
  r.age = pick(1, 120);
  for (int i = 0; i < 11; ++i) r.mobile.push_back(static_cast<char>('0' + pick(0, 9)));
  r.temp_deci_c = pick(0, 3) == 0 ? 0 : pick(200, 450);
  r.bpm = pick(0, 250);
  return r;
}

}  // namespace

TEST_CASE("UBRR values") {
  CHECK(*ubrr_for(8'000'000, 9600, false) == 51);
  CHECK(*ubrr_for(1'000'000, 38400, false) == 1);
  CHECK(*ubrr_for(8'000'000, 38400, true) == 25);
  CHECK(ubrr_for(1'000'000, 250'000, false).error() == UartError::BaudUnreachable);
  CHECK(ubrr_for(8'000'000, 0, false).error() == UartError::BaudUnreachable);
  // Slow baud on a fast clock saturates the 12-bit register.
  CHECK(*ubrr_for(20'000'000, 50, false) == kUbrrMax);
}

TEST_CASE("actual baud") {
  CHECK(actual_baud(8'000'000, 51, false) == doctest::Approx(9615.38).epsilon(1e-6));
  CHECK(actual_baud(1'000'000, 1, false) == doctest::Approx(31250.0));
  CHECK(actual_baud(8'000'000, 25, true) == doctest::Approx(38461.54).epsilon(1e-6));
}

TEST_CASE("baud error") {
  CHECK(*baud_error_pct(8'000'000, 9600, false) == doctest::Approx(0.16).epsilon(0.01));
  CHECK(*baud_error_pct(1'000'000, 38400, false) == doctest::Approx(-18.62).epsilon(0.001));
  CHECK(*baud_error_pct(8'000'000, 38400, true) == doctest::Approx(0.16).epsilon(0.01));
  CHECK(baud_error_pct(1'000'000, 250'000, false).error() == UartError::BaudUnreachable);
}

TEST_CASE("UBRR matches an exhaustive nearest-divisor search") {
  for (const auto f : kFoscs) {
    for (const auto b : kBauds) {
      for (const bool u2x : {false, true}) {
        CAPTURE(f);
        CAPTURE(b);
        CAPTURE(u2x);
        const auto want = oracle::ubrr_nearest_divisor(f, b, u2x);
        const auto got = ubrr_for(f, b, u2x);
        REQUIRE(got.has_value() == want.has_value());
        if (want) CHECK(*got == *want);
      }
    }
  }
}

TEST_CASE("chosen UBRR beats its neighbours") {
  for (const auto f : kFoscs) {
    for (const auto b : kBauds) {
      for (const bool u2x : {false, true}) {
        const auto ubrr = ubrr_for(f, b, u2x);
        if (!ubrr) continue;
        const double mine = std::abs(oracle::error_pct(f, b, u2x, *ubrr));
        for (const int n : {*ubrr - 1, *ubrr + 1}) {
          if (n < 0 || n > kUbrrMax) continue;
          CHECK(mine <= std::abs(oracle::error_pct(f, b, u2x, n)));
        }
      }
    }
  }
}

TEST_CASE("double speed never makes the error worse") {
  for (const auto f : kFoscs) {
    for (const auto b : kBauds) {
      const auto normal = baud_error_pct(f, b, false);
      const auto fast = baud_error_pct(f, b, true);
      if (!normal || !fast) continue;
      CAPTURE(f);
      CAPTURE(b);
      CHECK(std::abs(*fast) <= std::abs(*normal) + 1e-12);
    }
  }
}

TEST_CASE("CRC-8 with polynomial 0x07") {
  const std::string check = "123456789";
  const std::vector<std::uint8_t> bytes(check.begin(), check.end());
  CHECK(crc8_atm(bytes) == 0xF4);
  CHECK(crc8_atm({}) == 0x00);

  std::mt19937 rng(5);
  for (int i = 0; i < 200; ++i) {
    std::vector<std::uint8_t> msg(rng() % 40);
    for (auto& b : msg) b = static_cast<std::uint8_t>(rng());
    REQUIRE(crc8_atm(msg) == oracle::crc8_long_division(msg));
  }
}

TEST_CASE("frame layout") {
  const PatientRecord r{1, "A", 1, "00000000000", 0, 0};
  const Frame f = encode_frame(r);
  CHECK(f.size() == 30);
  CHECK(f[0] == 0x7E);
  CHECK(f[1] == 0x01);
  CHECK(f[2] == 26);
  CHECK(f[3] == 0x00);
  CHECK(f[4] == 0x01);
  CHECK(f[5] == 'A');
  CHECK(f[6] == ' ');
  CHECK(f[13] == 1);
  CHECK(f[14] == '0');
  CHECK(f[27] == 0);  // bpm
  CHECK(f[28] == 0);  // flags
  CHECK(f[29] == oracle::crc8_long_division({f.begin() + 1, f.begin() + 29}));

  const PatientRecord full{0x1234, "ZZTOP", 45, "01712345678", 366, 72};
  const Frame g = encode_frame(full);
  CHECK(g[3] == 0x12);
  CHECK(g[4] == 0x34);
  CHECK(g[25] == 0x01);  // 366 = 0x016E
  CHECK(g[26] == 0x6E);
  CHECK(g[27] == 72);
  CHECK(g[28] == 0x03);
  CHECK(frame_hex(g).substr(0, 10) == "7E011A1234");
}

TEST_CASE("frame round trip over generated records") {
  std::mt19937 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    const PatientRecord r = random_record(rng);
    const auto back = decode_frame(encode_frame(r));
    REQUIRE(back);
    REQUIRE(*back == r);
  }
  PatientRecord a{1, "A", 20, "01712345678", 366, 72};
  PatientRecord b = a;
  b.age = 21;
  CHECK(encode_frame(a) != encode_frame(b));
}

TEST_CASE("decode failures are reported in check order") {
  const Frame good = encode_frame({7, "AB", 45, "01712345678", 366, 72});

  SUBCASE("every single-bit flip is caught") {
    for (std::size_t bit = 0; bit < good.size() * 8; ++bit) {
      Frame bad = good;
      bad[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
      const auto r = decode_frame(bad);
      REQUIRE_FALSE(r);
      const std::size_t byte = bit / 8;
      if (byte == 0) {
        CHECK(r.error() == FrameError::BadSof);
      } else if (byte == 1) {
        CHECK(r.error() == FrameError::BadVersion);
      } else if (byte == 2) {
        CHECK(r.error() == FrameError::BadLength);
      } else {
        CHECK(r.error() == FrameError::BadCrc);
      }
    }
  }
  SUBCASE("truncated") {
    CHECK(decode_frame(std::span(good).first(29)).error() == FrameError::BadLength);
    CHECK(decode_frame(std::span(good).first(0)).error() == FrameError::BadSof);
  }
  SUBCASE("valid CRC over an out-of-range field") {
    Frame bad = good;
    bad[13] = 200;  // age
    bad[29] = crc8_atm(std::span(bad).subspan(1, 28));
    CHECK(decode_frame(bad).error() == FrameError::BadField);
  }
  SUBCASE("flags must agree with the vitals") {
    Frame bad = good;
    bad[28] = 0x01;
    bad[29] = crc8_atm(std::span(bad).subspan(1, 28));
    CHECK(decode_frame(bad).error() == FrameError::BadField);
  }
}

TEST_CASE("channel") {
  const Frame f = encode_frame({1, "A", 30, "01712345678", 366, 72});

  const auto ok = channel_transmit(f, {8'000'000, 9600, false});
  REQUIRE(ok);
  CHECK(ok->frame == f);
  CHECK(ok->tx_time_ms == doctest::Approx(31.2).epsilon(1e-6));

  CHECK(channel_transmit(f, {1'000'000, 38400, false}).error() == LinkError::LinkUnusable);
  CHECK(channel_transmit(f, {1'000'000, 250'000, false}).error() == LinkError::LinkUnusable);

  // 8 MHz / 57600 with U2X is off by +2.12 %, just outside the window.
  CHECK_FALSE(link_status({8'000'000, 57600, true}).usable);
  // 8 MHz / 2400 with U2X is -0.08 %.
  CHECK(link_status({8'000'000, 2400, true}).usable);
}

TEST_CASE("usability threshold is inclusive") {
  // 1 MHz, divisor 16, ubrr 0 gives 62500 baud; target 61275 makes the
  // error 100 * 1225 / 61275 = 1.9992 %; 61274 gives 2.0008 %.
  CHECK(link_status({1'000'000, 61275, false}).usable);
  CHECK_FALSE(link_status({1'000'000, 61274, false}).usable);
  // 1.02 MHz / 16 = 63750 baud, exactly 2 % above 62500.
  const LinkStatus edge = link_status({1'020'000, 62'500, false});
  CHECK(edge.error_pct == 2.0);
  CHECK(edge.usable);
}
