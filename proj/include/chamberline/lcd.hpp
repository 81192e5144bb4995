#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace chamberline {

inline constexpr std::size_t kLcdCols = 16;
inline constexpr std::size_t kLcdRows = 2;

/// Pads or truncates to exactly 16 printable ASCII characters.
[[nodiscard]] std::string lcd_row(std::string_view text);

/// Text content of a 16x2 character display.
struct LcdBuffer {
  std::array<std::string, kLcdRows> rows{std::string(kLcdCols, ' '), std::string(kLcdCols, ' ')};

  static LcdBuffer of(std::string_view top, std::string_view bottom) {
    return LcdBuffer{{lcd_row(top), lcd_row(bottom)}};
  }

  bool operator==(const LcdBuffer&) const = default;
};

}  // namespace chamberline
