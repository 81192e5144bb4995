#include "chamberline/lcd.hpp"

namespace chamberline {

std::string lcd_row(std::string_view text) {
  std::string row(kLcdCols, ' ');
  for (std::size_t i = 0; i < kLcdCols && i < text.size(); ++i) {
    const char c = text[i];
    row[i] = (c >= 0x20 && c <= 0x7E) ? c : '?';
  }
  return row;
}

}  // namespace chamberline
