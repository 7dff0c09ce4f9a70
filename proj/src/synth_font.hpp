#pragma once

#include "gelmine/geometry.hpp"
#include "gelmine/image.hpp"

#include <string>

namespace gelmine::synthfont {

inline constexpr int kGlyphWidth = 5;
inline constexpr int kGlyphHeight = 7;
inline constexpr int kAdvance = 6; // glyph plus one column of spacing

/// Rendered width in pixels of a UTF-8 string at the given scale.
int text_width(const std::string& utf8, int scale);

inline int text_height(int scale) { return kGlyphHeight * scale; }

/// Draws the string with its top-left at (x, y) and returns the tight bbox.
/// Lowercase ASCII renders with the uppercase glyphs; unknown code points
/// render as a filled block.
BoundingBox draw_text(Image& img, int x, int y, const std::string& utf8, int scale,
                      std::uint8_t r, std::uint8_t g, std::uint8_t b);

} // namespace gelmine::synthfont
