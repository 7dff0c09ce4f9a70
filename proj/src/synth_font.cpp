#include "synth_font.hpp"

#include "gelmine/util.hpp"

#include <array>
#include <map>

namespace gelmine::synthfont {

namespace {

// Classic 5x7 dot-matrix glyphs; bit 4 is the leftmost column.
using Glyph = std::array<std::uint8_t, 7>;

const std::map<char32_t, Glyph>& glyph_table() {
    static const std::map<char32_t, Glyph> table = {
        {U'A', {0b01110, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
        {U'B', {0b11110, 0b10001, 0b10001, 0b11110, 0b10001, 0b10001, 0b11110}},
        {U'C', {0b01110, 0b10001, 0b10000, 0b10000, 0b10000, 0b10001, 0b01110}},
        {U'D', {0b11110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b11110}},
        {U'E', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b11111}},
        {U'F', {0b11111, 0b10000, 0b10000, 0b11110, 0b10000, 0b10000, 0b10000}},
        {U'G', {0b01110, 0b10001, 0b10000, 0b10111, 0b10001, 0b10001, 0b01110}},
        {U'H', {0b10001, 0b10001, 0b10001, 0b11111, 0b10001, 0b10001, 0b10001}},
        {U'I', {0b01110, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
        {U'J', {0b00111, 0b00010, 0b00010, 0b00010, 0b00010, 0b10010, 0b01100}},
        {U'K', {0b10001, 0b10010, 0b10100, 0b11000, 0b10100, 0b10010, 0b10001}},
        {U'L', {0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b10000, 0b11111}},
        {U'M', {0b10001, 0b11011, 0b10101, 0b10101, 0b10001, 0b10001, 0b10001}},
        {U'N', {0b10001, 0b11001, 0b10101, 0b10011, 0b10001, 0b10001, 0b10001}},
        {U'O', {0b01110, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
        {U'P', {0b11110, 0b10001, 0b10001, 0b11110, 0b10000, 0b10000, 0b10000}},
        {U'Q', {0b01110, 0b10001, 0b10001, 0b10001, 0b10101, 0b10010, 0b01101}},
        {U'R', {0b11110, 0b10001, 0b10001, 0b11110, 0b10100, 0b10010, 0b10001}},
        {U'S', {0b01111, 0b10000, 0b10000, 0b01110, 0b00001, 0b00001, 0b11110}},
        {U'T', {0b11111, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100}},
        {U'U', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01110}},
        {U'V', {0b10001, 0b10001, 0b10001, 0b10001, 0b10001, 0b01010, 0b00100}},
        {U'W', {0b10001, 0b10001, 0b10001, 0b10101, 0b10101, 0b11011, 0b10001}},
        {U'X', {0b10001, 0b10001, 0b01010, 0b00100, 0b01010, 0b10001, 0b10001}},
        {U'Y', {0b10001, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100, 0b00100}},
        {U'Z', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b10000, 0b11111}},
        {U'0', {0b01110, 0b10001, 0b10011, 0b10101, 0b11001, 0b10001, 0b01110}},
        {U'1', {0b00100, 0b01100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01110}},
        {U'2', {0b01110, 0b10001, 0b00001, 0b00010, 0b00100, 0b01000, 0b11111}},
        {U'3', {0b01110, 0b10001, 0b00001, 0b00110, 0b00001, 0b10001, 0b01110}},
        {U'4', {0b00010, 0b00110, 0b01010, 0b10010, 0b11111, 0b00010, 0b00010}},
        {U'5', {0b11111, 0b10000, 0b11110, 0b00001, 0b00001, 0b10001, 0b01110}},
        {U'6', {0b01110, 0b10000, 0b10000, 0b11110, 0b10001, 0b10001, 0b01110}},
        {U'7', {0b11111, 0b00001, 0b00010, 0b00100, 0b01000, 0b01000, 0b01000}},
        {U'8', {0b01110, 0b10001, 0b10001, 0b01110, 0b10001, 0b10001, 0b01110}},
        {U'9', {0b01110, 0b10001, 0b10001, 0b01111, 0b00001, 0b00001, 0b01110}},
        {U'+', {0b00000, 0b00100, 0b00100, 0b11111, 0b00100, 0b00100, 0b00000}},
        {U'-', {0b00000, 0b00000, 0b00000, 0b11111, 0b00000, 0b00000, 0b00000}},
        {U'.', {0b00000, 0b00000, 0b00000, 0b00000, 0b00000, 0b01100, 0b01100}},
        {U'(', {0b00010, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b00010}},
        {U')', {0b01000, 0b00100, 0b00100, 0b00100, 0b00100, 0b00100, 0b01000}},
        {U'/', {0b00001, 0b00010, 0b00010, 0b00100, 0b01000, 0b01000, 0b10000}},
        // Greek letters that show up in gel labels.
        {U'α', {0b00000, 0b00000, 0b01101, 0b10010, 0b10010, 0b10010, 0b01101}}, // alpha
        {U'β', {0b01100, 0b10010, 0b10010, 0b11100, 0b10010, 0b10010, 0b10110}}, // beta
        {U'γ', {0b00000, 0b00000, 0b10001, 0b01010, 0b00100, 0b00100, 0b00100}}, // gamma
        {U'σ', {0b00000, 0b00000, 0b01111, 0b10010, 0b10010, 0b10010, 0b01100}}, // sigma
    };
    return table;
}

const Glyph kUnknown = {0b11111, 0b11111, 0b11111, 0b11111, 0b11111, 0b11111, 0b11111};

const Glyph* find_glyph(char32_t cp) {
    if (cp == U' ') return nullptr;
    if (cp >= U'a' && cp <= U'z') cp = cp - U'a' + U'A';
    const auto it = glyph_table().find(cp);
    return it != glyph_table().end() ? &it->second : &kUnknown;
}

} // namespace

int text_width(const std::string& utf8, int scale) {
    const std::size_t n = utf8_decode(utf8).size();
    if (n == 0) return 0;
    return static_cast<int>(n) * kAdvance * scale - scale;
}

BoundingBox draw_text(Image& img, int x, int y, const std::string& utf8, int scale,
                      std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    int cx = x;
    for (char32_t cp : utf8_decode(utf8)) {
        const Glyph* glyph = find_glyph(cp);
        if (glyph) {
            for (int gy = 0; gy < kGlyphHeight; ++gy) {
                for (int gx = 0; gx < kGlyphWidth; ++gx) {
                    if (!(((*glyph)[static_cast<std::size_t>(gy)] >> (kGlyphWidth - 1 - gx)) & 1)) {
                        continue;
                    }
                    for (int sy = 0; sy < scale; ++sy) {
                        for (int sx = 0; sx < scale; ++sx) {
                            const int px = cx + gx * scale + sx;
                            const int py = y + gy * scale + sy;
                            if (px >= 0 && py >= 0 && px < img.width && py < img.height) {
                                img.set(px, py, r, g, b);
                            }
                        }
                    }
                }
            }
        }
        cx += kAdvance * scale;
    }
    return BoundingBox{x, y, x + text_width(utf8, scale), y + text_height(scale)};
}

} // namespace gelmine::synthfont
