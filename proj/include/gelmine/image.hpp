#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

namespace gelmine {

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> rgb;

    static Image filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b);

    std::uint8_t* px(int x, int y) { return &rgb[3 * (static_cast<std::size_t>(y) * width + x)]; }
    const std::uint8_t* px(int x, int y) const {
        return &rgb[3 * (static_cast<std::size_t>(y) * width + x)];
    }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        std::uint8_t* p = px(x, y);
        p[0] = r;
        p[1] = g;
        p[2] = b;
    }
    bool size_valid() const {
        return width > 0 && height > 0 &&
               rgb.size() == 3 * static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> value;

    std::uint8_t at(int x, int y) const {
        return value[static_cast<std::size_t>(y) * width + x];
    }
};

/// Rec. 601 luma (0.299 R + 0.587 G + 0.114 B), rounded to nearest.
std::uint8_t gray_of(std::uint8_t r, std::uint8_t g, std::uint8_t b);
GrayImage to_gray(const Image& img);

Image load_png(const std::filesystem::path& path);
void save_png(const std::filesystem::path& path, const Image& img);

/// Binary PPM (P6), maxval 255.
Image load_ppm(const std::filesystem::path& path);
void save_ppm(const std::filesystem::path& path, const Image& img);

/// Dispatches on the file extension (.png, .ppm).
Image load_image(const std::filesystem::path& path);
void save_image(const std::filesystem::path& path, const Image& img);

} // namespace gelmine
