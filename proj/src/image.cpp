#include "gelmine/image.hpp"

#include "gelmine/util.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>

namespace gelmine {

Image Image::filled(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    Image img;
    img.width = w;
    img.height = h;
    img.rgb.resize(3 * static_cast<std::size_t>(w) * static_cast<std::size_t>(h));
    for (std::size_t i = 0; i < img.rgb.size(); i += 3) {
        img.rgb[i] = r;
        img.rgb[i + 1] = g;
        img.rgb[i + 2] = b;
    }
    return img;
}

std::uint8_t gray_of(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    const double y = 0.299 * r + 0.587 * g + 0.114 * b;
    return static_cast<std::uint8_t>(std::lround(y));
}

GrayImage to_gray(const Image& img) {
    GrayImage gray;
    gray.width = img.width;
    gray.height = img.height;
    gray.value.resize(static_cast<std::size_t>(img.width) * img.height);
    const std::uint8_t* p = img.rgb.data();
    for (std::size_t i = 0; i < gray.value.size(); ++i, p += 3) {
        gray.value[i] = gray_of(p[0], p[1], p[2]);
    }
    return gray;
}

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

} // namespace

Image load_png(const std::filesystem::path& path) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IoError("cannot open image: " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    if (!png) throw IoError("libpng init failure");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw IoError("libpng init failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("PNG decode failure: " + path.string());
    }
    png_init_io(png, fp.get());
    // Normalize every color type / bit depth down to 8-bit RGB.
    png_read_png(png, info,
                 PNG_TRANSFORM_STRIP_16 | PNG_TRANSFORM_STRIP_ALPHA | PNG_TRANSFORM_PACKING |
                     PNG_TRANSFORM_EXPAND | PNG_TRANSFORM_GRAY_TO_RGB,
                 nullptr);

    Image img;
    img.width = static_cast<int>(png_get_image_width(png, info));
    img.height = static_cast<int>(png_get_image_height(png, info));
    const png_bytepp rows = png_get_rows(png, info);
    const std::size_t rowbytes = png_get_rowbytes(png, info);
    if (rowbytes != 3 * static_cast<std::size_t>(img.width)) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IoError("unexpected PNG channel layout: " + path.string());
    }
    img.rgb.resize(3 * static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
        std::memcpy(&img.rgb[3 * static_cast<std::size_t>(y) * img.width], rows[y], rowbytes);
    }
    png_destroy_read_struct(&png, &info, nullptr);
    return img;
}

void save_png(const std::filesystem::path& path, const Image& img) {
    if (!img.size_valid()) throw ValidationError("image buffer does not match its dimensions");
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        FilePtr fp(std::fopen(tmp.string().c_str(), "wb"));
        if (!fp) throw IoError("cannot open image for writing: " + tmp.string());

        png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
        if (!png) throw IoError("libpng init failure");
        png_infop info = png_create_info_struct(png);
        if (!info) {
            png_destroy_write_struct(&png, nullptr);
            throw IoError("libpng init failure");
        }
        std::vector<png_bytep> rows(static_cast<std::size_t>(img.height));
        if (setjmp(png_jmpbuf(png))) {
            png_destroy_write_struct(&png, &info);
            throw IoError("PNG encode failure: " + tmp.string());
        }
        png_init_io(png, fp.get());
        png_set_IHDR(png, info, static_cast<png_uint_32>(img.width),
                     static_cast<png_uint_32>(img.height), 8, PNG_COLOR_TYPE_RGB,
                     PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
        for (int y = 0; y < img.height; ++y) {
            rows[static_cast<std::size_t>(y)] =
                const_cast<png_bytep>(&img.rgb[3 * static_cast<std::size_t>(y) * img.width]);
        }
        png_set_rows(png, info, rows.data());
        png_write_png(png, info, PNG_TRANSFORM_IDENTITY, nullptr);
        png_destroy_write_struct(&png, &info);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

namespace {

int ppm_next_int(std::istream& in, const std::filesystem::path& path) {
    // PPM headers allow '#' comments between tokens.
    for (;;) {
        int c = in.peek();
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    int v = 0;
    if (!(in >> v)) throw IoError("malformed PPM header: " + path.string());
    return v;
}

} // namespace

Image load_ppm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open image: " + path.string());
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (magic[0] != 'P' || magic[1] != '6') {
        throw IoError("not a binary PPM (P6): " + path.string());
    }
    Image img;
    img.width = ppm_next_int(in, path);
    img.height = ppm_next_int(in, path);
    const int maxval = ppm_next_int(in, path);
    if (img.width <= 0 || img.height <= 0 || maxval != 255) {
        throw IoError("unsupported PPM header: " + path.string());
    }
    in.get(); // single whitespace after maxval
    img.rgb.resize(3 * static_cast<std::size_t>(img.width) * img.height);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size())) {
        throw IoError("truncated PPM payload: " + path.string());
    }
    return img;
}

void save_ppm(const std::filesystem::path& path, const Image& img) {
    if (!img.size_valid()) throw ValidationError("image buffer does not match its dimensions");
    std::ostringstream out;
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    atomic_write_file(path, out.str());
}

Image load_image(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    if (ext == ".png") return load_png(path);
    if (ext == ".ppm") return load_ppm(path);
    throw IoError("unsupported image format: " + path.string());
}

void save_image(const std::filesystem::path& path, const Image& img) {
    const std::string ext = path.extension().string();
    if (ext == ".png") return save_png(path, img);
    if (ext == ".ppm") return save_ppm(path, img);
    throw IoError("unsupported image format: " + path.string());
}

} // namespace gelmine
