#include "fgd/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>

namespace fgd {

namespace {

std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5));
}

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// Reads any libpng-supported color type, expanded to 8-bit RGB rows.
std::vector<std::uint8_t> read_rgb8(const std::filesystem::path& path, int& w, int& h) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw PngError("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw PngError("libpng init failed");
    }
    std::vector<std::uint8_t> pixels;
    std::vector<png_bytep> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw PngError("failed to decode " + path.string());
    }
    png_init_io(png, fp.get());
    png_read_info(png, info);

    w = static_cast<int>(png_get_image_width(png, info));
    h = static_cast<int>(png_get_image_height(png, info));
    png_byte color = png_get_color_type(png, info);
    png_byte depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    pixels.assign(static_cast<std::size_t>(w) * h * 3, 0);
    rows.resize(h);
    for (int y = 0; y < h; ++y) rows[y] = pixels.data() + static_cast<std::size_t>(y) * w * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    return pixels;
}

void write_rows(const std::filesystem::path& path, int w, int h, int color_type,
                const std::vector<std::uint8_t>& pixels, int bytes_per_pixel) {
    std::filesystem::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw PngError("cannot write " + path.string());

    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw PngError("libpng init failed");
    }
    std::vector<png_bytep> rows(h);
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw PngError("failed to encode " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, w, h, 8, color_type, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < h; ++y)
        rows[y] = const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * w * bytes_per_pixel);
    png_write_image(png, rows.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

Frame read_frame_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    auto pixels = read_rgb8(path, w, h);
    std::vector<double> data(pixels.size());
    for (std::size_t i = 0; i < pixels.size(); ++i) data[i] = pixels[i] / 255.0;
    return Frame(w, h, std::move(data));
}

SoftMask read_mask_png(const std::filesystem::path& path) {
    int w = 0, h = 0;
    auto pixels = read_rgb8(path, w, h);
    std::vector<double> data(static_cast<std::size_t>(w) * h);
    for (std::size_t i = 0; i < data.size(); ++i) data[i] = pixels[i * 3] / 255.0;
    return SoftMask(w, h, std::move(data));
}

void write_png(const std::filesystem::path& path, const Frame& img) {
    std::vector<std::uint8_t> pixels(img.data().size());
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = to_byte(img.data()[i]);
    write_rows(path, img.width(), img.height(), PNG_COLOR_TYPE_RGB, pixels, 3);
}

void write_png(const std::filesystem::path& path, const SoftMask& mask) {
    std::vector<std::uint8_t> pixels(mask.data().size());
    for (std::size_t i = 0; i < pixels.size(); ++i) pixels[i] = to_byte(mask.data()[i]);
    write_rows(path, mask.width(), mask.height(), PNG_COLOR_TYPE_GRAY, pixels, 1);
}

std::vector<std::filesystem::path> list_pngs(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> out;
    if (!std::filesystem::is_directory(dir))
        throw std::invalid_argument("not a directory: " + dir.string());
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.is_regular_file() && e.path().extension() == ".png") out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

VideoShot load_shot(const std::filesystem::path& dir) {
    auto paths = list_pngs(dir);
    std::vector<Frame> frames;
    frames.reserve(paths.size());
    for (const auto& p : paths) frames.push_back(read_frame_png(p));
    return VideoShot(dir.filename().string(), std::move(frames));
}

}  // namespace fgd
