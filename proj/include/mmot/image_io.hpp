#pragma once

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "mmot/grid.hpp"

// Grayscale image ingest/export. Row 0 of an image maps to iy = 0.

namespace mmot {

struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major intensities, >= 0
};

namespace detail {

inline int pgm_next_token(std::istream& in, std::string& tok) {
    tok.clear();
    int c;
    while ((c = in.get()) != EOF) {
        if (c == '#') {  // comment runs to end of line
            while ((c = in.get()) != EOF && c != '\n') {}
            continue;
        }
        if (!std::isspace(c)) break;
    }
    if (c == EOF) return 0;
    do {
        tok.push_back(static_cast<char>(c));
    } while ((c = in.get()) != EOF && !std::isspace(c));
    return 1;
}

}  // namespace detail

/// Reads a binary (P5) PGM file with 8- or 16-bit samples.
inline GrayImage read_pgm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string tok;
    if (!detail::pgm_next_token(in, tok) || tok != "P5") throw IoError(path + ": not a binary PGM (P5)");
    long w = 0, h = 0, maxval = 0;
    if (!detail::pgm_next_token(in, tok)) throw IoError(path + ": truncated header");
    w = std::stol(tok);
    if (!detail::pgm_next_token(in, tok)) throw IoError(path + ": truncated header");
    h = std::stol(tok);
    if (!detail::pgm_next_token(in, tok)) throw IoError(path + ": truncated header");
    maxval = std::stol(tok);
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) throw IoError(path + ": bad PGM header");

    GrayImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    std::size_t n = img.pixels.size();
    if (maxval < 256) {
        std::vector<unsigned char> buf(n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in.gcount()) != n) throw IoError(path + ": truncated pixel data");
        for (std::size_t i = 0; i < n; ++i) img.pixels[i] = buf[i];
    } else {
        std::vector<unsigned char> buf(2 * n);
        in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(2 * n));
        if (static_cast<std::size_t>(in.gcount()) != 2 * n) throw IoError(path + ": truncated pixel data");
        for (std::size_t i = 0; i < n; ++i)
            img.pixels[i] = 256.0 * buf[2 * i] + buf[2 * i + 1];  // PGM 16-bit is big-endian
    }
    return img;
}

/// Writes an 8-bit binary PGM, rescaling so the maximum value maps to 255.
inline void write_pgm(const std::string& path, const GrayImage& img) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    double maxv = 0.0;
    for (double p : img.pixels) maxv = std::max(maxv, p);
    double scale = maxv > 0.0 ? 255.0 / maxv : 0.0;
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    std::vector<unsigned char> buf(img.pixels.size());
    for (std::size_t i = 0; i < buf.size(); ++i) {
        double v = img.pixels[i] * scale;
        buf[i] = static_cast<unsigned char>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v + 0.5));
    }
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (!out) throw IoError("short write to " + path);
}

/// Reads a grayscale PNG (8/16-bit; RGB input is converted to luma).
inline GrayImage read_png(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp) throw IoError("cannot open " + path);
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw IoError(path + ": PNG decode failed");
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    png_uint_32 w = png_get_image_width(png, info);
    png_uint_32 h = png_get_image_height(png, info);
    int color = png_get_color_type(png, info);
    int depth = png_get_bit_depth(png, info);

    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (color & PNG_COLOR_MASK_COLOR) png_set_rgb_to_gray_fixed(png, 1, -1, -1);
    if (color & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
    png_read_update_info(png, info);
    depth = png_get_bit_depth(png, info);

    std::vector<unsigned char> row(png_get_rowbytes(png, info));
    GrayImage img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    for (png_uint_32 y = 0; y < h; ++y) {
        png_read_row(png, row.data(), nullptr);
        for (png_uint_32 x = 0; x < w; ++x) {
            double v = depth == 16 ? 256.0 * row[2 * x] + row[2 * x + 1] : row[x];
            img.pixels[static_cast<std::size_t>(y) * w + x] = v;
        }
    }
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    return img;
}

/// Writes an 8-bit grayscale PNG, rescaled like write_pgm.
inline void write_png(const std::string& path, const GrayImage& img) {
    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp) throw IoError("cannot write " + path);
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        std::fclose(fp);
        throw IoError(path + ": PNG encode failed");
    }
    png_init_io(png, fp);
    png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    double maxv = 0.0;
    for (double p : img.pixels) maxv = std::max(maxv, p);
    double scale = maxv > 0.0 ? 255.0 / maxv : 0.0;
    std::vector<unsigned char> row(img.width);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            double v = img.pixels[static_cast<std::size_t>(y) * img.width + x] * scale;
            row[x] = static_cast<unsigned char>(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v + 0.5));
        }
        png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
}

inline GrayImage read_image(const std::string& path) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "png" || ext == "PNG") return read_png(path);
    return read_pgm(path);
}

inline void write_image(const std::string& path, const GrayImage& img) {
    auto dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : path.substr(dot + 1);
    if (ext == "png" || ext == "PNG")
        write_png(path, img);
    else
        write_pgm(path, img);
}

inline GrayImage to_image(const Grid2D& grid, const std::vector<double>& values) {
    GrayImage img;
    img.width = grid.nx;
    img.height = grid.ny;
    img.pixels = values;
    return img;
}

// Raw field dump: 16-byte header (8-byte magic "MMOTF64\0", nx and ny as
// 32-bit little-endian), then nx*ny doubles row-major little-endian.

inline constexpr char kFieldMagic[8] = {'M', 'M', 'O', 'T', 'F', '6', '4', '\0'};

inline void write_field_raw(const std::string& path, const Grid2D& grid, const std::vector<double>& values) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    out.write(kFieldMagic, 8);
    std::uint32_t dims[2] = {static_cast<std::uint32_t>(grid.nx), static_cast<std::uint32_t>(grid.ny)};
    out.write(reinterpret_cast<const char*>(dims), 8);
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (!out) throw IoError("short write to " + path);
}

inline std::pair<Grid2D, std::vector<double>> read_field_raw(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    char magic[8];
    in.read(magic, 8);
    if (in.gcount() != 8 || std::memcmp(magic, kFieldMagic, 8) != 0) throw IoError(path + ": bad field magic");
    std::uint32_t dims[2];
    in.read(reinterpret_cast<char*>(dims), 8);
    if (in.gcount() != 8) throw IoError(path + ": truncated header");
    Grid2D grid(static_cast<int>(dims[0]), static_cast<int>(dims[1]));
    std::vector<double> values(grid.size());
    in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(double)));
    if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(double))
        throw IoError(path + ": truncated field data");
    return {grid, std::move(values)};
}

}  // namespace mmot
