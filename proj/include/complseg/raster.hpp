#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace complseg {

// 8-bit interleaved RGB image.
struct ImageU8 {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> rgb; // h*w*3, row-major

    ImageU8() = default;
    ImageU8(int h, int w) : h(h), w(w), rgb(static_cast<size_t>(h) * w * 3, 0) {}

    uint8_t& at(int y, int x, int c) { return rgb[(static_cast<size_t>(y) * w + x) * 3 + c]; }
    uint8_t at(int y, int x, int c) const { return rgb[(static_cast<size_t>(y) * w + x) * 3 + c]; }
};

// Single-channel binary mask, stored 0/1. On disk the convention is
// 0 = negative, 255 = positive.
struct Mask {
    int h = 0;
    int w = 0;
    std::vector<uint8_t> data; // h*w, values 0/1

    Mask() = default;
    Mask(int h, int w) : h(h), w(w), data(static_cast<size_t>(h) * w, 0) {}

    uint8_t& at(int y, int x) { return data[static_cast<size_t>(y) * w + x]; }
    uint8_t at(int y, int x) const { return data[static_cast<size_t>(y) * w + x]; }

    long long positive_count() const {
        long long n = 0;
        for (uint8_t v : data) n += v;
        return n;
    }
};

// Lossless 8-bit raster files. Images are binary PPM (P6) payloads, masks are
// binary PGM (P5); the dataset layout uses the extensions .img and .mask.
void write_image(const std::filesystem::path& path, const ImageU8& img);
ImageU8 read_image(const std::filesystem::path& path);
void write_mask(const std::filesystem::path& path, const Mask& mask);
Mask read_mask(const std::filesystem::path& path);

// Header-only peek, used by stats paths that do not need pixel data.
std::pair<int, int> read_raster_dims(const std::filesystem::path& path);

} // namespace complseg
