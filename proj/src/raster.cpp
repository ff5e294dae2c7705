#include "complseg/raster.hpp"

#include <cstdio>
#include <fstream>

#include "complseg/errors.hpp"

namespace complseg {

namespace {

void write_file(const std::filesystem::path& path, const std::string& header,
                const std::vector<uint8_t>& payload) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path.string());
    out.write(header.data(), static_cast<std::streamsize>(header.size()));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw Error("write failed: " + path.string());
}

struct PnmHeader {
    int magic; // 5 or 6
    int w;
    int h;
};

PnmHeader read_header(std::ifstream& in, const std::filesystem::path& path) {
    auto next_token = [&]() -> std::string {
        std::string tok;
        int c;
        while ((c = in.get()) != EOF) {
            if (c == '#') { // comment to end of line
                while ((c = in.get()) != EOF && c != '\n') {}
                continue;
            }
            if (std::isspace(c)) {
                if (!tok.empty()) break;
                continue;
            }
            tok.push_back(static_cast<char>(c));
        }
        if (tok.empty()) throw Error("truncated raster header: " + path.string());
        return tok;
    };
    std::string magic = next_token();
    if (magic != "P5" && magic != "P6") throw Error("unsupported raster format in " + path.string());
    int w = std::stoi(next_token());
    int h = std::stoi(next_token());
    int maxval = std::stoi(next_token());
    if (w <= 0 || h <= 0) throw Error("bad raster dimensions in " + path.string());
    if (maxval != 255) throw Error("expected 8-bit raster in " + path.string());
    return {magic == "P5" ? 5 : 6, w, h};
}

} // namespace

void write_image(const std::filesystem::path& path, const ImageU8& img) {
    std::string header = "P6\n" + std::to_string(img.w) + " " + std::to_string(img.h) + "\n255\n";
    write_file(path, header, img.rgb);
}

ImageU8 read_image(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path.string());
    PnmHeader hd = read_header(in, path);
    if (hd.magic != 6) throw Error("expected 3-channel raster in " + path.string());
    ImageU8 img(hd.h, hd.w);
    in.read(reinterpret_cast<char*>(img.rgb.data()), static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size()))
        throw Error("truncated raster payload: " + path.string());
    return img;
}

void write_mask(const std::filesystem::path& path, const Mask& mask) {
    std::string header = "P5\n" + std::to_string(mask.w) + " " + std::to_string(mask.h) + "\n255\n";
    std::vector<uint8_t> payload(mask.data.size());
    for (size_t i = 0; i < mask.data.size(); ++i) payload[i] = mask.data[i] ? 255 : 0;
    write_file(path, header, payload);
}

Mask read_mask(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path.string());
    PnmHeader hd = read_header(in, path);
    if (hd.magic != 5) throw Error("expected single-channel raster in " + path.string());
    Mask mask(hd.h, hd.w);
    std::vector<uint8_t> payload(mask.data.size());
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (in.gcount() != static_cast<std::streamsize>(payload.size()))
        throw Error("truncated raster payload: " + path.string());
    for (size_t i = 0; i < payload.size(); ++i) mask.data[i] = payload[i] >= 128 ? 1 : 0;
    return mask;
}

std::pair<int, int> read_raster_dims(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw MissingFileError(path.string());
    PnmHeader hd = read_header(in, path);
    return {hd.h, hd.w};
}

} // namespace complseg
