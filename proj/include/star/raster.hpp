#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "star/digest.hpp"

namespace star {

/// RGB8 raster with a capture timestamp (seconds from action start).
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;  // row-major RGB
    double timestamp = 0.0;

    static Frame solid(int width, int height, Rgb color, double timestamp = 0.0);

    Rgb at(int x, int y) const {
        std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        return {pixels[i], pixels[i + 1], pixels[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        std::size_t i = 3 * (static_cast<std::size_t>(y) * width + x);
        pixels[i] = c.r;
        pixels[i + 1] = c.g;
        pixels[i + 2] = c.b;
    }
    void fill_rect(int x0, int y0, int w, int h, Rgb c);
};

/// Checksum over dimensions and raw RGB bytes (independent of PNG
/// encoder settings).
std::string frame_sha256(const Frame& frame);

struct ImageGrid {
    int rows = 0;
    int cols = 0;
    int cell_w = 0;
    int cell_h = 0;
    std::size_t cell_count = 0;  // populated cells
    Frame canvas;
};

/// Row-major chronological placement, nearest-neighbor rescale that
/// preserves aspect ratio, centered with black letterboxing; unused
/// cells stay black. Byte-deterministic.
ImageGrid compose_grid(const std::vector<Frame>& frames, int rows = 3, int cols = 3,
                       int cell_w = 96, int cell_h = 96);

std::vector<std::uint8_t> encode_png(const Frame& frame);
Frame decode_png(const std::vector<std::uint8_t>& bytes);

void write_png(const std::string& path, const Frame& frame);
Frame read_png(const std::string& path);

}  // namespace star
