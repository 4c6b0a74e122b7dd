#pragma once

#include <cstdint>
#include <vector>

#include "docdet/geometry.hpp"

namespace docdet {

/// 8-bit RGB raster, row-major, 3 bytes per pixel.
struct RgbImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // size 3 * width * height

    static RgbImage filled(int w, int h, uint8_t r, uint8_t g, uint8_t b);

    const uint8_t* px(int x, int y) const {
        return pixels.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
    uint8_t* px(int x, int y) {
        return pixels.data() + 3 * (static_cast<size_t>(y) * width + x);
    }
    bool empty() const { return width <= 0 || height <= 0; }
};

/// 8-bit luminance raster.
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels;  // size width * height

    uint8_t at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }
};

inline constexpr int kWorkingWidth = 240;
inline constexpr int kWorkingHeight = 427;
inline constexpr int kColorBins = 512;

/// Maps working-resolution coordinates back to the original frame
/// (and forward), accounting for the portrait normalization rotation.
struct WorkingTransform {
    int original_width = 0;
    int original_height = 0;
    double scale_x = 1.0;  // (post-rotation width)  / working width
    double scale_y = 1.0;  // (post-rotation height) / working height
    bool rotated = false;  // original was landscape, rotated 90° clockwise

    geom::Point to_original(geom::Point p) const;
    geom::Point to_working(geom::Point p) const;
    geom::Quad to_original(const geom::Quad& q) const;
    geom::Quad to_working(const geom::Quad& q) const;
};

/// Original frame plus its fixed 240x427 working-resolution copies.
struct WorkingImage {
    RgbImage original;
    RgbImage working_rgb;
    GrayImage working_gray;
    WorkingTransform transform;
};

/// Portrait-normalizes (90° clockwise rotation when width > height),
/// area-averages down to exactly 240x427 and derives the BT.601 grayscale
/// working copy. Idempotent on a 240x427 portrait input.
WorkingImage prepare_working(RgbImage image);

/// 512-bin color index: (R div 32)*64 + (G div 32)*8 + (B div 32).
inline int quantize_color(uint8_t r, uint8_t g, uint8_t b) {
    return ((r >> 5) << 6) | ((g >> 5) << 3) | (b >> 5);
}

/// 90° clockwise rotation (exposed for the portrait-normalization tests).
RgbImage rotate90_cw(const RgbImage& src);

/// Exact box/area-average resampling to an arbitrary target size.
RgbImage resize_area(const RgbImage& src, int dst_w, int dst_h);

GrayImage to_gray_bt601(const RgbImage& src);

}  // namespace docdet
