#pragma once

#include <vector>

#include "docdet/image.hpp"

namespace docdet {

/// Non-negative edge intensities normalized to [0, 1].
struct EdgeMap {
    int width = 0;
    int height = 0;
    std::vector<float> values;  // row-major, size width * height

    float at(int x, int y) const { return values[static_cast<size_t>(y) * width + x]; }
    float& at(int x, int y) { return values[static_cast<size_t>(y) * width + x]; }
    static EdgeMap zeros(int w, int h);
};

/// The orientation-split pair: every pixel's gradient magnitude lands in
/// exactly one of the two maps.
struct DirectionalEdgeMaps {
    EdgeMap horizontal;  // edges whose tangent w.r.t. the x axis is in [-1, 1]
    EdgeMap vertical;    // the rest (tangent w.r.t. the y axis in [-1, 1])
};

/// 3x3 Sobel magnitude split by edge orientation. |gy| >= |gx| puts the
/// pixel in the horizontal map (the edge runs mostly along x), otherwise
/// in the vertical map. Magnitudes are divided by the largest possible
/// Sobel response so the maps are brightness-scale independent. The
/// one-pixel frame border carries no gradient estimate and stays zero.
/// Throws ImageTooSmall when either dimension is < 3.
DirectionalEdgeMaps extract_directional_edges(const GrayImage& image);

/// 1-D Gaussian blur of each map along its gradient direction: the
/// horizontal map vertically, the vertical map horizontally. The kernel
/// is truncated at +-3*sigma and normalized to unit sum; borders clamp.
DirectionalEdgeMaps blur_along_gradient(const DirectionalEdgeMaps& maps, double sigma = 1.5);

}  // namespace docdet
