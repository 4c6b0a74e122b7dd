#include "docdet/edges.hpp"

#include <algorithm>
#include <cmath>

#include "docdet/errors.hpp"

namespace docdet {

EdgeMap EdgeMap::zeros(int w, int h) {
    EdgeMap m;
    m.width = w;
    m.height = h;
    m.values.assign(static_cast<size_t>(w) * h, 0.0f);
    return m;
}

DirectionalEdgeMaps extract_directional_edges(const GrayImage& image) {
    if (image.width < 3 || image.height < 3)
        throw ImageTooSmall("edge extraction needs at least 3x3 pixels");

    DirectionalEdgeMaps maps;
    maps.horizontal = EdgeMap::zeros(image.width, image.height);
    maps.vertical = EdgeMap::zeros(image.width, image.height);

    // Largest attainable per-component Sobel response on 8-bit input is
    // 4*255; the magnitude is normalized by the corner bound of both
    // components maxing out together.
    const double inv_max = 1.0 / (4.0 * 255.0 * std::sqrt(2.0));

    const int w = image.width;
    const uint8_t* p = image.pixels.data();
    for (int y = 1; y + 1 < image.height; ++y) {
        const uint8_t* r0 = p + static_cast<size_t>(y - 1) * w;
        const uint8_t* r1 = p + static_cast<size_t>(y) * w;
        const uint8_t* r2 = p + static_cast<size_t>(y + 1) * w;
        for (int x = 1; x + 1 < w; ++x) {
            const int gx = (r0[x + 1] + 2 * r1[x + 1] + r2[x + 1]) -
                           (r0[x - 1] + 2 * r1[x - 1] + r2[x - 1]);
            const int gy = (r2[x - 1] + 2 * r2[x] + r2[x + 1]) -
                           (r0[x - 1] + 2 * r0[x] + r0[x + 1]);
            if (gx == 0 && gy == 0) continue;
            const float g = static_cast<float>(std::sqrt(double(gx) * gx + double(gy) * gy) * inv_max);
            // Gradient mostly vertical <=> edge mostly horizontal; ties go
            // to the horizontal map.
            if (std::abs(gy) >= std::abs(gx))
                maps.horizontal.at(x, y) = g;
            else
                maps.vertical.at(x, y) = g;
        }
    }
    return maps;
}

namespace {

std::vector<float> gaussian_kernel(double sigma) {
    const int radius = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<float> k(static_cast<size_t>(2 * radius + 1));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-0.5 * (i / sigma) * (i / sigma));
        k[static_cast<size_t>(i + radius)] = static_cast<float>(v);
        sum += v;
    }
    for (float& v : k) v = static_cast<float>(v / sum);
    return k;
}

EdgeMap blur_1d(const EdgeMap& src, const std::vector<float>& kernel, bool vertical) {
    const int radius = static_cast<int>(kernel.size() / 2);
    EdgeMap dst = EdgeMap::zeros(src.width, src.height);
    for (int y = 0; y < src.height; ++y) {
        for (int x = 0; x < src.width; ++x) {
            float acc = 0.0f;
            for (int i = -radius; i <= radius; ++i) {
                int sx = x, sy = y;
                if (vertical)
                    sy = std::clamp(y + i, 0, src.height - 1);
                else
                    sx = std::clamp(x + i, 0, src.width - 1);
                acc += kernel[static_cast<size_t>(i + radius)] * src.at(sx, sy);
            }
            dst.at(x, y) = acc;
        }
    }
    return dst;
}

}  // namespace

DirectionalEdgeMaps blur_along_gradient(const DirectionalEdgeMaps& maps, double sigma) {
    const std::vector<float> kernel = gaussian_kernel(sigma);
    DirectionalEdgeMaps out;
    // A mostly-horizontal edge has a vertical gradient, so its map blurs
    // vertically, and vice versa.
    out.horizontal = blur_1d(maps.horizontal, kernel, /*vertical=*/true);
    out.vertical = blur_1d(maps.vertical, kernel, /*vertical=*/false);
    return out;
}

}  // namespace docdet
