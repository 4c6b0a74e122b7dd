#include "docdet/image.hpp"

#include <cmath>

namespace docdet {

RgbImage RgbImage::filled(int w, int h, uint8_t r, uint8_t g, uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(3 * static_cast<size_t>(w) * h);
    for (size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

geom::Point WorkingTransform::to_original(geom::Point p) const {
    geom::Point q{p.x * scale_x, p.y * scale_y};
    if (!rotated) return q;
    // Inverse of the continuous clockwise rotation (x,y) -> (H - y, x),
    // H being the original height.
    return {q.y, static_cast<double>(original_height) - q.x};
}

geom::Point WorkingTransform::to_working(geom::Point p) const {
    geom::Point q = p;
    if (rotated) q = {static_cast<double>(original_height) - p.y, p.x};
    return {q.x / scale_x, q.y / scale_y};
}

geom::Quad WorkingTransform::to_original(const geom::Quad& q) const {
    geom::Quad out;
    for (int i = 0; i < 4; ++i) out[i] = to_original(q[i]);
    return out;
}

geom::Quad WorkingTransform::to_working(const geom::Quad& q) const {
    geom::Quad out;
    for (int i = 0; i < 4; ++i) out[i] = to_working(q[i]);
    return out;
}

RgbImage rotate90_cw(const RgbImage& src) {
    RgbImage dst;
    dst.width = src.height;
    dst.height = src.width;
    dst.pixels.resize(src.pixels.size());
    for (int y = 0; y < dst.height; ++y) {
        for (int x = 0; x < dst.width; ++x) {
            // dst pixel (x, y) <- src pixel (y, H-1-x), H = src.height
            const uint8_t* s = src.px(y, src.height - 1 - x);
            uint8_t* d = dst.px(x, y);
            d[0] = s[0];
            d[1] = s[1];
            d[2] = s[2];
        }
    }
    return dst;
}

namespace {

// One separable pass of exact box averaging: `src_n` samples shrink to
// `dst_n`, each output integrating the source interval
// [i*scale, (i+1)*scale) with fractional end weights.
void area_pass_h(const std::vector<float>& src, int src_w, int src_h,
                 std::vector<float>& dst, int dst_w) {
    const double scale = static_cast<double>(src_w) / dst_w;
    dst.assign(3 * static_cast<size_t>(dst_w) * src_h, 0.0f);
    for (int y = 0; y < src_h; ++y) {
        const float* srow = src.data() + 3 * static_cast<size_t>(y) * src_w;
        float* drow = dst.data() + 3 * static_cast<size_t>(y) * dst_w;
        for (int x = 0; x < dst_w; ++x) {
            const double a = x * scale;
            const double b = (x + 1) * scale;
            double acc[3] = {0, 0, 0};
            int ia = static_cast<int>(std::floor(a));
            int ib = static_cast<int>(std::ceil(b));
            ib = std::min(ib, src_w);
            for (int i = ia; i < ib; ++i) {
                const double w = std::min(b, static_cast<double>(i + 1)) -
                                 std::max(a, static_cast<double>(i));
                if (w <= 0.0) continue;
                acc[0] += w * srow[3 * i];
                acc[1] += w * srow[3 * i + 1];
                acc[2] += w * srow[3 * i + 2];
            }
            const double inv = 1.0 / scale;
            drow[3 * x] = static_cast<float>(acc[0] * inv);
            drow[3 * x + 1] = static_cast<float>(acc[1] * inv);
            drow[3 * x + 2] = static_cast<float>(acc[2] * inv);
        }
    }
}

void area_pass_v(const std::vector<float>& src, int src_w, int src_h,
                 std::vector<float>& dst, int dst_h) {
    const double scale = static_cast<double>(src_h) / dst_h;
    dst.assign(3 * static_cast<size_t>(src_w) * dst_h, 0.0f);
    for (int y = 0; y < dst_h; ++y) {
        const double a = y * scale;
        const double b = (y + 1) * scale;
        int ia = static_cast<int>(std::floor(a));
        int ib = static_cast<int>(std::ceil(b));
        ib = std::min(ib, src_h);
        float* drow = dst.data() + 3 * static_cast<size_t>(y) * src_w;
        const double inv = 1.0 / scale;
        for (int i = ia; i < ib; ++i) {
            const double w = std::min(b, static_cast<double>(i + 1)) -
                             std::max(a, static_cast<double>(i));
            if (w <= 0.0) continue;
            const float* srow = src.data() + 3 * static_cast<size_t>(i) * src_w;
            const float wf = static_cast<float>(w * inv);
            for (int x = 0; x < 3 * src_w; ++x) drow[x] += wf * srow[x];
        }
    }
}

}  // namespace

RgbImage resize_area(const RgbImage& src, int dst_w, int dst_h) {
    if (src.width == dst_w && src.height == dst_h) return src;
    std::vector<float> buf(src.pixels.begin(), src.pixels.end());
    std::vector<float> tmp;
    area_pass_h(buf, src.width, src.height, tmp, dst_w);
    std::vector<float> out;
    area_pass_v(tmp, dst_w, src.height, out, dst_h);

    RgbImage dst;
    dst.width = dst_w;
    dst.height = dst_h;
    dst.pixels.resize(3 * static_cast<size_t>(dst_w) * dst_h);
    for (size_t i = 0; i < dst.pixels.size(); ++i) {
        const float v = out[i];
        dst.pixels[i] = static_cast<uint8_t>(std::lround(std::min(std::max(v, 0.0f), 255.0f)));
    }
    return dst;
}

GrayImage to_gray_bt601(const RgbImage& src) {
    GrayImage g;
    g.width = src.width;
    g.height = src.height;
    g.pixels.resize(static_cast<size_t>(src.width) * src.height);
    const uint8_t* p = src.pixels.data();
    for (size_t i = 0; i < g.pixels.size(); ++i, p += 3) {
        const double y = 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2];
        g.pixels[i] = static_cast<uint8_t>(std::lround(y));
    }
    return g;
}

WorkingImage prepare_working(RgbImage image) {
    WorkingImage wi;
    wi.transform.original_width = image.width;
    wi.transform.original_height = image.height;
    wi.transform.rotated = image.width > image.height;

    RgbImage upright = wi.transform.rotated ? rotate90_cw(image) : image;
    wi.original = std::move(image);
    wi.transform.scale_x = static_cast<double>(upright.width) / kWorkingWidth;
    wi.transform.scale_y = static_cast<double>(upright.height) / kWorkingHeight;
    wi.working_rgb = resize_area(upright, kWorkingWidth, kWorkingHeight);
    wi.working_gray = to_gray_bt601(wi.working_rgb);
    return wi;
}

}  // namespace docdet
