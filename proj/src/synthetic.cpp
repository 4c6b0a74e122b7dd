#include "docdet/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace docdet {

namespace {

// Hand-rolled uniform draws so the benchmark is bit-reproducible across
// standard library implementations.
struct Rng {
    std::mt19937_64 gen;

    explicit Rng(uint64_t seed) : gen(seed) {}
    double uniform() { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int uniform_int(int lo, int hi) {  // inclusive bounds
        return lo + static_cast<int>(gen() % static_cast<uint64_t>(hi - lo + 1));
    }
    bool coin() { return (gen() & 1) != 0; }
};

double luminance(uint8_t r, uint8_t g, uint8_t b) {
    return 0.299 * r + 0.587 * g + 0.114 * b;
}

struct Color {
    uint8_t r, g, b;
};

Color near_gray(Rng& rng, double level) {
    auto chan = [&](double c) {
        return static_cast<uint8_t>(std::clamp(c + rng.uniform(-12.0, 12.0), 0.0, 255.0));
    };
    return {chan(level), chan(level), chan(level)};
}

geom::Point apply_h3(const std::array<double, 9>& h, geom::Point p) {
    const double d = h[6] * p.x + h[7] * p.y + h[8];
    return {(h[0] * p.x + h[1] * p.y + h[2]) / d, (h[3] * p.x + h[4] * p.y + h[5]) / d};
}

// Perspective image of a w0 x h0 rectangle: rotate, scale, mild
// projective terms, then translate to the placement center.
geom::Quad warp_rect(Rng& rng, double w0, double h0, double cx, double cy, double max_tilt) {
    const double theta = rng.uniform(-max_tilt, max_tilt);
    const double sx = rng.uniform(0.92, 1.08);
    const double sy = rng.uniform(0.92, 1.08);
    const double g = rng.uniform(-3.5e-4, 3.5e-4);
    const double hh = rng.uniform(-3.5e-4, 3.5e-4);
    const double c = std::cos(theta), s = std::sin(theta);
    // H = T(c) * P * R * S applied to corners centered at the origin.
    const std::array<double, 9> pr{c * sx, -s * sy, 0, s * sx, c * sy, 0, g, hh, 1};
    geom::Quad base = geom::rect_quad(w0, h0);
    geom::Quad out;
    for (int i = 0; i < 4; ++i) {
        const geom::Point centered{base[i].x - w0 / 2, base[i].y - h0 / 2};
        const geom::Point p = apply_h3(pr, centered);
        out[i] = {p.x + cx, p.y + cy};
    }
    return out;
}

bool quad_acceptable(const geom::Quad& q, double x_lo, double y_lo, double x_hi, double y_hi) {
    for (int i = 0; i < 4; ++i)
        if (q[i].x < x_lo || q[i].x > x_hi || q[i].y < y_lo || q[i].y > y_hi) return false;
    // Strict convexity with consistent winding.
    double first = 0.0;
    for (int i = 0; i < 4; ++i) {
        const geom::Point a = q[(i + 1) % 4] - q[i];
        const geom::Point b = q[(i + 2) % 4] - q[(i + 1) % 4];
        const double cr = geom::cross(a, b);
        if (i == 0)
            first = cr;
        else if (first * cr <= 0.0)
            return false;
    }
    // Orientation classes with margin inside the tangent-±1 bound.
    for (int i = 0; i < 4; ++i) {
        const geom::Point d = q[(i + 1) % 4] - q[i];
        const bool expect_horizontal = i % 2 == 0;
        if (expect_horizontal) {
            if (std::abs(d.y) > 0.8 * std::abs(d.x)) return false;
        } else {
            if (std::abs(d.x) > 0.8 * std::abs(d.y)) return false;
        }
    }
    return true;
}

// Frames are rendered at 3x resolution and box-averaged down, which
// band-limits the edges the way a camera would. Hard-aliased staircase
// borders would otherwise scatter gradient orientations.
constexpr int kSuper = 3;

void fill_quad(RgbImage& img, const geom::Quad& q, Color c) {
    std::vector<geom::PixelSpan> spans;
    for (int y = 0; y < img.height; ++y) {
        geom::quad_row_spans(q, y, img.width, spans);
        for (const geom::PixelSpan& s : spans) {
            uint8_t* p = img.px(s.begin, y);
            for (int x = s.begin; x < s.end; ++x, p += 3) {
                p[0] = c.r;
                p[1] = c.g;
                p[2] = c.b;
            }
        }
    }
}

// Stroke of `width` working pixels centered on the segment, drawn in
// supersampled coordinates.
void draw_stroke(RgbImage& img, geom::Point a, geom::Point b, Color c, double width) {
    const double dx = b.x - a.x;
    const double dy = b.y - a.y;
    const bool horizontal = std::abs(dy) <= std::abs(dx);
    const double u0 = horizontal ? a.x : a.y;
    const double u1 = horizontal ? b.x : b.y;
    const double v0 = horizontal ? a.y : a.x;
    const double slope = (horizontal ? dy : dx) / (horizontal ? dx : dy);
    const int64_t ma = std::max<int64_t>(std::llround(std::min(u0, u1) - 0.5), 0);
    const int64_t mb = std::min<int64_t>(std::llround(std::max(u0, u1) - 0.5),
                                         (horizontal ? img.width : img.height) - 1);
    const int frame_minor = horizontal ? img.height : img.width;
    const int64_t half = std::llround(width * kSuper / 2.0);
    for (int64_t mi = ma; mi <= mb; ++mi) {
        const double u = static_cast<double>(mi) + 0.5;
        const int64_t base = std::llround(v0 + (u - u0) * slope - 0.5);
        for (int64_t t = -half; t < half; ++t) {
            const int64_t minor = base + t;
            if (minor < 0 || minor >= frame_minor) continue;
            uint8_t* p = horizontal ? img.px(static_cast<int>(mi), static_cast<int>(minor))
                                    : img.px(static_cast<int>(minor), static_cast<int>(mi));
            p[0] = c.r;
            p[1] = c.g;
            p[2] = c.b;
        }
    }
}

geom::Quad scale_quad(const geom::Quad& q, double s) {
    geom::Quad out;
    for (int i = 0; i < 4; ++i) out[i] = {q[i].x * s, q[i].y * s};
    return out;
}

struct BBox {
    double x0, y0, x1, y1;
};

BBox quad_bbox(const geom::Quad& q) {
    BBox b{q[0].x, q[0].y, q[0].x, q[0].y};
    for (int i = 1; i < 4; ++i) {
        b.x0 = std::min(b.x0, q[i].x);
        b.y0 = std::min(b.y0, q[i].y);
        b.x1 = std::max(b.x1, q[i].x);
        b.y1 = std::max(b.y1, q[i].y);
    }
    return b;
}

const geom::TemplateSize kTemplates[3] = {{856, 540}, {1050, 740}, {1250, 880}};

}  // namespace

Dataset make_synthetic_dataset(const SyntheticOptions& options) {
    Dataset ds;
    ds.id = "synthetic-v1";
    Rng rng(options.seed);

    for (int f = 0; f < options.frames; ++f) {
        const bool adversarial = f >= options.adversarial_from;

        DatasetItem item;
        char idbuf[32];
        std::snprintf(idbuf, sizeof(idbuf), "synthetic_%03d", f);
        item.id = idbuf;
        item.subsets = {"all", adversarial ? "adversarial" : "plain"};

        const geom::TemplateSize tmpl = adversarial ? kTemplates[0] : kTemplates[rng.uniform_int(0, 2)];

        // Background and document levels with a luminance gap >= 40.
        // Trap frames keep the document dark on a bright background so
        // the shadow wedge below it has contrast headroom.
        const double bg_level = adversarial ? rng.uniform(185.0, 210.0) : rng.uniform(90.0, 200.0);
        const double gap = adversarial
                               ? -rng.uniform(85.0, 92.0)
                               : rng.uniform(45.0, 85.0) * (rng.coin() ? 1.0 : -1.0);
        const double doc_level = std::clamp(bg_level + gap, 15.0, 245.0);
        Color bg{0, 0, 0}, fg{0, 0, 0};
        for (;;) {
            bg = near_gray(rng, bg_level);
            fg = near_gray(rng, doc_level);
            if (std::abs(luminance(bg.r, bg.g, bg.b) - luminance(fg.r, fg.g, fg.b)) >= 40.0) break;
        }

        RgbImage canvas =
            RgbImage::filled(kWorkingWidth * kSuper, kWorkingHeight * kSuper, bg.r, bg.g, bg.b);

        // Document: template-proportioned rectangle under a mild
        // perspective, placed fully inside the frame.
        const double aspect = static_cast<double>(tmpl.height) / tmpl.width;
        geom::Quad doc;
        for (;;) {
            if (adversarial) {
                // Trap frames keep the document wide, near-frontal and
                // inside the middle Hough strip: wide borders give short
                // accumulator ridges and a single strip avoids duplicate
                // side lines, so the true quad stays in the re-ranked
                // list when the shadow wedge wins the contour ranking.
                const double dw = rng.uniform(176.0, 185.0);
                const double dh = dw * aspect;
                const double cx = rng.uniform(12.0 + dw / 2, 228.0 - dw / 2);
                const double cy = rng.uniform(152.0 + dh / 2 + 4.0, 277.0 - dh / 2 - 4.0);
                doc = warp_rect(rng, dw, dh, cx, cy, 0.015);
                if (quad_acceptable(doc, 10.0, 152.0, 230.0, 277.0)) break;
            } else {
                const double dw = rng.uniform(130.0, 200.0);
                const double dh = dw * aspect;
                const double cx = rng.uniform(55.0, 185.0);
                const double cy = rng.uniform(110.0, 340.0);
                doc = warp_rect(rng, dw, dh, cx, cy, 0.28);
                if (quad_acceptable(doc, 8.0, 8.0, kWorkingWidth - 8.0, kWorkingHeight - 8.0))
                    break;
            }
        }
        fill_quad(canvas, scale_quad(doc, kSuper), fg);

        if (adversarial) {
            // Contour trap: the bottom border fades to half contrast
            // while a shadow stroke of full document contrast runs
            // parallel just below, ending on the side borders' lines.
            // The contour ranking extends the quad down to the shadow;
            // the band between them is background, so the areal contrast
            // still prefers the true quad.
            const geom::Point bdir = doc[2] - doc[3];
            const double blen = geom::norm(bdir);
            geom::Point n{-bdir.y / blen, bdir.x / blen};
            geom::Point centroid{0, 0};
            for (int i = 0; i < 4; ++i) centroid = centroid + doc[i] * 0.25;
            if (n.x * (centroid.x - doc[3].x) + n.y * (centroid.y - doc[3].y) > 0.0)
                n = {-n.x, -n.y};  // outward

            // The bottom border fades to 4/5 contrast; a much darker
            // wedge edge runs parallel just below it.
            const Color mid{static_cast<uint8_t>(std::lround(0.20 * bg.r + 0.80 * fg.r)),
                            static_cast<uint8_t>(std::lround(0.20 * bg.g + 0.80 * fg.g)),
                            static_cast<uint8_t>(std::lround(0.20 * bg.b + 0.80 * fg.b))};
            const geom::Point inset = n * -2.6;
            draw_stroke(canvas, (doc[3] + inset) * static_cast<double>(kSuper),
                        (doc[2] + inset) * static_cast<double>(kSuper), mid, 5.0);

            const double off = rng.uniform(8.2, 9.0);
            const geom::Line shadow_line{doc[3] + n * off, doc[2] + n * off};
            const geom::Point sbl =
                geom::intersect_lines(shadow_line, geom::Line{doc[0], doc[3]});
            const geom::Point sbr =
                geom::intersect_lines(shadow_line, geom::Line{doc[1], doc[2]});
            const double drop = std::min(rng.uniform(1.86, 1.97) * std::abs(gap), bg_level - 8.0);
            const Color shadow_color = near_gray(rng, bg_level - drop);
            // One clean top edge: the wedge flares hard (so the corner
            // extensions of the side borders read its uniform interior,
            // not its side edges) and runs past the frame bottom (so it
            // has no second horizontal edge).
            const geom::Point tangent{bdir.x / blen, bdir.y / blen};
            const double depth = kWorkingHeight - std::min(sbl.y, sbr.y) + 30.0;
            const geom::Quad wedge{{sbl, sbr, sbr + n * depth + tangent * (0.8 * depth),
                                    sbl + n * depth - tangent * (0.8 * depth)}};
            fill_quad(canvas, scale_quad(wedge, kSuper), shadow_color);

            // A weak stray line crossing the background above the document.
            const BBox doc_box = quad_bbox(doc);
            const double y_line = rng.uniform(6.0, std::max(8.0, doc_box.y0 - 16.0));
            const Color line_color =
                near_gray(rng, std::clamp(bg_level - rng.uniform(22.0, 32.0), 5.0, 250.0));
            draw_stroke(canvas, {0.0, y_line * kSuper},
                        {double(kWorkingWidth * kSuper), (y_line + rng.uniform(-6.0, 6.0)) * kSuper},
                        line_color, 2.0);
        }

        item.image = resize_area(canvas, kWorkingWidth, kWorkingHeight);
        item.ann.frame_id = item.id;
        item.ann.quad = doc;
        item.ann.tmpl = tmpl;
        item.ann.frame_width = kWorkingWidth;
        item.ann.frame_height = kWorkingHeight;
        ds.items.push_back(std::move(item));
    }
    return ds;
}

}  // namespace docdet
