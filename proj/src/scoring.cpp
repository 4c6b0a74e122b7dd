#include "docdet/scoring.hpp"

#include <algorithm>
#include <cmath>

#include "docdet/errors.hpp"

namespace docdet {

int64_t LineRaster::pixel_index(double coord) {
    return std::llround(coord - 0.5);
}

LineRaster LineRaster::build(const DirectionalEdgeMaps& maps, geom::Point p, geom::Point q,
                             double tau) {
    const double dx = q.x - p.x;
    const double dy = q.y - p.y;
    if (dx == 0.0 && dy == 0.0) throw DegenerateBorder("border endpoints coincide");

    LineRaster r;
    r.horizontal_ = std::abs(dy) <= std::abs(dx);
    const EdgeMap& map = r.horizontal_ ? maps.horizontal : maps.vertical;
    r.frame_major_ = r.horizontal_ ? map.width : map.height;
    const int frame_minor = r.horizontal_ ? map.height : map.width;

    // minor(u) along the line, u being the continuous major coordinate.
    const double base_major = r.horizontal_ ? p.x : p.y;
    const double base_minor = r.horizontal_ ? p.y : p.x;
    const double slope = r.horizontal_ ? dy / dx : dx / dy;

    const int n = r.frame_major_;
    r.pref_sum_.assign(static_cast<size_t>(n) + 1, 0.0);
    r.pref_tau_.assign(static_cast<size_t>(n) + 1, 0);
    r.pref_in_.assign(static_cast<size_t>(n) + 1, 0);
    for (int mi = 0; mi < n; ++mi) {
        const double u = mi + 0.5;
        const double v = base_minor + (u - base_major) * slope;
        double value = 0.0;
        int in = 0;
        const double vi = v - 0.5;
        if (vi > -0.6 && vi < frame_minor) {  // cheap pre-check before rounding
            const int64_t minor = std::llround(vi);
            if (minor >= 0 && minor < frame_minor) {
                in = 1;
                value = r.horizontal_ ? map.at(mi, static_cast<int>(minor))
                                      : map.at(static_cast<int>(minor), mi);
            }
        }
        r.pref_sum_[static_cast<size_t>(mi) + 1] = r.pref_sum_[static_cast<size_t>(mi)] + value;
        r.pref_tau_[static_cast<size_t>(mi) + 1] =
            r.pref_tau_[static_cast<size_t>(mi)] + (value > tau ? 1 : 0);
        r.pref_in_[static_cast<size_t>(mi) + 1] = r.pref_in_[static_cast<size_t>(mi)] + in;
    }
    return r;
}

LineRaster::SpanStats LineRaster::span_stats(int64_t ma, int64_t mb) const {
    SpanStats s;
    s.length = mb - ma + 1;
    const int64_t lo = std::max<int64_t>(ma, 0);
    const int64_t hi = std::min<int64_t>(mb, frame_major_ - 1);
    if (lo > hi || s.length <= 0) return s;
    const auto a = static_cast<size_t>(lo);
    const auto b = static_cast<size_t>(hi) + 1;
    s.sum = pref_sum_[b] - pref_sum_[a];
    s.above_tau = pref_tau_[b] - pref_tau_[a];
    s.in_frame = pref_in_[b] - pref_in_[a];
    return s;
}

BorderContribution border_contribution(const LineRaster& raster, int64_t ma, int64_t mb) {
    const LineRaster::SpanStats body = raster.span_stats(ma, mb);
    if (body.length < 2) throw DegenerateBorder("border shorter than 2 px");
    const LineRaster::SpanStats lo = raster.span_stats(ma - kExtensionLength, ma - 1);
    const LineRaster::SpanStats hi = raster.span_stats(mb + 1, mb + kExtensionLength);
    BorderContribution out;
    const double len = static_cast<double>(body.length);
    out.intensity = body.sum / len;
    out.consistency = static_cast<double>(body.above_tau) / len;
    out.ext_low = lo.in_frame > 0 ? lo.sum / static_cast<double>(lo.in_frame) : 0.0;
    out.ext_high = hi.in_frame > 0 ? hi.sum / static_cast<double>(hi.in_frame) : 0.0;
    return out;
}

BorderFeatures border_features(const DirectionalEdgeMaps& blurred, const geom::Quad& q,
                               double tau) {
    BorderFeatures f;
    for (int i = 0; i < 4; ++i) {
        const geom::Point p0 = q[i];
        const geom::Point p1 = q[(i + 1) % 4];
        const LineRaster raster = LineRaster::build(blurred, p0, p1, tau);
        const double u0 = raster.major(p0);
        const double u1 = raster.major(p1);
        const int64_t ma = LineRaster::pixel_index(std::min(u0, u1));
        const int64_t mb = LineRaster::pixel_index(std::max(u0, u1));
        const BorderContribution s = border_contribution(raster, ma, mb);
        f.intensity[static_cast<size_t>(i)] = s.intensity;
        f.consistency[static_cast<size_t>(i)] = s.consistency;
        f.extension[static_cast<size_t>(2 * i)] = s.ext_low;
        f.extension[static_cast<size_t>(2 * i) + 1] = s.ext_high;
    }
    return f;
}

double contour_score(const BorderFeatures& f) {
    double reward = 0.0;
    double inconsistency = 0.0;
    for (int i = 0; i < 4; ++i) {
        reward += f.intensity[static_cast<size_t>(i)];
        inconsistency += 1.0 - f.consistency[static_cast<size_t>(i)];
    }
    double penalty = 0.0;
    for (double e : f.extension) penalty += e;
    return reward / (1.0 + inconsistency) - penalty;
}

namespace {

geom::Line offset_border(geom::Point p, geom::Point q, geom::Point centroid, double distance) {
    const geom::Point d = q - p;
    const double len = geom::norm(d);
    if (len == 0.0) throw EmptyRegion("degenerate border while offsetting");
    geom::Point n{-d.y / len, d.x / len};
    const double side = n.x * (centroid.x - p.x) + n.y * (centroid.y - p.y);
    if (side == 0.0) throw EmptyRegion("centroid on border line");
    const double s = side > 0.0 ? distance : -distance;
    const geom::Point shift{n.x * s, n.y * s};
    return {p + shift, q + shift};
}

geom::Quad offset_quad(const geom::Quad& q, double distance) {
    geom::Point centroid{0, 0};
    for (int i = 0; i < 4; ++i) centroid = centroid + q[i] * 0.25;
    std::array<geom::Line, 4> lines;
    for (int i = 0; i < 4; ++i)
        lines[static_cast<size_t>(i)] = offset_border(q[i], q[(i + 1) % 4], centroid, distance);
    geom::Quad out;
    try {
        for (int i = 0; i < 4; ++i)
            out[i] = geom::intersect_lines(lines[static_cast<size_t>((i + 3) % 4)],
                                           lines[static_cast<size_t>(i)]);
    } catch (const ParallelLines&) {
        throw EmptyRegion("offset borders became parallel");
    }
    return out;
}

// A \ B for sorted, disjoint half-open pixel ranges of one row.
void subtract_spans(const std::vector<geom::PixelSpan>& a, const std::vector<geom::PixelSpan>& b,
                    std::vector<geom::PixelSpan>& out) {
    out.clear();
    size_t j = 0;
    for (geom::PixelSpan s : a) {
        int cur = s.begin;
        while (cur < s.end) {
            while (j < b.size() && b[j].end <= cur) ++j;
            if (j >= b.size() || b[j].begin >= s.end) {
                out.push_back({cur, s.end});
                break;
            }
            if (b[j].begin > cur) out.push_back({cur, b[j].begin});
            cur = b[j].end;
        }
    }
}

}  // namespace

RegionPair extract_regions(const geom::Quad& q, int frame_width, int frame_height, double margin) {
    const geom::Quad inner = offset_quad(q, margin);
    const geom::Quad outer = offset_quad(q, -margin);

    RegionPair regions;
    std::vector<geom::PixelSpan> spans_inner, spans_outer, spans_q, diff;
    for (int y = 0; y < frame_height; ++y) {
        geom::quad_row_spans(inner, y, frame_width, spans_inner);
        for (const geom::PixelSpan& s : spans_inner) {
            regions.internal.push_back({y, s.begin, s.end});
            regions.internal_count += s.end - s.begin;
        }
        geom::quad_row_spans(outer, y, frame_width, spans_outer);
        geom::quad_row_spans(q, y, frame_width, spans_q);
        subtract_spans(spans_outer, spans_q, diff);
        for (const geom::PixelSpan& s : diff) {
            regions.external.push_back({y, s.begin, s.end});
            regions.external_count += s.end - s.begin;
        }
    }
    if (regions.internal_count < kMinRegionPixels || regions.external_count < kMinRegionPixels)
        throw EmptyRegion("contrast regions below minimum pixel count");
    return regions;
}

void ColorHistogram::normalize() {
    double total = 0.0;
    for (double b : bins) total += b;
    if (total > 0.0)
        for (double& b : bins) b /= total;
    normalized = true;
}

ColorHistogram region_histogram(const RgbImage& rgb, const std::vector<RowSpan>& spans) {
    ColorHistogram h;
    for (const RowSpan& s : spans) {
        const uint8_t* p = rgb.px(s.begin, s.y);
        for (int x = s.begin; x < s.end; ++x, p += 3)
            h.bins[static_cast<size_t>(quantize_color(p[0], p[1], p[2]))] += 1.0;
    }
    return h;
}

double chi_square_distance(const ColorHistogram& a, const ColorHistogram& b) {
    double r = 0.0;
    for (int i = 0; i < kColorBins; ++i) {
        const double pa = a.bins[static_cast<size_t>(i)];
        const double pb = b.bins[static_cast<size_t>(i)];
        const double denom = pa + pb;
        if (denom > 0.0) r += (pa - pb) * (pa - pb) / denom;
    }
    return r;
}

double contrast_score(const RgbImage& working_rgb, const RegionPair& regions) {
    if (regions.external_count < kMinRegionPixels || regions.internal_count < kMinRegionPixels)
        throw EmptyRegion("contrast regions below minimum pixel count");
    ColorHistogram ha = region_histogram(working_rgb, regions.external);
    ColorHistogram hb = region_histogram(working_rgb, regions.internal);
    ha.normalize();
    hb.normalize();
    return chi_square_distance(ha, hb);
}

}  // namespace docdet
