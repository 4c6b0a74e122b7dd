#include "docdet/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "docdet/errors.hpp"

namespace docdet::geom {

double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }

double norm(Point a) { return std::sqrt(a.x * a.x + a.y * a.y); }

int64_t Mask::count() const {
    int64_t n = 0;
    for (uint8_t b : bits) n += b != 0;
    return n;
}

Quad rect_quad(double w, double h) {
    return Quad{{Point{0, 0}, Point{w, 0}, Point{w, h}, Point{0, h}}};
}

Point intersect_lines(const Line& a, const Line& b) {
    Point da = a.q - a.p;
    Point db = b.q - b.p;
    const double na = norm(da);
    const double nb = norm(db);
    if (na == 0.0 || nb == 0.0) throw ParallelLines("degenerate line direction");
    da = da * (1.0 / na);
    db = db * (1.0 / nb);
    const double denom = cross(da, db);
    if (std::abs(denom) <= 1e-9) throw ParallelLines("lines are parallel within tolerance");
    // a.p + t*da == b.p + s*db  =>  t = cross(b.p - a.p, db) / cross(da, db)
    const double t = cross(b.p - a.p, db) / denom;
    return a.p + da * t;
}

namespace {

double mean_coord(const Line& l, bool y_axis) {
    return y_axis ? 0.5 * (l.p.y + l.q.y) : 0.5 * (l.p.x + l.q.x);
}

}  // namespace

Quad quad_from_lines(Line h1, Line h2, Line v1, Line v2) {
    if (mean_coord(h1, true) > mean_coord(h2, true)) std::swap(h1, h2);
    if (mean_coord(v1, false) > mean_coord(v2, false)) std::swap(v1, v2);
    Quad q;
    q[0] = intersect_lines(h1, v1);
    q[1] = intersect_lines(h1, v2);
    q[2] = intersect_lines(h2, v2);
    q[3] = intersect_lines(h2, v1);
    return q;
}

double polygon_area(std::span<const Point> pts) {
    if (pts.size() < 3) return 0.0;
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        const Point& a = pts[i];
        const Point& b = pts[(i + 1) % pts.size()];
        s += cross(a, b);
    }
    return std::abs(s) * 0.5;
}

double polygon_area(const Quad& q) {
    return polygon_area(std::span<const Point>(q.v.data(), 4));
}

namespace {

// Signed area sum of a closed polygon (twice the signed area).
double signed_area2(std::span<const Point> pts) {
    double s = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) s += cross(pts[i], pts[(i + 1) % pts.size()]);
    return s;
}

}  // namespace

double intersection_area(const Quad& subject, const Quad& clip) {
    // Orient the clip polygon counter-clockwise so the inside test is uniform.
    std::array<Point, 4> c = clip.v;
    if (signed_area2(std::span<const Point>(c.data(), 4)) < 0.0) std::reverse(c.begin(), c.end());

    std::vector<Point> poly(subject.v.begin(), subject.v.end());
    std::vector<Point> next;
    for (int e = 0; e < 4 && !poly.empty(); ++e) {
        const Point a = c[static_cast<size_t>(e)];
        const Point b = c[static_cast<size_t>((e + 1) % 4)];
        const Point dir = b - a;
        next.clear();
        for (size_t i = 0; i < poly.size(); ++i) {
            const Point cur = poly[i];
            const Point nxt = poly[(i + 1) % poly.size()];
            const double dc = cross(dir, cur - a);
            const double dn = cross(dir, nxt - a);
            const bool cur_in = dc >= 0.0;
            const bool nxt_in = dn >= 0.0;
            if (cur_in) next.push_back(cur);
            if (cur_in != nxt_in) {
                const double t = dc / (dc - dn);
                next.push_back(cur + (nxt - cur) * t);
            }
        }
        poly.swap(next);
    }
    return polygon_area(std::span<const Point>(poly.data(), poly.size()));
}

Homography homography_from_quad(const Quad& m, TemplateSize t) {
    const double w = static_cast<double>(t.width);
    const double h = static_cast<double>(t.height);
    const std::array<Point, 4> dst{Point{0, 0}, Point{w, 0}, Point{w, h}, Point{0, h}};

    // Reject collinear vertex triples early: they make the system singular
    // or numerically useless.
    double scale = 0.0;
    for (int i = 0; i < 4; ++i) scale = std::max(scale, std::abs(m[i].x) + std::abs(m[i].y));
    scale = std::max(scale, 1.0);
    for (int i = 0; i < 4; ++i) {
        const Point a = m[i], b = m[(i + 1) % 4], c = m[(i + 2) % 4];
        if (std::abs(cross(b - a, c - a)) <= 1e-9 * scale * scale)
            throw DegenerateQuad("three quad vertices are collinear");
    }

    // Direct 8-unknown linear solve with m33 fixed to 1:
    //   u = (m11 x + m12 y + m13) / (m31 x + m32 y + 1)
    double A[8][9] = {};
    for (int i = 0; i < 4; ++i) {
        const double x = m[i].x, y = m[i].y;
        const double u = dst[static_cast<size_t>(i)].x, v = dst[static_cast<size_t>(i)].y;
        double* r0 = A[2 * i];
        double* r1 = A[2 * i + 1];
        r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -u * x; r0[7] = -u * y; r0[8] = u;
        r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -v * x; r1[7] = -v * y; r1[8] = v;
    }

    // Gaussian elimination with partial pivoting.
    for (int col = 0; col < 8; ++col) {
        int piv = col;
        for (int r = col + 1; r < 8; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-12) throw DegenerateQuad("singular correspondence system");
        if (piv != col)
            for (int c = 0; c < 9; ++c) std::swap(A[piv][c], A[col][c]);
        for (int r = 0; r < 8; ++r) {
            if (r == col) continue;
            const double f = A[r][col] / A[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < 9; ++c) A[r][c] -= f * A[col][c];
        }
    }

    Homography out;
    for (int i = 0; i < 8; ++i) out.m[static_cast<size_t>(i)] = A[i][8] / A[i][i];
    out.m[8] = 1.0;
    return out;
}

Point apply_homography(const Homography& h, Point p) {
    const double* m = h.m.data();
    const double d = m[6] * p.x + m[7] * p.y + m[8];
    if (std::abs(d) <= 1e-12) throw PointAtInfinity("mapped point at infinity");
    return {(m[0] * p.x + m[1] * p.y + m[2]) / d, (m[3] * p.x + m[4] * p.y + m[5]) / d};
}

Quad apply_homography(const Homography& h, const Quad& q) {
    Quad out;
    for (int i = 0; i < 4; ++i) out[i] = apply_homography(h, q[i]);
    return out;
}

void quad_row_spans(const Quad& q, int row, int width, std::vector<PixelSpan>& out) {
    out.clear();
    const double yc = row + 0.5;
    // Half-open crossing rule: an edge spanning [ylo, yhi) contributes one
    // crossing, so vertices are never double counted.
    double xs[4];
    int n = 0;
    for (int i = 0; i < 4; ++i) {
        const Point a = q[i];
        const Point b = q[(i + 1) % 4];
        const double ylo = std::min(a.y, b.y);
        const double yhi = std::max(a.y, b.y);
        if (!(ylo <= yc && yc < yhi)) continue;
        xs[n++] = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
    }
    std::sort(xs, xs + n);
    for (int i = 0; i + 1 < n; i += 2) {
        // Pixel centers x+0.5 in [xs[i], xs[i+1]). Clamp in double space first:
        // crossings of far-out quads can exceed the int range.
        const double lo = std::max(xs[i] - 0.5, 0.0);
        const double hi = std::min(xs[i + 1] - 0.5, static_cast<double>(width));
        if (lo >= hi) continue;
        const int begin = static_cast<int>(std::ceil(lo));
        const int end = static_cast<int>(std::ceil(hi));
        if (begin < end) out.push_back({begin, std::min(end, width)});
    }
}

Mask rasterize_mask(const Quad& q, int width, int height) {
    Mask m;
    m.width = width;
    m.height = height;
    m.bits.assign(static_cast<size_t>(width) * height, 0);
    std::vector<PixelSpan> spans;
    for (int y = 0; y < height; ++y) {
        quad_row_spans(q, y, width, spans);
        uint8_t* rowp = m.bits.data() + static_cast<size_t>(y) * width;
        for (const PixelSpan& s : spans) std::fill(rowp + s.begin, rowp + s.end, uint8_t{1});
    }
    return m;
}

}  // namespace docdet::geom
