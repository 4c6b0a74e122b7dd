#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace docdet::geom {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

inline Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
inline Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
inline Point operator*(Point a, double s) { return {a.x * s, a.y * s}; }
double cross(Point a, Point b);
double norm(Point a);

/// Infinite line through two distinct points.
struct Line {
    Point p;
    Point q;
};

/// Four vertices ordered (top-left, top-right, bottom-right, bottom-left)
/// by the quad_from_lines construction convention. Non-convex and
/// self-intersecting vertex sets are representable; candidates are never
/// filtered on geometric validity.
struct Quad {
    std::array<Point, 4> v{};

    Point& operator[](int i) { return v[static_cast<size_t>(i)]; }
    const Point& operator[](int i) const { return v[static_cast<size_t>(i)]; }
};

/// Pixel dimensions of the rectified document used as the canonical
/// evaluation frame.
struct TemplateSize {
    int width = 0;
    int height = 0;
};

/// 3x3 projective transform, row-major, normalized so m[8] == 1.
struct Homography {
    std::array<double, 9> m{1, 0, 0, 0, 1, 0, 0, 0, 1};
};

/// Row-major boolean raster with the dimensions of its source frame.
struct Mask {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> bits;

    bool at(int x, int y) const { return bits[static_cast<size_t>(y) * width + x] != 0; }
    int64_t count() const;
};

/// Axis-aligned quad (0,0),(w,0),(w,h),(0,h).
Quad rect_quad(double w, double h);

/// Unique intersection of two non-parallel lines. The point may lie far
/// outside any frame. Throws ParallelLines when the unit direction cross
/// product falls below 1e-9.
Point intersect_lines(const Line& a, const Line& b);

/// Builds the quad bounded by two "mostly horizontal" and two "mostly
/// vertical" lines. Inputs are normalized (h1 above h2 by mean y, v1 left
/// of v2 by mean x) so vertex order is invariant under swapped inputs.
Quad quad_from_lines(Line h1, Line h2, Line v1, Line v2);

/// |shoelace| / 2; degenerate inputs yield 0.
double polygon_area(std::span<const Point> pts);
double polygon_area(const Quad& q);

/// Area of the Sutherland-Hodgman clip of `subject` against convex `clip`.
double intersection_area(const Quad& subject, const Quad& clip);

/// Exact homography mapping m's vertices onto the corners
/// (0,0),(w,0),(w,h),(0,h) of t. Throws DegenerateQuad if the 8x8 system
/// is singular (three near-collinear vertices).
Homography homography_from_quad(const Quad& m, TemplateSize t);

Point apply_homography(const Homography& h, Point p);
Quad apply_homography(const Homography& h, const Quad& q);

/// Pixel-center even-odd rasterization of q clipped to a width x height
/// frame. Pixel (x, y) is set iff its center (x+0.5, y+0.5) lies inside.
Mask rasterize_mask(const Quad& q, int width, int height);

/// Even-odd x-interval decomposition of one raster row (centers at
/// y + 0.5). Returns half-open pixel index ranges [begin, end), clipped
/// to [0, width). Shared by mask rasterization, region extraction and the
/// mask-overlap metric so all of them agree on pixel membership.
struct PixelSpan {
    int begin = 0;
    int end = 0;
};
void quad_row_spans(const Quad& q, int row, int width, std::vector<PixelSpan>& out);

}  // namespace docdet::geom
