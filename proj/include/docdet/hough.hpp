#pragma once

#include <array>
#include <vector>

#include "docdet/edges.hpp"
#include "docdet/geometry.hpp"

namespace docdet {

enum class Orientation { horizontal, vertical };

/// Accumulator of the fast Hough transform over one edge map (or strip).
///
/// The transform sums edge intensities along dyadic line patterns. A
/// pattern of height n (a power of two) and slope step t is defined
/// recursively on the recursion axis:
///
///   offsets(1, 0)    = [0]
///   offsets(2h, t)   = offsets(h, floor(t/2))
///                      ++ [ceil(t/2) + o  for o in offsets(h, floor(t/2))]
///
/// so the pattern drifts monotonically by exactly t cells across its n
/// rows and approximates the straight segment between (x0, 0) and
/// (x0 + t, n-1). The map is zero-padded along the recursion axis up to
/// n = next power of two, and padded on the low side of the drift axis by
/// n-1 cells so lines entering from outside the frame are represented.
/// Negative slopes are obtained by transforming the drift-mirrored map.
struct HoughSpace {
    Orientation orientation = Orientation::vertical;
    int strip_index = 0;   // 0..2 for vertical strips, 0 for the horizontal map
    int strip_offset = 0;  // y offset of the strip in the working frame
    int span = 0;          // recursion-axis length before padding
    int padded = 0;        // next power of two >= span
    int drift_len = 0;     // drift-axis length
    int shifts = 0;        // drift_len + padded - 1
    int frame_width = 0;   // full working frame, for line conversion
    int frame_height = 0;

    // Planes are indexed [slope * shifts + shift], slope in [0, padded),
    // shift in [0, shifts). `pos` drifts toward +drift, `neg` is computed
    // on the mirrored map and drifts toward -drift.
    std::vector<double> pos;
    std::vector<double> neg;

    double pos_at(int slope, int shift) const {
        return pos[static_cast<size_t>(slope) * shifts + shift];
    }
    double neg_at(int slope, int shift) const {
        return neg[static_cast<size_t>(slope) * shifts + shift];
    }

    /// Drift coordinate at recursion row 0 for a cell of the positive
    /// (mirrored: negative) plane.
    int pos_entry(int shift) const { return shift - (padded - 1); }
    int neg_entry(int shift) const { return drift_len - 1 - (shift - (padded - 1)); }
};

/// One extracted line in full working-image coordinates.
struct LineCandidate {
    geom::Point a;  // endpoints clipped to the frame boundary
    geom::Point b;
    Orientation orientation = Orientation::vertical;
    double strength = 0.0;
    int strip = 0;
    int entry = 0;  // drift coordinate at the strip's first recursion row
    int slope = 0;  // signed drift across the strip

    geom::Line line() const { return {a, b}; }
};

/// Fast Hough transform of one map. For vertical orientation the
/// recursion runs down the rows and lines drift along x; for horizontal
/// the map is walked transposed. Strips pass their placement so that
/// extracted lines land in full-frame coordinates.
HoughSpace fht(const EdgeMap& map, Orientation orientation, int strip_offset = 0,
               int strip_index = 0, int frame_width = -1, int frame_height = -1);

struct EdgeStrip {
    EdgeMap map;
    int offset = 0;
};

/// Three horizontal cuts of equal height (remainder absorbed by the
/// bottom strip). Throws ImageTooSmall when height < 3.
std::array<EdgeStrip, 3> split_vertical_strips(const EdgeMap& map);

/// Up to `count` strongest local maxima of the accumulator in descending
/// strength, greedily suppressing everything within Chebyshev distance 2
/// of an accepted peak in (entry, slope) space. Only nonzero cells that
/// are at least as large as their eight neighbours qualify. Patterns
/// drift at most one cell per padded row, so every returned line's
/// tangent lies in [-1, 1] relative to its orientation axis.
std::vector<LineCandidate> top_peaks(const HoughSpace& space, int count);

}  // namespace docdet
