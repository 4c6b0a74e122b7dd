#include "docdet/hough.hpp"

#include <algorithm>
#include <cmath>

#include "docdet/errors.hpp"

namespace docdet {

namespace {

int next_pow2(int v) {
    int n = 1;
    while (n < v) n *= 2;
    return n;
}

// Bottom-up dyadic accumulation. `level` rows are grouped in blocks of
// size m; row (block_base + t) holds the sums for slope t within that
// block. Merging two half-blocks: slope t splits into floor(t/2) in both
// halves, with the lower half entered at drift offset ceil(t/2).
std::vector<double> run_fht(const std::vector<double>& level0, int n, int shifts) {
    std::vector<double> cur = level0;
    std::vector<double> next(cur.size());
    for (int m = 1; m < n; m *= 2) {
        const int m2 = 2 * m;
        for (int base = 0; base < n; base += m2) {
            for (int t = 0; t < m2; ++t) {
                const int t0 = t / 2;
                const int t1 = t - t0;
                const double* top = cur.data() + static_cast<size_t>(base + t0) * shifts;
                const double* bot = cur.data() + static_cast<size_t>(base + m + t0) * shifts;
                double* dst = next.data() + static_cast<size_t>(base + t) * shifts;
                const int lim = shifts - t1;
                for (int s = 0; s < lim; ++s) dst[s] = top[s] + bot[s + t1];
                for (int s = std::max(lim, 0); s < shifts; ++s) dst[s] = top[s];
            }
        }
        cur.swap(next);
    }
    return cur;
}

}  // namespace

HoughSpace fht(const EdgeMap& map, Orientation orientation, int strip_offset, int strip_index,
               int frame_width, int frame_height) {
    if (map.width <= 0 || map.height <= 0) throw ImageTooSmall("empty edge map");

    HoughSpace hs;
    hs.orientation = orientation;
    hs.strip_index = strip_index;
    hs.strip_offset = strip_offset;
    const bool vertical = orientation == Orientation::vertical;
    hs.span = vertical ? map.height : map.width;
    hs.drift_len = vertical ? map.width : map.height;
    hs.padded = next_pow2(hs.span);
    hs.shifts = hs.drift_len + hs.padded - 1;
    hs.frame_width = frame_width >= 0 ? frame_width : map.width;
    hs.frame_height = frame_height >= 0 ? frame_height
                      : vertical      ? strip_offset + map.height
                                      : map.height;

    const int n = hs.padded;
    const int shifts = hs.shifts;
    const int pad = n - 1;

    // Level-0 rows: recursion row r at drift coordinate s - pad.
    std::vector<double> level0(static_cast<size_t>(n) * shifts, 0.0);
    auto fill = [&](bool mirror) {
        std::fill(level0.begin(), level0.end(), 0.0);
        for (int r = 0; r < hs.span; ++r) {
            double* row = level0.data() + static_cast<size_t>(r) * shifts;
            for (int c = 0; c < hs.drift_len; ++c) {
                const int cc = mirror ? hs.drift_len - 1 - c : c;
                const float v = vertical ? map.at(cc, r) : map.at(r, cc);
                row[pad + c] = v;
            }
        }
    };

    fill(false);
    hs.pos = run_fht(level0, n, shifts);
    fill(true);
    hs.neg = run_fht(level0, n, shifts);
    return hs;
}

std::array<EdgeStrip, 3> split_vertical_strips(const EdgeMap& map) {
    if (map.height < 3) throw ImageTooSmall("need at least 3 rows to form strips");
    const int h1 = (map.height + 2) / 3;
    const int heights[3] = {h1, h1, map.height - 2 * h1};
    std::array<EdgeStrip, 3> strips;
    int offset = 0;
    for (int i = 0; i < 3; ++i) {
        EdgeStrip& s = strips[static_cast<size_t>(i)];
        s.offset = offset;
        s.map.width = map.width;
        s.map.height = heights[i];
        const auto begin = map.values.begin() + static_cast<size_t>(offset) * map.width;
        s.map.values.assign(begin, begin + static_cast<size_t>(heights[i]) * map.width);
        offset += heights[i];
    }
    return strips;
}

namespace {

struct PeakCell {
    double value;
    int entry;  // drift coordinate at recursion row 0
    int slope;  // signed drift across the strip
};

bool cell_less(const PeakCell& a, const PeakCell& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.entry != b.entry) return a.entry < b.entry;
    return a.slope < b.slope;
}

// Clips the infinite line through (a, b) to the frame rectangle. Falls
// back to the anchors if the line misses the frame entirely.
void clip_to_frame(geom::Point& a, geom::Point& b, double w, double h) {
    const geom::Point d = b - a;
    double lo = -1e300, hi = 1e300;
    const double mins[2] = {0.0, 0.0};
    const double maxs[2] = {w, h};
    const double pos[2] = {a.x, a.y};
    const double dir[2] = {d.x, d.y};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dir[axis]) < 1e-12) {
            if (pos[axis] < mins[axis] || pos[axis] > maxs[axis]) return;
            continue;
        }
        double t0 = (mins[axis] - pos[axis]) / dir[axis];
        double t1 = (maxs[axis] - pos[axis]) / dir[axis];
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    }
    if (lo >= hi) return;
    const geom::Point na = a + d * lo;
    const geom::Point nb = a + d * hi;
    a = na;
    b = nb;
}

}  // namespace

std::vector<LineCandidate> top_peaks(const HoughSpace& space, int count) {
    std::vector<LineCandidate> out;
    if (count < 1 || space.span < 2) return out;

    // A pattern with slope step t drifts t cells over the padded block of
    // n rows, i.e. at most one cell per row: every slope satisfies the
    // tangent-in-[-1,1] restriction by construction.
    const int max_slope = space.padded - 1;

    // Both sign planes merged into one (entry, signed slope) matrix so
    // local maxima are well defined across the zero-slope seam. A strong
    // straight feature forms a smooth ridge here; without the local-max
    // requirement its shoulder cells would crowd out weaker true lines.
    const int entry_lo = -(space.padded - 1);
    const int entry_n = space.drift_len + 2 * (space.padded - 1);
    const int slope_n = 2 * max_slope + 1;
    std::vector<double> grid(static_cast<size_t>(entry_n) * slope_n, 0.0);
    auto at = [&](int entry, int slope) -> double& {
        return grid[static_cast<size_t>(entry - entry_lo) * slope_n + (slope + max_slope)];
    };
    for (int t = 0; t <= max_slope; ++t) {
        const double* row = space.pos.data() + static_cast<size_t>(t) * space.shifts;
        for (int s = 0; s < space.shifts; ++s) at(space.pos_entry(s), t) = row[s];
    }
    for (int t = 1; t <= max_slope; ++t) {
        const double* row = space.neg.data() + static_cast<size_t>(t) * space.shifts;
        for (int s = 0; s < space.shifts; ++s) at(space.neg_entry(s), -t) = row[s];
    }

    std::vector<PeakCell> cells;
    for (int e = 0; e < entry_n; ++e) {
        for (int t = 0; t < slope_n; ++t) {
            const double v = grid[static_cast<size_t>(e) * slope_n + t];
            if (v <= 0.0) continue;
            bool is_max = true;
            for (int de = -1; de <= 1 && is_max; ++de) {
                for (int dt = -1; dt <= 1; ++dt) {
                    if (de == 0 && dt == 0) continue;
                    const int ne = e + de, nt = t + dt;
                    if (ne < 0 || nt < 0 || ne >= entry_n || nt >= slope_n) continue;
                    if (grid[static_cast<size_t>(ne) * slope_n + nt] > v) {
                        is_max = false;
                        break;
                    }
                }
            }
            if (is_max) cells.push_back({v, e + entry_lo, t - max_slope});
        }
    }
    std::sort(cells.begin(), cells.end(), cell_less);

    std::vector<PeakCell> accepted;
    for (const PeakCell& c : cells) {
        if (static_cast<int>(accepted.size()) >= count) break;
        bool suppressed = false;
        for (const PeakCell& a : accepted) {
            if (std::max(std::abs(a.entry - c.entry), std::abs(a.slope - c.slope)) <= 2) {
                suppressed = true;
                break;
            }
        }
        if (suppressed) continue;
        accepted.push_back(c);

        LineCandidate lc;
        lc.orientation = space.orientation;
        lc.strength = c.value;
        lc.strip = space.strip_index;
        lc.entry = c.entry;
        lc.slope = c.slope;
        // The straight-line reading of the pattern runs from (entry, 0) to
        // (entry + slope, padded - 1); anchor it on the strip's visible
        // rows, scaling the drift accordingly.
        const double visible_drift =
            static_cast<double>(c.slope) * (space.span - 1) / (space.padded - 1);
        if (space.orientation == Orientation::vertical) {
            lc.a = {c.entry + 0.5, space.strip_offset + 0.5};
            lc.b = {c.entry + visible_drift + 0.5, space.strip_offset + space.span - 0.5};
        } else {
            lc.a = {0.5, c.entry + 0.5};
            lc.b = {space.span - 0.5, c.entry + visible_drift + 0.5};
        }
        clip_to_frame(lc.a, lc.b, space.frame_width, space.frame_height);
        out.push_back(lc);
    }
    return out;
}

}  // namespace docdet
