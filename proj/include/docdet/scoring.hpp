#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "docdet/edges.hpp"
#include "docdet/geometry.hpp"
#include "docdet/hough.hpp"
#include "docdet/image.hpp"

namespace docdet {

inline constexpr double kTauEdge = 0.05;       // edge-presence threshold for consistency
inline constexpr double kRegionMargin = 5.0;   // inward/outward region offset, px
inline constexpr int kExtensionLength = 10;    // px past each corner along the border line
inline constexpr int64_t kMinRegionPixels = 64;

/// Canonical rasterization of one carrier line over the edge map matching
/// its orientation class, with prefix sums so border statistics are O(1)
/// range queries. The raster is a pure function of the mathematical line:
/// for every major-axis pixel index the minor coordinate is the nearest
/// pixel row/column of the line evaluated at the pixel center, which for
/// tangents in [-1, 1] reproduces the Bresenham pixel chain. All borders
/// sharing a carrier therefore read identical pixels.
class LineRaster {
public:
    /// Classifies the line by its own tangent (ties to horizontal) and
    /// samples the corresponding map. Throws DegenerateBorder when the
    /// two points coincide.
    static LineRaster build(const DirectionalEdgeMaps& maps, geom::Point p, geom::Point q,
                            double tau = kTauEdge);

    struct SpanStats {
        double sum = 0.0;       // edge intensity over in-frame pixels
        int64_t above_tau = 0;  // in-frame pixels with intensity > tau
        int64_t in_frame = 0;   // in-frame pixel count
        int64_t length = 0;     // full span length including out-of-frame pixels
    };

    /// Statistics over major-axis pixel indices [ma, mb] (inclusive).
    SpanStats span_stats(int64_t ma, int64_t mb) const;

    bool horizontal_class() const { return horizontal_; }
    /// Major-axis coordinate of a point (x for the horizontal class).
    double major(geom::Point p) const { return horizontal_ ? p.x : p.y; }
    /// Nearest pixel index along the major axis for a continuous coordinate.
    static int64_t pixel_index(double coord);

private:
    bool horizontal_ = true;
    int frame_major_ = 0;
    std::vector<double> pref_sum_;
    std::vector<int32_t> pref_tau_;
    std::vector<int32_t> pref_in_;
};

/// Contribution of one border between raster major indices [ma, mb]:
/// mean intensity, consistency, and the means of the two 10-px extension
/// intervals just past the span. Throws DegenerateBorder for spans under
/// 2 px. Both border_features and the bulk candidate ranking evaluate
/// borders through this one routine.
struct BorderContribution {
    double intensity = 0.0;
    double consistency = 0.0;
    double ext_low = 0.0;
    double ext_high = 0.0;
};
BorderContribution border_contribution(const LineRaster& raster, int64_t ma, int64_t mb);

/// Mean edge intensity w, consistency c per border, and the mean
/// intensity of the eight 10-px corner extensions. Out-of-frame border
/// pixels contribute zero intensity but count toward the border length;
/// extensions average over their in-frame pixels only.
struct BorderFeatures {
    std::array<double, 4> intensity{};    // w(b)
    std::array<double, 4> consistency{};  // c(b)
    std::array<double, 8> extension{};    // two intervals per border
};

/// Throws DegenerateBorder when any border spans fewer than 2 px.
BorderFeatures border_features(const DirectionalEdgeMaps& blurred, const geom::Quad& q,
                               double tau = kTauEdge);

/// Reward of edge intensity damped by inconsistency, minus the corner
/// extension penalty:  sum(w) / (1 + sum(1 - c)) - sum(w').
double contour_score(const BorderFeatures& f);

/// Row intervals of the external band A and internal region B around a
/// candidate quad, clipped to the frame.
struct RowSpan {
    int y = 0;
    int begin = 0;
    int end = 0;  // half-open pixel range
};

struct RegionPair {
    std::vector<RowSpan> external;  // A: inside the outward-offset quad, outside q
    std::vector<RowSpan> internal;  // B: inside the inward-offset quad
    int64_t external_count = 0;
    int64_t internal_count = 0;
};

/// Offsets each border line of q by `margin` px toward (B) and away from
/// (A) the centroid and collects pixel rows. Throws EmptyRegion when
/// either region ends up with fewer than kMinRegionPixels pixels (the
/// caller falls back to a zero contrast score).
RegionPair extract_regions(const geom::Quad& q, int frame_width, int frame_height,
                           double margin = kRegionMargin);

/// Normalized 512-bin histogram of quantized colors.
struct ColorHistogram {
    std::array<double, kColorBins> bins{};
    bool normalized = false;

    void normalize();
};

ColorHistogram region_histogram(const RgbImage& rgb, const std::vector<RowSpan>& spans);

/// Chi-square distance between two normalized histograms; bins with zero
/// total mass contribute nothing. Always in [0, 2].
double chi_square_distance(const ColorHistogram& a, const ColorHistogram& b);

/// Chi-square contrast between the external and internal regions.
double contrast_score(const RgbImage& working_rgb, const RegionPair& regions);

inline double combined_score(double contour, double contrast, double k) {
    return k * contour + contrast;
}

/// A candidate with its scores. `contrast`/`combined` stay unset in
/// contour-only mode.
struct ScoredQuad {
    geom::Quad quad;  // working coordinates
    double contour = 0.0;
    std::optional<double> contrast;
    std::optional<double> combined;
    bool contrast_fallback = false;  // region construction failed, contrast forced to 0
};

}  // namespace docdet
