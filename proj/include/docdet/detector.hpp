#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "docdet/edges.hpp"
#include "docdet/geometry.hpp"
#include "docdet/hough.hpp"
#include "docdet/image.hpp"
#include "docdet/scoring.hpp"

namespace docdet {

/// Combination coefficient shipped with the build; mirrors
/// data/default_calibration.txt (calibrated on the synthetic benchmark).
inline constexpr double kDefaultCombinationK = 0.507;

struct DetectorConfig {
    enum class Mode { contour, combined };

    Mode mode = Mode::combined;
    int n_top = 11;                   // alternatives re-ranked by the combined score
    double k = kDefaultCombinationK;  // weight of the contour score in k*C + R
    int peaks_horizontal = 15;
    int peaks_vertical_per_strip = 15;
    double sigma_blur = 1.5;
    double tau_edge = kTauEdge;
    double region_margin = kRegionMargin;
};

struct StageTimings {
    int64_t prepare_us = 0;
    int64_t edges_us = 0;
    int64_t blur_us = 0;
    int64_t hough_us = 0;
    int64_t peaks_us = 0;
    int64_t candidates_us = 0;
    int64_t rerank_us = 0;
    int64_t total_us = 0;
};

struct DetectionFlags {
    bool failed = false;        // no quadrilateral could be formed
    bool empty_region = false;  // some alternative fell back to zero contrast
};

struct DetectionResult {
    geom::Quad best;  // original-image coordinates; meaningful iff !flags.failed
    std::vector<ScoredQuad> alternatives;  // working coordinates, active-score descending
    std::vector<LineCandidate> lines_horizontal;
    std::vector<LineCandidate> lines_vertical;
    WorkingTransform transform;
    DetectionFlags flags;
    StageTimings timings;
};

/// Every pair of horizontal lines crossed with every pair of vertical
/// lines, in generation order (outer: h pairs i<j, inner: v pairs k<l).
/// Pairs with any near-parallel corner are skipped; no other geometry
/// test is applied. Throws NotEnoughLines when either orientation has
/// fewer than two candidates.
std::vector<geom::Quad> generate_candidates(std::span<const LineCandidate> horizontal,
                                            std::span<const LineCandidate> vertical);

/// Scores every candidate with the contour score and sorts descending;
/// ties keep generation order. Candidates with a border under 2 px score
/// exactly 0.
std::vector<ScoredQuad> rank_by_contour(std::span<const geom::Quad> candidates,
                                        const DirectionalEdgeMaps& blurred,
                                        double tau = kTauEdge);

/// Fused generate + rank used by detect(): one carrier raster per line
/// is shared across all candidates, so scoring ~1e5 quads stays cheap.
/// Enumeration order and per-border arithmetic match
/// rank_by_contour(generate_candidates(...)).
std::vector<ScoredQuad> rank_candidates(std::span<const LineCandidate> horizontal,
                                        std::span<const LineCandidate> vertical,
                                        const DirectionalEdgeMaps& blurred,
                                        double tau = kTauEdge);

/// Full pipeline: working image -> directional edges -> gradient blur ->
/// fast Hough (full horizontal map + three vertical strips) -> peak
/// lines -> brute-force quad candidates -> contour ranking -> optional
/// contrast re-ranking of the top n_top -> winner mapped back to
/// original coordinates. Deterministic for identical input and config.
DetectionResult detect(const RgbImage& image, const DetectorConfig& cfg = {});

}  // namespace docdet
