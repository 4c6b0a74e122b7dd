#include "docdet/detector.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>

#include "docdet/errors.hpp"

namespace docdet {

namespace {

double mean_y(const LineCandidate& l) { return 0.5 * (l.a.y + l.b.y); }
double mean_x(const LineCandidate& l) { return 0.5 * (l.a.x + l.b.x); }

int64_t now_us() {
    return std::chrono::duration_cast<std::chrono::microseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

std::vector<geom::Quad> generate_candidates(std::span<const LineCandidate> horizontal,
                                            std::span<const LineCandidate> vertical) {
    if (horizontal.size() < 2 || vertical.size() < 2)
        throw NotEnoughLines("need two lines of each orientation");
    std::vector<geom::Quad> out;
    out.reserve(horizontal.size() * (horizontal.size() - 1) / 2 * vertical.size() *
                (vertical.size() - 1) / 2);
    for (size_t i = 0; i + 1 < horizontal.size(); ++i) {
        for (size_t j = i + 1; j < horizontal.size(); ++j) {
            for (size_t k = 0; k + 1 < vertical.size(); ++k) {
                for (size_t l = k + 1; l < vertical.size(); ++l) {
                    try {
                        out.push_back(geom::quad_from_lines(horizontal[i].line(),
                                                            horizontal[j].line(),
                                                            vertical[k].line(),
                                                            vertical[l].line()));
                    } catch (const ParallelLines&) {
                        // skipped; peak suppression already limits near-duplicates
                    }
                }
            }
        }
    }
    return out;
}

std::vector<ScoredQuad> rank_by_contour(std::span<const geom::Quad> candidates,
                                        const DirectionalEdgeMaps& blurred, double tau) {
    std::vector<ScoredQuad> out;
    out.reserve(candidates.size());
    for (const geom::Quad& q : candidates) {
        ScoredQuad sq;
        sq.quad = q;
        try {
            sq.contour = contour_score(border_features(blurred, q, tau));
        } catch (const DegenerateBorder&) {
            sq.contour = 0.0;
        }
        out.push_back(sq);
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ScoredQuad& a, const ScoredQuad& b) { return a.contour > b.contour; });
    return out;
}

std::vector<ScoredQuad> rank_candidates(std::span<const LineCandidate> horizontal,
                                        std::span<const LineCandidate> vertical,
                                        const DirectionalEdgeMaps& blurred, double tau) {
    if (horizontal.size() < 2 || vertical.size() < 2)
        throw NotEnoughLines("need two lines of each orientation");

    const size_t nh = horizontal.size();
    const size_t nv = vertical.size();

    std::vector<LineRaster> raster_h, raster_v;
    raster_h.reserve(nh);
    raster_v.reserve(nv);
    for (const LineCandidate& l : horizontal) raster_h.push_back(LineRaster::build(blurred, l.a, l.b, tau));
    for (const LineCandidate& l : vertical) raster_v.push_back(LineRaster::build(blurred, l.a, l.b, tau));

    // All pairwise h x v corners, shared by every candidate that uses them.
    struct Corner {
        geom::Point p;
        bool valid = false;
    };
    std::vector<Corner> corners(nh * nv);
    for (size_t i = 0; i < nh; ++i) {
        for (size_t k = 0; k < nv; ++k) {
            Corner& c = corners[i * nv + k];
            try {
                c.p = geom::intersect_lines(horizontal[i].line(), vertical[k].line());
                c.valid = true;
            } catch (const ParallelLines&) {
                c.valid = false;
            }
        }
    }

    std::vector<ScoredQuad> out;
    out.reserve(nh * (nh - 1) / 2 * nv * (nv - 1) / 2);
    for (size_t i = 0; i + 1 < nh; ++i) {
        for (size_t j = i + 1; j < nh; ++j) {
            // Same normalization as quad_from_lines: first line stays on
            // ties, so generation order is reproduced exactly.
            const bool swap_h = mean_y(horizontal[i]) > mean_y(horizontal[j]);
            const size_t top = swap_h ? j : i;
            const size_t bottom = swap_h ? i : j;
            for (size_t k = 0; k + 1 < nv; ++k) {
                for (size_t l = k + 1; l < nv; ++l) {
                    const bool swap_v = mean_x(vertical[k]) > mean_x(vertical[l]);
                    const size_t left = swap_v ? l : k;
                    const size_t right = swap_v ? k : l;
                    const Corner& tl = corners[top * nv + left];
                    const Corner& tr = corners[top * nv + right];
                    const Corner& br = corners[bottom * nv + right];
                    const Corner& bl = corners[bottom * nv + left];
                    if (!tl.valid || !tr.valid || !br.valid || !bl.valid) continue;

                    ScoredQuad sq;
                    sq.quad = geom::Quad{{tl.p, tr.p, br.p, bl.p}};
                    const LineRaster* rasters[4] = {&raster_h[top], &raster_v[right],
                                                    &raster_h[bottom], &raster_v[left]};
                    const geom::Point* pts[5] = {&tl.p, &tr.p, &br.p, &bl.p, &tl.p};
                    double reward = 0.0, inconsistency = 0.0, penalty = 0.0;
                    try {
                        for (int b = 0; b < 4; ++b) {
                            const LineRaster& r = *rasters[b];
                            const double u0 = r.major(*pts[b]);
                            const double u1 = r.major(*pts[b + 1]);
                            const int64_t ma = LineRaster::pixel_index(std::min(u0, u1));
                            const int64_t mb = LineRaster::pixel_index(std::max(u0, u1));
                            const BorderContribution s = border_contribution(r, ma, mb);
                            reward += s.intensity;
                            inconsistency += 1.0 - s.consistency;
                            penalty += s.ext_low + s.ext_high;
                        }
                        sq.contour = reward / (1.0 + inconsistency) - penalty;
                    } catch (const DegenerateBorder&) {
                        sq.contour = 0.0;
                    }
                    out.push_back(sq);
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const ScoredQuad& a, const ScoredQuad& b) { return a.contour > b.contour; });
    return out;
}

DetectionResult detect(const RgbImage& image, const DetectorConfig& cfg) {
    DetectionResult res;
    const int64_t t_start = now_us();

    WorkingImage wi = prepare_working(image);
    res.transform = wi.transform;
    const int64_t t_prep = now_us();
    res.timings.prepare_us = t_prep - t_start;

    const DirectionalEdgeMaps raw = extract_directional_edges(wi.working_gray);
    const int64_t t_edges = now_us();
    res.timings.edges_us = t_edges - t_prep;

    const DirectionalEdgeMaps blurred = blur_along_gradient(raw, cfg.sigma_blur);
    const int64_t t_blur = now_us();
    res.timings.blur_us = t_blur - t_edges;

    const int w = wi.working_gray.width;
    const int h = wi.working_gray.height;
    const HoughSpace hough_h = fht(blurred.horizontal, Orientation::horizontal, 0, 0, w, h);
    const std::array<EdgeStrip, 3> strips = split_vertical_strips(blurred.vertical);
    std::array<HoughSpace, 3> hough_v;
    for (int s = 0; s < 3; ++s)
        hough_v[static_cast<size_t>(s)] =
            fht(strips[static_cast<size_t>(s)].map, Orientation::vertical,
                strips[static_cast<size_t>(s)].offset, s, w, h);
    const int64_t t_hough = now_us();
    res.timings.hough_us = t_hough - t_blur;

    res.lines_horizontal = top_peaks(hough_h, cfg.peaks_horizontal);
    for (const HoughSpace& hs : hough_v) {
        std::vector<LineCandidate> lines = top_peaks(hs, cfg.peaks_vertical_per_strip);
        res.lines_vertical.insert(res.lines_vertical.end(), lines.begin(), lines.end());
    }
    const int64_t t_peaks = now_us();
    res.timings.peaks_us = t_peaks - t_hough;

    if (res.lines_horizontal.size() < 2 || res.lines_vertical.size() < 2) {
        res.flags.failed = true;
        res.timings.total_us = now_us() - t_start;
        return res;
    }

    std::vector<ScoredQuad> scored =
        rank_candidates(res.lines_horizontal, res.lines_vertical, blurred, cfg.tau_edge);
    if (scored.empty()) {
        res.flags.failed = true;
        res.timings.total_us = now_us() - t_start;
        return res;
    }
    const size_t keep = std::min(scored.size(), static_cast<size_t>(std::max(cfg.n_top, 1)));
    res.alternatives.assign(scored.begin(), scored.begin() + static_cast<long>(keep));
    const int64_t t_cand = now_us();
    res.timings.candidates_us = t_cand - t_peaks;

    if (cfg.mode == DetectorConfig::Mode::combined) {
        for (ScoredQuad& alt : res.alternatives) {
            double contrast = 0.0;
            try {
                const RegionPair regions =
                    extract_regions(alt.quad, w, h, cfg.region_margin);
                contrast = contrast_score(wi.working_rgb, regions);
            } catch (const EmptyRegion&) {
                alt.contrast_fallback = true;
                res.flags.empty_region = true;
            }
            alt.contrast = contrast;
            alt.combined = combined_score(alt.contour, contrast, cfg.k);
        }
        std::stable_sort(res.alternatives.begin(), res.alternatives.end(),
                         [](const ScoredQuad& a, const ScoredQuad& b) {
                             return a.combined.value() > b.combined.value();
                         });
    }
    res.timings.rerank_us = now_us() - t_cand;

    res.best = res.transform.to_original(res.alternatives.front().quad);
    res.timings.total_us = now_us() - t_start;
    return res;
}

}  // namespace docdet
