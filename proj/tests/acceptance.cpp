// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Criterion 7 needs a local MIDV-500 copy and is
// skipped unless DOCDET_MIDV500_ROOT is set.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "docdet/calibration.hpp"
#include "docdet/datasets.hpp"
#include "docdet/detector.hpp"
#include "docdet/evaluation.hpp"
#include "docdet/geometry.hpp"
#include "docdet/hough.hpp"
#include "docdet/scoring.hpp"
#include "docdet/synthetic.hpp"
#include "support/oracles.hpp"

using namespace docdet;

namespace {

int failures = 0;
int skips = 0;

void report(int criterion, const char* name, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    if (!pass) ++failures;
}

void report_skip(int criterion, const char* name, const std::string& why) {
    std::printf("[SKIP] criterion %d: %s (%s)\n", criterion, name, why.c_str());
    ++skips;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform(rng); }

double elapsed_s(std::chrono::steady_clock::time_point from) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - from).count();
}

// --- criterion 1: FHT equals the dyadic-pattern oracle ---------------------

void criterion_fht() {
    const auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(0xfacade);
    long cells = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const int w = 4 + static_cast<int>(rng() % 29);
        const int h = 4 + static_cast<int>(rng() % 29);
        EdgeMap map = EdgeMap::zeros(w, h);
        for (float& v : map.values)
            if (uniform(rng) < 0.4) v = static_cast<float>(uniform(rng));
        const Orientation o = (trial & 1) ? Orientation::horizontal : Orientation::vertical;
        const HoughSpace hs = fht(map, o);
        for (int t = 0; t < hs.padded; ++t) {
            for (int s = 0; s < hs.shifts; ++s) {
                const double expect_pos = test::brute_fht_cell(map, o, false, t, s, hs.padded);
                const double expect_neg = test::brute_fht_cell(map, o, true, t, s, hs.padded);
                const double scale_pos = std::max(1.0, std::abs(expect_pos));
                const double scale_neg = std::max(1.0, std::abs(expect_neg));
                worst = std::max(worst, std::abs(hs.pos_at(t, s) - expect_pos) / scale_pos);
                worst = std::max(worst, std::abs(hs.neg_at(t, s) - expect_neg) / scale_neg);
                cells += 2;
            }
        }
    }
    const double secs = elapsed_s(start);
    char detail[160];
    std::snprintf(detail, sizeof(detail), "%ld cells, worst rel err %.2e, %.2f s", cells, worst,
                  secs);
    report(1, "fast Hough transform equals the brute-force dyadic oracle",
           worst <= 1e-6 && secs < 5.0, detail);
}

// --- criterion 2: geometry oracles ------------------------------------------

geom::Quad random_quad(std::mt19937_64& rng, double scale) {
    for (;;) {
        geom::Quad q;
        const double w = uniform(rng, 0.4, 1.0) * scale;
        const double h = uniform(rng, 0.4, 1.0) * scale;
        const geom::Point base{uniform(rng, 0.0, scale), uniform(rng, 0.0, scale)};
        const geom::Point corners[4] = {{0, 0}, {w, 0}, {w, h}, {0, h}};
        for (int i = 0; i < 4; ++i)
            q[i] = {base.x + corners[i].x + uniform(rng, -0.2, 0.2) * w,
                    base.y + corners[i].y + uniform(rng, -0.2, 0.2) * h};
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
            const geom::Point a = q[(i + 1) % 4] - q[i];
            const geom::Point b = q[(i + 2) % 4] - q[(i + 1) % 4];
            if (std::abs(geom::cross(a, b)) < 1e-3 * scale * scale) ok = false;
        }
        if (ok) return q;
    }
}

void criterion_geometry() {
    std::mt19937_64 rng(0xbead);
    double worst_reproj = 0.0;
    const geom::TemplateSize t{856, 540};
    const geom::Quad corners = geom::rect_quad(t.width, t.height);
    for (int trial = 0; trial < 1000; ++trial) {
        const geom::Quad m = random_quad(rng, 500.0);
        const geom::Homography h = geom::homography_from_quad(m, t);
        for (int i = 0; i < 4; ++i) {
            const geom::Point p = geom::apply_homography(h, m[i]);
            worst_reproj = std::max({worst_reproj, std::abs(p.x - corners[i].x),
                                     std::abs(p.y - corners[i].y)});
        }
    }

    long mask_mismatch = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const geom::Quad q = random_quad(rng, 60.0);
        const geom::Mask m = geom::rasterize_mask(q, 64, 64);
        for (int y = 0; y < 64; ++y)
            for (int x = 0; x < 64; ++x)
                if (m.at(x, y) != test::point_in_quad(q, x + 0.5, y + 0.5)) ++mask_mismatch;
    }

    const geom::Quad unit = geom::rect_quad(1, 1);
    geom::Quad far = unit;
    for (int i = 0; i < 4; ++i) far[i].x += 9.0;
    geom::Quad half = unit;
    for (int i = 0; i < 4; ++i) half[i].x += 0.5;
    const double inter_same = geom::intersection_area(unit, unit);
    const double inter_far = geom::intersection_area(far, unit);
    const double inter_half = geom::intersection_area(half, unit);
    const double uni_half = 2.0 - inter_half;
    const bool iou_exact = std::abs(inter_same - 1.0) <= 1e-12 &&
                           std::abs(inter_far) <= 1e-12 &&
                           std::abs(inter_half / uni_half - 1.0 / 3.0) <= 1e-12;

    char detail[160];
    std::snprintf(detail, sizeof(detail),
                  "reproj %.2e px, %ld mask mismatches, IoU cases %s", worst_reproj,
                  mask_mismatch, iou_exact ? "exact" : "off");
    report(2, "homography, mask and IoU oracles",
           worst_reproj < 1e-6 && mask_mismatch == 0 && iou_exact, detail);
}

// --- criterion 3: chi-square properties -------------------------------------

void criterion_chi_square() {
    std::mt19937_64 rng(0xc0ffee);
    bool ok = true;
    std::string why = "100 random pairs";
    for (int trial = 0; trial < 100 && ok; ++trial) {
        ColorHistogram a, b;
        for (int i = 0; i < kColorBins; ++i) {
            if (uniform(rng) < 0.25) a.bins[static_cast<size_t>(i)] = uniform(rng);
            if (uniform(rng) < 0.25) b.bins[static_cast<size_t>(i)] = uniform(rng);
        }
        a.bins[static_cast<size_t>(trial % kColorBins)] += 0.2;
        b.bins[static_cast<size_t>((trial * 5 + 1) % kColorBins)] += 0.2;
        a.normalize();
        b.normalize();
        const double r = chi_square_distance(a, b);
        if (r < 0.0 || r > 2.0 + 1e-12) { ok = false; why = "range violated"; }
        if (std::abs(chi_square_distance(b, a) - r) > 1e-12) { ok = false; why = "asymmetric"; }

        std::array<int, kColorBins> perm;
        for (int i = 0; i < kColorBins; ++i) perm[static_cast<size_t>(i)] = i;
        std::shuffle(perm.begin(), perm.end(), rng);
        ColorHistogram pa, pb;
        for (int i = 0; i < kColorBins; ++i) {
            pa.bins[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
                a.bins[static_cast<size_t>(i)];
            pb.bins[static_cast<size_t>(perm[static_cast<size_t>(i)])] =
                b.bins[static_cast<size_t>(i)];
        }
        pa.normalized = pb.normalized = true;
        if (std::abs(chi_square_distance(pa, pb) - r) > 1e-12) {
            ok = false;
            why = "not permutation invariant";
        }
    }

    ColorHistogram same;
    same.bins[17] = 1.0;
    same.normalized = true;
    if (std::abs(chi_square_distance(same, same)) > 1e-12) { ok = false; why = "identical != 0"; }
    ColorHistogram da, db;
    da.bins[3] = 1.0;
    db.bins[4] = 1.0;
    da.normalized = db.normalized = true;
    if (std::abs(chi_square_distance(da, db) - 2.0) > 1e-12) { ok = false; why = "disjoint != 2"; }

    report(3, "chi-square contrast properties", ok, why);
}

// --- criterion 4: calibrator equals the dense grid oracle -------------------

void criterion_calibrator() {
    std::mt19937_64 rng(0x5eed);
    int agree = 0;
    const int sets = 100;
    for (int trial = 0; trial < sets; ++trial) {
        std::vector<TrainingSample> samples;
        const int n_samples = 4 + static_cast<int>(rng() % 10);
        for (int s = 0; s < n_samples; ++s) {
            TrainingSample ts;
            const int n = 2 + static_cast<int>(rng() % 10);
            for (int c = 0; c < n; ++c) {
                CandidateScore cs;
                // Contour scores on a coarse lattice keep envelope
                // breakpoints bounded so the dense grid stays finite.
                cs.contour = 0.25 * static_cast<double>(rng() % 13);
                cs.contrast = uniform(rng, 0.0, 2.0);
                cs.correct = (rng() & 3) == 0;
                ts.candidates.push_back(cs);
            }
            samples.push_back(std::move(ts));
        }
        const CalibrationResult r = optimize_k(samples);
        const double k_max = test::max_breakpoint(samples) + 1.0;
        const long grid = test::grid_best_count(samples, k_max, 1e-4);
        if (r.count == grid) ++agree;
    }
    char detail[96];
    std::snprintf(detail, sizeof(detail), "%d/%d sample sets agree exactly", agree, sets);
    report(4, "coefficient optimizer equals the dense grid search", agree == sets, detail);
}

// --- criteria 5 and 6: synthetic end-to-end and latency ----------------------

void criterion_synthetic_and_latency() {
    const auto start = std::chrono::steady_clock::now();
    const Dataset ds = make_synthetic_dataset(SyntheticOptions{});

    DetectorConfig combined;
    combined.mode = DetectorConfig::Mode::combined;
    const EvalReport rep_combined = evaluate(ds, combined, 1);

    DetectorConfig contour;
    contour.mode = DetectorConfig::Mode::contour;
    const EvalReport rep_contour = evaluate(ds, contour, 1);
    const double secs = elapsed_s(start);

    const SubsetStats* all = rep_combined.subset("all");
    const SubsetStats* adv_combined = rep_combined.subset("adversarial");
    const SubsetStats* adv_contour = rep_contour.subset("adversarial");
    const bool have = all && adv_combined && adv_contour;
    const double acc = have ? all->accuracy() : 0.0;
    const bool pass = have && acc >= 0.95 && adv_combined->accuracy() >= adv_contour->accuracy() &&
                      secs < 60.0;
    char detail[200];
    std::snprintf(detail, sizeof(detail),
                  "combined %.1f%% on %ld frames; adversarial combined %.1f%% vs contour %.1f%%; "
                  "%.1f s",
                  100.0 * acc, have ? all->frames : 0,
                  have ? 100.0 * adv_combined->accuracy() : 0.0,
                  have ? 100.0 * adv_contour->accuracy() : 0.0, secs);
    report(5, "synthetic end-to-end detection", pass, detail);

    // Criterion 6: mean single-threaded detect latency at working size.
    int64_t total_us = 0;
    const int latency_frames = 40;
    for (int i = 0; i < latency_frames; ++i) {
        const DetectionResult r = detect(ds.items[static_cast<size_t>(i)].image, combined);
        total_us += r.timings.total_us;
    }
    const double mean_ms = static_cast<double>(total_us) / latency_frames / 1000.0;
    char lat_detail[96];
    std::snprintf(lat_detail, sizeof(lat_detail), "mean %.1f ms over %d frames", mean_ms,
                  latency_frames);
    report(6, "mean detect latency <= 200 ms", mean_ms <= 200.0, lat_detail);
}

// --- criterion 7: MIDV-500 replication (optional) ---------------------------

void criterion_midv500() {
    const char* root = std::getenv("DOCDET_MIDV500_ROOT");
    if (root == nullptr || root[0] == '\0') {
        report_skip(7, "MIDV-500 replication",
                    "set DOCDET_MIDV500_ROOT to a converted dataset copy to enable");
        return;
    }
    const Dataset ds = load_midv500(root);
    const int jobs = 4;

    DetectorConfig combined;
    combined.mode = DetectorConfig::Mode::combined;
    const EvalReport rep_combined = evaluate(ds, combined, jobs);
    DetectorConfig contour;
    contour.mode = DetectorConfig::Mode::contour;
    const EvalReport rep_contour = evaluate(ds, contour, jobs);

    const SubsetStats* all_comb = rep_combined.subset("all");
    const SubsetStats* all_cont = rep_contour.subset("all");
    const SubsetStats* in3 = rep_combined.subset("3in");
    bool pass = all_comb && all_cont && in3;
    std::string detail = "missing subsets";
    if (pass) {
        const double acc_comb = all_comb->accuracy();
        const double acc_cont = all_cont->accuracy();
        const double rank_cont = static_cast<double>(all_cont->errors[2]);
        const double rank_comb = static_cast<double>(all_comb->errors[2]);
        const double rank_drop = rank_cont > 0.0 ? (rank_cont - rank_comb) / rank_cont : 0.0;
        pass = std::abs(acc_cont - 0.71) <= 0.04 && std::abs(acc_comb - 0.7373) <= 0.04 &&
               std::abs(all_cont->mean_ji - 0.861) <= 0.03 &&
               std::abs(all_comb->mean_ji - 0.87) <= 0.03 && rank_drop >= 0.20 &&
               std::abs(in3->mean_mask_ji - 0.974) <= 0.02;
        char buf[256];
        std::snprintf(buf, sizeof(buf),
                      "contour %.2f%%/JI %.3f, combined %.2f%%/JI %.3f, class-iii drop %.1f%%, "
                      "mask JI(3in) %.3f",
                      100.0 * acc_cont, all_cont->mean_ji, 100.0 * acc_comb, all_comb->mean_ji,
                      100.0 * rank_drop, in3->mean_mask_ji);
        detail = buf;
    }
    report(7, "MIDV-500 replication", pass, detail);
}

}  // namespace

int main() {
    criterion_fht();
    criterion_geometry();
    criterion_chi_square();
    criterion_calibrator();
    criterion_synthetic_and_latency();
    criterion_midv500();
    if (skips > 0)
        std::printf("%d criterion(s) skipped; all binding criteria %s\n", skips,
                    failures == 0 ? "pass" : "FAIL");
    else
        std::printf("all criteria %s\n", failures == 0 ? "pass" : "FAIL");
    return failures == 0 ? 0 : 1;
}
