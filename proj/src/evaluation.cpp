#include "docdet/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <sstream>
#include <thread>

#include "docdet/codec.hpp"
#include "docdet/errors.hpp"

namespace docdet {

const char* error_class_name(ErrorClass c) {
    switch (c) {
        case ErrorClass::none: return "none";
        case ErrorClass::out_of_frame: return "i";
        case ErrorClass::no_line: return "ii";
        case ErrorClass::ranking: return "iii";
        case ErrorClass::assumption_violated: return "iv";
    }
    return "?";
}

double jaccard_index(const geom::Quad& q, const geom::Quad& m, geom::TemplateSize t) {
    const geom::Homography h = geom::homography_from_quad(m, t);
    geom::Quad mapped;
    try {
        mapped = geom::apply_homography(h, q);
    } catch (const PointAtInfinity&) {
        return 0.0;
    }
    const geom::Quad tmpl = geom::rect_quad(t.width, t.height);
    const double inter = geom::intersection_area(mapped, tmpl);
    const double uni = geom::polygon_area(mapped) + geom::polygon_area(tmpl) - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

bool is_correct(const geom::Quad& q, const geom::Quad& m, geom::TemplateSize t, double gamma) {
    return jaccard_index(q, m, t) >= gamma;
}

namespace {

// Overlap and union pixel counts of two quads over the frame, using the
// same row decomposition as rasterize_mask.
void mask_counts(const geom::Quad& a, const geom::Quad& b, int width, int height,
                 int64_t& inter, int64_t& uni) {
    inter = 0;
    uni = 0;
    std::vector<geom::PixelSpan> sa, sb;
    for (int y = 0; y < height; ++y) {
        geom::quad_row_spans(a, y, width, sa);
        geom::quad_row_spans(b, y, width, sb);
        int64_t row_a = 0, row_b = 0, row_i = 0;
        for (const geom::PixelSpan& s : sa) row_a += s.end - s.begin;
        for (const geom::PixelSpan& s : sb) row_b += s.end - s.begin;
        for (const geom::PixelSpan& x : sa) {
            for (const geom::PixelSpan& y2 : sb) {
                const int lo = std::max(x.begin, y2.begin);
                const int hi = std::min(x.end, y2.end);
                if (lo < hi) row_i += hi - lo;
            }
        }
        inter += row_i;
        uni += row_a + row_b - row_i;
    }
}

}  // namespace

double mask_jaccard(const geom::Quad& q, const geom::Quad& m, int width, int height) {
    int64_t inter = 0, uni = 0;
    mask_counts(q, m, width, height, inter, uni);
    const int64_t total = static_cast<int64_t>(width) * height;
    const double fg = uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 1.0;
    const int64_t bg_inter = total - uni;
    const int64_t bg_uni = total - inter;
    const double bg = bg_uni > 0 ? static_cast<double>(bg_inter) / static_cast<double>(bg_uni) : 1.0;
    return 0.5 * (fg + bg);
}

namespace {

struct BorderGeom {
    geom::Point p;
    geom::Point q;
    bool horizontal_class;
};

std::array<BorderGeom, 4> working_borders(const geom::Quad& wq) {
    std::array<BorderGeom, 4> out;
    for (int i = 0; i < 4; ++i) {
        BorderGeom& b = out[static_cast<size_t>(i)];
        b.p = wq[i];
        b.q = wq[(i + 1) % 4];
        b.horizontal_class = std::abs(b.q.y - b.p.y) <= std::abs(b.q.x - b.p.x);
    }
    return out;
}

// In-frame fraction of a border's pixel chain, counting out-of-frame
// pixels toward the length (same pixel convention as the edge rasters).
double in_frame_fraction(const BorderGeom& b, int width, int height) {
    const double u0 = b.horizontal_class ? b.p.x : b.p.y;
    const double u1 = b.horizontal_class ? b.q.x : b.q.y;
    const double v0 = b.horizontal_class ? b.p.y : b.p.x;
    const double du = u1 - u0;
    const double slope = du != 0.0 ? ((b.horizontal_class ? b.q.y - b.p.y : b.q.x - b.p.x) / du) : 0.0;
    const int64_t ma = std::llround(std::min(u0, u1) - 0.5);
    const int64_t mb = std::llround(std::max(u0, u1) - 0.5);
    const int64_t length = mb - ma + 1;
    if (length <= 0) return 0.0;
    const int frame_major = b.horizontal_class ? width : height;
    const int frame_minor = b.horizontal_class ? height : width;
    int64_t in = 0;
    for (int64_t mi = std::max<int64_t>(ma, 0); mi <= std::min<int64_t>(mb, frame_major - 1); ++mi) {
        const double u = static_cast<double>(mi) + 0.5;
        const double v = v0 + (u - u0) * slope;
        const int64_t minor = std::llround(v - 0.5);
        if (minor >= 0 && minor < frame_minor) ++in;
    }
    return static_cast<double>(in) / static_cast<double>(length);
}

double point_line_distance(geom::Point p, const geom::Line& l) {
    const geom::Point d = l.q - l.p;
    const double len = geom::norm(d);
    if (len == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(geom::cross(d, p - l.p)) / len;
}

// Endpoints of the border segment clipped to the frame rectangle.
bool clip_segment(geom::Point a, geom::Point b, double w, double h, geom::Point& e0,
                  geom::Point& e1) {
    double lo = 0.0, hi = 1.0;
    const double pos[2] = {a.x, a.y};
    const double dir[2] = {b.x - a.x, b.y - a.y};
    const double maxs[2] = {w, h};
    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(dir[axis]) < 1e-12) {
            if (pos[axis] < 0.0 || pos[axis] > maxs[axis]) return false;
            continue;
        }
        double t0 = (0.0 - pos[axis]) / dir[axis];
        double t1 = (maxs[axis] - pos[axis]) / dir[axis];
        if (t0 > t1) std::swap(t0, t1);
        lo = std::max(lo, t0);
        hi = std::min(hi, t1);
    }
    if (lo > hi) return false;
    const geom::Point d{b.x - a.x, b.y - a.y};
    e0 = a + d * lo;
    e1 = a + d * hi;
    return true;
}

}  // namespace

ErrorClass classify_error(const DetectionResult& result, const Annotation& ann) {
    const geom::Quad wq = result.transform.to_working(ann.quad);
    const std::array<BorderGeom, 4> borders = working_borders(wq);

    // (iv) opposite sides must share an orientation class and adjacent
    // sides must differ, otherwise no 2+2 line pairing can represent m.
    const bool structured = borders[0].horizontal_class == borders[2].horizontal_class &&
                            borders[1].horizontal_class == borders[3].horizontal_class &&
                            borders[0].horizontal_class != borders[1].horizontal_class;
    if (!structured) return ErrorClass::assumption_violated;

    // (i) some border mostly outside the frame.
    for (const BorderGeom& b : borders)
        if (in_frame_fraction(b, kWorkingWidth, kWorkingHeight) < 0.20)
            return ErrorClass::out_of_frame;

    // (ii) some border with no detected line of its class in the vicinity.
    constexpr double kVicinityPx = 5.0;
    for (const BorderGeom& b : borders) {
        geom::Point e0, e1;
        if (!clip_segment(b.p, b.q, kWorkingWidth, kWorkingHeight, e0, e1)) continue;
        const std::vector<LineCandidate>& lines =
            b.horizontal_class ? result.lines_horizontal : result.lines_vertical;
        bool found = false;
        for (const LineCandidate& lc : lines) {
            const geom::Line l = lc.line();
            if (std::max(point_line_distance(e0, l), point_line_distance(e1, l)) < kVicinityPx) {
                found = true;
                break;
            }
        }
        if (!found) return ErrorClass::no_line;
    }
    return ErrorClass::ranking;
}

const SubsetStats* EvalReport::subset(const std::string& name) const {
    for (const SubsetStats& s : subsets)
        if (s.name == name) return &s;
    return nullptr;
}

namespace {

FrameEval evaluate_frame(const DatasetItem& item, const DetectorConfig& cfg) {
    FrameEval fe;
    fe.id = item.id;
    fe.subsets = item.subsets;

    RgbImage img = item.path.empty() ? item.image : load_image_file(item.path);
    const DetectionResult res = detect(img, cfg);

    const geom::Quad detected = res.flags.failed ? geom::Quad{} : res.best;
    fe.detect_failed = res.flags.failed;
    if (!res.flags.failed) {
        try {
            fe.ji = jaccard_index(res.best, item.ann.quad, item.ann.tmpl);
        } catch (const DegenerateQuad&) {
            fe.ji = 0.0;
        }
    }
    fe.correct = fe.ji >= kCorrectnessGamma;
    fe.mask_ji = mask_jaccard(detected, item.ann.quad, item.ann.frame_width, item.ann.frame_height);
    if (!fe.correct) fe.error = classify_error(res, item.ann);
    return fe;
}

void run_frames(const Dataset& dataset, const DetectorConfig& cfg, int jobs,
                std::vector<FrameEval>& out) {
    out.resize(dataset.items.size());
    jobs = std::max(jobs, 1);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= dataset.items.size()) return;
            out[i] = evaluate_frame(dataset.items[i], cfg);
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(jobs));
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
}

}  // namespace

EvalReport evaluate(const Dataset& dataset, const DetectorConfig& cfg, int jobs) {
    EvalReport report;
    if (dataset.items.empty()) {
        report.empty = true;
        return report;
    }
    run_frames(dataset, cfg, jobs, report.frames);

    // Aggregate per subset, "all" first then first-appearance order.
    std::vector<std::string> order{"all"};
    for (const FrameEval& fe : report.frames)
        for (const std::string& s : fe.subsets)
            if (std::find(order.begin(), order.end(), s) == order.end()) order.push_back(s);

    for (const std::string& name : order) {
        SubsetStats st;
        st.name = name;
        for (const FrameEval& fe : report.frames) {
            if (name != "all" &&
                std::find(fe.subsets.begin(), fe.subsets.end(), name) == fe.subsets.end())
                continue;
            st.frames += 1;
            st.correct += fe.correct ? 1 : 0;
            st.mean_ji += fe.ji;
            st.mean_mask_ji += fe.mask_ji;
            st.failures += fe.detect_failed ? 1 : 0;
            switch (fe.error) {
                case ErrorClass::out_of_frame: st.errors[0] += 1; break;
                case ErrorClass::no_line: st.errors[1] += 1; break;
                case ErrorClass::ranking: st.errors[2] += 1; break;
                case ErrorClass::assumption_violated: st.errors[3] += 1; break;
                case ErrorClass::none: break;
            }
        }
        if (st.frames > 0) {
            st.mean_ji /= static_cast<double>(st.frames);
            st.mean_mask_ji /= static_cast<double>(st.frames);
        }
        report.subsets.push_back(st);
    }
    return report;
}

std::string format_report(const EvalReport& report) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(6);
    if (report.empty) {
        os << "subset all frames=0 accuracy=undefined\n";
        return os.str();
    }
    for (const FrameEval& fe : report.frames) {
        os << "frame " << fe.id << " ji=" << fe.ji << " correct=" << (fe.correct ? 1 : 0)
           << " class=" << error_class_name(fe.error) << " mask_ji=" << fe.mask_ji
           << " failed=" << (fe.detect_failed ? 1 : 0) << "\n";
    }
    for (const SubsetStats& st : report.subsets) {
        os << "subset " << st.name << " frames=" << st.frames << " correct=" << st.correct
           << " accuracy=" << st.accuracy() << " mean_ji=" << st.mean_ji
           << " mean_mask_ji=" << st.mean_mask_ji << " err_i=" << st.errors[0]
           << " err_ii=" << st.errors[1] << " err_iii=" << st.errors[2]
           << " err_iv=" << st.errors[3] << " failures=" << st.failures << "\n";
    }
    return os.str();
}

std::vector<TrainingSample> build_training_samples(const Dataset& dataset,
                                                   const DetectorConfig& cfg, int jobs) {
    DetectorConfig combined = cfg;
    combined.mode = DetectorConfig::Mode::combined;

    std::vector<TrainingSample> samples(dataset.items.size());
    std::vector<char> valid(dataset.items.size(), 0);
    jobs = std::max(jobs, 1);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= dataset.items.size()) return;
            const DatasetItem& item = dataset.items[i];
            RgbImage img = item.path.empty() ? item.image : load_image_file(item.path);
            const DetectionResult res = detect(img, combined);
            if (res.flags.failed) continue;
            TrainingSample s;
            for (const ScoredQuad& alt : res.alternatives) {
                CandidateScore cs;
                cs.contour = alt.contour;
                cs.contrast = alt.contrast.value_or(0.0);
                const geom::Quad original = res.transform.to_original(alt.quad);
                try {
                    cs.correct = is_correct(original, item.ann.quad, item.ann.tmpl);
                } catch (const DegenerateQuad&) {
                    cs.correct = false;
                }
                s.candidates.push_back(cs);
            }
            samples[i] = std::move(s);
            valid[i] = 1;
        }
    };
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::vector<TrainingSample> out;
    out.reserve(samples.size());
    for (size_t i = 0; i < samples.size(); ++i)
        if (valid[i]) out.push_back(std::move(samples[i]));
    return out;
}

}  // namespace docdet
