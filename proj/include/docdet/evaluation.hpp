#pragma once

#include <string>
#include <vector>

#include "docdet/calibration.hpp"
#include "docdet/detector.hpp"
#include "docdet/geometry.hpp"
#include "docdet/image.hpp"

namespace docdet {

inline constexpr double kCorrectnessGamma = 0.945;

/// Ground truth for one frame.
struct Annotation {
    std::string frame_id;
    geom::Quad quad;  // original-image coordinates; vertices may leave the frame
    geom::TemplateSize tmpl;
    int frame_width = 0;
    int frame_height = 0;
};

/// Failure taxonomy for incorrectly localized frames, checked in the
/// order: assumption violated, out of frame, no line, ranking.
enum class ErrorClass {
    none,
    out_of_frame,          // (i) a ground-truth border is <20% within the frame
    no_line,               // (ii) no detected line near some ground-truth border
    ranking,               // (iii) candidates existed but the wrong one won
    assumption_violated,   // (iv) gt borders break the orientation-class structure
};
const char* error_class_name(ErrorClass c);

/// Overlap of q and the template rectangle after mapping both through the
/// homography that sends the ground truth m onto the template. Candidate
/// vertices landing at infinity yield 0; a degenerate m throws
/// DegenerateQuad (callers count it as 0).
double jaccard_index(const geom::Quad& q, const geom::Quad& m, geom::TemplateSize t);

bool is_correct(const geom::Quad& q, const geom::Quad& m, geom::TemplateSize t,
                double gamma = kCorrectnessGamma);

/// Symmetric mask overlap at frame resolution: the average of the
/// foreground IoU and the background (complement) IoU, empty-over-empty
/// terms counting as 1. Agrees pixel-for-pixel with rasterize_mask.
double mask_jaccard(const geom::Quad& q, const geom::Quad& m, int width, int height);

/// Assigns an error class to an already-incorrect frame using the
/// detection's working-frame transform and detected lines.
ErrorClass classify_error(const DetectionResult& result, const Annotation& ann);

struct FrameEval {
    std::string id;
    double ji = 0.0;
    bool correct = false;
    ErrorClass error = ErrorClass::none;
    double mask_ji = 0.0;
    bool detect_failed = false;
    std::vector<std::string> subsets;
};

struct SubsetStats {
    std::string name;
    long frames = 0;
    long correct = 0;
    double mean_ji = 0.0;
    double mean_mask_ji = 0.0;
    long errors[4] = {0, 0, 0, 0};  // i, ii, iii, iv
    long failures = 0;

    double accuracy() const { return frames > 0 ? static_cast<double>(correct) / frames : 0.0; }
};

struct EvalReport {
    std::vector<FrameEval> frames;
    std::vector<SubsetStats> subsets;  // "all" first, then first-appearance order
    bool empty = false;

    const SubsetStats* subset(const std::string& name) const;
};

/// One evaluable frame. `path` is decoded lazily; in-memory frames
/// (synthetic benchmark) carry `image` directly.
struct DatasetItem {
    std::string id;
    std::string path;
    RgbImage image;
    Annotation ann;
    std::vector<std::string> subsets;  // always includes "all"
};

struct Dataset {
    std::string id;
    std::vector<DatasetItem> items;
    std::vector<std::string> warnings;
};

/// Runs detect on every frame (optionally on `jobs` threads; output is
/// independent of the thread count) and aggregates per subset.
EvalReport evaluate(const Dataset& dataset, const DetectorConfig& cfg, int jobs = 1);

/// Line-oriented report: one `frame` record per frame followed by one
/// `subset` record per aggregate.
std::string format_report(const EvalReport& report);

/// Detects with the combined pipeline and records each frame's top-N
/// (contour, contrast, correct) triples for coefficient optimization.
/// Frames with failed detection contribute no sample.
std::vector<TrainingSample> build_training_samples(const Dataset& dataset,
                                                   const DetectorConfig& cfg, int jobs = 1);

}  // namespace docdet
