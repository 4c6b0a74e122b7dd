#pragma once

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace docdet {

/// Scores of one ranked alternative of one training frame.
struct CandidateScore {
    double contour = 0.0;
    double contrast = 0.0;
    bool correct = false;
};

/// The top-N alternatives of one frame.
struct TrainingSample {
    std::vector<CandidateScore> candidates;
};

/// Closed interval of combination coefficients on [0, +inf); hi may be
/// +infinity.
struct KInterval {
    double lo = 0.0;
    double hi = 0.0;
};

inline constexpr double kUnbounded = std::numeric_limits<double>::infinity();

/// Maximal k-intervals on which the upper envelope of the candidate
/// lines f_i(k) = contour_i * k + contrast_i is attained by a correct
/// candidate. Envelope ties count in favor of correct candidates, so the
/// intervals are closed. Empty when the sample has no correct candidate
/// on the envelope anywhere.
std::vector<KInterval> feasible_k_intervals(const TrainingSample& sample);

struct CalibrationResult {
    double k = 0.0;
    long count = 0;      // frames solvable at k
    bool feasible = false;  // false when no sample is solvable anywhere
};

/// Sweep over all samples' interval endpoints; returns a coefficient in
/// the widest region of maximum overlap (midpoint of a finite region,
/// lo + 1 for a region unbounded above, 0 when [0, inf) itself is
/// optimal) together with the achieved count.
CalibrationResult optimize_k(std::span<const TrainingSample> samples);

/// Frames solvable at a fixed coefficient, with the same optimistic tie
/// rule as the interval construction.
long count_correct_at(std::span<const TrainingSample> samples, double k);

/// Small versioned key=value artifact consumed by the CLI.
struct CalibrationFile {
    int version = 1;
    double k = 0.0;
    int n_top = 11;
    long count = 0;
    std::string dataset_id;
};

std::string serialize_calibration(const CalibrationFile& c);
CalibrationFile parse_calibration(const std::string& text);
CalibrationFile load_calibration(const std::string& path);
void save_calibration(const std::string& path, const CalibrationFile& c);

}  // namespace docdet
