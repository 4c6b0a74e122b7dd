#include "docdet/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "docdet/errors.hpp"

namespace docdet {

namespace {

// Optimistic envelope membership: a frame is solvable at k when some
// correct candidate attains the maximum of f_i(k) = C_i*k + R_i within a
// small relative tolerance (ties resolve in favor of correct candidates).
bool solvable_at(const TrainingSample& s, double k) {
    double fmax = -std::numeric_limits<double>::infinity();
    for (const CandidateScore& c : s.candidates)
        fmax = std::max(fmax, c.contour * k + c.contrast);
    if (!std::isfinite(fmax)) return false;
    const double eps = 1e-9 * std::max(1.0, std::abs(fmax));
    for (const CandidateScore& c : s.candidates)
        if (c.correct && c.contour * k + c.contrast >= fmax - eps) return true;
    return false;
}

}  // namespace

std::vector<KInterval> feasible_k_intervals(const TrainingSample& sample) {
    std::vector<KInterval> out;
    if (sample.candidates.empty()) return out;

    // Envelope breakpoints: positive crossings of any two candidate lines.
    std::vector<double> pts{0.0};
    const size_t n = sample.candidates.size();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = i + 1; j < n; ++j) {
            const CandidateScore& a = sample.candidates[i];
            const CandidateScore& b = sample.candidates[j];
            const double dc = a.contour - b.contour;
            if (dc == 0.0) continue;
            const double k = (b.contrast - a.contrast) / dc;
            if (k > 0.0 && std::isfinite(k)) pts.push_back(k);
        }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

    // Alternating pieces: point, open segment, point, ... , trailing open
    // segment to +inf. Solvability is constant on each piece.
    const size_t m = pts.size();
    std::vector<char> ok(2 * m);
    for (size_t t = 0; t < m; ++t) {
        ok[2 * t] = solvable_at(sample, pts[t]);
        const double mid = (t + 1 < m) ? 0.5 * (pts[t] + pts[t + 1]) : pts[t] + 1.0;
        ok[2 * t + 1] = solvable_at(sample, mid);
    }

    size_t p = 0;
    while (p < ok.size()) {
        if (!ok[p]) {
            ++p;
            continue;
        }
        const size_t first = p;
        while (p < ok.size() && ok[p]) ++p;
        const size_t last = p - 1;
        KInterval iv;
        iv.lo = pts[first / 2];  // segment pieces inherit their left point
        iv.hi = (last == 2 * m - 1) ? kUnbounded
                : (last % 2 == 0)   ? pts[last / 2]
                                    : pts[last / 2 + 1];
        out.push_back(iv);
    }
    return out;
}

long count_correct_at(std::span<const TrainingSample> samples, double k) {
    long count = 0;
    for (const TrainingSample& s : samples) count += solvable_at(s, k) ? 1 : 0;
    return count;
}

CalibrationResult optimize_k(std::span<const TrainingSample> samples) {
    std::vector<std::vector<KInterval>> intervals;
    intervals.reserve(samples.size());
    std::vector<double> coords;
    bool any = false;
    for (const TrainingSample& s : samples) {
        intervals.push_back(feasible_k_intervals(s));
        for (const KInterval& iv : intervals.back()) {
            any = true;
            coords.push_back(iv.lo);
            if (iv.hi != kUnbounded) coords.push_back(iv.hi);
        }
    }
    if (!any) return {0.0, 0, false};

    std::sort(coords.begin(), coords.end());
    coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
    const size_t r = coords.size();
    auto rank = [&](double v) {
        return static_cast<size_t>(std::lower_bound(coords.begin(), coords.end(), v) -
                                   coords.begin());
    };

    // Piece 2t is the point coords[t], piece 2t+1 the open segment to the
    // next coordinate (the last one extends to +inf).
    std::vector<long> diff(2 * r + 1, 0);
    for (const std::vector<KInterval>& ivs : intervals) {
        for (const KInterval& iv : ivs) {
            const size_t first = 2 * rank(iv.lo);
            const size_t last = iv.hi == kUnbounded ? 2 * r - 1 : 2 * rank(iv.hi);
            diff[first] += 1;
            diff[last + 1] -= 1;
        }
    }

    long best_count = 0;
    std::vector<long> counts(2 * r, 0);
    long running = 0;
    for (size_t p = 0; p < 2 * r; ++p) {
        running += diff[p];
        counts[p] = running;
        best_count = std::max(best_count, running);
    }

    // Widest run of pieces achieving the maximum; runs always start and
    // end on point pieces because closed intervals cover their endpoints.
    double best_lo = 0.0, best_hi = 0.0, best_width = -1.0;
    bool best_unbounded = false, have = false;
    size_t p = 0;
    while (p < 2 * r) {
        if (counts[p] != best_count) {
            ++p;
            continue;
        }
        const size_t first = p;
        while (p < 2 * r && counts[p] == best_count) ++p;
        const size_t last = p - 1;
        const double lo = coords[first / 2];
        const bool unbounded = last == 2 * r - 1;
        const double hi = unbounded ? kUnbounded
                          : (last % 2 == 0) ? coords[last / 2]
                                            : coords[last / 2 + 1];
        const double width = unbounded ? kUnbounded : hi - lo;
        if (!have || (unbounded && !best_unbounded) ||
            (unbounded == best_unbounded && width > best_width)) {
            have = true;
            best_lo = lo;
            best_hi = hi;
            best_width = width;
            best_unbounded = unbounded;
        }
    }

    CalibrationResult res;
    res.feasible = true;
    if (best_unbounded)
        res.k = best_lo == 0.0 ? 0.0 : best_lo + 1.0;
    else
        res.k = 0.5 * (best_lo + best_hi);
    res.count = count_correct_at(samples, res.k);
    return res;
}

std::string serialize_calibration(const CalibrationFile& c) {
    std::ostringstream os;
    os.precision(17);
    os << "version=" << c.version << "\n";
    os << "k=" << c.k << "\n";
    os << "n_top=" << c.n_top << "\n";
    os << "count=" << c.count << "\n";
    os << "dataset_id=" << c.dataset_id << "\n";
    return os.str();
}

CalibrationFile parse_calibration(const std::string& text) {
    CalibrationFile c;
    bool saw_version = false, saw_k = false;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw Error("calibration: malformed line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "version") {
            c.version = std::stoi(value);
            saw_version = true;
        } else if (key == "k") {
            c.k = std::stod(value);
            saw_k = true;
        } else if (key == "n_top") {
            c.n_top = std::stoi(value);
        } else if (key == "count") {
            c.count = std::stol(value);
        } else if (key == "dataset_id") {
            c.dataset_id = value;
        }
        // unknown keys are ignored for forward compatibility
    }
    if (!saw_version || !saw_k) throw Error("calibration: missing version or k");
    if (c.version != 1) throw Error("calibration: unsupported version");
    if (c.k < 0.0) throw Error("calibration: negative coefficient");
    return c;
}

CalibrationFile load_calibration(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot read " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return parse_calibration(os.str());
}

void save_calibration(const std::string& path, const CalibrationFile& c) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write " + path);
    f << serialize_calibration(c);
    if (!f) throw Error("short write to " + path);
}

}  // namespace docdet
