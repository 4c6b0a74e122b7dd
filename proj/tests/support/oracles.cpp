#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>

namespace docdet::test {

std::vector<int64_t> dyadic_offsets(int n, int t) {
    if (n == 1) return {0};
    const int t0 = t / 2;
    const int t1 = t - t0;
    const std::vector<int64_t> half = dyadic_offsets(n / 2, t0);
    std::vector<int64_t> out;
    out.reserve(static_cast<size_t>(n));
    for (int64_t o : half) out.push_back(o);
    for (int64_t o : half) out.push_back(t1 + o);
    return out;
}

double brute_fht_cell(const EdgeMap& map, Orientation orientation, bool mirrored, int slope,
                      int shift, int padded) {
    const bool vertical = orientation == Orientation::vertical;
    const int rows = vertical ? map.height : map.width;
    const int cols = vertical ? map.width : map.height;
    const std::vector<int64_t> offsets = dyadic_offsets(padded, slope);
    const int64_t entry = shift - (padded - 1);
    double sum = 0.0;
    for (int r = 0; r < rows; ++r) {
        const int64_t c = entry + offsets[static_cast<size_t>(r)];
        if (c < 0 || c >= cols) continue;
        const int cc = mirrored ? cols - 1 - static_cast<int>(c) : static_cast<int>(c);
        sum += vertical ? map.at(cc, r) : map.at(r, cc);
    }
    return sum;
}

bool point_in_quad(const geom::Quad& q, double x, double y) {
    int crossings = 0;
    for (int i = 0; i < 4; ++i) {
        const geom::Point a = q[i];
        const geom::Point b = q[(i + 1) % 4];
        const double ylo = std::min(a.y, b.y);
        const double yhi = std::max(a.y, b.y);
        if (!(ylo <= y && y < yhi)) continue;
        const double xi = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
        if (xi > x) ++crossings;
    }
    return (crossings & 1) != 0;
}

namespace {

long count_at(std::span<const TrainingSample> samples, double k) {
    long count = 0;
    for (const TrainingSample& s : samples) {
        double fmax = -1e300;
        for (const CandidateScore& c : s.candidates) fmax = std::max(fmax, c.contour * k + c.contrast);
        const double eps = 1e-9 * std::max(1.0, std::abs(fmax));
        for (const CandidateScore& c : s.candidates) {
            if (c.correct && c.contour * k + c.contrast >= fmax - eps) {
                ++count;
                break;
            }
        }
    }
    return count;
}

}  // namespace

long grid_best_count(std::span<const TrainingSample> samples, double k_max, double step) {
    long best = 0;
    const long n = static_cast<long>(std::ceil(k_max / step)) + 1;
    for (long i = 0; i <= n; ++i) best = std::max(best, count_at(samples, i * step));
    return best;
}

double max_breakpoint(std::span<const TrainingSample> samples) {
    double k_max = 0.0;
    for (const TrainingSample& s : samples) {
        const size_t n = s.candidates.size();
        for (size_t i = 0; i < n; ++i) {
            for (size_t j = i + 1; j < n; ++j) {
                const double dc = s.candidates[i].contour - s.candidates[j].contour;
                if (dc == 0.0) continue;
                const double k = (s.candidates[j].contrast - s.candidates[i].contrast) / dc;
                if (std::isfinite(k) && k > k_max) k_max = k;
            }
        }
    }
    return k_max;
}

}  // namespace docdet::test
