#include <doctest.h>

#include <cmath>
#include <random>

#include "docdet/errors.hpp"
#include "docdet/hough.hpp"
#include "support/oracles.hpp"

using namespace docdet;

namespace {

EdgeMap random_map(std::mt19937_64& rng, int w, int h, double density = 0.35) {
    EdgeMap m = EdgeMap::zeros(w, h);
    auto uniform = [&]() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    for (float& v : m.values)
        if (uniform() < density) v = static_cast<float>(uniform());
    return m;
}

void check_against_oracle(const EdgeMap& map, Orientation o) {
    const HoughSpace hs = fht(map, o);
    for (int t = 0; t < hs.padded; ++t) {
        for (int s = 0; s < hs.shifts; ++s) {
            const double expect_pos = test::brute_fht_cell(map, o, false, t, s, hs.padded);
            const double expect_neg = test::brute_fht_cell(map, o, true, t, s, hs.padded);
            CHECK(hs.pos_at(t, s) == doctest::Approx(expect_pos).epsilon(1e-9));
            CHECK(hs.neg_at(t, s) == doctest::Approx(expect_neg).epsilon(1e-9));
        }
    }
}

}  // namespace

TEST_CASE("fht: all-zero map gives all-zero accumulator") {
    const EdgeMap m = EdgeMap::zeros(12, 16);
    const HoughSpace hs = fht(m, Orientation::vertical);
    for (double v : hs.pos) CHECK(v == 0.0);
    for (double v : hs.neg) CHECK(v == 0.0);
}

TEST_CASE("fht: single full-height column peaks at zero slope") {
    EdgeMap m = EdgeMap::zeros(20, 16);
    const int col = 7;
    for (int y = 0; y < m.height; ++y) m.at(col, y) = 1.0f;
    const HoughSpace hs = fht(m, Orientation::vertical);

    double best = -1.0;
    int best_t = -1, best_s = -1;
    for (int t = 0; t < hs.padded; ++t)
        for (int s = 0; s < hs.shifts; ++s)
            if (hs.pos_at(t, s) > best) {
                best = hs.pos_at(t, s);
                best_t = t;
                best_s = s;
            }
    CHECK(best == doctest::Approx(16.0));
    CHECK(best_t == 0);
    CHECK(hs.pos_entry(best_s) == col);
}

TEST_CASE("fht: random maps match the dyadic-pattern oracle") {
    std::mt19937_64 rng(1234);
    check_against_oracle(random_map(rng, 16, 16), Orientation::vertical);
    check_against_oracle(random_map(rng, 16, 16), Orientation::horizontal);
    check_against_oracle(random_map(rng, 13, 9), Orientation::vertical);
    check_against_oracle(random_map(rng, 9, 13), Orientation::horizontal);
    check_against_oracle(random_map(rng, 8, 21), Orientation::vertical);
}

TEST_CASE("fht: non-pow2 heights pad with zero rows") {
    std::mt19937_64 rng(77);
    const EdgeMap m = random_map(rng, 10, 11);
    const HoughSpace hs = fht(m, Orientation::vertical);
    CHECK(hs.span == 11);
    CHECK(hs.padded == 16);
    CHECK(hs.drift_len == 10);
    CHECK(hs.shifts == 10 + 15);
}

TEST_CASE("split_vertical_strips: working-height arithmetic") {
    const EdgeMap m = EdgeMap::zeros(4, 427);
    const auto strips = split_vertical_strips(m);
    CHECK(strips[0].map.height == 143);
    CHECK(strips[1].map.height == 143);
    CHECK(strips[2].map.height == 141);
    CHECK(strips[0].offset == 0);
    CHECK(strips[1].offset == 143);
    CHECK(strips[2].offset == 286);
}

TEST_CASE("split_vertical_strips: minimal and exact splits") {
    const auto tiny = split_vertical_strips(EdgeMap::zeros(2, 3));
    CHECK(tiny[0].map.height == 1);
    CHECK(tiny[1].map.height == 1);
    CHECK(tiny[2].map.height == 1);

    const auto even = split_vertical_strips(EdgeMap::zeros(2, 300));
    CHECK(even[0].map.height == 100);
    CHECK(even[1].map.height == 100);
    CHECK(even[2].map.height == 100);

    CHECK_THROWS_AS(split_vertical_strips(EdgeMap::zeros(2, 2)), ImageTooSmall);
}

TEST_CASE("split_vertical_strips: strips reassemble the source map") {
    std::mt19937_64 rng(99);
    const EdgeMap m = random_map(rng, 6, 31);
    const auto strips = split_vertical_strips(m);
    int y = 0;
    for (const EdgeStrip& s : strips) {
        for (int sy = 0; sy < s.map.height; ++sy, ++y)
            for (int x = 0; x < m.width; ++x) CHECK(s.map.at(x, sy) == m.at(x, y));
        CHECK(s.offset + s.map.height == y);
    }
    CHECK(y == m.height);
}

TEST_CASE("top_peaks: accumulator with a single nonzero cell yields one line") {
    HoughSpace hs;
    hs.orientation = Orientation::vertical;
    hs.span = 16;
    hs.padded = 16;
    hs.drift_len = 20;
    hs.shifts = 35;
    hs.frame_width = 20;
    hs.frame_height = 16;
    hs.pos.assign(16 * 35, 0.0);
    hs.neg.assign(16 * 35, 0.0);
    hs.pos[3 * 35 + 20] = 2.5;  // slope 3, entry 20 - 15 = 5
    const auto peaks = top_peaks(hs, 15);
    REQUIRE(peaks.size() == 1);
    CHECK(peaks[0].entry == 5);
    CHECK(peaks[0].slope == 3);
    CHECK(peaks[0].strength == doctest::Approx(2.5));
}

TEST_CASE("top_peaks: single nonzero cell returns one candidate") {
    EdgeMap m = EdgeMap::zeros(20, 16);
    m.at(5, 3) = 0.5f;
    const HoughSpace hs = fht(m, Orientation::vertical);
    const auto peaks = top_peaks(hs, 15);
    REQUIRE(!peaks.empty());
    CHECK(peaks.front().strength == doctest::Approx(0.5));
    // Every cell holding that single pixel has equal strength; the
    // suppression distance keeps the list sparse.
    for (size_t i = 0; i < peaks.size(); ++i)
        for (size_t j = i + 1; j < peaks.size(); ++j)
            CHECK(std::max(std::abs(peaks[i].entry - peaks[j].entry),
                           std::abs(peaks[i].slope - peaks[j].slope)) > 2);
}

TEST_CASE("top_peaks: equal maxima one cell apart are suppressed to one") {
    // Two adjacent full-height columns produce two equally strong
    // zero-slope cells one shift apart; only one may survive.
    EdgeMap m = EdgeMap::zeros(20, 8);
    for (int y = 0; y < 8; ++y) {
        m.at(9, y) = 1.0f;
        m.at(10, y) = 1.0f;
    }
    const HoughSpace hs = fht(m, Orientation::vertical);
    const auto peaks = top_peaks(hs, 4);
    REQUIRE(!peaks.empty());
    CHECK(peaks.front().strength == doctest::Approx(8.0));
    CHECK((peaks.front().entry == 9 || peaks.front().entry == 10));
    for (size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i].strength < 8.0);
}

TEST_CASE("top_peaks: strengths are non-increasing and suppression holds") {
    std::mt19937_64 rng(2024);
    const EdgeMap m = random_map(rng, 24, 24, 0.8);
    const HoughSpace hs = fht(m, Orientation::vertical);
    const auto peaks = top_peaks(hs, 15);
    REQUIRE(peaks.size() > 2);
    for (size_t i = 1; i < peaks.size(); ++i) CHECK(peaks[i - 1].strength >= peaks[i].strength);
    for (size_t i = 0; i < peaks.size(); ++i) {
        for (size_t j = i + 1; j < peaks.size(); ++j) {
            CHECK(std::max(std::abs(peaks[i].entry - peaks[j].entry),
                           std::abs(peaks[i].slope - peaks[j].slope)) > 2);
        }
        // Assumption (*): tangent within [-1, 1] relative to the strip axis.
        const geom::Point d = peaks[i].b - peaks[i].a;
        CHECK(std::abs(d.x) <= std::abs(d.y) + 1e-9);
    }
}

TEST_CASE("top_peaks: three synthetic lines are recovered within a pixel") {
    EdgeMap m = EdgeMap::zeros(64, 64);
    // Vertical-ish lines x = entry + slope * y / 63.
    const int entries[3] = {8, 30, 52};
    const int slopes[3] = {0, 6, -5};
    for (int l = 0; l < 3; ++l) {
        for (int y = 0; y < 64; ++y) {
            const double x = entries[l] + static_cast<double>(slopes[l]) * y / 63.0;
            const int xi = static_cast<int>(std::lround(x));
            if (xi >= 0 && xi < 64) m.at(xi, y) = 1.0f;
        }
    }
    const HoughSpace hs = fht(m, Orientation::vertical);
    const auto peaks = top_peaks(hs, 15);
    REQUIRE(peaks.size() >= 3);
    for (int l = 0; l < 3; ++l) {
        bool found = false;
        for (size_t p = 0; p < 3; ++p) {
            if (std::abs(peaks[p].entry - entries[l]) <= 1 &&
                std::abs(peaks[p].slope - slopes[l]) <= 1)
                found = true;
        }
        CHECK(found);
    }
    // The three strongest peaks carry close to the full line mass.
    for (int p = 0; p < 3; ++p) CHECK(peaks[static_cast<size_t>(p)].strength > 48.0);
}

TEST_CASE("top_peaks: line endpoints land on the frame boundary") {
    EdgeMap m = EdgeMap::zeros(32, 32);
    for (int y = 0; y < 32; ++y) m.at(10, y) = 1.0f;
    const HoughSpace hs = fht(m, Orientation::vertical, 0, 0, 32, 96);
    const auto peaks = top_peaks(hs, 1);
    REQUIRE(peaks.size() == 1);
    const LineCandidate& lc = peaks.front();
    CHECK(lc.a.y == doctest::Approx(0.0));
    CHECK(lc.b.y == doctest::Approx(96.0));
    CHECK(lc.a.x == doctest::Approx(10.5));
}

