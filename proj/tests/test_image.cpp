#include <doctest.h>

#include <random>

#include "docdet/image.hpp"

using namespace docdet;

namespace {

RgbImage random_image(std::mt19937_64& rng, int w, int h) {
    RgbImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(3 * static_cast<size_t>(w) * h);
    for (uint8_t& p : img.pixels) p = static_cast<uint8_t>(rng() & 0xff);
    return img;
}

}  // namespace

TEST_CASE("quantize_color: corner and layout cases") {
    CHECK(quantize_color(0, 0, 0) == 0);
    CHECK(quantize_color(255, 255, 255) == 511);
    CHECK(quantize_color(32, 64, 128) == 1 * 64 + 2 * 8 + 4);
}

TEST_CASE("quantize_color: total, surjective, and band-stable") {
    bool seen[512] = {};
    for (int r = 0; r < 256; r += 8)
        for (int g = 0; g < 256; g += 8)
            for (int b = 0; b < 256; b += 8) {
                const int bin = quantize_color(static_cast<uint8_t>(r), static_cast<uint8_t>(g),
                                               static_cast<uint8_t>(b));
                CHECK(bin >= 0);
                CHECK(bin < 512);
                seen[bin] = true;
            }
    for (int i = 0; i < 512; ++i) CHECK(seen[i]);

    // Any two colors within one 32-wide band per channel share a bin.
    CHECK(quantize_color(37, 200, 93) == quantize_color(63, 223, 95));
}

TEST_CASE("prepare_working: identity on a 240x427 portrait input") {
    std::mt19937_64 rng(3);
    const RgbImage src = random_image(rng, kWorkingWidth, kWorkingHeight);
    const WorkingImage wi = prepare_working(src);
    CHECK(wi.transform.rotated == false);
    CHECK(wi.transform.scale_x == doctest::Approx(1.0));
    CHECK(wi.transform.scale_y == doctest::Approx(1.0));
    CHECK(wi.working_rgb.pixels == src.pixels);

    // Running the pipeline again over the working copy changes nothing.
    const WorkingImage wi2 = prepare_working(wi.working_rgb);
    CHECK(wi2.working_rgb.pixels == wi.working_rgb.pixels);
    CHECK(wi2.working_gray.pixels == wi.working_gray.pixels);
}

TEST_CASE("prepare_working: exact 2x downscale") {
    std::mt19937_64 rng(4);
    const RgbImage src = random_image(rng, 480, 854);
    const WorkingImage wi = prepare_working(src);
    CHECK(wi.working_rgb.width == 240);
    CHECK(wi.working_rgb.height == 427);
    CHECK(wi.transform.scale_x == doctest::Approx(2.0));
    CHECK(wi.transform.scale_y == doctest::Approx(2.0));
    CHECK(wi.transform.rotated == false);

    // 2x box averaging is the rounded mean of each 2x2 block.
    for (int y : {0, 100, 426}) {
        for (int x : {0, 77, 239}) {
            for (int c = 0; c < 3; ++c) {
                const int sum = src.px(2 * x, 2 * y)[c] + src.px(2 * x + 1, 2 * y)[c] +
                                src.px(2 * x, 2 * y + 1)[c] + src.px(2 * x + 1, 2 * y + 1)[c];
                const int expect = static_cast<int>(std::lround(sum / 4.0));
                CHECK(static_cast<int>(wi.working_rgb.px(x, y)[c]) == expect);
            }
        }
    }
}

TEST_CASE("prepare_working: landscape input is rotated clockwise") {
    std::mt19937_64 rng(5);
    const RgbImage src = random_image(rng, 854, 480);
    const WorkingImage wi = prepare_working(src);
    CHECK(wi.transform.rotated == true);
    CHECK(wi.working_rgb.width == 240);
    CHECK(wi.working_rgb.height == 427);
    CHECK(wi.transform.scale_x == doctest::Approx(480.0 / 240.0));
    CHECK(wi.transform.scale_y == doctest::Approx(854.0 / 427.0));
}

TEST_CASE("rotate90_cw: pixel mapping") {
    RgbImage src;
    src.width = 3;
    src.height = 2;
    src.pixels.assign(18, 0);
    // Tag each pixel with a unique value in the red channel.
    for (int y = 0; y < 2; ++y)
        for (int x = 0; x < 3; ++x) src.px(x, y)[0] = static_cast<uint8_t>(10 * y + x);
    const RgbImage dst = rotate90_cw(src);
    CHECK(dst.width == 2);
    CHECK(dst.height == 3);
    // Left column of src becomes the top row of dst, bottom-up.
    CHECK(dst.px(0, 0)[0] == 10);  // src (0, 1)
    CHECK(dst.px(1, 0)[0] == 0);   // src (0, 0)
    CHECK(dst.px(0, 2)[0] == 12);  // src (2, 1)
    CHECK(dst.px(1, 2)[0] == 2);   // src (2, 0)
}

TEST_CASE("working transform: round-trip stays inside the original frame") {
    std::mt19937_64 rng(6);
    for (const bool landscape : {false, true}) {
        const RgbImage src = random_image(rng, landscape ? 777 : 481, landscape ? 481 : 777);
        const WorkingImage wi = prepare_working(src);
        for (int i = 0; i < 500; ++i) {
            const geom::Point wp{(static_cast<double>(rng() >> 11) * 0x1.0p-53) * kWorkingWidth,
                                 (static_cast<double>(rng() >> 11) * 0x1.0p-53) * kWorkingHeight};
            const geom::Point op = wi.transform.to_original(wp);
            CHECK(op.x >= -1e-9);
            CHECK(op.y >= -1e-9);
            CHECK(op.x <= src.width + 1e-9);
            CHECK(op.y <= src.height + 1e-9);
            const geom::Point back = wi.transform.to_working(op);
            CHECK(back.x == doctest::Approx(wp.x).epsilon(1e-9));
            CHECK(back.y == doctest::Approx(wp.y).epsilon(1e-9));
        }
    }
}

TEST_CASE("to_gray_bt601: weights and rounding") {
    RgbImage img;
    img.width = 2;
    img.height = 1;
    img.pixels = {255, 0, 0, 10, 20, 30};
    const GrayImage g = to_gray_bt601(img);
    CHECK(static_cast<int>(g.at(0, 0)) == 76);  // round(0.299 * 255)
    CHECK(static_cast<int>(g.at(1, 0)) ==
          static_cast<int>(std::lround(0.299 * 10 + 0.587 * 20 + 0.114 * 30)));
}
