#pragma once

#include <cstdint>

#include "docdet/evaluation.hpp"

namespace docdet {

/// Self-contained benchmark of perspective-distorted documents rendered
/// at working resolution on uniform backgrounds with a luminance gap of
/// at least 40 levels. Frames from `adversarial_from` on additionally
/// carry contour traps: a strong-edged outline rectangle with no areal
/// contrast plus stray background lines.
struct SyntheticOptions {
    int frames = 200;
    int adversarial_from = 150;
    uint64_t seed = 0x5eed0c0de;
};

Dataset make_synthetic_dataset(const SyntheticOptions& options = {});

}  // namespace docdet
