// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>

#include "purikit/image.hpp"

namespace purikit::testing {

/// Deterministic uniform doubles in [0,1) from a 64-bit engine; unlike
/// std::uniform_real_distribution the sequence is identical on every
/// standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed)
        : engine_(seed)
    {
    }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }

private:
    std::mt19937_64 engine_;
};

ImageF random_image(int width, int height, int channels, std::uint64_t seed);

/// Smooth synthetic head-and-shoulders portrait: background gradient, a
/// shaded face ellipse with hair, eyes and mouth, plus mild texture. The
/// seed varies colors, pose and texture.
ImageF synth_portrait(int width, int height, std::uint64_t seed);

/// Clean analytic image shared with the Python oracle:
/// R = 0.2 + 0.6 x/(W-1), G = 0.2 + 0.6 y/(H-1), B = 0.5.
ImageF gradient_fixture(int width, int height);

}  // namespace purikit::testing
