// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Synthetic l-infinity bounded perturbations standing in for protective
// noise.

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "purikit/chain.hpp"
#include "purikit/image.hpp"
#include "purikit/metrics.hpp"

namespace purikit {

struct PerturbSpec {
    enum class Kind {
        Uniform,       // eta ~ U[-eps, eps) per sample
        Sign,          // eta = +-eps per sample, fair coin
        Checkerboard,  // +-eps in cells of period/2, same in all channels
        Sinusoid,      // eps sin(2 pi t / period), same in all channels
    };
    enum class Orientation {
        Horizontal,  // varies along x
        Vertical,    // varies along y
    };

    Kind kind = Kind::Sign;
    double epsilon = 8.0 / 255.0;
    std::uint64_t seed = 0;
    /// Checkerboard and sinusoid only; they ignore the seed.
    int period = 2;
    Orientation orientation = Orientation::Horizontal;

    /// Throws EpsilonOutOfRange unless 0 < eps <= 0.25; InvalidArgument
    /// for period < 2 on structured kinds.
    void validate() const;
    std::string to_string() const;

    /// "uniform", "sign", "checkerboard[:p=2]", "sinusoid[:p=64,o=h|v]".
    static PerturbSpec parse_kind(std::string_view text);
};

std::string to_string(PerturbSpec::Kind kind);

/// "8/255", "0.03". Throws InvalidArgument.
double parse_epsilon(std::string_view text);

/// The unclamped perturbation for an image of the given shape.
ImageF perturbation_field(int width, int height, int channels, const PerturbSpec& spec);

/// clamp(x + eta).
ImageF generate(const ImageF& x, const PerturbSpec& spec);

struct ResidualRow {
    std::string chain;
    double ratio = 0.0;
    /// max |T(xhat) - T(x)| at x's resolution.
    double linf_after = 0.0;
};

/// One row per chain, prefixed by the identity chain unless it is listed.
std::vector<ResidualRow> residual_report(const ImageF& x, const ImageF& xhat,
                                         const std::vector<TransformChain>& chains,
                                         const ResampleKernel& re_up = ResampleKernel::lanczos(3));

struct SweepRow {
    double epsilon = 0.0;
    PerturbationStats stats;
    double ratio = 0.0;
    double linf_after = 0.0;
};

/// For each epsilon: perturb x with `base` at that budget, then measure it
/// and its residual through `chain`. Throws InvalidArgument on an empty list.
std::vector<SweepRow> sweep_epsilon(const ImageF& x, const PerturbSpec& base, const std::vector<double>& epsilons,
                                    const TransformChain& chain,
                                    const ResampleKernel& re_up = ResampleKernel::lanczos(3));

}  // namespace purikit
