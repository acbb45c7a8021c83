// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "purikit/image.hpp"

namespace purikit {

/// Reconstruction kernel for resample(). Lanczos uses
/// L(t) = sinc(t) sinc(t/a) for |t| < a; bicubic is the Keys kernel with
/// a = -0.5.
struct ResampleKernel {
    enum class Kind { Nearest, Bilinear, Bicubic, Lanczos };

    Kind kind = Kind::Lanczos;
    int lanczos_a = 3;

    static ResampleKernel nearest() { return {Kind::Nearest, 0}; }
    static ResampleKernel bilinear() { return {Kind::Bilinear, 0}; }
    static ResampleKernel bicubic() { return {Kind::Bicubic, 0}; }
    static ResampleKernel lanczos(int a = 3);

    /// Radius of the kernel at unit scale.
    double support() const noexcept;
    double weight(double t) const noexcept;

    /// "nearest", "bilinear", "bicubic", "lanczos3", ...
    std::string name() const;
    /// Inverse of name(); "lanczos" alone means lanczos3. Throws InvalidArgument.
    static ResampleKernel parse(std::string_view text);

    friend bool operator==(const ResampleKernel&, const ResampleKernel&) = default;
};

/// 1-D filter taps for one axis: output i reads source indices
/// index[offset[i] .. offset[i+1]) with matching weights (summing to 1).
struct AxisTaps {
    std::vector<int> offset;
    std::vector<int> index;
    std::vector<double> weight;
};

/// Taps mapping n_in samples to n_out. Output i is centred on source
/// coordinate (i + 0.5) * n_in / n_out - 0.5. When downscaling the kernel is
/// stretched by n_in / n_out. Source indices are clamped to the edge.
AxisTaps compute_axis_taps(int n_in, int n_out, const ResampleKernel& kernel);

/// Separable resize (horizontal pass, then vertical), clamped to [0,1].
/// Throws InvalidDimensions when a target extent is < 1.
ImageF resample(const ImageF& img, int out_w, int out_h, const ResampleKernel& kernel);

}  // namespace purikit
