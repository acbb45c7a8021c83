// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "purikit/image.hpp"
#include "purikit/resample.hpp"

namespace purikit {

/// A super-resolution operator with a fixed integer scale.
struct SrBackendSpec {
    enum class Kind { Identity, Interp, External };
    Kind kind = Kind::Interp;
    int scale = 2;
    ResampleKernel kernel = ResampleKernel::lanczos(3);  // Interp
    std::string command;                                 // External
    double timeout_s = 300.0;                            // External
    /// External only: directory of results keyed by input hash and spec.
    std::optional<std::filesystem::path> cache_dir;

    static SrBackendSpec identity();
    static SrBackendSpec interp(ResampleKernel kernel = ResampleKernel::lanczos(3), int scale = 2);
    static SrBackendSpec external(std::string command, int scale = 2, double timeout_s = 300.0);

    /// "identity", "interp[:k=lanczos3,s=2]", "external:s=2,t=60,cmd=<command>".
    /// cmd must come last and takes the rest of the text. Throws InvalidArgument.
    static SrBackendSpec parse(std::string_view text);
    std::string to_string() const;

    /// Throws InvalidArgument when the invariants of the kind do not hold.
    void validate() const;
};

struct SrResult {
    ImageF image;
    double elapsed_s = 0.0;
};

/// Output is exactly (w*scale) x (h*scale), clamped to [0,1].
///
/// External backends run `<cmd> <input_png> <output_png> <scale>`; a
/// timed-out call is retried once. Throws ScaleContractViolated,
/// BackendTimeout, BackendFailed.
SrResult upscale(const ImageF& img, const SrBackendSpec& spec);

/// Both SR scales must equal the down factor. Throws ScaleMismatch naming
/// the role ("face" or "general"), the expected and the actual scale.
void validate_pipeline_scales(const SrBackendSpec& face, const SrBackendSpec& general, int down_factor);

}  // namespace purikit
