// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Region-wise purification: a face path (compress, downsample, face SR,
// blend with the input) and a background path (general SR, downsample),
// fused through a soft face mask.

#pragma once

#include <optional>
#include <string>

#include "purikit/image.hpp"
#include "purikit/jpeg.hpp"
#include "purikit/mask.hpp"
#include "purikit/resample.hpp"
#include "purikit/srbackend.hpp"

namespace purikit {

enum class BlendMode {
    Convex,   // (1 - lambda) s + lambda xhat
    Literal,  // clamp(s + lambda xhat)
};

std::string to_string(BlendMode mode);
/// "convex" or "literal" (also "additive"). Throws InvalidArgument.
BlendMode parse_blend_mode(std::string_view text);

struct PurifyParams {
    double lambda = 0.2;
    /// nullopt skips the compression stage entirely.
    std::optional<int> jpeg_q = 75;
    ChromaSubsampling jpeg_subsampling = ChromaSubsampling::S420;
    int down_factor = 2;
    ResampleKernel down_kernel = ResampleKernel::lanczos(3);
    BlendMode blend = BlendMode::Convex;
    SrBackendSpec face_sr = SrBackendSpec::interp(ResampleKernel::lanczos(3), 2);
    SrBackendSpec general_sr = SrBackendSpec::interp(ResampleKernel::lanczos(3), 2);
    MaskSource mask = MaskSource::ellipse();
    /// nullopt means default_feather_radius(width).
    std::optional<double> feather_radius;
    /// Skip feathering and fuse with the binary mask.
    bool hard_mask = false;
    /// Run the two paths concurrently.
    bool parallel = true;

    /// Throws InvalidArgument, QualityOutOfRange or ScaleMismatch.
    void validate() const;
    /// Canonical one-line description, stable across runs.
    std::string to_string() const;
};

struct PurifyTrace {
    ImageF x_jd;  // after compression then downsampling
    ImageF x_f;
    ImageF x_g;
    RegionMask mask;  // after feathering
    double face_s = 0.0;
    double background_s = 0.0;
    double mask_s = 0.0;
    double total_s = 0.0;
};

/// Convex: clamp((1-lambda) s + lambda xhat); literal: clamp(s + lambda xhat).
ImageF blend_face(const ImageF& s, const ImageF& xhat, double lambda, BlendMode mode);

/// x_f at input resolution. When w or h is not divisible by the down
/// factor, the SR output is resampled to w x h with down_kernel.
ImageF face_path(const ImageF& xhat, const PurifyParams& p, ImageF* x_jd = nullptr);

/// x_g = resample(SR_g(xhat), w, h, down_kernel).
ImageF background_path(const ImageF& xhat, const PurifyParams& p);

/// m x_f + (1 - m) x_g per sample; the mask is shared by all channels.
ImageF fuse(const ImageF& x_f, const ImageF& x_g, const RegionMask& mask);

/// Full pipeline. The mask is computed on xhat.
ImageF purify(const ImageF& xhat, const PurifyParams& p, PurifyTrace* trace = nullptr);

}  // namespace purikit
