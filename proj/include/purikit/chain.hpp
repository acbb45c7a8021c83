// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "purikit/image.hpp"
#include "purikit/jpeg.hpp"
#include "purikit/resample.hpp"

namespace purikit {

/// Positive rational scale factor; "0.5", "1/2" and "2" all parse.
struct ScaleFactor {
    long num = 1;
    long den = 1;

    static ScaleFactor parse(std::string_view text);
    /// max(1, floor(n * num / den)).
    int apply(int n) const;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
    std::string to_string() const;

    friend bool operator==(const ScaleFactor&, const ScaleFactor&) = default;
};

struct JpegStep {
    int quality = 75;
    ChromaSubsampling subsampling = ChromaSubsampling::S420;

    friend bool operator==(const JpegStep&, const JpegStep&) = default;
};

struct ResizeStep {
    ScaleFactor factor;
    ResampleKernel kernel = ResampleKernel::lanczos(3);

    friend bool operator==(const ResizeStep&, const ResizeStep&) = default;
};

using TransformStep = std::variant<JpegStep, ResizeStep>;

/// Ordered list of transformations applied in list order. An empty chain is
/// the identity.
struct TransformChain {
    std::vector<TransformStep> steps;

    static TransformChain identity() { return {}; }
    /// JPEG compression followed by a resize (the "C&R" setting).
    static TransformChain compress_and_resize(int quality, ScaleFactor factor,
                                              ResampleKernel kernel = ResampleKernel::lanczos(3));

    /// Parses steps separated by ';', e.g. "jpeg:q=75;resize:f=0.5,k=lanczos3".
    /// An empty string or "none" is the identity chain.
    static TransformChain parse(std::string_view text);
    static TransformStep parse_step(std::string_view text);

    bool is_identity() const { return steps.empty(); }
    std::string to_string() const;

    friend bool operator==(const TransformChain&, const TransformChain&) = default;
};

std::string to_string(const TransformStep& step);

ImageF apply_step(const ImageF& img, const TransformStep& step);
ImageF apply_chain(const ImageF& img, const TransformChain& chain);

}  // namespace purikit
