// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "purikit/image.hpp"

namespace purikit {

/// Single-channel soft mask in [0,1]; 1 selects the face path.
class RegionMask {
public:
    RegionMask() = default;
    RegionMask(int width, int height, double fill = 0.0);
    RegionMask(int width, int height, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    double at(int y, int x) const noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    double& at(int y, int x) noexcept { return data_[static_cast<std::size_t>(y) * width_ + x]; }
    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    /// 1-channel view for saving or metric use.
    ImageF to_image() const;
    friend bool operator==(const RegionMask&, const RegionMask&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> data_;
};

struct MaskSource {
    enum class Kind { Ellipse, File, External, Constant };
    Kind kind = Kind::Ellipse;
    // Ellipse, as fractions of width / height.
    double cx = 0.5, cy = 0.5, rx = 0.35, ry = 0.45;
    std::filesystem::path path;  // File
    std::string command;         // External
    double timeout_s = 300.0;    // External
    double value = 1.0;          // Constant

    static MaskSource ellipse(double cx = 0.5, double cy = 0.5, double rx = 0.35, double ry = 0.45);
    static MaskSource file(std::filesystem::path path);
    static MaskSource external(std::string command, double timeout_s = 300.0);
    static MaskSource constant(double value);

    /// "ellipse", "ellipse:cx=0.5,cy=0.5,rx=0.35,ry=0.45", "file:<path>",
    /// "external:<command>", "ones", "zeros". Throws InvalidArgument.
    static MaskSource parse(std::string_view text);
    std::string to_string() const;
};

/// Mask at the resolution of img.
///
/// Ellipse: 1 where ((x+0.5-cx*w)/(rx*w))^2 + ((y+0.5-cy*h)/(ry*h))^2 <= 1.
/// File: 8-bit grayscale PNG of img's size, scaled by 1/255.
/// External: `<cmd> <input_png> <output_png>`; the output must be a
/// grayscale PNG of img's size where 255 marks the face.
///
/// Throws InvalidEllipse, MaskShapeMismatch, BackendFailed.
RegionMask build_mask(const ImageF& img, const MaskSource& source);

/// Separable Gaussian blur, sigma = radius/2, truncated at ceil(3 sigma),
/// clamp-to-edge. radius 0 returns the mask unchanged.
RegionMask feather(const RegionMask& mask, double radius);

/// 1 - m per sample.
RegionMask complement(const RegionMask& mask);

/// max(2, width/64).
double default_feather_radius(int width);

}  // namespace purikit
