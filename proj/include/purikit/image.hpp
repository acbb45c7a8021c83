// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace purikit {

/// Planar floating-point image with samples in [0,1]. Plane c occupies
/// data()[c*width*height, (c+1)*width*height), each plane row-major.
///
/// This is the single pixel currency of the library: every transform,
/// metric and purification stage reads and writes ImageF.
class ImageF {
public:
    ImageF() = default;
    /// Throws InvalidDimensions for a zero extent and WrongChannelCount
    /// unless channels is 1 or 3.
    ImageF(int width, int height, int channels, double fill = 0.0);
    ImageF(int width, int height, int channels, std::vector<double> data);

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    int channels() const noexcept { return channels_; }
    std::size_t plane_size() const noexcept
    {
        return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
    }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double at(int c, int y, int x) const noexcept { return data_[index(c, y, x)]; }
    double& at(int c, int y, int x) noexcept { return data_[index(c, y, x)]; }

    std::span<const double> plane(int c) const noexcept
    {
        return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
    }
    std::span<double> plane(int c) noexcept
    {
        return {data_.data() + static_cast<std::size_t>(c) * plane_size(), plane_size()};
    }

    std::span<const double> data() const noexcept { return data_; }
    std::span<double> data() noexcept { return data_; }

    bool same_shape(const ImageF& other) const noexcept
    {
        return width_ == other.width_ && height_ == other.height_
               && channels_ == other.channels_;
    }

    friend bool operator==(const ImageF&, const ImageF&) = default;

private:
    std::size_t index(int c, int y, int x) const noexcept
    {
        return static_cast<std::size_t>(c) * plane_size()
               + static_cast<std::size_t>(y) * static_cast<std::size_t>(width_)
               + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    int channels_ = 0;
    std::vector<double> data_;
};

/// 8-bit storage form, interleaved (RGBRGB... or gray), as read from and
/// written to files.
struct ImageU8 {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> data;
    /// Set by load_png when an alpha channel was present and discarded.
    bool alpha_dropped = false;

    std::uint8_t at(int c, int y, int x) const noexcept
    {
        return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
    }

    friend bool operator==(const ImageU8& a, const ImageU8& b)
    {
        return a.width == b.width && a.height == b.height
               && a.channels == b.channels && a.data == b.data;
    }
};

/// Validates dimensions and sample count of a U8 image; throws on failure.
void validate(const ImageU8& img);

/// f = s / 255.
ImageF to_float(const ImageU8& img);

/// s = round(f * 255), rounding half away from zero, after clamping f to [0,1].
ImageU8 to_u8(const ImageF& img);

/// Single-sample version of the to_u8 rounding rule.
std::uint8_t quantize_sample(double f) noexcept;

/// Full-range JFIF conversion. Chroma is offset by 0.5 so neutral gray maps
/// to Cb = Cr = 0.5.
ImageF rgb_to_ycbcr(const ImageF& img);
ImageF ycbcr_to_rgb(const ImageF& img);

/// Y = 0.299 R + 0.587 G + 0.114 B; a 1-channel input is returned as is.
ImageF luma(const ImageF& img);

/// Explicit clamp of every sample to [0,1].
ImageF clamp01(ImageF img);

}  // namespace purikit
