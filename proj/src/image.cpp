// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/image.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "purikit/error.hpp"

namespace purikit {

namespace {

constexpr double kYr = 0.299;
constexpr double kYg = 0.587;
constexpr double kYb = 0.114;
constexpr double kCbScale = 2.0 * (1.0 - kYb);  // 1.772
constexpr double kCrScale = 2.0 * (1.0 - kYr);  // 1.402

void check_shape(int width, int height, int channels)
{
    if (width < 1 || height < 1)
        fail(ErrorCode::InvalidDimensions,
             "image extent must be positive, got " + std::to_string(width) + "x"
                 + std::to_string(height));
    if (channels != 1 && channels != 3)
        fail(ErrorCode::WrongChannelCount,
             "expected 1 or 3 channels, got " + std::to_string(channels));
}

}  // namespace

ImageF::ImageF(int width, int height, int channels, double fill)
    : width_(width)
    , height_(height)
    , channels_(channels)
{
    check_shape(width, height, channels);
    data_.assign(plane_size() * static_cast<std::size_t>(channels), fill);
}

ImageF::ImageF(int width, int height, int channels, std::vector<double> data)
    : width_(width)
    , height_(height)
    , channels_(channels)
    , data_(std::move(data))
{
    check_shape(width, height, channels);
    if (data_.size() != plane_size() * static_cast<std::size_t>(channels))
        fail(ErrorCode::InvalidDimensions, "sample count does not match extent");
}

void validate(const ImageU8& img)
{
    check_shape(img.width, img.height, img.channels);
    if (img.data.size()
        != static_cast<std::size_t>(img.width) * img.height * img.channels)
        fail(ErrorCode::InvalidDimensions, "sample count does not match extent");
}

std::uint8_t quantize_sample(double f) noexcept
{
    // f*255 is non-negative after the clamp, so floor(v + 0.5) is round half
    // away from zero.
    const double v = std::clamp(f, 0.0, 1.0) * 255.0;
    return static_cast<std::uint8_t>(std::floor(v + 0.5));
}

ImageF to_float(const ImageU8& img)
{
    validate(img);
    ImageF out(img.width, img.height, img.channels);
    for (int c = 0; c < img.channels; ++c) {
        auto plane = out.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i)
            plane[i] = img.data[i * img.channels + c] / 255.0;
    }
    return out;
}

ImageU8 to_u8(const ImageF& img)
{
    ImageU8 out;
    out.width = img.width();
    out.height = img.height();
    out.channels = img.channels();
    out.data.resize(img.size());
    for (int c = 0; c < img.channels(); ++c) {
        auto plane = img.plane(c);
        for (std::size_t i = 0; i < plane.size(); ++i)
            out.data[i * out.channels + c] = quantize_sample(plane[i]);
    }
    return out;
}

ImageF rgb_to_ycbcr(const ImageF& img)
{
    if (img.channels() != 3)
        fail(ErrorCode::WrongChannelCount, "rgb_to_ycbcr needs 3 channels");
    ImageF out(img.width(), img.height(), 3);
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto y = out.plane(0), cb = out.plane(1), cr = out.plane(2);
    for (std::size_t i = 0; i < r.size(); ++i) {
        const double luma = kYr * r[i] + kYg * g[i] + kYb * b[i];
        y[i] = luma;
        cb[i] = (b[i] - luma) / kCbScale + 0.5;
        cr[i] = (r[i] - luma) / kCrScale + 0.5;
    }
    return out;
}

ImageF ycbcr_to_rgb(const ImageF& img)
{
    if (img.channels() != 3)
        fail(ErrorCode::WrongChannelCount, "ycbcr_to_rgb needs 3 channels");
    ImageF out(img.width(), img.height(), 3);
    auto y = img.plane(0), cb = img.plane(1), cr = img.plane(2);
    auto r = out.plane(0), g = out.plane(1), b = out.plane(2);
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double rv = y[i] + kCrScale * (cr[i] - 0.5);
        const double bv = y[i] + kCbScale * (cb[i] - 0.5);
        const double gv = (y[i] - kYr * rv - kYb * bv) / kYg;
        r[i] = std::clamp(rv, 0.0, 1.0);
        g[i] = std::clamp(gv, 0.0, 1.0);
        b[i] = std::clamp(bv, 0.0, 1.0);
    }
    return out;
}

ImageF luma(const ImageF& img)
{
    if (img.channels() == 1)
        return img;
    ImageF out(img.width(), img.height(), 1);
    auto r = img.plane(0), g = img.plane(1), b = img.plane(2);
    auto y = out.plane(0);
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] = kYr * r[i] + kYg * g[i] + kYb * b[i];
    return out;
}

ImageF clamp01(ImageF img)
{
    for (double& s : img.data())
        s = std::clamp(s, 0.0, 1.0);
    return img;
}

}  // namespace purikit
