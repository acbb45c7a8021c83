// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/resample.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>

#include "purikit/error.hpp"

namespace purikit {

namespace {

double sinc(double t)
{
    if (t == 0.0)
        return 1.0;
    const double x = std::numbers::pi * t;
    return std::sin(x) / x;
}

}  // namespace

ResampleKernel ResampleKernel::lanczos(int a)
{
    if (a < 1)
        fail(ErrorCode::InvalidArgument, "lanczos window must be a positive integer");
    return {Kind::Lanczos, a};
}

double ResampleKernel::support() const noexcept
{
    switch (kind) {
    case Kind::Nearest: return 0.5;
    case Kind::Bilinear: return 1.0;
    case Kind::Bicubic: return 2.0;
    case Kind::Lanczos: return static_cast<double>(lanczos_a);
    }
    return 0.0;
}

double ResampleKernel::weight(double t) const noexcept
{
    t = std::abs(t);
    switch (kind) {
    case Kind::Nearest: return t < 0.5 ? 1.0 : 0.0;
    case Kind::Bilinear: return t < 1.0 ? 1.0 - t : 0.0;
    case Kind::Bicubic: {
        constexpr double a = -0.5;
        if (t < 1.0)
            return ((a + 2.0) * t - (a + 3.0)) * t * t + 1.0;
        if (t < 2.0)
            return ((a * t - 5.0 * a) * t + 8.0 * a) * t - 4.0 * a;
        return 0.0;
    }
    case Kind::Lanczos: {
        const double a = lanczos_a;
        if (t >= a)
            return 0.0;
        // Exact zeros at the integer taps keep identity-scale resizes exact.
        if (t != 0.0 && t == std::floor(t))
            return 0.0;
        return sinc(t) * sinc(t / a);
    }
    }
    return 0.0;
}

std::string ResampleKernel::name() const
{
    switch (kind) {
    case Kind::Nearest: return "nearest";
    case Kind::Bilinear: return "bilinear";
    case Kind::Bicubic: return "bicubic";
    case Kind::Lanczos: return "lanczos" + std::to_string(lanczos_a);
    }
    return "unknown";
}

ResampleKernel ResampleKernel::parse(std::string_view text)
{
    std::string s(text);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "nearest")
        return nearest();
    if (s == "bilinear" || s == "linear")
        return bilinear();
    if (s == "bicubic" || s == "cubic")
        return bicubic();
    if (s.rfind("lanczos", 0) == 0) {
        const std::string_view rest = std::string_view(s).substr(7);
        if (rest.empty())
            return lanczos(3);
        int a = 0;
        auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), a);
        if (ec == std::errc() && ptr == rest.data() + rest.size() && a >= 1)
            return lanczos(a);
    }
    fail(ErrorCode::InvalidArgument, "unknown resample kernel '" + std::string(text) + "'");
}

AxisTaps compute_axis_taps(int n_in, int n_out, const ResampleKernel& kernel)
{
    if (n_in < 1 || n_out < 1)
        fail(ErrorCode::InvalidDimensions, "resample extents must be positive");
    AxisTaps taps;
    taps.offset.reserve(static_cast<std::size_t>(n_out) + 1);
    taps.offset.push_back(0);
    const double scale = static_cast<double>(n_in) / n_out;

    for (int i = 0; i < n_out; ++i) {
        const double center = (i + 0.5) * scale - 0.5;
        if (kernel.kind == ResampleKernel::Kind::Nearest) {
            // Point sampling; the box is never stretched.
            const int j = std::clamp(static_cast<int>(std::floor(center + 0.5)), 0, n_in - 1);
            taps.index.push_back(j);
            taps.weight.push_back(1.0);
            taps.offset.push_back(static_cast<int>(taps.index.size()));
            continue;
        }
        const double stretch = std::max(1.0, scale);
        const double radius = kernel.support() * stretch;
        const int first = static_cast<int>(std::floor(center - radius));
        const int last = static_cast<int>(std::ceil(center + radius));
        const std::size_t begin = taps.index.size();
        double total = 0.0;
        for (int j = first; j <= last; ++j) {
            const double w = kernel.weight((center - j) / stretch);
            if (w == 0.0)
                continue;
            const int src = std::clamp(j, 0, n_in - 1);
            // Merge clamped taps that land on the same edge sample.
            if (taps.index.size() > begin && taps.index.back() == src)
                taps.weight.back() += w;
            else {
                taps.index.push_back(src);
                taps.weight.push_back(w);
            }
            total += w;
        }
        if (taps.index.size() == begin || total == 0.0) {
            taps.index.push_back(std::clamp(static_cast<int>(std::lround(center)), 0, n_in - 1));
            taps.weight.push_back(1.0);
        } else {
            for (std::size_t k = begin; k < taps.weight.size(); ++k)
                taps.weight[k] /= total;
        }
        taps.offset.push_back(static_cast<int>(taps.index.size()));
    }
    return taps;
}

ImageF resample(const ImageF& img, int out_w, int out_h, const ResampleKernel& kernel)
{
    if (out_w < 1 || out_h < 1)
        fail(ErrorCode::InvalidDimensions,
             "target size " + std::to_string(out_w) + "x" + std::to_string(out_h));
    const int in_w = img.width();
    const int in_h = img.height();
    const AxisTaps htaps = compute_axis_taps(in_w, out_w, kernel);
    const AxisTaps vtaps = compute_axis_taps(in_h, out_h, kernel);

    ImageF out(out_w, out_h, img.channels());
    std::vector<double> tmp(static_cast<std::size_t>(out_w) * in_h);
    for (int c = 0; c < img.channels(); ++c) {
        const auto src = img.plane(c);
        for (int y = 0; y < in_h; ++y) {
            const double* row = src.data() + static_cast<std::size_t>(y) * in_w;
            double* dst = tmp.data() + static_cast<std::size_t>(y) * out_w;
            for (int x = 0; x < out_w; ++x) {
                double acc = 0.0;
                for (int k = htaps.offset[static_cast<std::size_t>(x)];
                     k < htaps.offset[static_cast<std::size_t>(x) + 1]; ++k)
                    acc += htaps.weight[static_cast<std::size_t>(k)]
                           * row[htaps.index[static_cast<std::size_t>(k)]];
                dst[x] = acc;
            }
        }
        auto dst = out.plane(c);
        for (int y = 0; y < out_h; ++y) {
            double* orow = dst.data() + static_cast<std::size_t>(y) * out_w;
            std::fill(orow, orow + out_w, 0.0);
            for (int k = vtaps.offset[static_cast<std::size_t>(y)];
                 k < vtaps.offset[static_cast<std::size_t>(y) + 1]; ++k) {
                const double w = vtaps.weight[static_cast<std::size_t>(k)];
                const double* trow =
                    tmp.data() + static_cast<std::size_t>(vtaps.index[static_cast<std::size_t>(k)]) * out_w;
                for (int x = 0; x < out_w; ++x)
                    orow[x] += w * trow[x];
            }
            for (int x = 0; x < out_w; ++x)
                orow[x] = std::clamp(orow[x], 0.0, 1.0);
        }
    }
    return out;
}

}  // namespace purikit
