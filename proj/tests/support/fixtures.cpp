// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace purikit::testing {

ImageF random_image(int width, int height, int channels, std::uint64_t seed)
{
    Rng rng(seed);
    ImageF img(width, height, channels);
    for (double& s : img.data())
        s = rng.uniform();
    return img;
}

namespace {

double smoothstep(double e0, double e1, double x)
{
    const double t = std::clamp((x - e0) / (e1 - e0), 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

// Bilinearly interpolated lattice noise with `cell` pixel spacing.
class ValueNoise {
public:
    ValueNoise(int width, int height, int cell, Rng& rng)
        : cell_(cell)
        , gw_(width / cell + 2)
        , gh_(height / cell + 2)
        , grid_(static_cast<std::size_t>(gw_) * gh_)
    {
        for (double& v : grid_)
            v = rng.uniform(-1.0, 1.0);
    }

    double at(int x, int y) const
    {
        const double fx = static_cast<double>(x) / cell_;
        const double fy = static_cast<double>(y) / cell_;
        const int ix = static_cast<int>(fx), iy = static_cast<int>(fy);
        const double tx = fx - ix, ty = fy - iy;
        auto g = [&](int i, int j) { return grid_[static_cast<std::size_t>(j) * gw_ + i]; };
        return (1 - ty) * ((1 - tx) * g(ix, iy) + tx * g(ix + 1, iy))
               + ty * ((1 - tx) * g(ix, iy + 1) + tx * g(ix + 1, iy + 1));
    }

private:
    int cell_, gw_, gh_;
    std::vector<double> grid_;
};

}  // namespace

ImageF synth_portrait(int width, int height, std::uint64_t seed)
{
    Rng rng(seed * 0x9E3779B97F4A7C15ull + 17);
    const double bg_top[3] = {rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8), rng.uniform(0.2, 0.8)};
    const double bg_bottom[3] = {rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6), rng.uniform(0.1, 0.6)};
    const double skin[3] = {rng.uniform(0.65, 0.9), rng.uniform(0.45, 0.65), rng.uniform(0.35, 0.55)};
    const double hair[3] = {rng.uniform(0.05, 0.35), rng.uniform(0.03, 0.25), rng.uniform(0.02, 0.2)};
    const double shirt[3] = {rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9)};
    const double cx = rng.uniform(0.45, 0.55);
    const double cy = rng.uniform(0.42, 0.50);
    const double rx = rng.uniform(0.22, 0.28);
    const double ry = rng.uniform(0.30, 0.36);
    const double tilt = rng.uniform(-0.15, 0.15);

    const int cell_coarse = std::max(2, width / 8);
    const int cell_fine = std::max(2, width / 32);
    ValueNoise coarse(width, height, cell_coarse, rng);
    ValueNoise fine(width, height, cell_fine, rng);

    ImageF img(width, height, 3);
    const double aa = 1.5 / std::min(width, height);  // edge softness
    for (int y = 0; y < height; ++y) {
        for (int x = 0; x < width; ++x) {
            const double u = (x + 0.5) / width;
            const double v = (y + 0.5) / height;
            const double du = u - cx, dv = v - cy;
            const double ru = du * std::cos(tilt) + dv * std::sin(tilt);
            const double rv = -du * std::sin(tilt) + dv * std::cos(tilt);
            const double face_r = std::sqrt((ru / rx) * (ru / rx) + (rv / ry) * (rv / ry));
            const double face = 1.0 - smoothstep(1.0 - aa / rx, 1.0 + aa / rx, face_r);
            const double hair_r = std::sqrt((ru / (rx * 1.15)) * (ru / (rx * 1.15))
                                            + ((rv + 0.06) / (ry * 1.1)) * ((rv + 0.06) / (ry * 1.1)));
            const double hair_mask = (1.0 - smoothstep(1.0 - aa / rx, 1.0 + aa / rx, hair_r))
                                     * smoothstep(-0.05, -0.2, rv + 0.05 * std::cos(ru * 20.0));
            const double shoulders = smoothstep(cy + ry * 0.9, cy + ry * 1.05, v)
                                     * (1.0 - smoothstep(0.38, 0.46, std::abs(u - cx)));
            auto blob = [&](double ex, double ey, double sx, double sy) {
                const double r = std::sqrt(((ru - ex) / sx) * ((ru - ex) / sx) + ((rv - ey) / sy) * ((rv - ey) / sy));
                return 1.0 - smoothstep(0.8, 1.2, r);
            };
            const double eyes = std::max(blob(-0.09, -0.05, 0.035, 0.018), blob(0.09, -0.05, 0.035, 0.018));
            const double mouth = blob(0.0, 0.15, 0.07, 0.018);
            const double shade = 0.85 + 0.15 * (1.0 - face_r * face_r) - 0.1 * ru;
            const double tex = 0.04 * coarse.at(x, y) + 0.015 * fine.at(x, y);

            for (int c = 0; c < 3; ++c) {
                double bg = bg_top[c] + (bg_bottom[c] - bg_top[c]) * v;
                bg = bg * (1.0 - shoulders) + shirt[c] * shoulders;
                double skin_c = skin[c] * shade;
                skin_c = skin_c * (1.0 - eyes) + 0.08 * eyes;
                const double lip[3] = {0.7, 0.25, 0.3};
                skin_c = skin_c * (1.0 - mouth) + lip[c] * mouth;
                double value = bg * (1.0 - face) + skin_c * face;
                value = value * (1.0 - hair_mask) + hair[c] * hair_mask;
                img.at(c, y, x) = std::clamp(value + tex, 0.0, 1.0);
            }
        }
    }
    return img;
}

ImageF gradient_fixture(int width, int height)
{
    ImageF img(width, height, 3);
    for (int y = 0; y < height; ++y)
        for (int x = 0; x < width; ++x) {
            img.at(0, y, x) = 0.2 + 0.6 * x / (width - 1);
            img.at(1, y, x) = 0.2 + 0.6 * y / (height - 1);
            img.at(2, y, x) = 0.5;
        }
    return img;
}

}  // namespace purikit::testing
