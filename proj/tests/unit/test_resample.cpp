// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fixtures.hpp"
#include "purikit/error.hpp"
#include "purikit/resample.hpp"

using namespace purikit;
using purikit::testing::random_image;

namespace {

double sinc(double x)
{
    if (x == 0.0)
        return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}

double oracle_weight(const ResampleKernel& k, double t)
{
    const double a = std::abs(t);
    switch (k.kind) {
    case ResampleKernel::Kind::Bilinear:
        return a < 1.0 ? 1.0 - a : 0.0;
    case ResampleKernel::Kind::Bicubic: {
        const double c = -0.5;
        if (a < 1.0)
            return (c + 2) * a * a * a - (c + 3) * a * a + 1;
        if (a < 2.0)
            return c * a * a * a - 5 * c * a * a + 8 * c * a - 4 * c;
        return 0.0;
    }
    case ResampleKernel::Kind::Lanczos:
        return a < k.lanczos_a ? sinc(t) * sinc(t / k.lanczos_a) : 0.0;
    case ResampleKernel::Kind::Nearest:
        break;
    }
    return 0.0;
}

double oracle_support(const ResampleKernel& k)
{
    return k.kind == ResampleKernel::Kind::Lanczos ? k.lanczos_a : k.kind == ResampleKernel::Kind::Bicubic ? 2.0 : 1.0;
}

// Dense, non-separable reference: every output sample is a single 2-D
// weighted sum over clamped source coordinates, normalized once.
ImageF dense_resize(const ImageF& img, int ow, int oh, const ResampleKernel& k)
{
    const int w = img.width(), h = img.height();
    const double sx = static_cast<double>(w) / ow, sy = static_cast<double>(h) / oh;
    const double stretch_x = std::max(1.0, sx), stretch_y = std::max(1.0, sy);
    const double sup = oracle_support(k);
    ImageF out(ow, oh, img.channels());
    for (int c = 0; c < img.channels(); ++c)
        for (int j = 0; j < oh; ++j)
            for (int i = 0; i < ow; ++i) {
                const double cx = (i + 0.5) * sx - 0.5, cy = (j + 0.5) * sy - 0.5;
                const int x0 = static_cast<int>(std::floor(cx - sup * stretch_x)) - 1;
                const int x1 = static_cast<int>(std::ceil(cx + sup * stretch_x)) + 1;
                const int y0 = static_cast<int>(std::floor(cy - sup * stretch_y)) - 1;
                const int y1 = static_cast<int>(std::ceil(cy + sup * stretch_y)) + 1;
                double acc = 0.0, wsum = 0.0;
                for (int y = y0; y <= y1; ++y)
                    for (int x = x0; x <= x1; ++x) {
                        const double wgt = oracle_weight(k, (x - cx) / stretch_x) * oracle_weight(k, (y - cy) / stretch_y);
                        if (wgt == 0.0)
                            continue;
                        acc += wgt * img.at(c, std::clamp(y, 0, h - 1), std::clamp(x, 0, w - 1));
                        wsum += wgt;
                    }
                out.at(c, j, i) = std::clamp(acc / wsum, 0.0, 1.0);
            }
    return out;
}

double max_abs_diff(const ImageF& a, const ImageF& b)
{
    EXPECT_TRUE(a.same_shape(b));
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

const ResampleKernel kAllKernels[] = {ResampleKernel::nearest(), ResampleKernel::bilinear(),
                                      ResampleKernel::bicubic(), ResampleKernel::lanczos(2),
                                      ResampleKernel::lanczos(3), ResampleKernel::lanczos(4)};

}  // namespace

TEST(Kernel, LanczosWeightAtHalf)
{
    EXPECT_NEAR(ResampleKernel::lanczos(3).weight(0.5), 0.6079271, 1e-7);
    EXPECT_NEAR(ResampleKernel::lanczos(3).weight(0.5), sinc(0.5) * sinc(0.5 / 3), 1e-15);
}

TEST(Kernel, ExactZeroAtNonzeroIntegers)
{
    for (const auto& k : {ResampleKernel::lanczos(2), ResampleKernel::lanczos(3), ResampleKernel::bicubic(),
                          ResampleKernel::bilinear()}) {
        EXPECT_EQ(k.weight(0.0), 1.0);
        for (int t = 1; t <= 5; ++t) {
            EXPECT_EQ(k.weight(t), 0.0) << k.name();
            EXPECT_EQ(k.weight(-t), 0.0) << k.name();
        }
    }
}

TEST(Kernel, MatchesOracleWeights)
{
    for (const auto& k : {ResampleKernel::bilinear(), ResampleKernel::bicubic(), ResampleKernel::lanczos(3)})
        for (double t = -4.0; t <= 4.0; t += 0.0625)
            EXPECT_NEAR(k.weight(t), oracle_weight(k, t), 1e-12) << k.name() << " t=" << t;
    EXPECT_NEAR(ResampleKernel::bicubic().weight(0.5), 0.5625, 1e-15);
    EXPECT_NEAR(ResampleKernel::bicubic().weight(1.5), -0.0625, 1e-15);
}

TEST(Kernel, NamesAndParsing)
{
    EXPECT_EQ(ResampleKernel::lanczos(3).name(), "lanczos3");
    EXPECT_EQ(ResampleKernel::parse("lanczos"), ResampleKernel::lanczos(3));
    EXPECT_EQ(ResampleKernel::parse("lanczos2"), ResampleKernel::lanczos(2));
    EXPECT_EQ(ResampleKernel::parse("cubic"), ResampleKernel::bicubic());
    EXPECT_EQ(ResampleKernel::parse("linear"), ResampleKernel::bilinear());
    EXPECT_EQ(ResampleKernel::parse("nearest"), ResampleKernel::nearest());
    for (const auto& k : kAllKernels)
        EXPECT_EQ(ResampleKernel::parse(k.name()), k);
    EXPECT_THROW(ResampleKernel::parse("gaussian"), Error);
    EXPECT_THROW(ResampleKernel::parse("lanczos0"), Error);
}

TEST(Resample, IdentityScaleIsExact)
{
    const ImageF img = random_image(13, 7, 3, 1);
    for (const auto& k : kAllKernels)
        EXPECT_EQ(resample(img, 13, 7, k), img) << k.name();
}

TEST(Resample, ConstantStaysConstant)
{
    const ImageF img(17, 11, 3, 0.3125);
    const std::pair<int, int> sizes[] = {{1, 1}, {5, 3}, {17, 11}, {34, 22}, {40, 7}, {9, 50}};
    for (const auto& k : kAllKernels)
        for (const auto& [w, h] : sizes) {
            const ImageF out = resample(img, w, h, k);
            for (const double v : out.data())
                ASSERT_NEAR(v, 0.3125, 1e-6) << k.name() << " " << w << "x" << h;
        }
}

TEST(Resample, MatchesDenseOracle)
{
    struct Case {
        int w, h, ow, oh;
    };
    const Case cases[] = {{16, 16, 8, 8}, {7, 5, 13, 11}, {128, 128, 64, 64}, {31, 17, 12, 40}, {5, 9, 5, 3}};
    for (const auto& k : {ResampleKernel::bilinear(), ResampleKernel::bicubic(), ResampleKernel::lanczos(3)})
        for (const auto& c : cases) {
            const ImageF img = random_image(c.w, c.h, 3, static_cast<std::uint64_t>(c.w * 100 + c.ow));
            EXPECT_LE(max_abs_diff(resample(img, c.ow, c.oh, k), dense_resize(img, c.ow, c.oh, k)), 1e-5)
                << k.name() << " " << c.w << "x" << c.h << "->" << c.ow << "x" << c.oh;
        }
}

TEST(Resample, NearestPicksRoundedCentre)
{
    ImageF img(4, 1, 1, std::vector<double>{0.1, 0.2, 0.3, 0.4});
    const ImageF down = resample(img, 2, 1, ResampleKernel::nearest());
    EXPECT_EQ(down.at(0, 0, 0), 0.2);
    EXPECT_EQ(down.at(0, 0, 1), 0.4);
    const ImageF up = resample(img, 8, 1, ResampleKernel::nearest());
    const double expect[] = {0.1, 0.1, 0.2, 0.2, 0.3, 0.3, 0.4, 0.4};
    for (int i = 0; i < 8; ++i)
        EXPECT_EQ(up.at(0, 0, i), expect[i]);
}

TEST(Resample, TapsAreNormalized)
{
    for (const auto& k : kAllKernels)
        for (const auto& [n_in, n_out] : {std::pair{10, 3}, {3, 10}, {64, 32}, {1, 5}, {5, 1}}) {
            const AxisTaps t = compute_axis_taps(n_in, n_out, k);
            ASSERT_EQ(t.offset.size(), static_cast<std::size_t>(n_out + 1));
            for (int i = 0; i < n_out; ++i) {
                double s = 0.0;
                for (int j = t.offset[i]; j < t.offset[i + 1]; ++j) {
                    s += t.weight[j];
                    EXPECT_GE(t.index[j], 0);
                    EXPECT_LT(t.index[j], n_in);
                }
                EXPECT_NEAR(s, 1.0, 1e-12);
            }
        }
}

TEST(Resample, OutputIsClamped)
{
    // A hard edge makes Lanczos overshoot before clamping.
    ImageF img(8, 1, 1);
    for (int x = 4; x < 8; ++x)
        img.at(0, 0, x) = 1.0;
    const ImageF up = resample(img, 32, 1, ResampleKernel::lanczos(3));
    for (const double v : up.data()) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

TEST(Resample, InvalidTarget)
{
    const ImageF img(4, 4, 1);
    try {
        resample(img, 0, 4, ResampleKernel::lanczos(3));
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidDimensions);
    }
    EXPECT_THROW(resample(img, 4, -1, ResampleKernel::bilinear()), Error);
}
