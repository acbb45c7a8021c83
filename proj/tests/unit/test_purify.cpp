// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <functional>

#include "fixtures.hpp"
#include "purikit/error.hpp"
#include "purikit/metrics.hpp"
#include "purikit/perturb.hpp"
#include "purikit/purify.hpp"

using namespace purikit;
using namespace purikit::testing;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no exception";
    return ErrorCode::InvalidArgument;
}

PurifyParams degenerate()
{
    PurifyParams p;
    p.down_factor = 1;
    p.jpeg_q = std::nullopt;
    p.face_sr = SrBackendSpec::identity();
    p.general_sr = SrBackendSpec::identity();
    p.lambda = 0.0;
    p.mask = MaskSource::constant(1.0);
    p.feather_radius = 0.0;
    return p;
}

double l2(const ImageF& a, const ImageF& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += (a.data()[i] - b.data()[i]) * (a.data()[i] - b.data()[i]);
    return std::sqrt(s);
}

ImageF perturbed(const ImageF& x, PerturbSpec::Kind kind, double eps, std::uint64_t seed)
{
    PerturbSpec s;
    s.kind = kind;
    s.epsilon = eps;
    s.seed = seed;
    return generate(x, s);
}

}  // namespace

TEST(BlendFace, ConvexEndpoints)
{
    const ImageF s = random_image(9, 7, 3, 1), xh = random_image(9, 7, 3, 2);
    EXPECT_EQ(blend_face(s, xh, 0.0, BlendMode::Convex), s);
    EXPECT_EQ(blend_face(s, xh, 1.0, BlendMode::Convex), xh);
}

TEST(BlendFace, ArithmeticExamples)
{
    const ImageF zero(4, 4, 3, 0.0), one(4, 4, 3, 1.0);
    for (auto mode : {BlendMode::Convex, BlendMode::Literal}) {
        const ImageF out = blend_face(zero, one, 0.2, mode);
        for (std::size_t i = 0; i < out.size(); ++i)
            ASSERT_NEAR(out.data()[i], 0.2, 1e-15);
    }
    const ImageF nine(4, 4, 3, 0.9);
    const ImageF lit = blend_face(nine, nine, 0.2, BlendMode::Literal);
    for (std::size_t i = 0; i < lit.size(); ++i)
        ASSERT_EQ(lit.data()[i], 1.0);
    const ImageF cvx = blend_face(nine, nine, 0.2, BlendMode::Convex);
    for (std::size_t i = 0; i < cvx.size(); ++i)
        ASSERT_NEAR(cvx.data()[i], 0.9, 1e-15);
}

TEST(BlendMode, Parse)
{
    EXPECT_EQ(parse_blend_mode("convex"), BlendMode::Convex);
    EXPECT_EQ(parse_blend_mode("literal"), BlendMode::Literal);
    EXPECT_EQ(parse_blend_mode("additive"), BlendMode::Literal);
    EXPECT_EQ(parse_blend_mode(to_string(BlendMode::Literal)), BlendMode::Literal);
    EXPECT_EQ(code_of([] { parse_blend_mode("sum"); }), ErrorCode::InvalidArgument);
}

TEST(FacePath, MatchesManualComposition)
{
    const ImageF xh = random_image(32, 24, 3, 3);
    PurifyParams p;
    ImageF x_jd;
    const ImageF got = face_path(xh, p, &x_jd);
    const ImageF j = jpeg_roundtrip(xh, 75, ChromaSubsampling::S420);
    const ImageF d = resample(j, 16, 12, ResampleKernel::lanczos(3));
    const ImageF s = resample(d, 32, 24, ResampleKernel::lanczos(3));
    EXPECT_EQ(x_jd, d);
    EXPECT_EQ(got, blend_face(s, xh, 0.2, BlendMode::Convex));
}

TEST(FacePath, SkippingJpegRemovesTheStage)
{
    const ImageF xh = random_image(20, 20, 3, 4);
    PurifyParams p;
    p.jpeg_q = std::nullopt;
    const ImageF s = resample(resample(xh, 10, 10, ResampleKernel::lanczos(3)), 20, 20, ResampleKernel::lanczos(3));
    EXPECT_EQ(face_path(xh, p), blend_face(s, xh, 0.2, BlendMode::Convex));
}

TEST(FacePath, OddSizesComeBackAtInputResolution)
{
    const ImageF xh = random_image(33, 21, 3, 5);
    const ImageF f = face_path(xh, PurifyParams{});
    EXPECT_EQ(f.width(), 33);
    EXPECT_EQ(f.height(), 21);
    const ImageF out = purify(xh, PurifyParams{});
    EXPECT_EQ(out.width(), 33);
    EXPECT_EQ(out.height(), 21);
}

TEST(BackgroundPath, Examples)
{
    const ImageF x = random_image(32, 32, 3, 6);
    EXPECT_EQ(background_path(x, degenerate()), x);

    const ImageF c(24, 24, 3, 0.42);
    const ImageF cg = background_path(c, PurifyParams{});
    for (std::size_t i = 0; i < cg.size(); ++i)
        ASSERT_NEAR(cg.data()[i], 0.42, 1e-12);

    const ImageF oracle = resample(resample(x, 64, 64, ResampleKernel::lanczos(3)), 32, 32, ResampleKernel::lanczos(3));
    const ImageF g = background_path(x, PurifyParams{});
    for (std::size_t i = 0; i < g.size(); ++i)
        ASSERT_NEAR(g.data()[i], oracle.data()[i], 1e-6);
}

TEST(Purify, ConstantMasksSelectOnePath)
{
    const ImageF xh = random_image(32, 32, 3, 7);
    PurifyParams p;
    p.mask = MaskSource::constant(1.0);
    EXPECT_EQ(purify(xh, p), face_path(xh, p));
    p.mask = MaskSource::constant(0.0);
    EXPECT_EQ(purify(xh, p), background_path(xh, p));
}

TEST(Purify, DegenerateConfigIsIdentity)
{
    for (std::uint64_t s = 0; s < 5; ++s) {
        const ImageF xh = random_image(17 + static_cast<int>(s), 19, 3, s);
        EXPECT_EQ(purify(xh, degenerate()), xh);
    }
}

TEST(Purify, FusionIsConvexPerSample)
{
    const ImageF xh = perturbed(synth_portrait(64, 64, 1), PerturbSpec::Kind::Sign, 8.0 / 255, 1);
    PurifyTrace t;
    const ImageF out = purify(xh, PurifyParams{}, &t);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double lo = std::min(t.x_f.data()[i], t.x_g.data()[i]);
        const double hi = std::max(t.x_f.data()[i], t.x_g.data()[i]);
        ASSERT_GE(out.data()[i], lo - 1e-12);
        ASSERT_LE(out.data()[i], hi + 1e-12);
        ASSERT_GE(out.data()[i], 0.0);
        ASSERT_LE(out.data()[i], 1.0);
    }
    EXPECT_EQ(t.mask.width(), 64);
    EXPECT_EQ(t.x_jd.width(), 32);
    EXPECT_GE(t.total_s, 0.0);
}

TEST(Purify, LambdaPullsTowardsInput)
{
    const ImageF xh = perturbed(synth_portrait(48, 48, 2), PerturbSpec::Kind::Uniform, 8.0 / 255, 2);
    PurifyParams p;
    p.mask = MaskSource::constant(1.0);
    double prev = INFINITY;
    for (double lambda : {0.0, 0.1, 0.2, 0.5, 0.8, 1.0}) {
        p.lambda = lambda;
        const double d = l2(purify(xh, p), xh);
        EXPECT_LE(d, prev + 1e-12) << lambda;
        prev = d;
    }
    EXPECT_EQ(prev, 0.0);
}

TEST(Purify, TracingDoesNotChangeOutput)
{
    const ImageF xh = random_image(40, 36, 3, 8);
    PurifyParams p;
    PurifyTrace t;
    const ImageF a = purify(xh, p), b = purify(xh, p, &t);
    EXPECT_EQ(a, b);
    p.parallel = false;
    EXPECT_EQ(purify(xh, p), a);
    EXPECT_EQ(fuse(t.x_f, t.x_g, t.mask), a);
}

TEST(Purify, OutputStaysInRangeUnderLiteralBlend)
{
    PurifyParams p;
    p.blend = BlendMode::Literal;
    p.lambda = 0.9;
    const ImageF out = purify(random_image(32, 32, 3, 9), p);
    for (std::size_t i = 0; i < out.size(); ++i) {
        ASSERT_GE(out.data()[i], 0.0);
        ASSERT_LE(out.data()[i], 1.0);
    }
}

TEST(Purify, DefaultParamsImproveSsimOnPortrait)
{
    const ImageF x = synth_portrait(128, 128, 11);
    const ImageF xh = perturbed(x, PerturbSpec::Kind::Uniform, 8.0 / 255, 11);
    const double before = ssim(xh, x).value, after = ssim(purify(xh, PurifyParams{}), x).value;
    EXPECT_GT(after, before);
}

TEST(PurifyParams, Validation)
{
    PurifyParams p;
    p.validate();
    p.lambda = 1.5;
    EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::InvalidArgument);
    p = PurifyParams{};
    p.down_factor = 4;
    EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::ScaleMismatch);
    p = PurifyParams{};
    p.jpeg_q = 0;
    EXPECT_EQ(code_of([&] { p.validate(); }), ErrorCode::QualityOutOfRange);
    EXPECT_EQ(code_of([&] { purify(ImageF(8, 8, 3), p); }), ErrorCode::QualityOutOfRange);
    EXPECT_EQ(PurifyParams{}.to_string(), PurifyParams{}.to_string());
    p = PurifyParams{};
    p.lambda = 0.3;
    EXPECT_NE(p.to_string(), PurifyParams{}.to_string());
}
