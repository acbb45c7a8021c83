// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <functional>
#include <png.h>

#include "fixtures.hpp"
#include "purikit/error.hpp"
#include "purikit/image.hpp"
#include "purikit/png_io.hpp"
#include "test_env.hpp"

using namespace purikit;
using purikit::testing::Rng;
using purikit::testing::ScratchDir;

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

// Minimal libpng writer for formats save_png never produces.
void write_png_raw(const std::filesystem::path& path, int w, int h, int bit_depth, int color_type,
                   const std::vector<std::uint8_t>& rows, const std::vector<png_color>& palette = {},
                   const std::vector<png_byte>& trans = {})
{
    FILE* f = std::fopen(path.c_str(), "wb");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png_create_info_struct(png);
    png_init_io(png, f);
    png_set_IHDR(png, info, static_cast<png_uint_32>(w), static_cast<png_uint_32>(h), bit_depth, color_type,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (!palette.empty())
        png_set_PLTE(png, info, palette.data(), static_cast<int>(palette.size()));
    if (!trans.empty())
        png_set_tRNS(png, info, trans.data(), static_cast<int>(trans.size()), nullptr);
    png_write_info(png, info);
    const std::size_t stride = rows.size() / static_cast<std::size_t>(h);
    for (int y = 0; y < h; ++y)
        png_write_row(png, rows.data() + static_cast<std::size_t>(y) * stride);
    png_write_end(png, info);
    png_destroy_write_struct(&png, &info);
    std::fclose(f);
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(ImageF, RejectsZeroExtentAndBadChannels)
{
    EXPECT_EQ(code_of([] { ImageF(0, 4, 3); }), ErrorCode::InvalidDimensions);
    EXPECT_EQ(code_of([] { ImageF(4, 0, 1); }), ErrorCode::InvalidDimensions);
    EXPECT_EQ(code_of([] { ImageF(4, 4, 2); }), ErrorCode::WrongChannelCount);
    EXPECT_EQ(code_of([] { ImageF(2, 2, 1, std::vector<double>(3)); }), ErrorCode::InvalidDimensions);
}

TEST(ImageF, PlanarLayout)
{
    ImageF img(3, 2, 3);
    img.at(1, 1, 2) = 0.5;
    EXPECT_EQ(img.data()[1 * 6 + 1 * 3 + 2], 0.5);
    EXPECT_EQ(img.plane(1)[5], 0.5);
    EXPECT_EQ(img.size(), 18u);
}

TEST(Conversion, U8RoundTripExhaustive)
{
    ImageU8 u{256, 1, 3, {}, false};
    for (int v = 0; v < 256; ++v)
        for (int c = 0; c < 3; ++c)
            u.data.push_back(static_cast<std::uint8_t>((v + 85 * c) % 256));
    EXPECT_EQ(to_u8(to_float(u)), u);
}

TEST(Conversion, SpecExamples)
{
    EXPECT_EQ(quantize_sample(1.0), 255);
    EXPECT_EQ(quantize_sample(255 / 255.0), 255);
    EXPECT_NEAR(128 / 255.0, 0.50196, 1e-5);
    EXPECT_EQ(quantize_sample(128 / 255.0), 128);
    EXPECT_EQ(quantize_sample(0.49999), 127);
    EXPECT_EQ(quantize_sample(-0.2), 0);
    EXPECT_EQ(quantize_sample(1.7), 255);
}

TEST(Conversion, RoundsHalfAwayFromZeroOnTheGrid)
{
    for (int k = 0; k < 255; ++k) {
        EXPECT_EQ(quantize_sample((k + 0.4999) / 255.0), k);
        EXPECT_EQ(quantize_sample((k + 0.5001) / 255.0), k + 1);
    }
}

TEST(Color, WhiteAndBlack)
{
    ImageF img(2, 1, 3);
    for (int c = 0; c < 3; ++c)
        img.at(c, 0, 0) = 1.0;
    const ImageF y = rgb_to_ycbcr(img);
    EXPECT_NEAR(y.at(0, 0, 0), 1.0, 1e-12);
    EXPECT_NEAR(y.at(1, 0, 0), 0.5, 1e-12);
    EXPECT_NEAR(y.at(2, 0, 0), 0.5, 1e-12);
    EXPECT_NEAR(y.at(0, 0, 1), 0.0, 1e-12);
    EXPECT_NEAR(y.at(1, 0, 1), 0.5, 1e-12);
    EXPECT_NEAR(y.at(2, 0, 1), 0.5, 1e-12);
}

TEST(Color, MatchesMatrixOracle)
{
    // Independent forward matrix (JFIF full range).
    const double m[3][3] = {{0.299, 0.587, 0.114}, {-0.168736, -0.331264, 0.5}, {0.5, -0.418688, -0.081312}};
    const ImageF img = purikit::testing::random_image(20, 10, 3, 7);
    const ImageF y = rgb_to_ycbcr(img);
    for (int yy = 0; yy < 10; ++yy)
        for (int x = 0; x < 20; ++x)
            for (int c = 0; c < 3; ++c) {
                double v = c == 0 ? 0.0 : 0.5;
                for (int k = 0; k < 3; ++k)
                    v += m[c][k] * img.at(k, yy, x);
                EXPECT_NEAR(y.at(c, yy, x), v, 2e-6);
            }
}

TEST(Color, RoundTripThousandPixels)
{
    const ImageF img = purikit::testing::random_image(1000, 1, 3, 11);
    const ImageF back = ycbcr_to_rgb(rgb_to_ycbcr(img));
    for (std::size_t i = 0; i < img.size(); ++i)
        EXPECT_NEAR(back.data()[i], img.data()[i], 1e-6);
}

TEST(Color, WrongChannelCount)
{
    EXPECT_EQ(code_of([] { rgb_to_ycbcr(ImageF(2, 2, 1)); }), ErrorCode::WrongChannelCount);
    EXPECT_EQ(code_of([] { ycbcr_to_rgb(ImageF(2, 2, 1)); }), ErrorCode::WrongChannelCount);
}

TEST(Color, LumaWeights)
{
    ImageF img(1, 1, 3);
    img.at(0, 0, 0) = 1.0;
    EXPECT_NEAR(luma(img).at(0, 0, 0), 0.299, 1e-12);
    ImageF gray(1, 1, 1, 0.3);
    EXPECT_EQ(luma(gray), gray);
}

TEST(Clamp, ClampsExplicitly)
{
    ImageF img(2, 1, 1, std::vector<double>{-0.5, 1.5});
    const ImageF c = clamp01(img);
    EXPECT_EQ(c.at(0, 0, 0), 0.0);
    EXPECT_EQ(c.at(0, 0, 1), 1.0);
}

TEST(Png, TwoByTwoRoundTrip)
{
    ScratchDir dir("png");
    ImageU8 u{2, 2, 3, {1, 2, 3, 250, 251, 252, 0, 128, 255, 7, 8, 9}, false};
    save_png(u, dir / "a.png");
    EXPECT_EQ(load_png(dir / "a.png"), u);
}

TEST(Png, SinglePixelRed)
{
    ScratchDir dir("png");
    save_png(ImageU8{1, 1, 3, {255, 0, 0}, false}, dir / "r.png");
    const ImageU8 u = load_png(dir / "r.png");
    EXPECT_EQ(u.data, (std::vector<std::uint8_t>{255, 0, 0}));
}

TEST(Png, GrayRoundTripAndDeterministicBytes)
{
    ScratchDir dir("png");
    const ImageU8 u = to_u8(purikit::testing::random_image(33, 17, 1, 3));
    save_png(u, dir / "a.png");
    save_png(u, dir / "b.png");
    EXPECT_EQ(load_png(dir / "a.png"), u);
    EXPECT_EQ(read_file(dir / "a.png"), read_file(dir / "b.png"));
}

TEST(Png, FixturesRoundTripSampleExact)
{
    ScratchDir dir("png");
    for (int i = 0; i < 5; ++i) {
        const ImageU8 u = to_u8(purikit::testing::synth_portrait(48 + i, 40, static_cast<std::uint64_t>(i)));
        save_png(u, dir / "f.png");
        EXPECT_EQ(load_png(dir / "f.png"), u);
    }
}

TEST(Png, Errors)
{
    ScratchDir dir("png");
    EXPECT_EQ(code_of([&] { load_png(dir / "missing.png"); }), ErrorCode::FileNotFound);
    EXPECT_EQ(code_of([&] { save_png(ImageU8{0, 0, 3, {}, false}, dir / "z.png"); }), ErrorCode::InvalidDimensions);
    {
        std::ofstream(dir / "junk.png") << "definitely not a png";
    }
    EXPECT_EQ(code_of([&] { load_png(dir / "junk.png"); }), ErrorCode::UnsupportedFormat);

    write_png_raw(dir / "deep.png", 2, 1, 16, PNG_COLOR_TYPE_GRAY, {0, 1, 2, 3});
    EXPECT_EQ(code_of([&] { load_png(dir / "deep.png"); }), ErrorCode::UnsupportedFormat);

    const std::vector<png_color> pal = {{255, 0, 0}, {0, 0, 255}};
    write_png_raw(dir / "pal_t.png", 2, 1, 8, PNG_COLOR_TYPE_PALETTE, {0, 1}, pal, {128});
    EXPECT_EQ(code_of([&] { load_png(dir / "pal_t.png"); }), ErrorCode::UnsupportedFormat);
}

TEST(Png, PaletteExpandsAndAlphaIsDropped)
{
    ScratchDir dir("png");
    const std::vector<png_color> pal = {{255, 0, 0}, {0, 0, 255}};
    write_png_raw(dir / "pal.png", 2, 1, 8, PNG_COLOR_TYPE_PALETTE, {1, 0}, pal);
    const ImageU8 p = load_png(dir / "pal.png");
    EXPECT_EQ(p.channels, 3);
    EXPECT_EQ(p.data, (std::vector<std::uint8_t>{0, 0, 255, 255, 0, 0}));
    EXPECT_FALSE(p.alpha_dropped);

    write_png_raw(dir / "rgba.png", 1, 1, 8, PNG_COLOR_TYPE_RGBA, {10, 20, 30, 40});
    const ImageU8 a = load_png(dir / "rgba.png");
    EXPECT_EQ(a.channels, 3);
    EXPECT_EQ(a.data, (std::vector<std::uint8_t>{10, 20, 30}));
    EXPECT_TRUE(a.alpha_dropped);

    write_png_raw(dir / "ga.png", 1, 1, 8, PNG_COLOR_TYPE_GRAY_ALPHA, {77, 0});
    const ImageU8 g = load_png(dir / "ga.png");
    EXPECT_EQ(g.channels, 1);
    EXPECT_EQ(g.data, (std::vector<std::uint8_t>{77}));
    EXPECT_TRUE(g.alpha_dropped);

    write_png_raw(dir / "g2.png", 4, 1, 2, PNG_COLOR_TYPE_GRAY, {0x1B});
    const ImageU8 g2 = load_png(dir / "g2.png");
    EXPECT_EQ(g2.data, (std::vector<std::uint8_t>{0, 85, 170, 255}));
}

TEST(Ppm, WritesHeaderAndBytes)
{
    ScratchDir dir("ppm");
    save_ppm(ImageU8{2, 1, 3, {1, 2, 3, 4, 5, 6}, false}, dir / "a.ppm");
    const auto bytes = read_file(dir / "a.ppm");
    const std::string text(bytes.begin(), bytes.end());
    EXPECT_EQ(text.substr(0, 11), "P6\n2 1\n255\n");
    EXPECT_EQ(bytes.size(), 11u + 6u);
    save_ppm(ImageU8{1, 1, 1, {9}, false}, dir / "a.pgm");
    const auto g = read_file(dir / "a.pgm");
    EXPECT_EQ(std::string(g.begin(), g.begin() + 2), "P5");
}
