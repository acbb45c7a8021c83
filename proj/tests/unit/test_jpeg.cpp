// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "purikit/error.hpp"
#include "purikit/jpeg.hpp"
#include "purikit/metrics.hpp"
#include "reference_codec.hpp"

using namespace purikit;
using namespace purikit::testing;

namespace {

// ITU-T T.81 Annex K, tables K.1 and K.2, natural order.
constexpr std::array<std::uint16_t, 64> kLumaK1 = {
    16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
    14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
    18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
    49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
constexpr std::array<std::uint16_t, 64> kChromaK2 = {
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99,
    24, 26, 56, 99, 99, 99, 99, 99, 47, 66, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99};

ErrorCode decode_error(const std::vector<std::uint8_t>& bytes)
{
    try {
        jpeg_decode_u8(bytes);
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "decode succeeded";
    return ErrorCode::InvalidArgument;
}

int max_diff(const ImageU8& a, const ImageU8& b)
{
    EXPECT_EQ(a.data.size(), b.data.size());
    int m = 0;
    for (std::size_t i = 0; i < std::min(a.data.size(), b.data.size()); ++i)
        m = std::max(m, std::abs(a.data[i] - b.data[i]));
    return m;
}

ImageU8 portrait_u8(int w, int h, std::uint64_t seed, int channels = 3)
{
    ImageF f = synth_portrait(w, h, seed);
    return to_u8(channels == 1 ? luma(f) : f);
}

}  // namespace

TEST(QuantTables, Quality50IsAnnexK)
{
    const QuantTables t = quant_tables_for_quality(50);
    EXPECT_EQ(t.luminance, kLumaK1);
    EXPECT_EQ(t.chrominance, kChromaK2);
    EXPECT_EQ(annex_k_tables().luminance, kLumaK1);
}

TEST(QuantTables, SpecPoints)
{
    EXPECT_EQ(quant_tables_for_quality(75).luminance[0], 8);
    EXPECT_EQ(quant_tables_for_quality(1).luminance[0], 255);
    EXPECT_EQ(quant_tables_for_quality(100).luminance[0], 1);
}

TEST(QuantTables, FormulaAtEveryQuality)
{
    for (int q = 1; q <= 100; ++q) {
        const int scale = q < 50 ? 5000 / q : 200 - 2 * q;
        const QuantTables t = quant_tables_for_quality(q);
        for (int i = 0; i < 64; ++i) {
            EXPECT_EQ(t.luminance[i], std::clamp((kLumaK1[i] * scale + 50) / 100, 1, 255));
            EXPECT_EQ(t.chrominance[i], std::clamp((kChromaK2[i] * scale + 50) / 100, 1, 255));
        }
    }
}

TEST(QuantTables, MatchReferenceCodec)
{
    for (int q = 1; q <= 100; ++q) {
        const auto ref = reference_quant_tables(q);
        const QuantTables t = quant_tables_for_quality(q);
        ASSERT_EQ(t.luminance, ref[0]) << "q=" << q;
        ASSERT_EQ(t.chrominance, ref[1]) << "q=" << q;
    }
}

TEST(QuantTables, MonotoneInQuality)
{
    for (int q = 1; q < 100; ++q) {
        const QuantTables a = quant_tables_for_quality(q), b = quant_tables_for_quality(q + 1);
        for (int i = 0; i < 64; ++i) {
            EXPECT_GE(a.luminance[i], b.luminance[i]);
            EXPECT_GE(a.chrominance[i], b.chrominance[i]);
        }
    }
}

TEST(QuantTables, OutOfRange)
{
    for (int q : {0, -5, 101})
        EXPECT_THROW(
            {
                try {
                    quant_tables_for_quality(q);
                } catch (const Error& e) {
                    EXPECT_EQ(e.code(), ErrorCode::QualityOutOfRange);
                    throw;
                }
            },
            Error);
}

TEST(JpegEncode, ByteIdenticalToReferenceEncoder)
{
    const std::pair<int, int> sizes[] = {{64, 64}, {37, 23}, {17, 9}, {1, 1}, {2, 3}, {33, 65}, {128, 96}};
    for (const auto& [w, h] : sizes)
        for (const int q : {1, 10, 50, 75, 95, 100})
            for (const bool s420 : {true, false})
                for (const int ch : {3, 1}) {
                    const ImageU8 u = portrait_u8(w, h, static_cast<std::uint64_t>(w * 31 + h), ch);
                    const auto mine = jpeg_encode(u, q, s420 ? ChromaSubsampling::S420 : ChromaSubsampling::S444);
                    const auto ref = reference_jpeg_encode(u, q, s420);
                    EXPECT_EQ(mine, ref) << w << "x" << h << " q" << q << (s420 ? " 420" : " 444") << " ch" << ch;
                }
}

TEST(JpegEncode, Deterministic)
{
    const ImageF f = synth_portrait(64, 64, 5);
    EXPECT_EQ(jpeg_encode(f, 75), jpeg_encode(f, 75));
}

TEST(JpegEncode, FloatAndU8EntryPointsAgree)
{
    const ImageF f = synth_portrait(40, 24, 2);
    EXPECT_EQ(jpeg_encode(f, 80), jpeg_encode(to_u8(f), 80));
}

TEST(JpegEncode, StreamStructure)
{
    const auto b = jpeg_encode(synth_portrait(16, 16, 1), 75);
    ASSERT_GE(b.size(), 4u);
    EXPECT_EQ(b[0], 0xFF);
    EXPECT_EQ(b[1], 0xD8);
    EXPECT_EQ(b[2], 0xFF);
    EXPECT_EQ(b[3], 0xE0);  // JFIF APP0
    EXPECT_EQ(b[b.size() - 2], 0xFF);
    EXPECT_EQ(b[b.size() - 1], 0xD9);
}

TEST(JpegEncode, RejectsOversizedAndBadQuality)
{
    EXPECT_THROW(jpeg_encode(ImageF(8, 8, 3), 0), Error);
    try {
        jpeg_encode(ImageU8{70000, 1, 1, std::vector<std::uint8_t>(70000), false}, 75);
        ADD_FAILURE();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::EncodeError);
    }
}

TEST(JpegRoundTrip, ConstantMidGrayAtAnyQuality)
{
    for (const int q : {1, 10, 50, 75, 100})
        for (const auto ss : {ChromaSubsampling::S420, ChromaSubsampling::S444}) {
            const ImageF gray(24, 17, 3, 128 / 255.0);
            const ImageF out = jpeg_roundtrip(gray, q, ss);
            for (const double v : out.data())
                EXPECT_NEAR(v, 128 / 255.0, 1.0 / 255.0 + 1e-12) << "q=" << q;
            // Same bound through the reference decoder.
            const ImageU8 ref = reference_jpeg_decode(jpeg_encode(gray, q, ss));
            for (const auto s : ref.data)
                EXPECT_LE(std::abs(int(s) - 128), 1);
        }
}

TEST(JpegRoundTrip, NaturalFixturePsnr)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ImageF x = to_float(portrait_u8(64, 64, seed));
        EXPECT_GE(psnr(x, jpeg_roundtrip(x, 75)).value, 30.0) << seed;
        const double q95 = psnr(x, jpeg_roundtrip(x, 95)).value;
        EXPECT_GT(q95, psnr(x, jpeg_roundtrip(x, 75)).value) << seed;
        // Same figure through the reference codec.
        const ImageU8 u = portrait_u8(64, 64, seed);
        EXPECT_NEAR(q95, psnr(x, to_float(reference_jpeg_decode(reference_jpeg_encode(u, 95, true)))).value, 1e-9);
    }
}

TEST(JpegRoundTrip, Quality100NearLossless)
{
    const ImageF x = to_float(to_u8(random_image(16, 16, 3, 9)));
    const ImageF y = jpeg_roundtrip(x, 100, ChromaSubsampling::S444);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::abs(x.data()[i] - y.data()[i]));
    EXPECT_LE(m, 4.0 / 255.0 + 1e-12);
}

TEST(JpegDecode, OwnStreamsMatchReferenceDecoder)
{
    for (const int q : {20, 75, 98})
        for (const auto ss : {ChromaSubsampling::S420, ChromaSubsampling::S444}) {
            const ImageU8 u = portrait_u8(45, 31, static_cast<std::uint64_t>(q));
            const auto bytes = jpeg_encode(u, q, ss);
            EXPECT_EQ(max_diff(jpeg_decode_u8(bytes), reference_jpeg_decode(bytes)), 0);
        }
}

TEST(JpegDecode, CrossDecodeReferenceStreams)
{
    // 4:2:0, 4:2:2, 4:4:0, 4:4:4, restart markers, optimized Huffman tables.
    const std::pair<int, int> factors[] = {{2, 2}, {2, 1}, {1, 2}, {1, 1}};
    for (const auto& [h, v] : factors)
        for (const int restart : {0, 3})
            for (const bool optimize : {false, true}) {
                ReferenceEncodeOptions o;
                o.luma_h = h;
                o.luma_v = v;
                o.restart_interval = restart;
                o.optimize_huffman = optimize;
                const ImageU8 u = portrait_u8(53, 29, 4);
                const auto bytes = reference_jpeg_encode(u, o);
                EXPECT_LE(max_diff(jpeg_decode_u8(bytes), reference_jpeg_decode(bytes)), 1)
                    << h << "x" << v << " rst" << restart;
            }
    const ImageU8 g = portrait_u8(30, 30, 6, 1);
    const auto gb = reference_jpeg_encode(g, 75, true);
    EXPECT_EQ(max_diff(jpeg_decode_u8(gb), reference_jpeg_decode(gb)), 0);
}

TEST(JpegDecode, FloatDecodeIsScaledU8)
{
    const auto bytes = jpeg_encode(synth_portrait(20, 20, 3), 75);
    EXPECT_EQ(jpeg_decode(bytes), to_float(jpeg_decode_u8(bytes)));
}

TEST(JpegDecode, MalformedStreams)
{
    const auto good = jpeg_encode(synth_portrait(32, 32, 8), 75);
    EXPECT_EQ(decode_error({}), ErrorCode::MalformedStream);
    EXPECT_EQ(decode_error({0x00, 0x01, 0x02}), ErrorCode::MalformedStream);
    for (const std::size_t cut : {std::size_t{2}, std::size_t{20}, good.size() / 2, good.size() - 2}) {
        const std::vector<std::uint8_t> truncated(good.begin(), good.begin() + static_cast<long>(cut));
        EXPECT_EQ(decode_error(truncated), ErrorCode::MalformedStream) << cut;
    }
}

TEST(JpegDecode, UnsupportedFeatures)
{
    ReferenceEncodeOptions o;
    o.progressive = true;
    EXPECT_EQ(decode_error(reference_jpeg_encode(portrait_u8(16, 16, 1), o)), ErrorCode::UnsupportedJpegFeature);

    // Relabel the baseline frame header as arithmetic-coded / lossless.
    auto bytes = jpeg_encode(synth_portrait(16, 16, 1), 75);
    for (const std::uint8_t marker : {0xC9, 0xC3}) {
        auto copy = bytes;
        for (std::size_t i = 0; i + 1 < copy.size(); ++i)
            if (copy[i] == 0xFF && copy[i + 1] == 0xC0) {
                copy[i + 1] = marker;
                break;
            }
        EXPECT_EQ(decode_error(copy), ErrorCode::UnsupportedJpegFeature);
    }
}
