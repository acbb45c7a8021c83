// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "purikit/image.hpp"

namespace purikit {

/// 8x8 quantization tables in natural (row-major) order.
struct QuantTables {
    std::array<std::uint16_t, 64> luminance{};
    std::array<std::uint16_t, 64> chrominance{};

    friend bool operator==(const QuantTables&, const QuantTables&) = default;
};

enum class ChromaSubsampling { S444, S420 };

/// Example tables of ITU-T T.81 Annex K (the tables used at quality 50).
const QuantTables& annex_k_tables();

/// IJG quality scaling: scale = 5000/q below 50, 200 - 2q otherwise; each
/// entry becomes clamp((base*scale + 50) / 100, 1, 255).
/// Throws QualityOutOfRange unless 1 <= q <= 100.
QuantTables quant_tables_for_quality(int quality);

/// Baseline sequential JFIF encoder. The pipeline (integer color conversion,
/// 2x2 chroma averaging, integer DCT, Annex K Huffman tables) follows the
/// IJG reference encoder so that the produced stream matches what common
/// imaging stacks write for the same quality.
///
/// Float input is quantized to 8 bits with to_u8 first.
std::vector<std::uint8_t> jpeg_encode(const ImageF& img, int quality,
                                      ChromaSubsampling subsampling = ChromaSubsampling::S420);
std::vector<std::uint8_t> jpeg_encode(const ImageU8& img, int quality,
                                      ChromaSubsampling subsampling = ChromaSubsampling::S420);

/// Baseline (SOF0/SOF1, Huffman) decoder with integer IDCT, triangular
/// chroma upsampling and integer YCbCr conversion.
///
/// Throws MalformedStream on truncated or inconsistent data and
/// UnsupportedJpegFeature for progressive, lossless, arithmetic-coded,
/// 12-bit or CMYK streams.
ImageU8 jpeg_decode_u8(std::span<const std::uint8_t> bytes);
ImageF jpeg_decode(std::span<const std::uint8_t> bytes);

/// decode(encode(img)).
ImageF jpeg_roundtrip(const ImageF& img, int quality,
                      ChromaSubsampling subsampling = ChromaSubsampling::S420);

}  // namespace purikit
