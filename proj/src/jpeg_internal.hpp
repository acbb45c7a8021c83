// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace purikit::jpeg_detail {

inline constexpr std::array<int, 64> kZigzagToNatural = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,
    12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6,  7,  14, 21, 28,
    35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51,
    58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63,
};

struct HuffmanSpec {
    std::array<std::uint8_t, 16> counts;  // number of codes of length 1..16
    const std::uint8_t* values;
    int value_count;
};

const HuffmanSpec& std_dc_luminance();
const HuffmanSpec& std_ac_luminance();
const HuffmanSpec& std_dc_chrominance();
const HuffmanSpec& std_ac_chrominance();

using Block = std::array<std::int32_t, 64>;

/// Scaled integer forward DCT (outputs are 8x the orthonormal DCT). Input
/// samples must already be level-shifted by -128.
void forward_dct_islow(Block& data);

/// Integer inverse DCT of dequantized coefficients (natural order); writes
/// clamped 8-bit samples including the +128 level shift.
void inverse_dct_islow(const Block& coef, const std::array<std::uint16_t, 64>& quant,
                       std::uint8_t* out, int out_stride);

}  // namespace purikit::jpeg_detail
