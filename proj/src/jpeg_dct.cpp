// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Accurate integer DCT/IDCT in the Loeffler-Ligtenberg-Moschytz
// factorization with 13-bit fixed-point constants, as used by the IJG
// reference codec ("islow"). Rounding is reproduced exactly so that our
// streams and decoded samples agree with that codec.

#include <algorithm>

#include "jpeg_internal.hpp"

namespace purikit::jpeg_detail {

namespace {

constexpr int kConstBits = 13;
constexpr int kPass1Bits = 2;

constexpr std::int64_t kFix_0_298631336 = 2446;
constexpr std::int64_t kFix_0_390180644 = 3196;
constexpr std::int64_t kFix_0_541196100 = 4433;
constexpr std::int64_t kFix_0_765366865 = 6270;
constexpr std::int64_t kFix_0_899976223 = 7373;
constexpr std::int64_t kFix_1_175875602 = 9633;
constexpr std::int64_t kFix_1_501321110 = 12299;
constexpr std::int64_t kFix_1_847759065 = 15137;
constexpr std::int64_t kFix_1_961570560 = 16069;
constexpr std::int64_t kFix_2_053119869 = 16819;
constexpr std::int64_t kFix_2_562915447 = 20995;
constexpr std::int64_t kFix_3_072711026 = 25172;

constexpr std::int64_t descale(std::int64_t x, int n)
{
    return (x + (std::int64_t{1} << (n - 1))) >> n;
}

std::uint8_t range_limit(std::int64_t v)
{
    return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v + 128, 0, 255));
}

}  // namespace

void forward_dct_islow(Block& data)
{
    std::array<std::int64_t, 64> d{};
    for (int i = 0; i < 64; ++i)
        d[static_cast<std::size_t>(i)] = data[static_cast<std::size_t>(i)];

    // Rows.
    for (int row = 0; row < 8; ++row) {
        std::int64_t* p = d.data() + row * 8;
        const std::int64_t tmp0 = p[0] + p[7];
        std::int64_t tmp7 = p[0] - p[7];
        const std::int64_t tmp1 = p[1] + p[6];
        std::int64_t tmp6 = p[1] - p[6];
        const std::int64_t tmp2 = p[2] + p[5];
        std::int64_t tmp5 = p[2] - p[5];
        const std::int64_t tmp3 = p[3] + p[4];
        std::int64_t tmp4 = p[3] - p[4];

        const std::int64_t tmp10 = tmp0 + tmp3;
        const std::int64_t tmp13 = tmp0 - tmp3;
        const std::int64_t tmp11 = tmp1 + tmp2;
        const std::int64_t tmp12 = tmp1 - tmp2;

        p[0] = (tmp10 + tmp11) << kPass1Bits;
        p[4] = (tmp10 - tmp11) << kPass1Bits;
        std::int64_t z1 = (tmp12 + tmp13) * kFix_0_541196100;
        p[2] = descale(z1 + tmp13 * kFix_0_765366865, kConstBits - kPass1Bits);
        p[6] = descale(z1 + tmp12 * (-kFix_1_847759065), kConstBits - kPass1Bits);

        z1 = tmp4 + tmp7;
        std::int64_t z2 = tmp5 + tmp6;
        std::int64_t z3 = tmp4 + tmp6;
        std::int64_t z4 = tmp5 + tmp7;
        const std::int64_t z5 = (z3 + z4) * kFix_1_175875602;
        tmp4 *= kFix_0_298631336;
        tmp5 *= kFix_2_053119869;
        tmp6 *= kFix_3_072711026;
        tmp7 *= kFix_1_501321110;
        z1 *= -kFix_0_899976223;
        z2 *= -kFix_2_562915447;
        z3 *= -kFix_1_961570560;
        z4 *= -kFix_0_390180644;
        z3 += z5;
        z4 += z5;
        p[7] = descale(tmp4 + z1 + z3, kConstBits - kPass1Bits);
        p[5] = descale(tmp5 + z2 + z4, kConstBits - kPass1Bits);
        p[3] = descale(tmp6 + z2 + z3, kConstBits - kPass1Bits);
        p[1] = descale(tmp7 + z1 + z4, kConstBits - kPass1Bits);
    }

    // Columns.
    for (int col = 0; col < 8; ++col) {
        std::int64_t* p = d.data() + col;
        const std::int64_t tmp0 = p[0] + p[56];
        std::int64_t tmp7 = p[0] - p[56];
        const std::int64_t tmp1 = p[8] + p[48];
        std::int64_t tmp6 = p[8] - p[48];
        const std::int64_t tmp2 = p[16] + p[40];
        std::int64_t tmp5 = p[16] - p[40];
        const std::int64_t tmp3 = p[24] + p[32];
        std::int64_t tmp4 = p[24] - p[32];

        const std::int64_t tmp10 = tmp0 + tmp3;
        const std::int64_t tmp13 = tmp0 - tmp3;
        const std::int64_t tmp11 = tmp1 + tmp2;
        const std::int64_t tmp12 = tmp1 - tmp2;

        p[0] = descale(tmp10 + tmp11, kPass1Bits);
        p[32] = descale(tmp10 - tmp11, kPass1Bits);
        std::int64_t z1 = (tmp12 + tmp13) * kFix_0_541196100;
        p[16] = descale(z1 + tmp13 * kFix_0_765366865, kConstBits + kPass1Bits);
        p[48] = descale(z1 + tmp12 * (-kFix_1_847759065), kConstBits + kPass1Bits);

        z1 = tmp4 + tmp7;
        std::int64_t z2 = tmp5 + tmp6;
        std::int64_t z3 = tmp4 + tmp6;
        std::int64_t z4 = tmp5 + tmp7;
        const std::int64_t z5 = (z3 + z4) * kFix_1_175875602;
        tmp4 *= kFix_0_298631336;
        tmp5 *= kFix_2_053119869;
        tmp6 *= kFix_3_072711026;
        tmp7 *= kFix_1_501321110;
        z1 *= -kFix_0_899976223;
        z2 *= -kFix_2_562915447;
        z3 *= -kFix_1_961570560;
        z4 *= -kFix_0_390180644;
        z3 += z5;
        z4 += z5;
        p[56] = descale(tmp4 + z1 + z3, kConstBits + kPass1Bits);
        p[40] = descale(tmp5 + z2 + z4, kConstBits + kPass1Bits);
        p[24] = descale(tmp6 + z2 + z3, kConstBits + kPass1Bits);
        p[8] = descale(tmp7 + z1 + z4, kConstBits + kPass1Bits);
    }

    for (int i = 0; i < 64; ++i)
        data[static_cast<std::size_t>(i)] = static_cast<std::int32_t>(d[static_cast<std::size_t>(i)]);
}

void inverse_dct_islow(const Block& coef, const std::array<std::uint16_t, 64>& quant,
                       std::uint8_t* out, int out_stride)
{
    std::array<std::int64_t, 64> ws{};

    // Columns: dequantize and transform, keep PASS1_BITS of extra precision.
    for (int col = 0; col < 8; ++col) {
        auto in = [&](int row) {
            const auto k = static_cast<std::size_t>(row * 8 + col);
            return static_cast<std::int64_t>(coef[k]) * quant[k];
        };
        std::int64_t* w = ws.data() + col;
        if (coef[static_cast<std::size_t>(8 + col)] == 0 && coef[static_cast<std::size_t>(16 + col)] == 0
            && coef[static_cast<std::size_t>(24 + col)] == 0 && coef[static_cast<std::size_t>(32 + col)] == 0
            && coef[static_cast<std::size_t>(40 + col)] == 0 && coef[static_cast<std::size_t>(48 + col)] == 0
            && coef[static_cast<std::size_t>(56 + col)] == 0) {
            const std::int64_t dc = in(0) << kPass1Bits;
            for (int r = 0; r < 8; ++r)
                w[r * 8] = dc;
            continue;
        }

        std::int64_t z2 = in(2);
        std::int64_t z3 = in(6);
        std::int64_t z1 = (z2 + z3) * kFix_0_541196100;
        std::int64_t tmp2 = z1 + z3 * (-kFix_1_847759065);
        std::int64_t tmp3 = z1 + z2 * kFix_0_765366865;
        z2 = in(0);
        z3 = in(4);
        std::int64_t tmp0 = (z2 + z3) << kConstBits;
        std::int64_t tmp1 = (z2 - z3) << kConstBits;
        const std::int64_t tmp10 = tmp0 + tmp3;
        const std::int64_t tmp13 = tmp0 - tmp3;
        const std::int64_t tmp11 = tmp1 + tmp2;
        const std::int64_t tmp12 = tmp1 - tmp2;

        tmp0 = in(7);
        tmp1 = in(5);
        tmp2 = in(3);
        tmp3 = in(1);
        z1 = tmp0 + tmp3;
        z2 = tmp1 + tmp2;
        z3 = tmp0 + tmp2;
        std::int64_t z4 = tmp1 + tmp3;
        const std::int64_t z5 = (z3 + z4) * kFix_1_175875602;
        tmp0 *= kFix_0_298631336;
        tmp1 *= kFix_2_053119869;
        tmp2 *= kFix_3_072711026;
        tmp3 *= kFix_1_501321110;
        z1 *= -kFix_0_899976223;
        z2 *= -kFix_2_562915447;
        z3 *= -kFix_1_961570560;
        z4 *= -kFix_0_390180644;
        z3 += z5;
        z4 += z5;
        tmp0 += z1 + z3;
        tmp1 += z2 + z4;
        tmp2 += z2 + z3;
        tmp3 += z1 + z4;

        w[0] = descale(tmp10 + tmp3, kConstBits - kPass1Bits);
        w[56] = descale(tmp10 - tmp3, kConstBits - kPass1Bits);
        w[8] = descale(tmp11 + tmp2, kConstBits - kPass1Bits);
        w[48] = descale(tmp11 - tmp2, kConstBits - kPass1Bits);
        w[16] = descale(tmp12 + tmp1, kConstBits - kPass1Bits);
        w[40] = descale(tmp12 - tmp1, kConstBits - kPass1Bits);
        w[24] = descale(tmp13 + tmp0, kConstBits - kPass1Bits);
        w[32] = descale(tmp13 - tmp0, kConstBits - kPass1Bits);
    }

    // Rows: remove PASS1_BITS and the factor of 8, then level shift.
    constexpr int kFinal = kConstBits + kPass1Bits + 3;
    for (int row = 0; row < 8; ++row) {
        const std::int64_t* w = ws.data() + row * 8;
        std::uint8_t* o = out + row * out_stride;
        if (w[1] == 0 && w[2] == 0 && w[3] == 0 && w[4] == 0 && w[5] == 0 && w[6] == 0
            && w[7] == 0) {
            const std::uint8_t v = range_limit(descale(w[0], kPass1Bits + 3));
            for (int c = 0; c < 8; ++c)
                o[c] = v;
            continue;
        }

        std::int64_t z2 = w[2];
        std::int64_t z3 = w[6];
        std::int64_t z1 = (z2 + z3) * kFix_0_541196100;
        std::int64_t tmp2 = z1 + z3 * (-kFix_1_847759065);
        std::int64_t tmp3 = z1 + z2 * kFix_0_765366865;
        std::int64_t tmp0 = (w[0] + w[4]) << kConstBits;
        std::int64_t tmp1 = (w[0] - w[4]) << kConstBits;
        const std::int64_t tmp10 = tmp0 + tmp3;
        const std::int64_t tmp13 = tmp0 - tmp3;
        const std::int64_t tmp11 = tmp1 + tmp2;
        const std::int64_t tmp12 = tmp1 - tmp2;

        tmp0 = w[7];
        tmp1 = w[5];
        tmp2 = w[3];
        tmp3 = w[1];
        z1 = tmp0 + tmp3;
        z2 = tmp1 + tmp2;
        z3 = tmp0 + tmp2;
        std::int64_t z4 = tmp1 + tmp3;
        const std::int64_t z5 = (z3 + z4) * kFix_1_175875602;
        tmp0 *= kFix_0_298631336;
        tmp1 *= kFix_2_053119869;
        tmp2 *= kFix_3_072711026;
        tmp3 *= kFix_1_501321110;
        z1 *= -kFix_0_899976223;
        z2 *= -kFix_2_562915447;
        z3 *= -kFix_1_961570560;
        z4 *= -kFix_0_390180644;
        z3 += z5;
        z4 += z5;
        tmp0 += z1 + z3;
        tmp1 += z2 + z4;
        tmp2 += z2 + z3;
        tmp3 += z1 + z4;

        o[0] = range_limit(descale(tmp10 + tmp3, kFinal));
        o[7] = range_limit(descale(tmp10 - tmp3, kFinal));
        o[1] = range_limit(descale(tmp11 + tmp2, kFinal));
        o[6] = range_limit(descale(tmp11 - tmp2, kFinal));
        o[2] = range_limit(descale(tmp12 + tmp1, kFinal));
        o[5] = range_limit(descale(tmp12 - tmp1, kFinal));
        o[3] = range_limit(descale(tmp13 + tmp0, kFinal));
        o[4] = range_limit(descale(tmp13 - tmp0, kFinal));
    }
}

}  // namespace purikit::jpeg_detail
