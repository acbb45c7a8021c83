// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <string>

#include "jpeg_internal.hpp"
#include "purikit/error.hpp"
#include "purikit/jpeg.hpp"

namespace purikit {

namespace {

using jpeg_detail::Block;
using jpeg_detail::HuffmanSpec;
using jpeg_detail::kZigzagToNatural;

struct HuffmanCodes {
    std::array<std::uint16_t, 256> code{};
    std::array<std::uint8_t, 256> size{};
};

HuffmanCodes build_codes(const HuffmanSpec& spec)
{
    HuffmanCodes out;
    std::uint16_t code = 0;
    int k = 0;
    for (int len = 1; len <= 16; ++len) {
        for (int i = 0; i < spec.counts[static_cast<std::size_t>(len - 1)]; ++i, ++k) {
            const std::uint8_t symbol = spec.values[k];
            out.code[symbol] = code++;
            out.size[symbol] = static_cast<std::uint8_t>(len);
        }
        code = static_cast<std::uint16_t>(code << 1);
    }
    return out;
}

class ByteSink {
public:
    void byte(std::uint8_t b) { bytes_.push_back(b); }
    void word(unsigned w)
    {
        byte(static_cast<std::uint8_t>(w >> 8));
        byte(static_cast<std::uint8_t>(w & 0xFF));
    }
    void marker(std::uint8_t code)
    {
        byte(0xFF);
        byte(code);
    }
    std::vector<std::uint8_t>& bytes() { return bytes_; }

private:
    std::vector<std::uint8_t> bytes_;
};

class BitWriter {
public:
    explicit BitWriter(ByteSink& sink)
        : sink_(sink)
    {
    }

    void put(std::uint32_t bits, int count)
    {
        accumulator_ = (accumulator_ << count) | (bits & ((1u << count) - 1u));
        pending_ += count;
        while (pending_ >= 8) {
            const auto b = static_cast<std::uint8_t>((accumulator_ >> (pending_ - 8)) & 0xFF);
            sink_.byte(b);
            if (b == 0xFF)
                sink_.byte(0x00);
            pending_ -= 8;
        }
        accumulator_ &= (1u << pending_) - 1u;
    }

    /// Pads the last partial byte with one bits.
    void flush()
    {
        if (pending_ > 0)
            put(0x7F, 8 - pending_);
    }

private:
    ByteSink& sink_;
    std::uint32_t accumulator_ = 0;
    int pending_ = 0;
};

int bit_length(int v)
{
    int n = 0;
    for (unsigned u = static_cast<unsigned>(v < 0 ? -v : v); u != 0; u >>= 1)
        ++n;
    return n;
}

struct Component {
    int id = 0;
    int h = 1;
    int v = 1;
    int table = 0;  // quantization and Huffman table index
    int width_in_blocks = 0;
    int height_in_blocks = 0;
    int stride = 0;  // = width_in_blocks * 8
    std::vector<std::uint8_t> samples;  // stride x height_in_blocks*8
};

Component make_component(int id, int sampling, int table)
{
    Component c;
    c.id = id;
    c.h = sampling;
    c.v = sampling;
    c.table = table;
    return c;
}

int ceil_div(long a, long b)
{
    return static_cast<int>((a + b - 1) / b);
}

// Integer RGB -> YCbCr with 16-bit fixed-point coefficients, identical to the
// reference encoder's table-driven converter.
void rgb_to_ycc_u8(const ImageU8& img, std::vector<std::uint8_t>& y, std::vector<std::uint8_t>& cb,
                   std::vector<std::uint8_t>& cr)
{
    constexpr int kScaleBits = 16;
    constexpr std::int64_t kHalf = std::int64_t{1} << (kScaleBits - 1);
    constexpr std::int64_t kCbCrOffset = std::int64_t{128} << kScaleBits;
    auto fix = [](double x) { return static_cast<std::int64_t>(x * 65536.0 + 0.5); };
    const std::int64_t r_y = fix(0.29900), g_y = fix(0.58700), b_y = fix(0.11400);
    const std::int64_t r_cb = -fix(0.16874), g_cb = -fix(0.33126), b_cb = fix(0.5);
    const std::int64_t g_cr = -fix(0.41869), b_cr = -fix(0.08131);

    const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
    y.resize(n);
    cb.resize(n);
    cr.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::int64_t r = img.data[3 * i];
        const std::int64_t g = img.data[3 * i + 1];
        const std::int64_t b = img.data[3 * i + 2];
        y[i] = static_cast<std::uint8_t>((r_y * r + g_y * g + b_y * b + kHalf) >> kScaleBits);
        cb[i] = static_cast<std::uint8_t>(
            (r_cb * r + g_cb * g + b_cb * b + kCbCrOffset + kHalf - 1) >> kScaleBits);
        cr[i] = static_cast<std::uint8_t>(
            (b_cb * r + g_cr * g + b_cr * b + kCbCrOffset + kHalf - 1) >> kScaleBits);
    }
}

// Produces the component's padded sample plane: edge replication to the
// block grid, then (for subsampled components) biased box averaging.
void downsample_into(Component& comp, const std::vector<std::uint8_t>& full, int width, int height,
                     int max_h, int max_v)
{
    const int fx = max_h / comp.h;
    const int fy = max_v / comp.v;
    comp.stride = comp.width_in_blocks * 8;
    const int rows = comp.height_in_blocks * 8;
    comp.samples.assign(static_cast<std::size_t>(comp.stride) * rows, 0);

    auto src = [&](int x, int y) {
        x = std::min(x, width - 1);
        y = std::min(y, height - 1);
        return static_cast<int>(full[static_cast<std::size_t>(y) * width + x]);
    };

    // Rows actually produced by the downsampler; the rest replicate the last.
    const int real_rows = std::min(rows, ceil_div(height, fy));
    for (int oy = 0; oy < real_rows; ++oy) {
        std::uint8_t* out = comp.samples.data() + static_cast<std::size_t>(oy) * comp.stride;
        if (fx == 1 && fy == 1) {
            for (int ox = 0; ox < comp.stride; ++ox)
                out[ox] = static_cast<std::uint8_t>(src(ox, oy));
        } else if (fx == 2 && fy == 1) {
            int bias = 0;
            for (int ox = 0; ox < comp.stride; ++ox) {
                out[ox] = static_cast<std::uint8_t>((src(2 * ox, oy) + src(2 * ox + 1, oy) + bias) >> 1);
                bias ^= 1;
            }
        } else if (fx == 1 && fy == 2) {
            int bias = 0;
            for (int ox = 0; ox < comp.stride; ++ox) {
                out[ox] = static_cast<std::uint8_t>((src(ox, 2 * oy) + src(ox, 2 * oy + 1) + bias) >> 1);
                bias ^= 1;
            }
        } else {
            int bias = 1;
            for (int ox = 0; ox < comp.stride; ++ox) {
                const int sum = src(2 * ox, 2 * oy) + src(2 * ox + 1, 2 * oy)
                                + src(2 * ox, 2 * oy + 1) + src(2 * ox + 1, 2 * oy + 1);
                out[ox] = static_cast<std::uint8_t>((sum + bias) >> 2);
                bias ^= 3;
            }
        }
    }
    for (int oy = real_rows; oy < rows; ++oy)
        std::copy_n(comp.samples.data() + static_cast<std::size_t>(real_rows - 1) * comp.stride,
                    comp.stride, comp.samples.data() + static_cast<std::size_t>(oy) * comp.stride);
}

void quantize_block(const Component& comp, int bx, int by, const std::array<std::uint16_t, 64>& q,
                    Block& out)
{
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x)
            out[static_cast<std::size_t>(y * 8 + x)] =
                static_cast<int>(comp.samples[static_cast<std::size_t>(by * 8 + y) * comp.stride
                                              + static_cast<std::size_t>(bx * 8 + x)])
                - 128;
    jpeg_detail::forward_dct_islow(out);
    for (std::size_t k = 0; k < 64; ++k) {
        const int divisor = 8 * q[k];
        const int v = out[k];
        out[k] = v < 0 ? -((-v + divisor / 2) / divisor) : (v + divisor / 2) / divisor;
    }
}

class EntropyEncoder {
public:
    EntropyEncoder(ByteSink& sink, int components)
        : bits_(sink)
        , predictors_(static_cast<std::size_t>(components), 0)
    {
    }

    void encode(const Block& block, int component, const HuffmanCodes& dc, const HuffmanCodes& ac)
    {
        const int diff = block[0] - predictors_[static_cast<std::size_t>(component)];
        predictors_[static_cast<std::size_t>(component)] = block[0];
        emit_value(diff, dc, 0);

        int run = 0;
        for (int k = 1; k < 64; ++k) {
            const int v = block[static_cast<std::size_t>(kZigzagToNatural[static_cast<std::size_t>(k)])];
            if (v == 0) {
                ++run;
                continue;
            }
            while (run > 15) {
                bits_.put(ac.code[0xF0], ac.size[0xF0]);
                run -= 16;
            }
            emit_value(v, ac, run);
            run = 0;
        }
        if (run > 0)
            bits_.put(ac.code[0x00], ac.size[0x00]);
    }

    void finish() { bits_.flush(); }

private:
    void emit_value(int v, const HuffmanCodes& table, int run)
    {
        const int nbits = bit_length(v);
        const int symbol = (run << 4) | nbits;
        bits_.put(table.code[static_cast<std::size_t>(symbol)], table.size[static_cast<std::size_t>(symbol)]);
        if (nbits > 0) {
            const int raw = v < 0 ? v - 1 : v;
            bits_.put(static_cast<std::uint32_t>(raw), nbits);
        }
    }

    BitWriter bits_;
    std::vector<int> predictors_;
};

void write_dqt(ByteSink& sink, int index, const std::array<std::uint16_t, 64>& table)
{
    sink.marker(0xDB);
    sink.word(67);
    sink.byte(static_cast<std::uint8_t>(index));
    for (int k = 0; k < 64; ++k)
        sink.byte(static_cast<std::uint8_t>(table[static_cast<std::size_t>(kZigzagToNatural[static_cast<std::size_t>(k)])]));
}

void write_dht(ByteSink& sink, int index, bool is_ac, const HuffmanSpec& spec)
{
    sink.marker(0xC4);
    sink.word(static_cast<unsigned>(2 + 1 + 16 + spec.value_count));
    sink.byte(static_cast<std::uint8_t>(index | (is_ac ? 0x10 : 0x00)));
    for (auto c : spec.counts)
        sink.byte(c);
    for (int i = 0; i < spec.value_count; ++i)
        sink.byte(spec.values[i]);
}

}  // namespace

std::vector<std::uint8_t> jpeg_encode(const ImageU8& img, int quality, ChromaSubsampling subsampling)
{
    validate(img);
    if (img.width > 65535 || img.height > 65535)
        fail(ErrorCode::EncodeError, "JPEG dimensions are limited to 65535");
    const QuantTables tables = quant_tables_for_quality(quality);

    const bool color = img.channels == 3;
    std::vector<Component> comps;
    std::vector<std::vector<std::uint8_t>> planes;
    if (color) {
        planes.resize(3);
        rgb_to_ycc_u8(img, planes[0], planes[1], planes[2]);
        const int luma_factor = subsampling == ChromaSubsampling::S420 ? 2 : 1;
        comps.push_back(make_component(1, luma_factor, 0));
        comps.push_back(make_component(2, 1, 1));
        comps.push_back(make_component(3, 1, 1));
    } else {
        planes.push_back(img.data);
        comps.push_back(make_component(1, 1, 0));
    }

    int max_h = 1, max_v = 1;
    for (const auto& c : comps) {
        max_h = std::max(max_h, c.h);
        max_v = std::max(max_v, c.v);
    }
    for (std::size_t i = 0; i < comps.size(); ++i) {
        auto& c = comps[i];
        c.width_in_blocks = ceil_div(static_cast<long>(img.width) * c.h, 8L * max_h);
        c.height_in_blocks = ceil_div(static_cast<long>(img.height) * c.v, 8L * max_v);
        downsample_into(c, planes[i], img.width, img.height, max_h, max_v);
    }

    const HuffmanCodes dc_codes[2] = {build_codes(jpeg_detail::std_dc_luminance()),
                                      build_codes(jpeg_detail::std_dc_chrominance())};
    const HuffmanCodes ac_codes[2] = {build_codes(jpeg_detail::std_ac_luminance()),
                                      build_codes(jpeg_detail::std_ac_chrominance())};
    const std::array<std::uint16_t, 64>* quant[2] = {&tables.luminance, &tables.chrominance};

    ByteSink sink;
    sink.marker(0xD8);

    // JFIF APP0: version 1.01, aspect ratio 1:1, no thumbnail.
    sink.marker(0xE0);
    sink.word(16);
    for (char ch : {'J', 'F', 'I', 'F', '\0'})
        sink.byte(static_cast<std::uint8_t>(ch));
    sink.byte(1);
    sink.byte(1);
    sink.byte(0);
    sink.word(1);
    sink.word(1);
    sink.byte(0);
    sink.byte(0);

    write_dqt(sink, 0, tables.luminance);
    if (color)
        write_dqt(sink, 1, tables.chrominance);

    sink.marker(0xC0);
    sink.word(static_cast<unsigned>(8 + 3 * comps.size()));
    sink.byte(8);
    sink.word(static_cast<unsigned>(img.height));
    sink.word(static_cast<unsigned>(img.width));
    sink.byte(static_cast<std::uint8_t>(comps.size()));
    for (const auto& c : comps) {
        sink.byte(static_cast<std::uint8_t>(c.id));
        sink.byte(static_cast<std::uint8_t>((c.h << 4) | c.v));
        sink.byte(static_cast<std::uint8_t>(c.table));
    }

    write_dht(sink, 0, false, jpeg_detail::std_dc_luminance());
    write_dht(sink, 0, true, jpeg_detail::std_ac_luminance());
    if (color) {
        write_dht(sink, 1, false, jpeg_detail::std_dc_chrominance());
        write_dht(sink, 1, true, jpeg_detail::std_ac_chrominance());
    }

    sink.marker(0xDA);
    sink.word(static_cast<unsigned>(6 + 2 * comps.size()));
    sink.byte(static_cast<std::uint8_t>(comps.size()));
    for (const auto& c : comps) {
        sink.byte(static_cast<std::uint8_t>(c.id));
        sink.byte(static_cast<std::uint8_t>((c.table << 4) | c.table));
    }
    sink.byte(0);
    sink.byte(63);
    sink.byte(0);

    EntropyEncoder entropy(sink, static_cast<int>(comps.size()));
    Block block{};
    if (comps.size() == 1) {
        const auto& c = comps[0];
        for (int by = 0; by < c.height_in_blocks; ++by)
            for (int bx = 0; bx < c.width_in_blocks; ++bx) {
                quantize_block(c, bx, by, *quant[c.table], block);
                entropy.encode(block, 0, dc_codes[c.table], ac_codes[c.table]);
            }
    } else {
        const int mcus_x = ceil_div(img.width, 8L * max_h);
        const int mcus_y = ceil_div(img.height, 8L * max_v);
        for (int my = 0; my < mcus_y; ++my) {
            for (int mx = 0; mx < mcus_x; ++mx) {
                for (std::size_t ci = 0; ci < comps.size(); ++ci) {
                    const auto& c = comps[ci];
                    // Blocks outside the component's block grid are dummies:
                    // zero AC, DC repeated from the preceding block of the MCU.
                    int previous_dc = 0;
                    for (int yy = 0; yy < c.v; ++yy) {
                        for (int xx = 0; xx < c.h; ++xx) {
                            const int bx = mx * c.h + xx;
                            const int by = my * c.v + yy;
                            if (bx < c.width_in_blocks && by < c.height_in_blocks) {
                                quantize_block(c, bx, by, *quant[c.table], block);
                            } else {
                                block.fill(0);
                                block[0] = previous_dc;
                            }
                            previous_dc = block[0];
                            entropy.encode(block, static_cast<int>(ci), dc_codes[c.table],
                                           ac_codes[c.table]);
                        }
                    }
                }
            }
        }
    }
    entropy.finish();
    sink.marker(0xD9);
    return std::move(sink.bytes());
}

std::vector<std::uint8_t> jpeg_encode(const ImageF& img, int quality, ChromaSubsampling subsampling)
{
    return jpeg_encode(to_u8(img), quality, subsampling);
}

ImageF jpeg_roundtrip(const ImageF& img, int quality, ChromaSubsampling subsampling)
{
    return jpeg_decode(jpeg_encode(img, quality, subsampling));
}

}  // namespace purikit
