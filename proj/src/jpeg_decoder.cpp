// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <optional>
#include <string>

#include "jpeg_internal.hpp"
#include "purikit/error.hpp"
#include "purikit/jpeg.hpp"

namespace purikit {

namespace {

using jpeg_detail::Block;
using jpeg_detail::kZigzagToNatural;

[[noreturn]] void malformed(const std::string& what)
{
    fail(ErrorCode::MalformedStream, what);
}

[[noreturn]] void unsupported(const std::string& what)
{
    fail(ErrorCode::UnsupportedJpegFeature, what);
}

struct HuffmanTable {
    bool defined = false;
    std::array<std::int32_t, 18> maxcode{};
    std::array<std::int32_t, 17> valoffset{};
    std::vector<std::uint8_t> values;
};

HuffmanTable build_table(const std::array<std::uint8_t, 16>& counts, std::vector<std::uint8_t> values)
{
    HuffmanTable t;
    t.defined = true;
    t.values = std::move(values);
    std::int32_t code = 0;
    std::int32_t k = 0;
    for (int len = 1; len <= 16; ++len) {
        const int n = counts[static_cast<std::size_t>(len - 1)];
        if (n == 0) {
            t.maxcode[static_cast<std::size_t>(len)] = -1;
        } else {
            t.valoffset[static_cast<std::size_t>(len)] = k - code;
            code += n;
            k += n;
            t.maxcode[static_cast<std::size_t>(len)] = code - 1;
        }
        if (code > (1 << len))
            malformed("bad Huffman table");
        code <<= 1;
    }
    t.maxcode[17] = 0x7FFFFFFF;
    return t;
}

struct FrameComponent {
    int id = 0;
    int h = 1;
    int v = 1;
    int quant = 0;
    int width_in_blocks = 0;
    int height_in_blocks = 0;
    int blocks_w = 0;  // allocated (MCU padded)
    int blocks_h = 0;
    std::vector<Block> coefs;
    int dc_table = 0;
    int ac_table = 0;
    int predictor = 0;
};

class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> bytes)
        : bytes_(bytes)
    {
    }

    bool at_end() const { return pos_ >= bytes_.size(); }
    std::size_t pos() const { return pos_; }
    void seek(std::size_t p) { pos_ = p; }

    std::uint8_t byte()
    {
        if (pos_ >= bytes_.size())
            malformed("unexpected end of stream");
        return bytes_[pos_++];
    }

    unsigned word()
    {
        const unsigned hi = byte();
        return (hi << 8) | byte();
    }

    std::span<const std::uint8_t> take(std::size_t n)
    {
        if (bytes_.size() - pos_ < n)
            malformed("segment extends past end of stream");
        auto s = bytes_.subspan(pos_, n);
        pos_ += n;
        return s;
    }

    std::span<const std::uint8_t> bytes() const { return bytes_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

// Entropy-coded segment reader. Hitting any marker or the end of the data in
// the middle of an MCU is an error: the decoder never invents samples.
class BitReader {
public:
    explicit BitReader(Reader& r)
        : r_(r)
    {
    }

    int bit()
    {
        if (count_ == 0) {
            if (r_.at_end())
                malformed("entropy-coded data truncated");
            std::uint8_t b = r_.byte();
            if (b == 0xFF) {
                if (r_.at_end())
                    malformed("entropy-coded data truncated");
                const std::uint8_t next = r_.byte();
                if (next != 0x00)
                    malformed("unexpected marker inside entropy-coded data");
            }
            current_ = b;
            count_ = 8;
        }
        --count_;
        return (current_ >> count_) & 1;
    }

    int bits(int n)
    {
        int v = 0;
        for (int i = 0; i < n; ++i)
            v = (v << 1) | bit();
        return v;
    }

    int decode(const HuffmanTable& t)
    {
        std::int32_t code = bit();
        int len = 1;
        while (code > t.maxcode[static_cast<std::size_t>(len)]) {
            if (++len > 16)
                malformed("invalid Huffman code");
            code = (code << 1) | bit();
        }
        const std::int32_t index = code + t.valoffset[static_cast<std::size_t>(len)];
        if (index < 0 || index >= static_cast<std::int32_t>(t.values.size()))
            malformed("invalid Huffman code");
        return t.values[static_cast<std::size_t>(index)];
    }

    int receive_extend(int n)
    {
        if (n == 0)
            return 0;
        if (n > 16)
            malformed("coefficient magnitude category out of range");
        const int v = bits(n);
        return v < (1 << (n - 1)) ? v - (1 << n) + 1 : v;
    }

    void reset() { count_ = 0; }

private:
    Reader& r_;
    std::uint8_t current_ = 0;
    int count_ = 0;
};

class Decoder {
public:
    explicit Decoder(std::span<const std::uint8_t> bytes)
        : r_(bytes)
    {
    }

    ImageU8 run()
    {
        if (r_.byte() != 0xFF || r_.byte() != 0xD8)
            malformed("missing SOI marker");
        for (;;) {
            const std::uint8_t m = next_marker();
            if (m == 0xD9)
                break;
            switch (m) {
            case 0xC0:
            case 0xC1: read_frame(); break;
            case 0xC2:
            case 0xC6:
            case 0xCA:
            case 0xCE: unsupported("progressive JPEG");
            case 0xC3:
            case 0xC7:
            case 0xCB:
            case 0xCF: unsupported("lossless JPEG");
            case 0xC5: unsupported("hierarchical JPEG");
            case 0xC9:
            case 0xCD:
            case 0xCC: unsupported("arithmetic coding");
            case 0xC4: read_dht(); break;
            case 0xDB: read_dqt(); break;
            case 0xDD: read_dri(); break;
            case 0xDA: read_scan(); break;
            case 0xEE: read_adobe(); break;
            case 0xD8: malformed("duplicate SOI marker");
            default:
                if (m >= 0xD0 && m <= 0xD7)
                    malformed("stray restart marker");
                skip_segment();
                break;
            }
        }
        if (!frame_seen_)
            malformed("no frame header");
        if (!scan_seen_)
            malformed("no scan data");
        return reconstruct();
    }

private:
    std::uint8_t next_marker()
    {
        if (r_.byte() != 0xFF)
            malformed("expected marker");
        std::uint8_t m = r_.byte();
        while (m == 0xFF)
            m = r_.byte();
        return m;
    }

    void skip_segment()
    {
        const unsigned len = r_.word();
        if (len < 2)
            malformed("bad segment length");
        r_.take(len - 2);
    }

    void read_adobe()
    {
        const unsigned len = r_.word();
        if (len < 2)
            malformed("bad segment length");
        auto body = r_.take(len - 2);
        if (body.size() >= 12 && std::equal(body.begin(), body.begin() + 5, "Adobe"))
            adobe_transform_ = body[11];
    }

    void read_frame()
    {
        if (frame_seen_)
            malformed("multiple frame headers");
        frame_seen_ = true;
        const unsigned len = r_.word();
        const int precision = r_.byte();
        height_ = static_cast<int>(r_.word());
        width_ = static_cast<int>(r_.word());
        const int n = r_.byte();
        if (len != static_cast<unsigned>(8 + 3 * n))
            malformed("bad SOF length");
        if (precision != 8)
            unsupported("sample precision " + std::to_string(precision));
        if (width_ == 0 || height_ == 0)
            unsupported("zero or deferred image dimensions");
        if (n != 1 && n != 3)
            unsupported(std::to_string(n) + "-component images");
        comps_.resize(static_cast<std::size_t>(n));
        for (auto& c : comps_) {
            c.id = r_.byte();
            const int hv = r_.byte();
            c.h = hv >> 4;
            c.v = hv & 15;
            c.quant = r_.byte();
            if (c.h < 1 || c.h > 4 || c.v < 1 || c.v > 4 || c.quant > 3)
                malformed("bad component parameters");
            max_h_ = std::max(max_h_, c.h);
            max_v_ = std::max(max_v_, c.v);
        }
        mcus_x_ = (width_ + 8 * max_h_ - 1) / (8 * max_h_);
        mcus_y_ = (height_ + 8 * max_v_ - 1) / (8 * max_v_);
        for (auto& c : comps_) {
            if (max_h_ % c.h != 0 || max_v_ % c.v != 0)
                unsupported("non-integral sampling ratios");
            c.width_in_blocks = static_cast<int>((static_cast<long>(width_) * c.h + 8L * max_h_ - 1) / (8L * max_h_));
            c.height_in_blocks = static_cast<int>((static_cast<long>(height_) * c.v + 8L * max_v_ - 1) / (8L * max_v_));
            c.blocks_w = mcus_x_ * c.h;
            c.blocks_h = mcus_y_ * c.v;
            c.coefs.assign(static_cast<std::size_t>(c.blocks_w) * c.blocks_h, Block{});
        }
    }

    void read_dht()
    {
        const unsigned len = r_.word();
        if (len < 2)
            malformed("bad DHT length");
        const std::size_t end = r_.pos() + (len - 2);
        while (r_.pos() < end) {
            const int tc_th = r_.byte();
            const int cls = tc_th >> 4;
            const int index = tc_th & 15;
            if (cls > 1 || index > 3)
                malformed("bad Huffman table id");
            std::array<std::uint8_t, 16> counts{};
            int total = 0;
            for (auto& c : counts) {
                c = r_.byte();
                total += c;
            }
            if (total > 256)
                malformed("bad Huffman table size");
            auto vals = r_.take(static_cast<std::size_t>(total));
            (cls == 0 ? dc_tables_ : ac_tables_)[static_cast<std::size_t>(index)] =
                build_table(counts, std::vector<std::uint8_t>(vals.begin(), vals.end()));
        }
        if (r_.pos() != end)
            malformed("DHT length mismatch");
    }

    void read_dqt()
    {
        const unsigned len = r_.word();
        if (len < 2)
            malformed("bad DQT length");
        const std::size_t end = r_.pos() + (len - 2);
        while (r_.pos() < end) {
            const int pq_tq = r_.byte();
            const int precision = pq_tq >> 4;
            const int index = pq_tq & 15;
            if (precision > 1 || index > 3)
                malformed("bad quantization table id");
            std::array<std::uint16_t, 64> table{};
            for (int k = 0; k < 64; ++k) {
                const unsigned v = precision ? r_.word() : r_.byte();
                table[static_cast<std::size_t>(kZigzagToNatural[static_cast<std::size_t>(k)])] =
                    static_cast<std::uint16_t>(v);
            }
            quant_[static_cast<std::size_t>(index)] = table;
        }
        if (r_.pos() != end)
            malformed("DQT length mismatch");
    }

    void read_dri()
    {
        if (r_.word() != 4)
            malformed("bad DRI length");
        restart_interval_ = static_cast<int>(r_.word());
    }

    void read_scan()
    {
        if (!frame_seen_)
            malformed("scan before frame header");
        scan_seen_ = true;
        const unsigned len = r_.word();
        const int n = r_.byte();
        if (n < 1 || n > 4 || len != static_cast<unsigned>(6 + 2 * n))
            malformed("bad SOS header");
        std::vector<FrameComponent*> scan;
        for (int i = 0; i < n; ++i) {
            const int id = r_.byte();
            const int tables = r_.byte();
            auto it = std::find_if(comps_.begin(), comps_.end(),
                                   [id](const FrameComponent& c) { return c.id == id; });
            if (it == comps_.end())
                malformed("scan references unknown component");
            it->dc_table = tables >> 4;
            it->ac_table = tables & 15;
            if (it->dc_table > 3 || it->ac_table > 3
                || !dc_tables_[static_cast<std::size_t>(it->dc_table)].defined
                || !ac_tables_[static_cast<std::size_t>(it->ac_table)].defined)
                malformed("scan references undefined Huffman table");
            scan.push_back(&*it);
        }
        const int ss = r_.byte();
        const int se = r_.byte();
        const int a = r_.byte();
        if (ss != 0 || se != 63 || a != 0)
            malformed("spectral selection is not valid for a sequential scan");

        BitReader bits(r_);
        for (auto* c : scan)
            c->predictor = 0;

        long units_x = 0, units_y = 0;
        if (scan.size() == 1) {
            units_x = scan[0]->width_in_blocks;
            units_y = scan[0]->height_in_blocks;
        } else {
            units_x = mcus_x_;
            units_y = mcus_y_;
        }
        const long total = units_x * units_y;
        int next_rst = 0;
        for (long unit = 0; unit < total; ++unit) {
            if (restart_interval_ > 0 && unit > 0 && unit % restart_interval_ == 0) {
                bits.reset();
                if (r_.byte() != 0xFF)
                    malformed("missing restart marker");
                std::uint8_t m = r_.byte();
                while (m == 0xFF)
                    m = r_.byte();
                if (m != 0xD0 + next_rst)
                    malformed("unexpected restart marker");
                next_rst = (next_rst + 1) & 7;
                for (auto* c : scan)
                    c->predictor = 0;
            }
            const int ux = static_cast<int>(unit % units_x);
            const int uy = static_cast<int>(unit / units_x);
            if (scan.size() == 1) {
                decode_block(bits, *scan[0], ux, uy);
            } else {
                for (auto* c : scan)
                    for (int yy = 0; yy < c->v; ++yy)
                        for (int xx = 0; xx < c->h; ++xx)
                            decode_block(bits, *c, ux * c->h + xx, uy * c->v + yy);
            }
        }
        bits.reset();
        // Whatever follows must be the next marker (padding bits were consumed
        // as part of the last partial byte).
        if (r_.at_end())
            malformed("missing EOI marker");
        if (r_.bytes()[r_.pos()] != 0xFF)
            malformed("trailing data after scan");
    }

    void decode_block(BitReader& bits, FrameComponent& c, int bx, int by)
    {
        Block& block = c.coefs[static_cast<std::size_t>(by) * c.blocks_w + bx];
        block.fill(0);
        const auto& dc = dc_tables_[static_cast<std::size_t>(c.dc_table)];
        const auto& ac = ac_tables_[static_cast<std::size_t>(c.ac_table)];
        const int s = bits.decode(dc);
        if (s > 11)
            malformed("DC magnitude category out of range");
        c.predictor += bits.receive_extend(s);
        block[0] = c.predictor;
        for (int k = 1; k < 64;) {
            const int rs = bits.decode(ac);
            const int run = rs >> 4;
            const int size = rs & 15;
            if (size == 0) {
                if (run == 15) {
                    k += 16;
                    continue;
                }
                break;
            }
            k += run;
            if (k > 63)
                malformed("AC coefficient index out of range");
            block[static_cast<std::size_t>(kZigzagToNatural[static_cast<std::size_t>(k)])] =
                bits.receive_extend(size);
            ++k;
        }
    }

    ImageU8 reconstruct();

    Reader r_;
    bool frame_seen_ = false;
    bool scan_seen_ = false;
    int width_ = 0;
    int height_ = 0;
    int max_h_ = 1;
    int max_v_ = 1;
    int mcus_x_ = 0;
    int mcus_y_ = 0;
    int restart_interval_ = 0;
    std::optional<int> adobe_transform_;
    std::vector<FrameComponent> comps_;
    std::array<HuffmanTable, 4> dc_tables_{};
    std::array<HuffmanTable, 4> ac_tables_{};
    std::array<std::optional<std::array<std::uint16_t, 64>>, 4> quant_{};
};

struct Plane {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> data;

    int at(int x, int y) const { return data[static_cast<std::size_t>(y) * width + x]; }
};

// Output row ry of a vertically doubled plane uses its own source row and the
// neighbour on the side of the output row; edges replicate.
int neighbour_row(int src_row, int out_row, int rows)
{
    return (out_row & 1) == 0 ? std::max(src_row - 1, 0) : std::min(src_row + 1, rows - 1);
}

// Upsamples a component to full resolution with the reference decoder's
// "fancy" triangular filters where they apply, replication otherwise.
Plane upsample(const Plane& in, int fx, int fy, int out_w, int out_h)
{
    Plane out{out_w, out_h, std::vector<std::uint8_t>(static_cast<std::size_t>(out_w) * out_h)};
    const bool fancy_h = fx == 2 && in.width > 2;
    auto put = [&](int x, int y, int v) {
        if (x < out_w && y < out_h)
            out.data[static_cast<std::size_t>(y) * out_w + x] = static_cast<std::uint8_t>(v);
    };

    if (fx == 2 && fy == 2 && fancy_h) {
        for (int oy = 0; oy < out_h; ++oy) {
            const int r0 = oy / 2;
            const int r1 = neighbour_row(r0, oy, in.height);
            auto colsum = [&](int x) { return in.at(x, r0) * 3 + in.at(x, r1); };
            int ox = 0;
            int this_sum = colsum(0);
            int next_sum = colsum(1);
            put(ox++, oy, (this_sum * 4 + 8) >> 4);
            put(ox++, oy, (this_sum * 3 + next_sum + 7) >> 4);
            int last_sum = this_sum;
            this_sum = next_sum;
            for (int x = 2; x < in.width; ++x) {
                next_sum = colsum(x);
                put(ox++, oy, (this_sum * 3 + last_sum + 8) >> 4);
                put(ox++, oy, (this_sum * 3 + next_sum + 7) >> 4);
                last_sum = this_sum;
                this_sum = next_sum;
            }
            put(ox++, oy, (this_sum * 3 + last_sum + 8) >> 4);
            put(ox++, oy, (this_sum * 4 + 7) >> 4);
        }
        return out;
    }
    if (fx == 2 && fy == 1 && fancy_h) {
        for (int oy = 0; oy < out_h; ++oy) {
            int ox = 0;
            const int last = in.width - 1;
            int v = in.at(0, oy);
            put(ox++, oy, v);
            put(ox++, oy, (v * 3 + in.at(1, oy) + 2) >> 2);
            for (int x = 1; x < last; ++x) {
                v = in.at(x, oy) * 3;
                put(ox++, oy, (v + in.at(x - 1, oy) + 1) >> 2);
                put(ox++, oy, (v + in.at(x + 1, oy) + 2) >> 2);
            }
            v = in.at(last, oy);
            put(ox++, oy, (v * 3 + in.at(last - 1, oy) + 1) >> 2);
            put(ox++, oy, v);
        }
        return out;
    }
    if (fx == 1 && fy == 2) {
        for (int oy = 0; oy < out_h; ++oy) {
            const int r0 = oy / 2;
            const int r1 = neighbour_row(r0, oy, in.height);
            const int bias = (oy & 1) == 0 ? 1 : 2;
            for (int x = 0; x < out_w; ++x)
                put(x, oy, (in.at(x, r0) * 3 + in.at(x, r1) + bias) >> 2);
        }
        return out;
    }
    for (int oy = 0; oy < out_h; ++oy)
        for (int ox = 0; ox < out_w; ++ox)
            put(ox, oy, in.at(ox / fx, oy / fy));
    return out;
}

ImageU8 Decoder::reconstruct()
{
    std::vector<Plane> planes;
    for (const auto& c : comps_) {
        const auto& q = quant_[static_cast<std::size_t>(c.quant)];
        if (!q)
            malformed("component references undefined quantization table");
        Plane full{c.blocks_w * 8, c.blocks_h * 8, {}};
        full.data.resize(static_cast<std::size_t>(full.width) * full.height);
        for (int by = 0; by < c.height_in_blocks; ++by)
            for (int bx = 0; bx < c.width_in_blocks; ++bx)
                jpeg_detail::inverse_dct_islow(
                    c.coefs[static_cast<std::size_t>(by) * c.blocks_w + bx], *q,
                    full.data.data() + static_cast<std::size_t>(by * 8) * full.width + bx * 8,
                    full.width);

        // Crop to the component's true extent before upsampling; the filters
        // replicate the last real row and column, not the block padding.
        Plane real;
        real.width = static_cast<int>((static_cast<long>(width_) * c.h + max_h_ - 1) / max_h_);
        real.height = static_cast<int>((static_cast<long>(height_) * c.v + max_v_ - 1) / max_v_);
        real.data.resize(static_cast<std::size_t>(real.width) * real.height);
        for (int y = 0; y < real.height; ++y)
            std::copy_n(full.data.data() + static_cast<std::size_t>(y) * full.width, real.width,
                        real.data.data() + static_cast<std::size_t>(y) * real.width);
        planes.push_back(upsample(real, max_h_ / c.h, max_v_ / c.v, width_, height_));
    }

    ImageU8 out;
    out.width = width_;
    out.height = height_;
    out.channels = static_cast<int>(planes.size());
    const std::size_t n = static_cast<std::size_t>(width_) * height_;
    out.data.resize(n * planes.size());
    if (planes.size() == 1) {
        out.data = std::move(planes[0].data);
        return out;
    }
    if (adobe_transform_ && *adobe_transform_ == 0) {
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t c = 0; c < 3; ++c)
                out.data[3 * i + c] = planes[c].data[i];
        return out;
    }

    constexpr int kScaleBits = 16;
    constexpr std::int64_t kHalf = std::int64_t{1} << (kScaleBits - 1);
    auto fix = [](double x) { return static_cast<std::int64_t>(x * 65536.0 + 0.5); };
    std::array<int, 256> cr_r{}, cb_b{};
    std::array<std::int64_t, 256> cr_g{}, cb_g{};
    for (int i = 0; i < 256; ++i) {
        const std::int64_t x = i - 128;
        cr_r[static_cast<std::size_t>(i)] = static_cast<int>((fix(1.40200) * x + kHalf) >> kScaleBits);
        cb_b[static_cast<std::size_t>(i)] = static_cast<int>((fix(1.77200) * x + kHalf) >> kScaleBits);
        cr_g[static_cast<std::size_t>(i)] = -fix(0.71414) * x;
        cb_g[static_cast<std::size_t>(i)] = -fix(0.34414) * x + kHalf;
    }
    auto limit = [](std::int64_t v) { return static_cast<std::uint8_t>(std::clamp<std::int64_t>(v, 0, 255)); };
    for (std::size_t i = 0; i < n; ++i) {
        const int y = planes[0].data[i];
        const std::size_t cb = planes[1].data[i];
        const std::size_t cr = planes[2].data[i];
        out.data[3 * i] = limit(y + cr_r[cr]);
        out.data[3 * i + 1] = limit(y + ((cb_g[cb] + cr_g[cr]) >> kScaleBits));
        out.data[3 * i + 2] = limit(y + cb_b[cb]);
    }
    return out;
}

}  // namespace

ImageU8 jpeg_decode_u8(std::span<const std::uint8_t> bytes)
{
    return Decoder(bytes).run();
}

ImageF jpeg_decode(std::span<const std::uint8_t> bytes)
{
    return to_float(jpeg_decode_u8(bytes));
}

}  // namespace purikit
