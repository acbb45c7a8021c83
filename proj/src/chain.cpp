// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/chain.hpp"

#include <charconv>
#include <numeric>

#include "purikit/error.hpp"

namespace purikit {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t p = s.find(sep, start);
        out.push_back(trim(s.substr(start, p == std::string_view::npos ? p : p - start)));
        if (p == std::string_view::npos)
            break;
        start = p + 1;
    }
    return out;
}

[[noreturn]] void bad(std::string_view what, std::string_view text)
{
    fail(ErrorCode::InvalidArgument, std::string(what) + ": '" + std::string(text) + "'");
}

long parse_long(std::string_view s, std::string_view context)
{
    long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        bad("expected an integer", context);
    return v;
}

}  // namespace

ScaleFactor ScaleFactor::parse(std::string_view text)
{
    text = trim(text);
    ScaleFactor f;
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        f.num = parse_long(trim(text.substr(0, slash)), text);
        f.den = parse_long(trim(text.substr(slash + 1)), text);
    } else {
        // Decimal: digits[.digits] read exactly as a fraction of a power of ten.
        const auto dot = text.find('.');
        const std::string_view whole = text.substr(0, dot);
        const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
        if ((whole.empty() && frac.empty()) || frac.size() > 9)
            bad("bad scale factor", text);
        long num = whole.empty() ? 0 : parse_long(whole, text);
        long den = 1;
        for (char ch : frac) {
            if (ch < '0' || ch > '9')
                bad("bad scale factor", text);
            num = num * 10 + (ch - '0');
            den *= 10;
        }
        f.num = num;
        f.den = den;
    }
    if (f.num <= 0 || f.den <= 0)
        bad("scale factor must be positive", text);
    const long g = std::gcd(f.num, f.den);
    f.num /= g;
    f.den /= g;
    return f;
}

int ScaleFactor::apply(int n) const
{
    const long long v = static_cast<long long>(n) * num / den;
    return static_cast<int>(std::max<long long>(1, v));
}

std::string ScaleFactor::to_string() const
{
    return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

TransformChain TransformChain::compress_and_resize(int quality, ScaleFactor factor,
                                                   ResampleKernel kernel)
{
    quant_tables_for_quality(quality);  // validates
    return {{JpegStep{quality}, ResizeStep{factor, kernel}}};
}

TransformStep TransformChain::parse_step(std::string_view text)
{
    text = trim(text);
    const auto colon = text.find(':');
    const std::string_view kind = trim(text.substr(0, colon));
    std::vector<std::pair<std::string_view, std::string_view>> args;
    if (colon != std::string_view::npos) {
        for (auto kv : split(text.substr(colon + 1), ',')) {
            const auto eq = kv.find('=');
            if (eq == std::string_view::npos)
                bad("expected key=value", kv);
            args.emplace_back(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
        }
    }
    if (kind == "jpeg") {
        JpegStep step;
        for (auto [k, v] : args) {
            if (k == "q")
                step.quality = static_cast<int>(parse_long(v, text));
            else if (k == "s" && (v == "420" || v == "4:2:0"))
                step.subsampling = ChromaSubsampling::S420;
            else if (k == "s" && (v == "444" || v == "4:4:4"))
                step.subsampling = ChromaSubsampling::S444;
            else
                bad("unknown jpeg option", k);
        }
        quant_tables_for_quality(step.quality);
        return step;
    }
    if (kind == "resize") {
        ResizeStep step;
        bool have_factor = false;
        for (auto [k, v] : args) {
            if (k == "f") {
                step.factor = ScaleFactor::parse(v);
                have_factor = true;
            } else if (k == "k") {
                step.kernel = ResampleKernel::parse(v);
            } else {
                bad("unknown resize option", k);
            }
        }
        if (!have_factor)
            bad("resize needs f=<factor>", text);
        return step;
    }
    bad("unknown transform", text);
}

TransformChain TransformChain::parse(std::string_view text)
{
    text = trim(text);
    TransformChain chain;
    if (text.empty() || text == "none" || text == "identity")
        return chain;
    for (auto part : split(text, ';'))
        if (!part.empty())
            chain.steps.push_back(parse_step(part));
    return chain;
}

std::string to_string(const TransformStep& step)
{
    if (const auto* j = std::get_if<JpegStep>(&step)) {
        std::string s = "jpeg:q=" + std::to_string(j->quality);
        if (j->subsampling == ChromaSubsampling::S444)
            s += ",s=444";
        return s;
    }
    const auto& r = std::get<ResizeStep>(step);
    return "resize:f=" + r.factor.to_string() + ",k=" + r.kernel.name();
}

std::string TransformChain::to_string() const
{
    if (steps.empty())
        return "none";
    std::string out;
    for (const auto& s : steps) {
        if (!out.empty())
            out += ';';
        out += purikit::to_string(s);
    }
    return out;
}

ImageF apply_step(const ImageF& img, const TransformStep& step)
{
    if (const auto* j = std::get_if<JpegStep>(&step))
        return jpeg_roundtrip(img, j->quality, j->subsampling);
    const auto& r = std::get<ResizeStep>(step);
    return resample(img, r.factor.apply(img.width()), r.factor.apply(img.height()), r.kernel);
}

ImageF apply_chain(const ImageF& img, const TransformChain& chain)
{
    ImageF out = img;
    for (const auto& step : chain.steps)
        out = apply_step(out, step);
    return out;
}

}  // namespace purikit
