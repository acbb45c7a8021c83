// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/perturb.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <random>

#include "purikit/error.hpp"

namespace purikit {

namespace {

std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

double parse_double(std::string_view s, std::string_view context)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::InvalidArgument, "bad number '" + std::string(context) + "'");
    return v;
}

int cell_parity(int x, int y, int period)
{
    return ((2 * x / period) + (2 * y / period)) & 1;
}

}  // namespace

std::string to_string(PerturbSpec::Kind kind)
{
    switch (kind) {
    case PerturbSpec::Kind::Uniform:
        return "uniform";
    case PerturbSpec::Kind::Sign:
        return "sign";
    case PerturbSpec::Kind::Checkerboard:
        return "checkerboard";
    case PerturbSpec::Kind::Sinusoid:
        return "sinusoid";
    }
    return {};
}

void PerturbSpec::validate() const
{
    if (!(epsilon > 0.0 && epsilon <= 0.25))
        fail(ErrorCode::EpsilonOutOfRange, "epsilon must lie in (0, 0.25], got " + format_double(epsilon));
    if ((kind == Kind::Checkerboard || kind == Kind::Sinusoid) && period < 2)
        fail(ErrorCode::InvalidArgument, "period must be >= 2");
}

std::string PerturbSpec::to_string() const
{
    std::string s = purikit::to_string(kind);
    if (kind == Kind::Checkerboard)
        s += ":p=" + std::to_string(period);
    if (kind == Kind::Sinusoid)
        s += ":p=" + std::to_string(period) + (orientation == Orientation::Horizontal ? ",o=h" : ",o=v");
    s += "@eps=" + format_double(epsilon);
    if (kind == Kind::Uniform || kind == Kind::Sign)
        s += ",seed=" + std::to_string(seed);
    return s;
}

PerturbSpec PerturbSpec::parse_kind(std::string_view text)
{
    PerturbSpec s;
    const auto colon = text.find(':');
    const auto name = text.substr(0, colon);
    if (name == "uniform")
        s.kind = Kind::Uniform;
    else if (name == "sign")
        s.kind = Kind::Sign;
    else if (name == "checkerboard") {
        s.kind = Kind::Checkerboard;
        s.period = 2;
    } else if (name == "sinusoid") {
        s.kind = Kind::Sinusoid;
        s.period = 64;
    } else
        fail(ErrorCode::InvalidArgument, "unknown perturbation kind '" + std::string(text) + "'");

    std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        const auto kv = rest.substr(0, comma);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        const auto eq = kv.find('=');
        const auto key = kv.substr(0, eq);
        const auto value = eq == std::string_view::npos ? std::string_view{} : kv.substr(eq + 1);
        if (key == "p" && s.kind != Kind::Uniform && s.kind != Kind::Sign)
            s.period = static_cast<int>(parse_double(value, text));
        else if (key == "o" && s.kind == Kind::Sinusoid && (value == "h" || value == "v"))
            s.orientation = value == "h" ? Orientation::Horizontal : Orientation::Vertical;
        else
            fail(ErrorCode::InvalidArgument, "bad option '" + std::string(kv) + "' in '" + std::string(text) + "'");
    }
    return s;
}

double parse_epsilon(std::string_view text)
{
    if (const auto slash = text.find('/'); slash != std::string_view::npos) {
        const double den = parse_double(text.substr(slash + 1), text);
        if (den == 0.0)
            fail(ErrorCode::InvalidArgument, "zero denominator in '" + std::string(text) + "'");
        return parse_double(text.substr(0, slash), text) / den;
    }
    return parse_double(text, text);
}

ImageF perturbation_field(int width, int height, int channels, const PerturbSpec& spec)
{
    spec.validate();
    ImageF eta(width, height, channels);
    const double eps = spec.epsilon;
    std::mt19937_64 engine(spec.seed);
    switch (spec.kind) {
    case PerturbSpec::Kind::Uniform:
        for (double& v : eta.data())
            v = eps * (2.0 * static_cast<double>(engine() >> 11) * 0x1.0p-53 - 1.0);
        break;
    case PerturbSpec::Kind::Sign:
        for (double& v : eta.data())
            v = (engine() >> 63) ? eps : -eps;
        break;
    case PerturbSpec::Kind::Checkerboard:
        for (int c = 0; c < channels; ++c)
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x)
                    eta.at(c, y, x) = cell_parity(x, y, spec.period) ? -eps : eps;
        break;
    case PerturbSpec::Kind::Sinusoid: {
        const bool horizontal = spec.orientation == PerturbSpec::Orientation::Horizontal;
        for (int c = 0; c < channels; ++c)
            for (int y = 0; y < height; ++y)
                for (int x = 0; x < width; ++x) {
                    const int t = horizontal ? x : y;
                    eta.at(c, y, x) = eps * std::sin(2.0 * std::numbers::pi * t / spec.period);
                }
        break;
    }
    }
    return eta;
}

ImageF generate(const ImageF& x, const PerturbSpec& spec)
{
    ImageF out = perturbation_field(x.width(), x.height(), x.channels(), spec);
    const auto src = x.data();
    auto dst = out.data();
    for (std::size_t i = 0; i < dst.size(); ++i)
        dst[i] = std::clamp(src[i] + dst[i], 0.0, 1.0);
    return out;
}

namespace {

ResidualRow residual_row(const ImageF& x, const ImageF& xhat, const TransformChain& chain,
                         const ResampleKernel& re_up)
{
    ResidualRow row;
    row.chain = chain.to_string();
    row.ratio = attenuation_ratio(x, xhat, chain, re_up);
    const ImageF tx = transform_at_reference(x, chain, x.width(), x.height(), re_up);
    const ImageF txhat = transform_at_reference(xhat, chain, x.width(), x.height(), re_up);
    row.linf_after = perturbation_stats(tx, txhat).linf;
    return row;
}

}  // namespace

std::vector<ResidualRow> residual_report(const ImageF& x, const ImageF& xhat,
                                         const std::vector<TransformChain>& chains, const ResampleKernel& re_up)
{
    std::vector<ResidualRow> rows;
    const bool has_identity = std::any_of(chains.begin(), chains.end(), [](const auto& c) { return c.is_identity(); });
    if (!has_identity)
        rows.push_back(residual_row(x, xhat, TransformChain::identity(), re_up));
    for (const auto& chain : chains)
        rows.push_back(residual_row(x, xhat, chain, re_up));
    return rows;
}

std::vector<SweepRow> sweep_epsilon(const ImageF& x, const PerturbSpec& base, const std::vector<double>& epsilons,
                                    const TransformChain& chain, const ResampleKernel& re_up)
{
    if (epsilons.empty())
        fail(ErrorCode::InvalidArgument, "epsilon list is empty");
    std::vector<SweepRow> rows;
    for (const double eps : epsilons) {
        PerturbSpec spec = base;
        spec.epsilon = eps;
        const ImageF xhat = generate(x, spec);
        const ResidualRow r = residual_row(x, xhat, chain, re_up);
        rows.push_back({eps, perturbation_stats(x, xhat), r.ratio, r.linf_after});
    }
    return rows;
}

}  // namespace purikit
