// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/metrics.hpp"

#include <cmath>
#include <json.hpp>

#include "purikit/error.hpp"
#include "purikit/process.hpp"

namespace purikit {

namespace {

void require_same_shape(const ImageF& a, const ImageF& b, const char* what)
{
    if (!a.same_shape(b))
        fail(ErrorCode::ShapeMismatch,
             std::string(what) + ": " + std::to_string(a.width()) + "x" + std::to_string(a.height()) + "x"
                 + std::to_string(a.channels()) + " vs " + std::to_string(b.width()) + "x"
                 + std::to_string(b.height()) + "x" + std::to_string(b.channels()));
}

double sum_squared_difference(const ImageF& a, const ImageF& b)
{
    double sum = 0.0;
    const auto da = a.data(), db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        sum += d * d;
    }
    return sum;
}

constexpr int kWin = 11;

// Valid-mode separable filter of one plane with the SSIM window.
std::vector<double> filter_valid(std::span<const double> src, int w, int h, const std::vector<double>& g)
{
    const int ow = w - kWin + 1, oh = h - kWin + 1;
    std::vector<double> tmp(static_cast<std::size_t>(ow) * h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k)
                s += g[k] * src[static_cast<std::size_t>(y) * w + x + k];
            tmp[static_cast<std::size_t>(y) * ow + x] = s;
        }
    std::vector<double> out(static_cast<std::size_t>(ow) * oh);
    for (int y = 0; y < oh; ++y)
        for (int x = 0; x < ow; ++x) {
            double s = 0.0;
            for (int k = 0; k < kWin; ++k)
                s += g[k] * tmp[static_cast<std::size_t>(y + k) * ow + x];
            out[static_cast<std::size_t>(y) * ow + x] = s;
        }
    return out;
}

}  // namespace

double mse(const ImageF& a, const ImageF& b)
{
    require_same_shape(a, b, "mse");
    return sum_squared_difference(a, b) / static_cast<double>(a.size());
}

MetricValue psnr(const ImageF& a, const ImageF& b)
{
    require_same_shape(a, b, "psnr");
    const double m = mse(a, b);
    return {"psnr", m < 1e-10 ? kPsnrCap : 10.0 * std::log10(1.0 / m), true};
}

std::vector<double> ssim_window_1d()
{
    std::vector<double> g(kWin);
    double sum = 0.0;
    for (int i = 0; i < kWin; ++i) {
        const double t = i - kWin / 2;
        g[i] = std::exp(-t * t / (2.0 * 1.5 * 1.5));
        sum += g[i];
    }
    for (double& v : g)
        v /= sum;
    return g;
}

MetricValue ssim(const ImageF& a, const ImageF& b)
{
    require_same_shape(a, b, "ssim");
    if (a.width() < kWin || a.height() < kWin)
        fail(ErrorCode::TooSmall, "ssim needs at least 11x11 pixels, got " + std::to_string(a.width()) + "x"
                                      + std::to_string(a.height()));
    const ImageF ya = luma(a), yb = luma(b);
    const int w = a.width(), h = a.height();
    const auto g = ssim_window_1d();
    const auto pa = ya.plane(0), pb = yb.plane(0);

    std::vector<double> aa(pa.size()), bb(pa.size()), ab(pa.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        aa[i] = pa[i] * pa[i];
        bb[i] = pb[i] * pb[i];
        ab[i] = pa[i] * pb[i];
    }
    const auto mu_a = filter_valid(pa, w, h, g);
    const auto mu_b = filter_valid(pb, w, h, g);
    const auto e_aa = filter_valid(aa, w, h, g);
    const auto e_bb = filter_valid(bb, w, h, g);
    const auto e_ab = filter_valid(ab, w, h, g);

    constexpr double c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
    double total = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
        const double ma = mu_a[i], mb = mu_b[i];
        const double va = e_aa[i] - ma * ma;
        const double vb = e_bb[i] - mb * mb;
        const double cov = e_ab[i] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    return {"ssim", total / static_cast<double>(mu_a.size()), true};
}

PerturbationStats perturbation_stats(const ImageF& x, const ImageF& xhat)
{
    require_same_shape(x, xhat, "perturbation_stats");
    PerturbationStats s;
    double sq = 0.0, abs_sum = 0.0;
    const auto dx = x.data(), dh = xhat.data();
    for (std::size_t i = 0; i < dx.size(); ++i) {
        const double d = std::abs(dh[i] - dx[i]);
        s.linf = std::max(s.linf, d);
        sq += d * d;
        abs_sum += d;
    }
    s.l2 = std::sqrt(sq);
    s.mean_abs = abs_sum / static_cast<double>(dx.size());
    return s;
}

ImageF transform_at_reference(const ImageF& img, const TransformChain& chain, int ref_w, int ref_h,
                              const ResampleKernel& re_up)
{
    ImageF out = apply_chain(img, chain);
    if (out.width() != ref_w || out.height() != ref_h)
        out = resample(out, ref_w, ref_h, re_up);
    return out;
}

double attenuation_ratio(const ImageF& x, const ImageF& xhat, const TransformChain& chain,
                         const ResampleKernel& re_up)
{
    require_same_shape(x, xhat, "attenuation_ratio");
    const double before = std::sqrt(sum_squared_difference(xhat, x));
    if (before == 0.0)
        fail(ErrorCode::ZeroPerturbation, "xhat equals x");
    const ImageF tx = transform_at_reference(x, chain, x.width(), x.height(), re_up);
    const ImageF txhat = transform_at_reference(xhat, chain, x.width(), x.height(), re_up);
    return std::sqrt(sum_squared_difference(txhat, tx)) / before;
}

std::optional<bool> known_polarity(const std::string& name)
{
    static const std::map<std::string, bool> table = {
        {"psnr", true}, {"ssim", true}, {"sync-c", true},
        {"mse", false}, {"fid", false}, {"lpips", false}, {"brisque", false}, {"m-lmd", false},
    };
    const auto it = table.find(name);
    if (it == table.end())
        return std::nullopt;
    return it->second;
}

MetricRegistry MetricRegistry::with_builtins()
{
    MetricRegistry r;
    r.add_native("mse", [](const ImageF& a, const ImageF& b) { return mse(a, b); }, false);
    r.add_native("psnr", [](const ImageF& a, const ImageF& b) { return psnr(a, b).value; }, true);
    r.add_native("ssim", [](const ImageF& a, const ImageF& b) { return ssim(a, b).value; }, true);
    return r;
}

void MetricRegistry::add_native(const std::string& name, NativeFn fn, bool higher_is_better)
{
    if (contains(name))
        fail(ErrorCode::DuplicateMetric, "metric '" + name + "' is already registered");
    if (!fn)
        fail(ErrorCode::InvalidArgument, "native metric '" + name + "' needs a function");
    entries_.emplace(name, Entry{name, higher_is_better, std::move(fn), {}, 0.0});
}

void MetricRegistry::add_external(const std::string& name, const std::string& command,
                                  std::optional<bool> higher_is_better, double timeout_s)
{
    if (contains(name))
        fail(ErrorCode::DuplicateMetric, "metric '" + name + "' is already registered");
    if (command.empty())
        fail(ErrorCode::InvalidArgument, "external metric '" + name + "' needs a command");
    if (!(timeout_s > 0.0))
        fail(ErrorCode::InvalidArgument, "external metric '" + name + "' needs a positive timeout");
    const bool hib = higher_is_better.value_or(known_polarity(name).value_or(false));
    entries_.emplace(name, Entry{name, hib, {}, command, timeout_s});
}

const MetricRegistry::Entry& MetricRegistry::at(const std::string& name) const
{
    const auto it = entries_.find(name);
    if (it == entries_.end())
        fail(ErrorCode::BackendUnavailable, "no metric registered under '" + name + "'");
    return it->second;
}

std::vector<std::string> MetricRegistry::names() const
{
    std::vector<std::string> out;
    for (const auto& [name, entry] : entries_)
        out.push_back(name);
    return out;
}

MetricValue MetricRegistry::evaluate(const std::string& name, const ImageF& a, const ImageF& b) const
{
    const Entry& e = at(name);
    if (e.is_external())
        fail(ErrorCode::BackendUnavailable, "metric '" + name + "' is external and needs file inputs");
    return {name, e.native(a, b), e.higher_is_better};
}

MetricValue external_metric(const MetricRegistry& registry, const std::string& name,
                            const std::filesystem::path& path_a, const std::filesystem::path& path_b)
{
    const auto& e = registry.at(name);
    if (!e.is_external())
        fail(ErrorCode::BackendUnavailable, "metric '" + name + "' has no external backend");
    const auto r = run_process(e.command, {name, path_a.string(), path_b.string()}, e.timeout_s);
    if (r.timed_out)
        fail(ErrorCode::BackendFailed, "metric '" + name + "' timed out after " + std::to_string(e.timeout_s) + " s");
    if (r.exit_code != 0)
        fail(ErrorCode::BackendFailed, "metric '" + name + "' exited with code " + std::to_string(r.exit_code)
                                           + ": " + tail_excerpt(r.err));

    std::string line = r.out;
    while (!line.empty() && (line.back() == '\n' || line.back() == '\r'))
        line.pop_back();
    if (line.empty() || line.find('\n') != std::string::npos)
        fail(ErrorCode::BackendProtocolError, "metric '" + name + "' must print exactly one line, got '"
                                                  + tail_excerpt(r.out) + "'");
    const auto doc = nlohmann::json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || doc.size() != 1 || !doc.contains("value")
        || !doc["value"].is_number())
        fail(ErrorCode::BackendProtocolError, "metric '" + name + "' printed '" + tail_excerpt(line)
                                                  + "', expected {\"value\": <number>}");
    return {name, doc["value"].get<double>(), e.higher_is_better};
}

}  // namespace purikit
