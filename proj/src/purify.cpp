// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/purify.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <future>

#include "purikit/error.hpp"

namespace purikit {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void require_same_shape(const ImageF& a, const ImageF& b)
{
    if (!a.same_shape(b))
        fail(ErrorCode::ShapeMismatch, "purify stages disagree on image shape");
}

std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

std::string to_string(BlendMode mode) { return mode == BlendMode::Convex ? "convex" : "literal"; }

BlendMode parse_blend_mode(std::string_view text)
{
    if (text == "convex")
        return BlendMode::Convex;
    if (text == "literal" || text == "additive")
        return BlendMode::Literal;
    fail(ErrorCode::InvalidArgument, "unknown blend mode '" + std::string(text) + "'");
}

void PurifyParams::validate() const
{
    if (!(lambda >= 0.0 && lambda <= 1.0))
        fail(ErrorCode::InvalidArgument, "lambda must lie in [0,1]");
    if (jpeg_q && (*jpeg_q < 1 || *jpeg_q > 100))
        fail(ErrorCode::QualityOutOfRange, "JPEG quality must lie in [1,100], got " + std::to_string(*jpeg_q));
    if (down_factor < 1)
        fail(ErrorCode::InvalidArgument, "down factor must be >= 1");
    if (feather_radius && !(*feather_radius >= 0.0))
        fail(ErrorCode::InvalidArgument, "feather radius must be >= 0");
    face_sr.validate();
    general_sr.validate();
    validate_pipeline_scales(face_sr, general_sr, down_factor);
}

std::string PurifyParams::to_string() const
{
    std::string s = "lambda=" + format_double(lambda);
    s += ",q=" + (jpeg_q ? std::to_string(*jpeg_q) : std::string("none"));
    s += jpeg_subsampling == ChromaSubsampling::S420 ? ",s=420" : ",s=444";
    s += ",d=" + std::to_string(down_factor) + ",k=" + down_kernel.name();
    s += ",blend=" + purikit::to_string(blend);
    s += ",face_sr=" + face_sr.to_string() + ",general_sr=" + general_sr.to_string();
    s += ",mask=" + mask.to_string();
    s += ",feather=" + (hard_mask ? std::string("hard") : feather_radius ? format_double(*feather_radius) : "auto");
    return s;
}

ImageF blend_face(const ImageF& s, const ImageF& xhat, double lambda, BlendMode mode)
{
    require_same_shape(s, xhat);
    ImageF out(s.width(), s.height(), s.channels());
    const auto ds = s.data(), dx = xhat.data();
    auto dst = out.data();
    if (mode == BlendMode::Convex) {
        const double keep = 1.0 - lambda;
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = std::clamp(keep * ds[i] + lambda * dx[i], 0.0, 1.0);
    } else {
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = std::clamp(ds[i] + lambda * dx[i], 0.0, 1.0);
    }
    return out;
}

ImageF face_path(const ImageF& xhat, const PurifyParams& p, ImageF* x_jd)
{
    const int w = xhat.width(), h = xhat.height();
    ImageF x = p.jpeg_q ? jpeg_roundtrip(xhat, *p.jpeg_q, p.jpeg_subsampling) : xhat;
    const int dw = std::max(1, w / p.down_factor), dh = std::max(1, h / p.down_factor);
    if (dw != w || dh != h)
        x = resample(x, dw, dh, p.down_kernel);
    if (x_jd)
        *x_jd = x;
    ImageF s = upscale(x, p.face_sr).image;
    if (s.width() != w || s.height() != h)
        s = resample(s, w, h, p.down_kernel);
    return blend_face(s, xhat, p.lambda, p.blend);
}

ImageF background_path(const ImageF& xhat, const PurifyParams& p)
{
    ImageF g = upscale(xhat, p.general_sr).image;
    if (g.width() != xhat.width() || g.height() != xhat.height())
        g = resample(g, xhat.width(), xhat.height(), p.down_kernel);
    return g;
}

ImageF fuse(const ImageF& x_f, const ImageF& x_g, const RegionMask& mask)
{
    require_same_shape(x_f, x_g);
    if (mask.width() != x_f.width() || mask.height() != x_f.height())
        fail(ErrorCode::MaskShapeMismatch, "mask and image sizes differ");
    ImageF out(x_f.width(), x_f.height(), x_f.channels());
    const auto& m = mask.data();
    for (int c = 0; c < x_f.channels(); ++c) {
        const auto f = x_f.plane(c), g = x_g.plane(c);
        auto dst = out.plane(c);
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = std::clamp(m[i] * f[i] + (1.0 - m[i]) * g[i], 0.0, 1.0);
    }
    return out;
}

ImageF purify(const ImageF& xhat, const PurifyParams& p, PurifyTrace* trace)
{
    p.validate();
    const auto start = Clock::now();

    auto run_background = [&] {
        const auto t0 = Clock::now();
        ImageF g = background_path(xhat, p);
        return std::pair{std::move(g), seconds_since(t0)};
    };
    std::future<std::pair<ImageF, double>> background;
    if (p.parallel)
        background = std::async(std::launch::async, run_background);

    auto t0 = Clock::now();
    ImageF x_jd;
    ImageF x_f;
    try {
        x_f = face_path(xhat, p, trace ? &x_jd : nullptr);
    } catch (...) {
        if (background.valid())
            background.wait();
        throw;
    }
    const double face_s = seconds_since(t0);

    t0 = Clock::now();
    RegionMask mask;
    try {
        mask = build_mask(xhat, p.mask);
        const double radius = p.hard_mask ? 0.0 : p.feather_radius.value_or(default_feather_radius(xhat.width()));
        mask = feather(mask, radius);
    } catch (...) {
        if (background.valid())
            background.wait();
        throw;
    }
    const double mask_s = seconds_since(t0);

    auto [x_g, background_s] = p.parallel ? background.get() : run_background();
    ImageF out = fuse(x_f, x_g, mask);

    if (trace) {
        trace->x_jd = std::move(x_jd);
        trace->x_f = std::move(x_f);
        trace->x_g = std::move(x_g);
        trace->mask = std::move(mask);
        trace->face_s = face_s;
        trace->background_s = background_s;
        trace->mask_s = mask_s;
        trace->total_s = seconds_since(start);
    }
    return out;
}

}  // namespace purikit
