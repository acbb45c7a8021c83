// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/mask.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "purikit/error.hpp"
#include "purikit/png_io.hpp"
#include "purikit/process.hpp"
#include "tempdir.hpp"

namespace purikit {

RegionMask::RegionMask(int width, int height, double fill)
    : RegionMask(width, height, std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill))
{
}

RegionMask::RegionMask(int width, int height, std::vector<double> data)
    : width_(width)
    , height_(height)
    , data_(std::move(data))
{
    if (width < 1 || height < 1)
        fail(ErrorCode::InvalidDimensions, "mask needs positive dimensions");
    if (data_.size() != static_cast<std::size_t>(width) * height)
        fail(ErrorCode::InvalidDimensions, "mask sample count does not match its dimensions");
}

ImageF RegionMask::to_image() const { return ImageF(width_, height_, 1, data_); }

MaskSource MaskSource::ellipse(double cx, double cy, double rx, double ry)
{
    MaskSource s;
    s.kind = Kind::Ellipse;
    s.cx = cx;
    s.cy = cy;
    s.rx = rx;
    s.ry = ry;
    return s;
}

MaskSource MaskSource::file(std::filesystem::path path)
{
    MaskSource s;
    s.kind = Kind::File;
    s.path = std::move(path);
    return s;
}

MaskSource MaskSource::external(std::string command, double timeout_s)
{
    MaskSource s;
    s.kind = Kind::External;
    s.command = std::move(command);
    s.timeout_s = timeout_s;
    return s;
}

MaskSource MaskSource::constant(double value)
{
    MaskSource s;
    s.kind = Kind::Constant;
    s.value = value;
    return s;
}

namespace {

double parse_double(std::string_view s, std::string_view context)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::InvalidArgument, "bad number in mask source '" + std::string(context) + "'");
    return v;
}

std::string format_double(double v)
{
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

MaskSource MaskSource::parse(std::string_view text)
{
    if (text == "ellipse")
        return ellipse();
    if (text == "ones")
        return constant(1.0);
    if (text == "zeros")
        return constant(0.0);
    if (text.starts_with("file:"))
        return file(std::string(text.substr(5)));
    if (text.starts_with("external:"))
        return external(std::string(text.substr(9)));
    if (text.starts_with("ellipse:")) {
        MaskSource s = ellipse();
        std::string_view rest = text.substr(8);
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const std::string_view kv = rest.substr(0, comma);
            rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
            const auto eq = kv.find('=');
            if (eq == std::string_view::npos)
                fail(ErrorCode::InvalidArgument, "expected key=value in '" + std::string(text) + "'");
            const auto key = kv.substr(0, eq);
            const double v = parse_double(kv.substr(eq + 1), text);
            if (key == "cx")
                s.cx = v;
            else if (key == "cy")
                s.cy = v;
            else if (key == "rx")
                s.rx = v;
            else if (key == "ry")
                s.ry = v;
            else
                fail(ErrorCode::InvalidArgument, "unknown ellipse key '" + std::string(key) + "'");
        }
        return s;
    }
    fail(ErrorCode::InvalidArgument, "unknown mask source '" + std::string(text) + "'");
}

std::string MaskSource::to_string() const
{
    switch (kind) {
    case Kind::Ellipse:
        return "ellipse:cx=" + format_double(cx) + ",cy=" + format_double(cy) + ",rx=" + format_double(rx)
               + ",ry=" + format_double(ry);
    case Kind::File:
        return "file:" + path.string();
    case Kind::External:
        return "external:" + command;
    case Kind::Constant:
        return value == 1.0 ? "ones" : value == 0.0 ? "zeros" : "constant:" + format_double(value);
    }
    return {};
}

namespace {

RegionMask ellipse_mask(int w, int h, const MaskSource& s)
{
    auto in_range = [](double v) { return v > 0.0 && v <= 1.0; };
    if (!in_range(s.cx) || !in_range(s.cy) || !in_range(s.rx) || !in_range(s.ry))
        fail(ErrorCode::InvalidEllipse, "ellipse parameters must lie in (0,1]: " + s.to_string());
    const double cx = s.cx * w, cy = s.cy * h;
    const double rx = s.rx * w, ry = s.ry * h;
    RegionMask m(w, h);
    for (int y = 0; y < h; ++y) {
        const double dy = (y + 0.5 - cy) / ry;
        for (int x = 0; x < w; ++x) {
            const double dx = (x + 0.5 - cx) / rx;
            m.at(y, x) = dx * dx + dy * dy <= 1.0 ? 1.0 : 0.0;
        }
    }
    return m;
}

RegionMask mask_from_u8(const ImageU8& u, int w, int h, const std::string& origin, ErrorCode code)
{
    if (u.channels != 1)
        fail(code, origin + ": mask must be a grayscale PNG");
    if (u.width != w || u.height != h)
        fail(code, origin + ": mask is " + std::to_string(u.width) + "x" + std::to_string(u.height)
                       + ", image is " + std::to_string(w) + "x" + std::to_string(h));
    RegionMask m(w, h);
    for (std::size_t i = 0; i < u.data.size(); ++i)
        m.data()[i] = u.data[i] / 255.0;
    return m;
}

RegionMask external_mask(const ImageF& img, const MaskSource& s)
{
    detail::TempDir dir;
    const auto in = dir / "input.png", out = dir / "mask.png";
    save_png_float(img, in);
    const auto r = run_process(s.command, {in.string(), out.string()}, s.timeout_s);
    if (r.timed_out)
        fail(ErrorCode::BackendFailed, "mask backend timed out after " + std::to_string(s.timeout_s) + " s");
    if (r.exit_code != 0)
        fail(ErrorCode::BackendFailed,
             "mask backend exited with code " + std::to_string(r.exit_code) + ": " + tail_excerpt(r.err));
    ImageU8 u;
    try {
        u = load_png(out);
    } catch (const Error& e) {
        fail(ErrorCode::BackendFailed, std::string("mask backend output unreadable: ") + e.what());
    }
    return mask_from_u8(u, img.width(), img.height(), "mask backend", ErrorCode::BackendFailed);
}

}  // namespace

RegionMask build_mask(const ImageF& img, const MaskSource& source)
{
    const int w = img.width(), h = img.height();
    switch (source.kind) {
    case MaskSource::Kind::Ellipse:
        return ellipse_mask(w, h, source);
    case MaskSource::Kind::File:
        return mask_from_u8(load_png(source.path), w, h, source.path.string(), ErrorCode::MaskShapeMismatch);
    case MaskSource::Kind::External:
        return external_mask(img, source);
    case MaskSource::Kind::Constant:
        if (!(source.value >= 0.0 && source.value <= 1.0))
            fail(ErrorCode::InvalidArgument, "constant mask value must lie in [0,1]");
        return RegionMask(w, h, source.value);
    }
    fail(ErrorCode::InvalidArgument, "unknown mask source kind");
}

RegionMask feather(const RegionMask& mask, double radius)
{
    if (!(radius >= 0.0))
        fail(ErrorCode::InvalidArgument, "feather radius must be >= 0");
    if (radius == 0.0)
        return mask;
    const double sigma = radius / 2.0;
    const int r = static_cast<int>(std::ceil(3.0 * sigma));
    std::vector<double> k(static_cast<std::size_t>(2 * r + 1));
    double sum = 0.0;
    for (int i = -r; i <= r; ++i) {
        k[static_cast<std::size_t>(i + r)] = std::exp(-(i * i) / (2.0 * sigma * sigma));
        sum += k[static_cast<std::size_t>(i + r)];
    }
    for (double& v : k)
        v /= sum;
    // Dividing by the accumulated weight below keeps all-ones masks exactly 1.

    const int w = mask.width(), h = mask.height();
    RegionMask tmp(w, h), out(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0, ws = 0.0;
            for (int i = -r; i <= r; ++i) {
                s += k[static_cast<std::size_t>(i + r)] * mask.at(y, std::clamp(x + i, 0, w - 1));
                ws += k[static_cast<std::size_t>(i + r)];
            }
            tmp.at(y, x) = s / ws;
        }
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double s = 0.0, ws = 0.0;
            for (int i = -r; i <= r; ++i) {
                s += k[static_cast<std::size_t>(i + r)] * tmp.at(std::clamp(y + i, 0, h - 1), x);
                ws += k[static_cast<std::size_t>(i + r)];
            }
            out.at(y, x) = std::clamp(s / ws, 0.0, 1.0);
        }
    return out;
}

RegionMask complement(const RegionMask& mask)
{
    RegionMask out = mask;
    for (double& v : out.data())
        v = 1.0 - v;
    return out;
}

double default_feather_radius(int width) { return std::max(2.0, width / 64.0); }

}  // namespace purikit
