// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include "purikit/srbackend.hpp"

#include <charconv>
#include <chrono>
#include <functional>
#include <thread>

#include <unistd.h>

#include "purikit/error.hpp"
#include "purikit/hash.hpp"
#include "purikit/png_io.hpp"
#include "purikit/process.hpp"
#include "tempdir.hpp"

namespace purikit {

SrBackendSpec SrBackendSpec::identity()
{
    SrBackendSpec s;
    s.kind = Kind::Identity;
    s.scale = 1;
    return s;
}

SrBackendSpec SrBackendSpec::interp(ResampleKernel kernel, int scale)
{
    SrBackendSpec s;
    s.kind = Kind::Interp;
    s.kernel = kernel;
    s.scale = scale;
    return s;
}

SrBackendSpec SrBackendSpec::external(std::string command, int scale, double timeout_s)
{
    SrBackendSpec s;
    s.kind = Kind::External;
    s.command = std::move(command);
    s.scale = scale;
    s.timeout_s = timeout_s;
    return s;
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::string_view context)
{
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        fail(ErrorCode::InvalidArgument, "bad number in SR spec '" + std::string(context) + "'");
    return v;
}

}  // namespace

SrBackendSpec SrBackendSpec::parse(std::string_view text)
{
    if (text == "identity")
        return identity();
    std::string_view rest;
    SrBackendSpec s;
    if (text == "interp" || text.starts_with("interp:")) {
        s = interp();
        rest = text.size() > 6 ? text.substr(7) : std::string_view{};
    } else if (text.starts_with("external:")) {
        s = external("");
        rest = text.substr(9);
    } else {
        fail(ErrorCode::InvalidArgument, "unknown SR backend '" + std::string(text) + "'");
    }
    while (!rest.empty()) {
        const auto eq = rest.find('=');
        if (eq == std::string_view::npos)
            fail(ErrorCode::InvalidArgument, "expected key=value in '" + std::string(text) + "'");
        const auto key = rest.substr(0, eq);
        if (key == "cmd" && s.kind == Kind::External) {
            s.command = std::string(rest.substr(eq + 1));
            break;
        }
        const auto comma = rest.find(',');
        const auto value = rest.substr(eq + 1, comma == std::string_view::npos ? comma : comma - eq - 1);
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
        if (key == "s")
            s.scale = parse_number<int>(value, text);
        else if (key == "k" && s.kind == Kind::Interp)
            s.kernel = ResampleKernel::parse(value);
        else if (key == "t" && s.kind == Kind::External)
            s.timeout_s = parse_number<double>(value, text);
        else
            fail(ErrorCode::InvalidArgument, "unknown key '" + std::string(key) + "' in SR spec '"
                                                 + std::string(text) + "'");
    }
    s.validate();
    return s;
}

std::string SrBackendSpec::to_string() const
{
    switch (kind) {
    case Kind::Identity:
        return "identity";
    case Kind::Interp:
        return "interp:k=" + kernel.name() + ",s=" + std::to_string(scale);
    case Kind::External: {
        char buf[32];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, timeout_s);
        return "external:s=" + std::to_string(scale) + ",t=" + std::string(buf, ptr) + ",cmd=" + command;
    }
    }
    return {};
}

void SrBackendSpec::validate() const
{
    if (kind == Kind::Identity && scale != 1)
        fail(ErrorCode::InvalidArgument, "identity SR backend requires scale 1");
    if (scale < 1)
        fail(ErrorCode::InvalidArgument, "SR scale must be >= 1");
    if (kind == Kind::External) {
        if (command.empty())
            fail(ErrorCode::InvalidArgument, "external SR backend needs a command");
        if (!(timeout_s > 0.0))
            fail(ErrorCode::InvalidArgument, "external SR timeout must be > 0");
    }
}

namespace {

void check_contract(const ImageF& in, const ImageF& out, int scale)
{
    const long ew = static_cast<long>(in.width()) * scale, eh = static_cast<long>(in.height()) * scale;
    if (out.width() != ew || out.height() != eh)
        fail(ErrorCode::ScaleContractViolated, "SR backend returned " + std::to_string(out.width()) + "x"
                                                   + std::to_string(out.height()) + ", expected "
                                                   + std::to_string(ew) + "x" + std::to_string(eh));
    if (out.channels() != in.channels())
        fail(ErrorCode::BackendFailed, "SR backend returned " + std::to_string(out.channels())
                                           + " channels, expected " + std::to_string(in.channels()));
}

ImageF run_external(const ImageF& img, const SrBackendSpec& spec)
{
    detail::TempDir dir;
    const auto in = dir / "input.png", out = dir / "output.png";
    save_png_float(img, in);
    ProcessResult r;
    for (int attempt = 0; attempt < 2; ++attempt) {
        r = run_process(spec.command, {in.string(), out.string(), std::to_string(spec.scale)}, spec.timeout_s);
        if (!r.timed_out)
            break;
    }
    if (r.timed_out)
        fail(ErrorCode::BackendTimeout, "SR backend timed out twice after " + std::to_string(spec.timeout_s) + " s");
    if (r.exit_code != 0)
        fail(ErrorCode::BackendFailed,
             "SR backend exited with code " + std::to_string(r.exit_code) + ": " + tail_excerpt(r.err));
    try {
        return load_png_float(out);
    } catch (const Error& e) {
        fail(ErrorCode::BackendFailed, std::string("SR backend output unreadable: ") + e.what());
    }
}

ImageF cached_external(const ImageF& img, const SrBackendSpec& spec)
{
    namespace fs = std::filesystem;
    const auto png = encode_png(to_u8(img));
    const std::string key = sha256_hex(sha256_hex(png) + "\n" + spec.to_string());
    const fs::path entry = *spec.cache_dir / (key + ".png");
    if (fs::exists(entry)) {
        ImageF hit = load_png_float(entry);
        if (hit.width() == img.width() * spec.scale && hit.height() == img.height() * spec.scale
            && hit.channels() == img.channels())
            return hit;
    }
    ImageF result = run_external(img, spec);
    check_contract(img, result, spec.scale);
    std::error_code ec;
    fs::create_directories(*spec.cache_dir, ec);
    // Write-then-rename so concurrent readers never see a partial entry.
    const fs::path tmp = *spec.cache_dir / (key + ".tmp" + std::to_string(::getpid()) + "-"
                                               + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id())));
    try {
        save_png_float(result, tmp);
        fs::rename(tmp, entry, ec);
    } catch (const Error&) {
        fs::remove(tmp, ec);
    }
    return result;
}

}  // namespace

SrResult upscale(const ImageF& img, const SrBackendSpec& spec)
{
    spec.validate();
    const auto start = std::chrono::steady_clock::now();
    ImageF out;
    switch (spec.kind) {
    case SrBackendSpec::Kind::Identity:
        out = img;
        break;
    case SrBackendSpec::Kind::Interp:
        out = resample(img, img.width() * spec.scale, img.height() * spec.scale, spec.kernel);
        break;
    case SrBackendSpec::Kind::External:
        out = spec.cache_dir ? cached_external(img, spec) : run_external(img, spec);
        out = clamp01(std::move(out));
        break;
    }
    check_contract(img, out, spec.scale);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return {std::move(out), elapsed.count()};
}

void validate_pipeline_scales(const SrBackendSpec& face, const SrBackendSpec& general, int down_factor)
{
    auto check = [&](const char* role, const SrBackendSpec& s) {
        if (s.scale != down_factor)
            fail(ErrorCode::ScaleMismatch, std::string(role) + ": expected scale " + std::to_string(down_factor)
                                               + ", got " + std::to_string(s.scale));
    };
    check("face", face);
    check("general", general);
}

}  // namespace purikit
