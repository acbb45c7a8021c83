// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "purikit/error.hpp"
#include "purikit/hash.hpp"
#include "purikit/harness.hpp"

namespace purikit {

using json = nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& msg) { fail(ErrorCode::ConfigError, msg); }

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t'))
        s.remove_suffix(1);
    return s;
}

std::vector<std::pair<std::string, std::string>> key_values(std::string_view text, std::string_view context)
{
    std::vector<std::pair<std::string, std::string>> out;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto kv = trim(text.substr(0, comma));
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = kv.find('=');
        if (eq == std::string_view::npos)
            config_error("expected key=value in setting '" + std::string(context) + "'");
        out.emplace_back(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
    }
    return out;
}

template <typename T>
T number(std::string_view s, std::string_view context)
{
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        config_error("bad number '" + std::string(s) + "' in '" + std::string(context) + "'");
    return v;
}

// Translate library errors raised while parsing a field into ConfigError.
template <typename F>
auto as_config(const std::string& where, F&& f)
{
    try {
        return f();
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ConfigError || e.code() == ErrorCode::DuplicateMetric)
            throw;
        config_error(where + ": " + e.what());
    }
}

void apply_feather(PurifyParams& p, std::string_view v, std::string_view context)
{
    if (v == "auto") {
        p.hard_mask = false;
        p.feather_radius.reset();
    } else if (v == "hard") {
        p.hard_mask = true;
    } else {
        p.hard_mask = false;
        p.feather_radius = number<double>(v, context);
    }
}

PurifyParams purify_from_text(std::string_view opts, const PurifyParams& base, std::string_view context)
{
    PurifyParams p = base;
    for (const auto& [k, v] : key_values(opts, context)) {
        if (k == "lambda")
            p.lambda = number<double>(v, context);
        else if (k == "q")
            p.jpeg_q = v == "none" ? std::nullopt : std::optional<int>(number<int>(v, context));
        else if (k == "s" && (v == "420" || v == "444"))
            p.jpeg_subsampling = v == "444" ? ChromaSubsampling::S444 : ChromaSubsampling::S420;
        else if (k == "d")
            p.down_factor = number<int>(v, context);
        else if (k == "k")
            p.down_kernel = ResampleKernel::parse(v);
        else if (k == "blend")
            p.blend = parse_blend_mode(v);
        else if (k == "feather")
            apply_feather(p, v, context);
        else
            config_error("unknown tiprsr option '" + k + "'");
    }
    return p;
}

SrBackendSpec sr_from_json(const json& j, const std::string& where)
{
    if (j.is_string())
        return as_config(where, [&] { return SrBackendSpec::parse(j.get<std::string>()); });
    if (!j.is_object())
        config_error(where + " must be a string or an object");
    return as_config(where, [&] {
        const std::string kind = j.value("kind", "interp");
        SrBackendSpec s;
        if (kind == "identity")
            s = SrBackendSpec::identity();
        else if (kind == "interp")
            s = SrBackendSpec::interp(ResampleKernel::parse(j.value("kernel", "lanczos3")), 2);
        else if (kind == "external")
            s = SrBackendSpec::external(j.value("cmd", ""), 2, 300.0);
        else
            config_error(where + ": unknown kind '" + kind + "'");
        for (const auto& [key, value] : j.items())
            if (key != "kind" && key != "kernel" && key != "cmd" && key != "scale" && key != "timeout_s")
                config_error(where + ": unknown key '" + key + "'");
        s.scale = j.value("scale", s.scale);
        s.timeout_s = j.value("timeout_s", s.timeout_s);
        s.validate();
        return s;
    });
}

void mask_from_json(const json& j, PurifyParams& p, const std::filesystem::path& base_dir)
{
    auto source = [&](const std::string& text) {
        MaskSource m = as_config("mask", [&] { return MaskSource::parse(text); });
        if (m.kind == MaskSource::Kind::File && m.path.is_relative())
            m.path = base_dir / m.path;
        return m;
    };
    if (j.is_string()) {
        p.mask = source(j.get<std::string>());
        return;
    }
    if (!j.is_object())
        config_error("mask must be a string or an object");
    for (const auto& [key, value] : j.items()) {
        if (key == "source")
            p.mask = source(value.get<std::string>());
        else if (key == "timeout_s")
            p.mask.timeout_s = value.get<double>();
        else if (key == "feather") {
            if (value.is_number()) {
                p.feather_radius = value.get<double>();
                p.hard_mask = false;
            } else
                apply_feather(p, value.get<std::string>(), "mask.feather");
        } else if (key == "hard")
            p.hard_mask = value.get<bool>();
        else
            config_error("mask: unknown key '" + key + "'");
    }
}

PurifyParams purify_from_json(const json& j, const PurifyParams& base, const std::filesystem::path& base_dir)
{
    PurifyParams p = base;
    for (const auto& [key, value] : j.items()) {
        if (key == "lambda")
            p.lambda = value.get<double>();
        else if (key == "jpeg_q")
            p.jpeg_q = value.is_null() ? std::nullopt : std::optional<int>(value.get<int>());
        else if (key == "subsampling")
            p.jpeg_subsampling = value.get<std::string>() == "444" ? ChromaSubsampling::S444 : ChromaSubsampling::S420;
        else if (key == "down")
            p.down_factor = value.get<int>();
        else if (key == "down_kernel")
            p.down_kernel = as_config(key, [&] { return ResampleKernel::parse(value.get<std::string>()); });
        else if (key == "blend")
            p.blend = as_config(key, [&] { return parse_blend_mode(value.get<std::string>()); });
        else if (key == "face_sr")
            p.face_sr = sr_from_json(value, "face_sr");
        else if (key == "general_sr")
            p.general_sr = sr_from_json(value, "general_sr");
        else if (key == "mask")
            mask_from_json(value, p, base_dir);
        else if (key == "feather") {
            if (value.is_number()) {
                p.feather_radius = value.get<double>();
                p.hard_mask = false;
            } else
                apply_feather(p, value.get<std::string>(), "feather");
        } else
            config_error("tiprsr: unknown key '" + key + "'");
    }
    return p;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p)
{
    const std::filesystem::path path(p);
    return path.is_absolute() ? path : (base / path).lexically_normal();
}

}  // namespace

std::string EvalSetting::canonical() const
{
    if (const auto* c = std::get_if<ChainSetting>(&kind))
        return "chain:" + c->chain.to_string();
    return "tiprsr:" + std::get<PurifySetting>(kind).params.to_string();
}

EvalSetting parse_setting(std::string_view text, const PurifyParams& base)
{
    text = trim(text);
    EvalSetting s;
    s.label = std::string(text);
    if (text == "tiprsr" || text.starts_with("tiprsr:")) {
        const auto opts = text.size() > 6 ? text.substr(7) : std::string_view{};
        PurifyParams p = as_config("setting '" + s.label + "'", [&] { return purify_from_text(opts, base, text); });
        as_config("setting '" + s.label + "'", [&] {
            p.validate();
            return 0;
        });
        s.kind = PurifySetting{p};
        return s;
    }
    if (text.starts_with("cnr:") || text == "cnr") {
        int q = 75;
        ScaleFactor f{1, 2};
        ResampleKernel k = ResampleKernel::lanczos(3);
        as_config("setting '" + s.label + "'", [&] {
            for (const auto& [key, v] : key_values(text.size() > 3 ? text.substr(4) : std::string_view{}, text)) {
                if (key == "q")
                    q = number<int>(v, text);
                else if (key == "f")
                    f = ScaleFactor::parse(v);
                else if (key == "k")
                    k = ResampleKernel::parse(v);
                else
                    config_error("unknown cnr option '" + key + "'");
            }
            return 0;
        });
        s.kind = ChainSetting{as_config("setting '" + s.label + "'",
                                        [&] { return TransformChain::compress_and_resize(q, f, k); })};
        return s;
    }
    s.kind = ChainSetting{as_config("setting '" + s.label + "'", [&] { return TransformChain::parse(text); })};
    return s;
}

std::string EvalConfig::method_label() const
{
    if (!method.empty())
        return method;
    if (synth)
        return "synth:" + synth->to_string();
    if (protected_dir) {
        auto p = protected_dir->lexically_normal();
        if (p.filename().empty())
            p = p.parent_path();
        return p.filename().string();
    }
    return "protected";
}

EvalConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir)
{
    const json root = json::parse(json_text, nullptr, false, true);
    if (root.is_discarded() || !root.is_object())
        config_error("config is not a JSON object");

    static const std::set<std::string> known = {"clean_dir", "protected", "settings", "metrics", "sr", "mask",
                                                "output", "seed", "workers", "deterministic",
                                                "keep_intermediates", "generator", "purify"};
    for (const auto& [key, value] : root.items())
        if (!known.count(key))
            config_error("unknown config key '" + key + "'");

    EvalConfig cfg;
    try {
        if (!root.contains("clean_dir"))
            config_error("missing clean_dir");
        cfg.clean_dir = resolve(base_dir, root["clean_dir"].get<std::string>());

        if (!root.contains("protected"))
            config_error("missing protected");
        const json& prot = root["protected"];
        if (prot.is_string()) {
            cfg.protected_dir = resolve(base_dir, prot.get<std::string>());
        } else if (prot.is_object()) {
            cfg.method = prot.value("label", "");
            if (prot.contains("dir") == prot.contains("synth"))
                config_error("protected needs exactly one of dir / synth");
            if (prot.contains("dir"))
                cfg.protected_dir = resolve(base_dir, prot["dir"].get<std::string>());
            else {
                const json& sy = prot["synth"];
                PerturbSpec spec = as_config("protected.synth", [&] {
                    return PerturbSpec::parse_kind(sy.value("kind", "sign"));
                });
                if (sy.contains("eps"))
                    spec.epsilon = sy["eps"].is_number()
                                       ? sy["eps"].get<double>()
                                       : as_config("protected.synth.eps", [&] { return parse_epsilon(sy["eps"].get<std::string>()); });
                spec.seed = sy.value("seed", root.value("seed", std::uint64_t{0}));
                as_config("protected.synth", [&] {
                    spec.validate();
                    return 0;
                });
                cfg.synth = spec;
            }
        } else {
            config_error("protected must be a path or an object");
        }

        cfg.seed = root.value("seed", std::uint64_t{0});
        cfg.deterministic = root.value("deterministic", true);

        // Shared pipeline pieces for tiprsr settings.
        PurifyParams base;
        if (root.contains("sr")) {
            const json& sr = root["sr"];
            for (const auto& [key, value] : sr.items())
                if (key != "face" && key != "general" && key != "cache_dir")
                    config_error("sr: unknown key '" + key + "'");
            if (sr.contains("face"))
                base.face_sr = sr_from_json(sr["face"], "sr.face");
            if (sr.contains("general"))
                base.general_sr = sr_from_json(sr["general"], "sr.general");
            if (sr.contains("cache_dir")) {
                const auto dir = resolve(base_dir, sr["cache_dir"].get<std::string>());
                base.face_sr.cache_dir = dir;
                base.general_sr.cache_dir = dir;
            }
        }
        if (root.contains("mask"))
            mask_from_json(root["mask"], base, base_dir);
        if (root.contains("purify"))
            base = purify_from_json(root["purify"], base, base_dir);

        if (!root.contains("settings") || !root["settings"].is_array() || root["settings"].empty())
            config_error("settings must be a non-empty list");
        std::set<std::string> labels;
        for (const json& s : root["settings"]) {
            EvalSetting setting;
            if (s.is_string()) {
                setting = parse_setting(s.get<std::string>(), base);
            } else if (s.is_object()) {
                if (s.contains("tiprsr")) {
                    setting.kind = PurifySetting{purify_from_json(s["tiprsr"], base, base_dir)};
                    as_config("tiprsr setting", [&] {
                        std::get<PurifySetting>(setting.kind).params.validate();
                        return 0;
                    });
                    setting.label = "tiprsr";
                } else if (s.contains("chain")) {
                    setting = parse_setting(s["chain"].get<std::string>(), base);
                } else {
                    config_error("setting objects need 'chain' or 'tiprsr'");
                }
                if (s.contains("label"))
                    setting.label = s["label"].get<std::string>();
            } else {
                config_error("settings entries must be strings or objects");
            }
            if (!labels.insert(setting.label).second)
                config_error("duplicate setting label '" + setting.label + "'");
            cfg.settings.push_back(std::move(setting));
        }

        if (!root.contains("metrics"))
            config_error("missing metrics");
        const json& m = root["metrics"];
        const json* use = &m;
        if (m.is_object()) {
            for (const auto& [key, value] : m.items())
                if (key != "use" && key != "external")
                    config_error("metrics: unknown key '" + key + "'");
            if (m.contains("external"))
                for (const auto& [name, entry] : m["external"].items()) {
                    std::optional<bool> hib;
                    if (entry.contains("higher_is_better"))
                        hib = entry["higher_is_better"].get<bool>();
                    cfg.registry.add_external(name, entry.value("cmd", ""), hib, entry.value("timeout_s", 600.0));
                }
            if (!m.contains("use"))
                config_error("metrics.use is required");
            use = &m["use"];
        }
        if (!use->is_array() || use->empty())
            config_error("metrics must list at least one metric");
        std::set<std::string> seen;
        for (const json& name : *use) {
            const auto n = name.get<std::string>();
            if (!cfg.registry.contains(n))
                config_error("metric '" + n + "' is neither built in nor registered under metrics.external");
            if (!seen.insert(n).second)
                fail(ErrorCode::DuplicateMetric, "metric '" + n + "' listed twice");
            cfg.metrics.push_back(n);
        }

        if (root.contains("output")) {
            const json& o = root["output"];
            std::string format;
            if (o.is_string()) {
                cfg.output_path = resolve(base_dir, o.get<std::string>());
            } else {
                cfg.output_path = resolve(base_dir, o.value("path", "report.csv"));
                format = o.value("format", "");
            }
            if (format.empty())
                format = cfg.output_path.extension() == ".json" ? "json" : "csv";
            if (format != "csv" && format != "json")
                config_error("output.format must be csv or json");
            cfg.format = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
        }

        cfg.workers = root.value("workers", static_cast<int>(std::max(1u, std::thread::hardware_concurrency())));
        if (const char* env = std::getenv("PURIKIT_WORKERS"); env && *env)
            cfg.workers = number<int>(env, "PURIKIT_WORKERS");
        if (cfg.workers < 1)
            config_error("workers must be >= 1");

        if (root.contains("keep_intermediates") && !root["keep_intermediates"].is_null())
            cfg.keep_intermediates = resolve(base_dir, root["keep_intermediates"].get<std::string>());
        if (root.contains("generator") && !root["generator"].is_null()) {
            const json& g = root["generator"];
            cfg.generator = ExternalCommand{g.value("cmd", ""), g.value("timeout_s", 600.0)};
            if (cfg.generator->cmd.empty())
                config_error("generator.cmd is required");
        }
    } catch (const json::exception& e) {
        config_error(std::string("bad config value: ") + e.what());
    }

    // Fields that cannot change values (workers, output, cache, intermediates)
    // stay out of the digest.
    json canon;
    canon["clean_dir"] = cfg.clean_dir.string();
    canon["protected"] = cfg.synth ? json{{"synth", cfg.synth->to_string()}} : json{{"dir", cfg.protected_dir->string()}};
    canon["method"] = cfg.method_label();
    canon["settings"] = json::array();
    for (const auto& s : cfg.settings)
        canon["settings"].push_back({{"label", s.label}, {"def", s.canonical()}});
    canon["metrics"] = json::array();
    for (const auto& name : cfg.metrics) {
        const auto& e = cfg.registry.at(name);
        json entry = {{"name", name}, {"higher_is_better", e.higher_is_better}};
        if (e.is_external())
            entry["cmd"] = e.command;
        canon["metrics"].push_back(entry);
    }
    canon["seed"] = cfg.seed;
    canon["deterministic"] = cfg.deterministic;
    if (cfg.generator)
        canon["generator"] = cfg.generator->cmd;
    cfg.config_sha256 = sha256_hex(canon.dump());
    return cfg;
}

EvalConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorCode::FileNotFound, "cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
}

}  // namespace purikit
