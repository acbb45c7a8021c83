// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <thread>

#include "purikit/error.hpp"
#include "purikit/harness.hpp"
#include "purikit/png_io.hpp"
#include "purikit/process.hpp"
#include "purikit/version.hpp"
#include "tempdir.hpp"

namespace purikit {

namespace fs = std::filesystem;

namespace {

std::vector<std::string> list_pngs(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        fail(ErrorCode::FileNotFound, "not a directory: " + dir.string());
    std::vector<std::string> names;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file())
            continue;
        std::string ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png")
            names.push_back(entry.path().filename().string());
    }
    std::sort(names.begin(), names.end());
    return names;
}

std::uint64_t fnv1a(std::string_view s)
{
    std::uint64_t h = 14695981039346656037ull;
    for (const unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string sanitize(std::string_view label)
{
    std::string out;
    for (const char c : label)
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '=' ? c : '_');
    return out;
}

struct SettingOutcome {
    bool ok = false;
    std::string error;
    std::vector<double> values;  // one per metric
    double time_s = 0.0;
};

struct PairOutcome {
    std::string load_error;
    std::vector<SettingOutcome> settings;
};

ImageF run_generator(const ExternalCommand& gen, const ImageF& img)
{
    detail::TempDir dir;
    const auto in = dir / "input.png", out = dir / "output.png";
    save_png_float(img, in);
    const auto r = run_process(gen.cmd, {in.string(), out.string(), "1"}, gen.timeout_s);
    if (r.timed_out)
        fail(ErrorCode::BackendTimeout, "generator timed out");
    if (r.exit_code != 0)
        fail(ErrorCode::BackendFailed,
             "generator exited with code " + std::to_string(r.exit_code) + ": " + tail_excerpt(r.err));
    return load_png_float(out);
}

ImageF to_reference_size(ImageF img, const ImageF& ref)
{
    if (img.width() != ref.width() || img.height() != ref.height())
        img = resample(img, ref.width(), ref.height(), ResampleKernel::lanczos(3));
    return img;
}

class PairEvaluator {
public:
    explicit PairEvaluator(const EvalConfig& cfg)
        : cfg_(cfg)
    {
    }

    PairOutcome evaluate(const std::string& name) const
    {
        PairOutcome out;
        ImageF clean, prot;
        try {
            clean = load_png_float(cfg_.clean_dir / name);
            if (cfg_.synth) {
                PerturbSpec spec = *cfg_.synth;
                spec.seed = spec.seed ^ fnv1a(name);
                prot = generate(clean, spec);
            } else {
                prot = load_png_float(*cfg_.protected_dir / name);
            }
        } catch (const std::exception& e) {
            out.load_error = e.what();
            return out;
        }

        // Reference side is shared by every setting.
        std::optional<ImageF> clean_ref;
        std::string clean_ref_error;
        try {
            clean_ref = cfg_.generator ? to_reference_size(run_generator(*cfg_.generator, clean), clean) : clean;
        } catch (const std::exception& e) {
            clean_ref_error = e.what();
        }

        for (const auto& setting : cfg_.settings) {
            SettingOutcome so;
            try {
                if (!clean_ref)
                    fail(ErrorCode::BackendFailed, "reference generation failed: " + clean_ref_error);
                so = evaluate_setting(name, setting, clean, *clean_ref, prot);
                so.ok = true;
            } catch (const std::exception& e) {
                so.ok = false;
                so.error = e.what();
            }
            out.settings.push_back(std::move(so));
        }
        return out;
    }

private:
    SettingOutcome evaluate_setting(const std::string& name, const EvalSetting& setting, const ImageF& clean,
                                    const ImageF& clean_ref, const ImageF& prot) const
    {
        SettingOutcome so;
        const auto t0 = std::chrono::steady_clock::now();
        ImageF raw;
        if (const auto* c = std::get_if<ChainSetting>(&setting.kind)) {
            raw = apply_chain(prot, c->chain);
        } else {
            PurifyParams p = std::get<PurifySetting>(setting.kind).params;
            raw = purify(prot, p);
        }
        so.time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        ImageF final_img = to_reference_size(raw, clean);
        if (cfg_.generator)
            final_img = to_reference_size(run_generator(*cfg_.generator, final_img), clean);

        if (cfg_.keep_intermediates) {
            const fs::path dir = *cfg_.keep_intermediates / sanitize(setting.label);
            fs::create_directories(dir);
            const std::string stem = fs::path(name).stem().string();
            save_png_float(raw, dir / (stem + ".raw.png"));
            save_png_float(final_img, dir / (stem + ".png"));
        }

        std::optional<detail::TempDir> tmp;
        for (const auto& metric : cfg_.metrics) {
            const auto& entry = cfg_.registry.at(metric);
            if (!entry.is_external()) {
                so.values.push_back(entry.native(clean_ref, final_img));
                continue;
            }
            if (!tmp) {
                tmp.emplace();
                save_png_float(final_img, *tmp / "processed.png");
                save_png_float(clean_ref, *tmp / "reference.png");
            }
            so.values.push_back(
                external_metric(cfg_.registry, metric, *tmp / "reference.png", *tmp / "processed.png").value);
        }
        return so;
    }

    const EvalConfig& cfg_;
};

}  // namespace

std::vector<std::string> pair_files(const EvalConfig& cfg)
{
    const auto clean = list_pngs(cfg.clean_dir);
    if (!cfg.protected_dir)
        return clean;
    const auto prot = list_pngs(*cfg.protected_dir);
    std::vector<std::string> only_clean, only_prot;
    std::set_difference(clean.begin(), clean.end(), prot.begin(), prot.end(), std::back_inserter(only_clean));
    std::set_difference(prot.begin(), prot.end(), clean.begin(), clean.end(), std::back_inserter(only_prot));
    if (!only_clean.empty() || !only_prot.empty()) {
        std::string msg = "unmatched files;";
        for (const auto& n : only_clean)
            msg += " clean-only: " + n + ";";
        for (const auto& n : only_prot)
            msg += " protected-only: " + n + ";";
        fail(ErrorCode::PairingError, msg);
    }
    return clean;
}

EvalReport run_eval(const EvalConfig& cfg)
{
    const auto names = pair_files(cfg);
    set_process_cap(cfg.workers);

    std::vector<PairOutcome> outcomes(names.size());
    const PairEvaluator evaluator(cfg);
    std::atomic<std::size_t> next{0};
    {
        const int n_threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(cfg.workers), names.size()));
        std::vector<std::jthread> pool;
        for (int t = 0; t < n_threads; ++t)
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < names.size(); k = next++)
                    outcomes[k] = evaluator.evaluate(names[k]);
            });
    }

    // Single reduction in filename order, independent of scheduling.
    EvalReport report;
    report.provenance.version = std::string(version());
    report.provenance.config_sha256 = cfg.config_sha256;
    report.provenance.deterministic = cfg.deterministic;
    report.has_time = !cfg.deterministic;
    const std::string method = cfg.method_label();

    for (std::size_t s = 0; s < cfg.settings.size(); ++s) {
        std::vector<std::size_t> ok;
        for (std::size_t k = 0; k < names.size(); ++k) {
            if (!outcomes[k].load_error.empty())
                continue;
            if (outcomes[k].settings[s].ok)
                ok.push_back(k);
            else
                report.failures.push_back({names[k], cfg.settings[s].label, outcomes[k].settings[s].error});
        }
        if (ok.empty())
            continue;
        double time_sum = 0.0;
        for (const auto k : ok)
            time_sum += outcomes[k].settings[s].time_s;
        for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
            double sum = 0.0;
            for (const auto k : ok)
                sum += outcomes[k].settings[s].values[m];
            const double n = static_cast<double>(ok.size());
            const double mean = sum / n;
            double sq = 0.0;
            for (const auto k : ok) {
                const double d = outcomes[k].settings[s].values[m] - mean;
                sq += d * d;
            }
            ReportRow row{cfg.settings[s].label, method, cfg.metrics[m], mean,
                          ok.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0, static_cast<int>(ok.size()),
                          std::nullopt};
            if (report.has_time)
                row.time_s = time_sum / n;
            report.rows.push_back(std::move(row));
        }
    }
    for (std::size_t k = 0; k < names.size(); ++k)
        if (!outcomes[k].load_error.empty())
            report.failures.push_back({names[k], "*", outcomes[k].load_error});

    std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
        return std::tie(a.setting, a.metric) < std::tie(b.setting, b.metric);
    });
    std::stable_sort(report.failures.begin(), report.failures.end(), [](const ReportFailure& a, const ReportFailure& b) {
        return std::tie(a.file, a.setting) < std::tie(b.file, b.setting);
    });
    return report;
}

EvalReport run_purify_eval(const EvalConfig& cfg)
{
    if (std::none_of(cfg.settings.begin(), cfg.settings.end(), [](const auto& s) { return s.is_purify(); }))
        fail(ErrorCode::ConfigError, "run_purify_eval needs at least one tiprsr setting");
    return run_eval(cfg);
}

}  // namespace purikit
