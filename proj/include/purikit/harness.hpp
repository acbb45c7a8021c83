// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Batch evaluation: pair clean and protected images, apply each setting to
// the protected image, score against the clean image, aggregate.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "purikit/chain.hpp"
#include "purikit/metrics.hpp"
#include "purikit/perturb.hpp"
#include "purikit/purify.hpp"

namespace purikit {

struct ChainSetting {
    TransformChain chain;
};

struct PurifySetting {
    PurifyParams params;
};

struct EvalSetting {
    std::string label;
    std::variant<ChainSetting, PurifySetting> kind;

    bool is_purify() const { return std::holds_alternative<PurifySetting>(kind); }
    /// Canonical description used for hashing.
    std::string canonical() const;
};

/// "none", "jpeg:q=75", "resize:f=0.5,k=lanczos3", any ';'-separated chain,
/// "cnr:q=75,f=0.5,k=lanczos3", "tiprsr[:lambda=..,q=..|none,d=..,k=..,
/// blend=convex|literal,s=420|444,feather=auto|hard|<r>]". SR backends and
/// the mask come from `base`. Throws ConfigError.
EvalSetting parse_setting(std::string_view text, const PurifyParams& base = {});

enum class ReportFormat { Csv, Json };

struct ExternalCommand {
    std::string cmd;
    double timeout_s = 600.0;
};

struct EvalConfig {
    std::filesystem::path clean_dir;
    /// Exactly one of protected_dir / synth is set.
    std::optional<std::filesystem::path> protected_dir;
    std::optional<PerturbSpec> synth;
    /// Method label for report rows; derived when empty.
    std::string method;

    std::vector<EvalSetting> settings;
    std::vector<std::string> metrics;
    MetricRegistry registry = MetricRegistry::with_builtins();

    std::filesystem::path output_path;
    ReportFormat format = ReportFormat::Csv;

    std::uint64_t seed = 0;
    int workers = 1;
    /// When false, rows gain a time_s column (wall-clock, so not reproducible).
    bool deterministic = true;
    std::optional<std::filesystem::path> keep_intermediates;
    /// Optional `<cmd> <input_png> <output_png> 1` applied to both images
    /// before scoring.
    std::optional<ExternalCommand> generator;
    /// Digest of every field that can change report values.
    std::string config_sha256;

    std::string method_label() const;
};

/// Parses the JSON config. Relative paths resolve against `base_dir`.
/// PURIKIT_WORKERS, when set, overrides "workers". Throws ConfigError,
/// DuplicateMetric.
EvalConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = ".");
EvalConfig load_config(const std::filesystem::path& path);

struct ReportRow {
    std::string setting;
    std::string method;
    std::string metric;
    double mean = 0.0;
    double std = 0.0;
    int n = 0;
    std::optional<double> time_s;
    friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct ReportFailure {
    std::string file;
    std::string setting;
    std::string message;
    friend bool operator==(const ReportFailure&, const ReportFailure&) = default;
};

struct Provenance {
    std::string tool = "purikit";
    std::string version;
    std::string config_sha256;
    bool deterministic = true;
    friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct EvalReport {
    std::vector<ReportRow> rows;
    std::vector<ReportFailure> failures;
    Provenance provenance;
    bool has_time = false;
};

/// Pairs clean and protected PNGs by filename. Throws PairingError listing
/// unmatched names.
std::vector<std::string> pair_files(const EvalConfig& cfg);

/// Scores every (pair, setting, metric). Per-pair errors land in
/// report.failures and the run continues. Rows are sorted by
/// (setting, metric); std is the sample deviation (0 for n = 1).
EvalReport run_eval(const EvalConfig& cfg);

/// run_eval for configs with at least one tiprsr setting (ConfigError
/// otherwise).
EvalReport run_purify_eval(const EvalConfig& cfg);

/// 6 significant digits, locale independent; integral values keep ".0".
std::string format_number(double v);

std::string report_to_csv(const EvalReport& report);
std::string report_to_json(const EvalReport& report);
/// Inverse of report_to_json. Throws ConfigError.
EvalReport report_from_json(std::string_view text);
/// Writes to `path` ("-" means standard output). Throws IoError.
void emit_report(const EvalReport& report, const std::filesystem::path& path, ReportFormat format);

}  // namespace purikit
