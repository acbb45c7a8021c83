// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "purikit/chain.hpp"
#include "purikit/image.hpp"
#include "purikit/resample.hpp"

namespace purikit {

struct MetricValue {
    std::string name;
    double value = 0.0;
    bool higher_is_better = true;
};

struct PerturbationStats {
    double linf = 0.0;
    double l2 = 0.0;
    double mean_abs = 0.0;
};

inline constexpr double kPsnrCap = 100.0;

/// Mean of (a-b)^2 over all samples. Throws ShapeMismatch.
double mse(const ImageF& a, const ImageF& b);

/// 10 log10(1/MSE) with peak 1.0; 100 dB when MSE < 1e-10.
MetricValue psnr(const ImageF& a, const ImageF& b);

/// Structural similarity on luma: 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, L = 1, averaged over valid window positions only.
/// Throws ShapeMismatch, TooSmall (either side < 11).
MetricValue ssim(const ImageF& a, const ImageF& b);

/// Normalized 11-tap Gaussian used by ssim().
std::vector<double> ssim_window_1d();

/// Norms of eta = xhat - x over all samples.
PerturbationStats perturbation_stats(const ImageF& x, const ImageF& xhat);

/// Applies `chain`; if the result is not ref_w x ref_h, resamples it back
/// with `re_up`.
ImageF transform_at_reference(const ImageF& img, const TransformChain& chain, int ref_w, int ref_h,
                              const ResampleKernel& re_up = ResampleKernel::lanczos(3));

/// ||T(xhat) - T(x)||_2 / ||xhat - x||_2 where T applies `chain` and then,
/// if the resolution changed, resamples back to x's size with `re_up`.
/// Throws ZeroPerturbation when xhat == x.
double attenuation_ratio(const ImageF& x, const ImageF& xhat, const TransformChain& chain,
                         const ResampleKernel& re_up = ResampleKernel::lanczos(3));

/// Polarity of the metrics the reports know about; nullopt for others.
std::optional<bool> known_polarity(const std::string& name);

/// Names and backends of every metric a run may compute. Native metrics
/// take two images; external ones take two paths (files, or directories for
/// set-level statistics such as FID).
class MetricRegistry {
public:
    using NativeFn = std::function<double(const ImageF&, const ImageF&)>;

    struct Entry {
        std::string name;
        bool higher_is_better = true;
        NativeFn native;          // empty for external metrics
        std::string command;      // external only
        double timeout_s = 600.0; // external only
        bool is_external() const { return !native; }
    };

    /// Registry with mse, psnr and ssim.
    static MetricRegistry with_builtins();

    /// Throw DuplicateMetric if the name is already taken.
    void add_native(const std::string& name, NativeFn fn, bool higher_is_better);
    /// Polarity defaults to known_polarity(name), else lower-is-better.
    void add_external(const std::string& name, const std::string& command,
                      std::optional<bool> higher_is_better = std::nullopt, double timeout_s = 600.0);

    bool contains(const std::string& name) const { return entries_.count(name) != 0; }
    /// Throws BackendUnavailable for unknown names.
    const Entry& at(const std::string& name) const;
    std::vector<std::string> names() const;

    /// Native metric on two images. Throws BackendUnavailable if the metric
    /// is unknown or external.
    MetricValue evaluate(const std::string& name, const ImageF& a, const ImageF& b) const;

private:
    std::map<std::string, Entry> entries_;
};

/// Runs `<cmd> <name> <path_a> <path_b>` and parses `{"value": <number>}`
/// from its standard output.
///
/// Throws BackendUnavailable (name not registered as external),
/// BackendFailed (nonzero exit or timeout; message carries exit code and
/// stderr), BackendProtocolError (anything but one JSON object with a
/// numeric "value").
MetricValue external_metric(const MetricRegistry& registry, const std::string& name,
                            const std::filesystem::path& path_a, const std::filesystem::path& path_b);

}  // namespace purikit
