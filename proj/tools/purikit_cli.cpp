// Copyright Contributors to the purikit project.
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Exit codes: 0 success, 1 usage error, 2 runtime
// error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "purikit/chain.hpp"
#include "purikit/error.hpp"
#include "purikit/harness.hpp"
#include "purikit/jpeg.hpp"
#include "purikit/metrics.hpp"
#include "purikit/perturb.hpp"
#include "purikit/png_io.hpp"
#include "purikit/purify.hpp"
#include "purikit/version.hpp"

namespace fs = std::filesystem;
using namespace purikit;

namespace {

struct TransformArgs {
    std::string in, out, chain = "none";
};

struct PurifyArgs {
    std::string in, out;
    double lambda = 0.2;
    std::string jpeg_q = "75";
    std::string subsampling = "420";
    int down = 2;
    std::string down_kernel = "lanczos3";
    std::string blend = "convex";
    std::string face_sr = "interp:k=lanczos3,s=2";
    std::string general_sr = "interp:k=lanczos3,s=2";
    std::string mask = "ellipse";
    std::string feather = "auto";
    bool hard_mask = false;
    bool serial = false;
    std::string trace_dir;
};

struct MetricArgs {
    std::string a, b, name = "psnr", cmd;
    double timeout_s = 600.0;
};

struct PerturbArgs {
    std::string in, out, kind = "sign", eps = "8/255";
    std::uint64_t seed = 0;
    bool stats = false;
};

struct EvaluateArgs {
    std::string config, out, format;
    int workers = 0;
};

int run_transform(const TransformArgs& a)
{
    const TransformChain chain = TransformChain::parse(a.chain);
    save_png_float(apply_chain(load_png_float(a.in), chain), a.out);
    return 0;
}

int run_purify(const PurifyArgs& a)
{
    PurifyParams p;
    p.lambda = a.lambda;
    if (a.jpeg_q == "none")
        p.jpeg_q.reset();
    else
        p.jpeg_q = std::stoi(a.jpeg_q);
    p.jpeg_subsampling = a.subsampling == "444" ? ChromaSubsampling::S444 : ChromaSubsampling::S420;
    p.down_factor = a.down;
    p.down_kernel = ResampleKernel::parse(a.down_kernel);
    p.blend = parse_blend_mode(a.blend);
    p.face_sr = SrBackendSpec::parse(a.face_sr);
    p.general_sr = SrBackendSpec::parse(a.general_sr);
    p.mask = MaskSource::parse(a.mask);
    if (a.feather == "hard")
        p.hard_mask = true;
    else if (a.feather != "auto")
        p.feather_radius = std::stod(a.feather);
    p.hard_mask = p.hard_mask || a.hard_mask;
    p.parallel = !a.serial;

    const ImageF xhat = load_png_float(a.in);
    PurifyTrace trace;
    const ImageF out = purify(xhat, p, a.trace_dir.empty() ? nullptr : &trace);
    save_png_float(out, a.out);
    if (!a.trace_dir.empty()) {
        const fs::path dir = a.trace_dir;
        fs::create_directories(dir);
        save_png_float(trace.x_jd, dir / "x_jd.png");
        save_png_float(trace.x_f, dir / "x_f.png");
        save_png_float(trace.x_g, dir / "x_g.png");
        save_png_float(trace.mask.to_image(), dir / "mask.png");
        std::cerr << "face " << format_number(trace.face_s) << " s, background " << format_number(trace.background_s)
                  << " s, mask " << format_number(trace.mask_s) << " s, total " << format_number(trace.total_s)
                  << " s\n";
    }
    return 0;
}

int run_metric(const MetricArgs& a)
{
    MetricRegistry registry = MetricRegistry::with_builtins();
    if (!a.cmd.empty())
        registry.add_external(a.name, a.cmd, std::nullopt, a.timeout_s);
    const auto& entry = registry.at(a.name);
    const double v = entry.is_external() ? external_metric(registry, a.name, a.a, a.b).value
                                         : registry.evaluate(a.name, load_png_float(a.a), load_png_float(a.b)).value;
    std::cout << format_number(v) << '\n';
    return 0;
}

int run_perturb(const PerturbArgs& a)
{
    PerturbSpec spec = PerturbSpec::parse_kind(a.kind);
    spec.epsilon = parse_epsilon(a.eps);
    spec.seed = a.seed;
    const ImageF x = load_png_float(a.in);
    const ImageF xhat = generate(x, spec);
    save_png_float(xhat, a.out);
    if (a.stats) {
        // Stats of what was written, after 8-bit quantization.
        const auto s = perturbation_stats(x, to_float(to_u8(xhat)));
        std::cout << "linf " << format_number(s.linf) << "\nl2 " << format_number(s.l2) << "\nmean_abs "
                  << format_number(s.mean_abs) << '\n';
    }
    return 0;
}

int run_evaluate(const EvaluateArgs& a)
{
    EvalConfig cfg = load_config(a.config);
    if (a.workers > 0)
        cfg.workers = a.workers;
    if (!a.out.empty())
        cfg.output_path = a.out;
    if (!a.format.empty())
        cfg.format = a.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
    if (cfg.output_path.empty())
        cfg.output_path = "-";
    const EvalReport report = run_eval(cfg);
    emit_report(report, cfg.output_path, cfg.format);
    if (!report.failures.empty())
        std::cerr << report.failures.size() << " failure(s); see the report footer\n";
    return 0;
}

int run_quant_tables(int q)
{
    const QuantTables t = quant_tables_for_quality(q);
    auto print = [](const char* title, const std::array<std::uint16_t, 64>& table) {
        std::cout << title << '\n';
        for (int r = 0; r < 8; ++r) {
            for (int c = 0; c < 8; ++c)
                std::printf("%4d", table[static_cast<std::size_t>(r * 8 + c)]);
            std::cout << '\n' << std::flush;
        }
    };
    print("luminance", t.luminance);
    std::cout << '\n';
    print("chrominance", t.chrominance);
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Image transformation, purification and evaluation toolkit"};
    app.set_version_flag("--version", std::string(version()));
    app.require_subcommand(1);

    TransformArgs ta;
    auto* transform = app.add_subcommand("transform", "Apply a transformation chain to a PNG");
    transform->add_option("--in", ta.in, "Input PNG")->required();
    transform->add_option("--out", ta.out, "Output PNG")->required();
    transform->add_option("--chain", ta.chain, "Steps separated by ';', e.g. \"jpeg:q=75;resize:f=0.5,k=lanczos3\"")
        ->capture_default_str();

    PurifyArgs pa;
    auto* pur = app.add_subcommand("purify", "Region-wise super-resolution purification");
    pur->add_option("--in", pa.in, "Protected input PNG")->required();
    pur->add_option("--out", pa.out, "Purified output PNG")->required();
    pur->add_option("--lambda", pa.lambda, "Weight of the input in the face path, in [0,1]")->capture_default_str();
    pur->add_option("--jpeg-q", pa.jpeg_q, "JPEG quality 1-100, or none to skip compression")->capture_default_str();
    pur->add_option("--subsampling", pa.subsampling, "Chroma subsampling")
        ->check(CLI::IsMember({"420", "444"}))
        ->capture_default_str();
    pur->add_option("--down", pa.down, "Downsampling factor; must equal both SR scales")->capture_default_str();
    pur->add_option("--down-kernel", pa.down_kernel, "Resampling kernel")->capture_default_str();
    pur->add_option("--blend", pa.blend, "convex: (1-l)s + l x; literal: clamp(s + l x)")
        ->check(CLI::IsMember({"convex", "literal"}))
        ->capture_default_str();
    pur->add_option("--face-sr", pa.face_sr, "identity | interp:k=<kernel>,s=<n> | external:s=<n>,t=<sec>,cmd=<command>")
        ->capture_default_str();
    pur->add_option("--general-sr", pa.general_sr, "Same syntax as --face-sr")->capture_default_str();
    pur->add_option("--mask", pa.mask, "ellipse[:cx=,cy=,rx=,ry=] | file:<png> | external:<command> | ones | zeros")
        ->capture_default_str();
    pur->add_option("--feather", pa.feather, "Feather radius in pixels, auto (max(2, w/64)) or hard")
        ->capture_default_str();
    pur->add_flag("--hard-mask", pa.hard_mask, "Fuse with the unfeathered mask");
    pur->add_flag("--serial", pa.serial, "Run the face and background paths one after another");
    pur->add_option("--trace-dir", pa.trace_dir, "Write x_jd.png, x_f.png, x_g.png and mask.png here");

    MetricArgs ma;
    auto* metric = app.add_subcommand("metric", "Compare two images with one metric");
    metric->add_option("--a", ma.a, "Reference PNG (or directory for set-level external metrics)")->required();
    metric->add_option("--b", ma.b, "Test PNG (or directory)")->required();
    metric->add_option("--name", ma.name, "psnr, ssim, mse, or an external metric name")->capture_default_str();
    metric->add_option("--cmd", ma.cmd, "External backend command, run as <cmd> <name> <a> <b>");
    metric->add_option("--timeout", ma.timeout_s, "External backend timeout in seconds")->capture_default_str();

    PerturbArgs pe;
    auto* perturb = app.add_subcommand("perturb", "Add a synthetic bounded perturbation");
    perturb->add_option("--in", pe.in, "Clean input PNG")->required();
    perturb->add_option("--out", pe.out, "Perturbed output PNG")->required();
    perturb->add_option("--kind", pe.kind, "uniform | sign | checkerboard[:p=2] | sinusoid[:p=64,o=h|v]")
        ->capture_default_str();
    perturb->add_option("--eps", pe.eps, "Budget, e.g. 8/255 or 0.03")->capture_default_str();
    perturb->add_option("--seed", pe.seed, "Seed for uniform and sign kinds")->capture_default_str();
    perturb->add_flag("--stats", pe.stats, "Print linf, l2 and mean_abs of the written perturbation");

    EvaluateArgs ea;
    auto* evaluate = app.add_subcommand("evaluate", "Run a batch evaluation from a JSON config");
    evaluate->add_option("--config", ea.config, "Config file")->required()->check(CLI::ExistingFile);
    evaluate->add_option("--workers", ea.workers, "Worker threads (overrides config and PURIKIT_WORKERS)");
    evaluate->add_option("--out", ea.out, "Report path, '-' for standard output");
    evaluate->add_option("--format", ea.format, "Report format")->check(CLI::IsMember({"csv", "json"}));

    int q = 75;
    auto* qt = app.add_subcommand("quant-tables", "Print the quantization tables for a quality factor");
    qt->add_option("--q", q, "Quality 1-100")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (*transform)
            return run_transform(ta);
        if (*pur)
            return run_purify(pa);
        if (*metric)
            return run_metric(ma);
        if (*perturb)
            return run_perturb(pe);
        if (*evaluate)
            return run_evaluate(ea);
        if (*qt)
            return run_quant_tables(q);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
