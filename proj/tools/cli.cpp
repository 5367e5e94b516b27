#include "cli.hpp"

#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <tbb/global_control.h>

#include "chirp2d/errors.hpp"
#include "chirp2d/estimator.hpp"
#include "chirp2d/image_io.hpp"
#include "chirp2d/montecarlo.hpp"
#include "chirp2d/serialization.hpp"
#include "chirp2d/signal_model.hpp"

namespace chirp2d::cli {

namespace {

struct Size {
    Index m = 0;
    Index n = 0;
};

Size parse_size(const std::string& text)
{
    const auto x = text.find_first_of("xX");
    Size s;
    try {
        std::size_t used = 0;
        s.m = std::stol(text.substr(0, x), &used);
        if (x == std::string::npos || used != x) {
            throw std::invalid_argument(text);
        }
        const std::string tail = text.substr(x + 1);
        s.n = std::stol(tail, &used);
        if (used != tail.size()) {
            throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--size", "expected MxN, got '" + text + "'");
    }
    if (s.m < 8 || s.n < 8) {
        throw CLI::ValidationError("--size", "both dimensions must be at least 8, got '" + text + "'");
    }
    return s;
}

const CLI::Validator kSizeCheck(
    [](std::string& v) {
        try {
            parse_size(v);
        } catch (const CLI::ValidationError& e) {
            return std::string(e.what());
        }
        return std::string();
    },
    "MxN");

ScaleMap parse_scale(const std::string& text)
{
    const auto comma = text.find(',');
    try {
        if (comma == std::string::npos) {
            throw std::invalid_argument(text);
        }
        ScaleMap s{std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
        if (s.valid()) {
            return s;
        }
    } catch (const std::logic_error&) {
    }
    throw CLI::ValidationError("--scale", "expected LO,HI with LO < HI, got '" + text + "'");
}

void emit(std::ostream& out, const std::string& path, const std::string& text)
{
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_file(path, text);
    }
}

SignalGrid load_grid(const std::string& path, const ScaleMap& scale)
{
    const std::string bytes = read_file(path);
    try {
        if (bytes.rfind("CHRP2DGR", 0) == 0) {
            return grid_read(bytes);
        }
        if (!bytes.empty() && bytes[0] == 'P') {
            return image_to_grid(pgm_read(bytes), scale);
        }
        throw FormatError("neither a grid file nor a PGM image");
    } catch (const FormatError& e) {
        throw FormatError("'" + path + "': " + e.what());
    }
}

std::string fmt(const char* spec, double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

/// Five-component texture of the demo.
std::vector<ChirpComponent> texture_truth()
{
    return {{6.0, 6.0, 2.75, 0.05, 2.5, 0.075},
            {2.0, 2.0, 1.75, 0.01, 1.5, 0.025},
            {1.0, 1.0, 1.5, 0.15, 2.0, 0.25},
            {0.5, 0.5, 1.75, 0.75, 2.75, 0.275},
            {0.1, 0.1, 1.95, 0.95, 2.95, 0.295}};
}

std::string texture_table(const std::vector<ChirpComponent>& truth, const FitResult& fit)
{
    std::string t = "| k | | A | B | alpha | beta | gamma | delta | power |\n|---|---|---|---|---|---|---|---|---|\n";
    auto row = [&](std::size_t k, const char* label, const ChirpComponent& c, std::string power) {
        t += "| " + std::to_string(k + 1) + " | " + label;
        for (double v : {c.A, c.B, c.alpha, c.beta, c.gamma, c.delta}) {
            t += " | " + fmt("%.4f", v);
        }
        t += " | " + power + " |\n";
    };
    for (std::size_t k = 0; k < truth.size(); ++k) {
        row(k, "true", truth[k], fmt("%.4f", truth[k].power()));
        if (k < fit.components.size()) {
            const auto& e = fit.components[k];
            row(k, e.likely_overfit ? "est*" : "est", e.component, fmt("%.4f", e.power));
        }
    }
    t += "\nsigma2_hat = " + fmt("%.4f", fit.sigma2_hat) + "\n";
    bool any_overfit = false;
    for (const auto& e : fit.components) {
        any_overfit = any_overfit || e.likely_overfit;
    }
    if (any_overfit) {
        t += "* stage power below the order threshold; the component is likely not present\n";
    }
    return t;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Two-dimensional chirp estimation toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    int threads = 0;
    app.add_option("--threads", threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Synthesize a grid from a model document");
    std::string sim_model;
    std::string sim_size = "25x25";
    std::optional<double> sim_sigma;
    std::optional<std::uint64_t> sim_seed;
    std::string sim_out;
    std::string sim_pgm;
    sim->add_option("--model", sim_model, "Model JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--size", sim_size, "Grid size MxN")->check(kSizeCheck);
    sim->add_option("--sigma", sim_sigma, "Noise standard deviation (overrides the model)")
        ->check(CLI::NonNegativeNumber);
    sim->add_option("--seed", sim_seed, "Noise seed (overrides the model)");
    sim->add_option("--out", sim_out, "Output grid file")->required();
    sim->add_option("--pgm", sim_pgm, "Also write an auto-scaled PGM image");

    // estimate
    auto* est = app.add_subcommand("estimate", "Fit chirp components to a grid file or PGM image");
    std::string est_input;
    int est_p = 1;
    std::string est_criterion = "residual";
    std::string est_scale = "-1,1";
    std::string est_out;
    std::string est_format = "json";
    est->add_option("--input", est_input, "Grid file or binary PGM")->required()->check(CLI::ExistingFile);
    est->add_option("--p", est_p, "Number of components")->check(CLI::Range(1, 64));
    est->add_option("--criterion", est_criterion, "residual or periodogram")
        ->check(CLI::IsMember({"residual", "periodogram"}));
    est->add_option("--scale", est_scale, "Gray-level map LO,HI for PGM input");
    est->add_option("--format", est_format, "Output format")->check(CLI::IsMember({"json"}));
    est->add_option("--out", est_out, "Output file (default stdout)");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "Run a replicated bias/MSE experiment");
    std::string mc_plan;
    std::string mc_format = "csv";
    std::string mc_out;
    std::optional<std::uint64_t> mc_seed;
    mc->add_option("--plan", mc_plan, "Plan JSON")->required()->check(CLI::ExistingFile);
    mc->add_option("--format", mc_format, "csv, json or markdown")->check(CLI::IsMember({"csv", "json", "markdown"}));
    mc->add_option("--seed", mc_seed, "Base seed (overrides the plan)");
    mc->add_option("--out", mc_out, "Output file (default stdout)");

    // texture-demo
    auto* tex = app.add_subcommand("texture-demo", "Synthesize, contaminate and re-fit a five-component texture");
    double tex_sigma = 10.0;
    std::string tex_size = "100x100";
    std::uint64_t tex_seed = 1;
    int tex_p = 5;
    std::string tex_out = ".";
    tex->add_option("--sigma", tex_sigma, "Noise standard deviation")->check(CLI::NonNegativeNumber);
    tex->add_option("--size", tex_size, "Grid size MxN")->check(kSizeCheck);
    tex->add_option("--seed", tex_seed, "Noise seed");
    tex->add_option("--p", tex_p, "Components to extract")->check(CLI::Range(1, 64));
    tex->add_option("--out", tex_out, "Directory for original.pgm, noisy.pgm, estimated.pgm");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    std::unique_ptr<tbb::global_control> pool;
    if (threads > 0) {
        pool = std::make_unique<tbb::global_control>(tbb::global_control::max_allowed_parallelism,
                                                     static_cast<std::size_t>(threads));
    }

    try {
        if (*sim) {
            ModelSpec spec = model_from_json(read_file(sim_model));
            if (sim_sigma) {
                spec.noise.sigma = *sim_sigma;
            }
            if (sim_seed) {
                spec.noise.seed = *sim_seed;
            }
            const Size s = parse_size(sim_size);
            for (const auto& w : check_model(spec)) {
                err << "warning: " << w << "\n";
            }
            const SignalGrid grid = synthesize(spec, s.m, s.n);
            write_file(sim_out, grid_write(grid));
            if (!sim_pgm.empty()) {
                const GridImage img = grid_to_image(grid);
                write_file(sim_pgm, pgm_write(img.image));
                err << "pgm scale: " << fmt("%.17g", img.scale.lo) << "," << fmt("%.17g", img.scale.hi) << "\n";
            }
        } else if (*est) {
            EstimatorConfig cfg;
            cfg.p = est_p;
            cfg.criterion = est_criterion == "residual" ? CriterionKind::residual : CriterionKind::periodogram;
            const SignalGrid grid = load_grid(est_input, parse_scale(est_scale));
            emit(out, est_out, fit_to_json(sequential_estimate(grid, cfg)));
        } else if (*mc) {
            McPlan plan = plan_from_json(read_file(mc_plan));
            if (mc_seed) {
                plan.base_seed = *mc_seed;
            }
            const ReportFormat format = mc_format == "csv"    ? ReportFormat::csv
                                        : mc_format == "json" ? ReportFormat::json
                                                              : ReportFormat::markdown;
            emit(out, mc_out, render(run(plan), format));
        } else if (*tex) {
            const Size s = parse_size(tex_size);
            ModelSpec spec{texture_truth(), {tex_sigma, tex_seed, NoiseDistribution::gaussian}};
            const SignalGrid clean = render(spec.components, s.m, s.n);
            const SignalGrid noisy = synthesize(spec, s.m, s.n);
            EstimatorConfig cfg;
            cfg.p = tex_p;
            const FitResult fit = sequential_estimate(noisy, cfg);
            std::vector<ChirpComponent> fitted;
            for (const auto& c : fit.components) {
                fitted.push_back(c.component);
            }
            // Original and estimate share the original's gray scale so they can be compared.
            const GridImage original = grid_to_image(clean);
            const std::string dir = tex_out.empty() ? "." : tex_out;
            write_file(dir + "/original.pgm", pgm_write(original.image));
            write_file(dir + "/noisy.pgm", pgm_write(grid_to_image(noisy).image));
            write_file(dir + "/estimated.pgm",
                       pgm_write(grid_to_image(render(fitted, s.m, s.n), original.scale).image));
            out << texture_table(spec.components, fit);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace chirp2d::cli
