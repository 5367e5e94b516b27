#include "chirp2d/montecarlo.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "chirp2d/errors.hpp"
#include "chirp2d/rng.hpp"
#include "chirp2d/summation.hpp"

namespace chirp2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr const char* kCsvHeader = "size_m,size_n,sigma,component,parameter,average,bias,mse,avar,failures";

double parameter(const ChirpComponent& c, std::size_t j)
{
    switch (j) {
    case 0: return c.A;
    case 1: return c.B;
    case 2: return c.alpha;
    case 3: return c.beta;
    case 4: return c.gamma;
    default: return c.delta;
    }
}

std::array<double, 6> avar_row(const ChirpComponent& truth, double sigma, Index M, Index N)
{
    const double s2 = sigma * sigma;
    if (s2 == 0.0) {
        return {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
    }
    if (!(truth.power() > 0.0)) {
        return {kNaN, kNaN, kNaN, kNaN, kNaN, kNaN};
    }
    const AsymptoticCovariance cov = asymptotic_covariance(truth, s2, M, N);
    return {cov.var_A, cov.var_B, cov.var_alpha, cov.var_beta, cov.var_gamma, cov.var_delta};
}

std::string number(double x)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string sci(double x)
{
    if (!std::isfinite(x)) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2e", x);
    return buf;
}

std::string fixed4(double x)
{
    if (!std::isfinite(x)) {
        return "n/a";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", x);
    return buf;
}

nlohmann::ordered_json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr); }

std::string render_csv(const McReport& report)
{
    std::string out = std::string(kCsvHeader) + "\n";
    for (const McRow& r : report.rows) {
        out += std::to_string(r.size_m) + "," + std::to_string(r.size_n) + "," + number(r.sigma) + ","
            + std::to_string(r.component) + "," + r.parameter + "," + number(r.average) + "," + number(r.bias)
            + "," + number(r.mse) + "," + number(r.avar) + "," + std::to_string(r.failures) + "\n";
    }
    return out;
}

std::string render_json(const McReport& report)
{
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const McRow& r : report.rows) {
        rows.push_back({{"size_m", r.size_m},
                        {"size_n", r.size_n},
                        {"sigma", r.sigma},
                        {"component", r.component},
                        {"parameter", r.parameter},
                        {"average", finite_or_null(r.average)},
                        {"bias", finite_or_null(r.bias)},
                        {"mse", finite_or_null(r.mse)},
                        {"avar", finite_or_null(r.avar)},
                        {"failures", r.failures}});
    }
    return nlohmann::ordered_json{{"rows", rows}}.dump(2) + "\n";
}

std::string render_markdown(const McReport& report)
{
    if (report.rows.empty()) {
        return "_No Monte-Carlo cells: the report is empty._\n";
    }
    // (M, N, component) -> sigma -> parameter -> row, in first-seen order.
    struct Block {
        Index m, n;
        int component;
        std::vector<double> sigmas;
        std::map<double, std::vector<const McRow*>> by_sigma;
    };
    std::vector<Block> blocks;
    for (const McRow& r : report.rows) {
        auto it = std::find_if(blocks.begin(), blocks.end(), [&](const Block& b) {
            return b.m == r.size_m && b.n == r.size_n && b.component == r.component;
        });
        if (it == blocks.end()) {
            blocks.push_back({r.size_m, r.size_n, r.component, {}, {}});
            it = std::prev(blocks.end());
        }
        auto& rows = it->by_sigma[r.sigma];
        if (rows.empty()) {
            it->sigmas.push_back(r.sigma);
        }
        rows.push_back(&r);
    }

    std::ostringstream md;
    for (const Block& b : blocks) {
        md << "### M = " << b.m << ", N = " << b.n << ", component " << b.component << "\n\n";
        const auto& first = b.by_sigma.at(b.sigmas.front());
        md << "| sigma | |";
        for (const McRow* r : first) {
            md << " " << r->parameter << " |";
        }
        md << "\n|---|---|";
        for (std::size_t k = 0; k < first.size(); ++k) {
            md << "---|";
        }
        md << "\n";
        std::vector<std::string> notes;
        for (double sigma : b.sigmas) {
            const auto& rows = b.by_sigma.at(sigma);
            char label[32];
            std::snprintf(label, sizeof label, "%.2f", sigma);
            auto line = [&](const char* name, auto&& field, bool with_sigma) {
                md << "| " << (with_sigma ? label : "") << " | " << name << " |";
                for (const McRow* r : rows) {
                    md << " " << field(*r) << " |";
                }
                md << "\n";
            };
            line("Avg", [](const McRow& r) { return fixed4(r.average); }, true);
            line("Bias", [](const McRow& r) { return sci(r.bias); }, false);
            line("MSE", [](const McRow& r) { return sci(r.mse); }, false);
            line("Avar", [](const McRow& r) { return sci(r.avar); }, false);
            if (rows.front()->failures > 0) {
                notes.push_back("sigma " + std::string(label) + ": " + std::to_string(rows.front()->failures)
                                + " failed replication(s)");
            }
            for (const McRow* r : rows) {
                if (std::isfinite(r->avar) && r->avar > 0.0 && r->mse > 5.0 * r->avar) {
                    notes.push_back("sigma " + std::string(label) + ": MSE of " + r->parameter
                                    + " exceeds 5x Avar");
                }
            }
        }
        for (const auto& note : notes) {
            md << "\n> " << note;
        }
        md << (notes.empty() ? "\n" : "\n\n");
    }
    return md.str();
}

} // namespace

void McPlan::validate() const
{
    if (replications < 1) {
        throw std::invalid_argument("McPlan: replications must be at least 1");
    }
    if (sizes.empty() || sigmas.empty()) {
        throw std::invalid_argument("McPlan: sizes and sigmas must be nonempty");
    }
    for (double s : sigmas) {
        if (!(s >= 0.0) || !std::isfinite(s)) {
            throw std::invalid_argument("McPlan: sigmas must be finite and nonnegative");
        }
    }
    for (const auto& [m, n] : sizes) {
        if (m < 8 || n < 8) {
            throw std::invalid_argument("McPlan: sizes must be at least 8x8");
        }
    }
    ModelSpec probe = spec;
    probe.noise = {};
    check_model(probe);
}

std::uint64_t replication_seed(std::uint64_t base, std::size_t size_index, std::size_t sigma_index,
                               int replication) noexcept
{
    return derive_seed(base, {size_index, sigma_index, static_cast<std::uint64_t>(replication)});
}

McReport run(const McPlan& plan) { return run(plan, EstimatorConfig{}); }

McReport run(const McPlan& plan, EstimatorConfig cfg)
{
    cfg.p = static_cast<int>(plan.spec.components.size());
    cfg.criterion = plan.estimator == EstimatorKind::proposed ? CriterionKind::residual : CriterionKind::periodogram;
    cfg.validate();
    return run(plan, [&cfg](const SignalGrid& grid) {
        const FitResult fit = sequential_estimate(grid, cfg);
        std::vector<ChirpComponent> comps;
        for (const auto& c : fit.components) {
            comps.push_back(c.component);
        }
        return comps;
    });
}

McReport run(const McPlan& plan, const ReplicationFit& fit)
{
    plan.validate();

    const auto& truth = plan.spec.components;
    const auto reps = static_cast<std::size_t>(plan.replications);
    McReport report;

    for (std::size_t si = 0; si < plan.sizes.size(); ++si) {
        const auto [M, N] = plan.sizes[si];
        for (std::size_t gi = 0; gi < plan.sigmas.size(); ++gi) {
            const double sigma = plan.sigmas[gi];
            std::vector<std::optional<std::vector<ChirpComponent>>> fits(reps);

            tbb::parallel_for(tbb::blocked_range<std::size_t>(0, reps), [&](const tbb::blocked_range<std::size_t>& r) {
                for (std::size_t rep = r.begin(); rep != r.end(); ++rep) {
                    ModelSpec spec = plan.spec;
                    spec.noise = {sigma, replication_seed(plan.base_seed, si, gi, static_cast<int>(rep)),
                                  NoiseDistribution::gaussian};
                    try {
                        std::vector<ChirpComponent> comps = fit(synthesize(spec, M, N));
                        if (comps.size() != truth.size()) {
                            throw Error("fit returned the wrong number of components");
                        }
                        fits[rep] = std::move(comps);
                    } catch (const std::exception&) {
                        fits[rep].reset();
                    }
                }
            });

            int failures = 0;
            for (const auto& f : fits) {
                failures += f ? 0 : 1;
            }
            const double ok = static_cast<double>(static_cast<int>(reps) - failures);

            for (std::size_t k = 0; k < truth.size(); ++k) {
                const auto avar = avar_row(truth[k], sigma, M, N);
                for (std::size_t j = 0; j < 6; ++j) {
                    const double true_value = parameter(truth[k], j);
                    CompensatedSum sum;
                    CompensatedSum sq;
                    for (const auto& f : fits) {
                        if (f) {
                            const double v = parameter((*f)[k], j);
                            sum.add(v);
                            sq.add((v - true_value) * (v - true_value));
                        }
                    }
                    McRow row;
                    row.size_m = M;
                    row.size_n = N;
                    row.sigma = sigma;
                    row.component = static_cast<int>(k) + 1;
                    row.parameter = std::string(kParameterNames[j]);
                    row.average = ok > 0 ? sum.value() / ok : kNaN;
                    row.bias = row.average - true_value;
                    row.mse = ok > 0 ? sq.value() / ok : kNaN;
                    row.avar = avar[j];
                    row.failures = failures;
                    report.rows.push_back(std::move(row));
                }
            }
        }
    }
    return report;
}

std::string render(const McReport& report, ReportFormat format)
{
    switch (format) {
    case ReportFormat::csv: return render_csv(report);
    case ReportFormat::json: return render_json(report);
    case ReportFormat::markdown: return render_markdown(report);
    }
    throw std::invalid_argument("render: unknown format");
}

McReport parse_csv(std::string_view csv)
{
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw FormatError("Monte-Carlo CSV, line 1: unexpected header");
    }
    McReport report;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::istringstream fields(line);
        std::string cell;
        while (std::getline(fields, cell, ',')) {
            f.push_back(cell);
        }
        if (f.size() != 10) {
            throw FormatError("Monte-Carlo CSV, line " + std::to_string(line_no) + ": expected 10 fields, got "
                              + std::to_string(f.size()));
        }
        auto real = [&](const std::string& s) {
            char* end = nullptr;
            const double v = std::strtod(s.c_str(), &end);
            if (end == s.c_str() || *end != '\0') {
                throw FormatError("Monte-Carlo CSV, line " + std::to_string(line_no) + ": bad number '" + s + "'");
            }
            return v;
        };
        auto integer = [&](const std::string& s) {
            char* end = nullptr;
            const long long v = std::strtoll(s.c_str(), &end, 10);
            if (end == s.c_str() || *end != '\0') {
                throw FormatError("Monte-Carlo CSV, line " + std::to_string(line_no) + ": bad integer '" + s + "'");
            }
            return v;
        };
        McRow row;
        row.size_m = static_cast<Index>(integer(f[0]));
        row.size_n = static_cast<Index>(integer(f[1]));
        row.sigma = real(f[2]);
        row.component = static_cast<int>(integer(f[3]));
        row.parameter = f[4];
        row.average = real(f[5]);
        row.bias = real(f[6]);
        row.mse = real(f[7]);
        row.avar = real(f[8]);
        row.failures = static_cast<int>(integer(f[9]));
        report.rows.push_back(std::move(row));
    }
    return report;
}

} // namespace chirp2d
