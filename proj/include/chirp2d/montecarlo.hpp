#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "chirp2d/estimator.hpp"
#include "chirp2d/signal_model.hpp"

namespace chirp2d {

enum class EstimatorKind { proposed, periodogram };

struct McPlan {
    ModelSpec spec; ///< true parameters; spec.noise.sigma and seed are ignored
    std::vector<std::pair<Index, Index>> sizes;
    std::vector<double> sigmas;
    int replications = 200;
    std::uint64_t base_seed = 1;
    EstimatorKind estimator = EstimatorKind::proposed;

    void validate() const;
};

/// Parameter names in table order.
inline constexpr std::string_view kParameterNames[6] = {"A", "B", "alpha", "beta", "gamma", "delta"};

/// Statistics of one parameter of one component in one (size, sigma) cell.
/// avar is the asymptotic variance at the true parameters and the true sigma^2.
struct McRow {
    Index size_m = 0;
    Index size_n = 0;
    double sigma = 0.0;
    int component = 1; ///< 1-based
    std::string parameter;
    double average = 0.0;
    double bias = 0.0;
    double mse = 0.0;
    double avar = 0.0;
    int failures = 0; ///< replications of this cell that threw

    friend bool operator==(const McRow&, const McRow&) = default;
};

struct McReport {
    std::vector<McRow> rows;

    friend bool operator==(const McReport&, const McReport&) = default;
};

/// Seed of one replication: derive_seed(base, {size_index, sigma_index, rep}).
[[nodiscard]] std::uint64_t replication_seed(std::uint64_t base, std::size_t size_index, std::size_t sigma_index,
                                             int replication) noexcept;

/// Replicated synthesize-and-fit experiment. Replications run in parallel;
/// accumulation happens in replication order, so the report depends only on
/// the plan. Failed replications are counted per cell, never fatal.
[[nodiscard]] McReport run(const McPlan& plan);

/// Same, with explicit estimator settings (p is overridden by the number of
/// true components).
[[nodiscard]] McReport run(const McPlan& plan, EstimatorConfig cfg);

/// Custom fitting step: one estimated component per true component, in
/// order. Exceptions count as failed replications.
using ReplicationFit = std::function<std::vector<ChirpComponent>(const SignalGrid&)>;

/// Same experiment with a caller-supplied fit.
[[nodiscard]] McReport run(const McPlan& plan, const ReplicationFit& fit);

enum class ReportFormat { csv, json, markdown };

/// CSV: size_m,size_n,sigma,component,parameter,average,bias,mse,avar,failures.
/// JSON mirrors the same fields. Markdown lays each (size, component) block
/// out as Avg/Bias/MSE/Avar rows per sigma with one column per parameter.
[[nodiscard]] std::string render(const McReport& report, ReportFormat format);

/// Parses the CSV produced by render(). Numbers are written with 17
/// significant digits, so parse(render(r)) == r.
[[nodiscard]] McReport parse_csv(std::string_view csv);

} // namespace chirp2d
