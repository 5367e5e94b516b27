#include "chirp2d/estimator.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <tbb/parallel_invoke.h>

#include "chirp2d/errors.hpp"
#include "chirp2d/summation.hpp"

namespace chirp2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Accumulates W^T W and W^T y over the MN x 2 chirp regressor.
struct RegressorSums {
    double cc = 0.0;
    double cs = 0.0;
    double ss = 0.0;
    double cy = 0.0;
    double sy = 0.0;
};

RegressorSums regressor_sums(Index M, Index N, NonlinearPair cp, NonlinearPair rp, const Eigen::MatrixXd* y)
{
    CompensatedSum cc, cs, ss, cy, sy;
    for (Index j = 0; j < N; ++j) {
        const auto dn = static_cast<double>(j + 1);
        const double row_phase = rp.freq * dn + rp.rate * dn * dn;
        for (Index i = 0; i < M; ++i) {
            const auto dm = static_cast<double>(i + 1);
            const double phi = cp.freq * dm + cp.rate * dm * dm + row_phase;
            const double c = std::cos(phi);
            const double s = std::sin(phi);
            cc.add(c * c);
            cs.add(c * s);
            ss.add(s * s);
            if (y != nullptr) {
                cy.add(c * (*y)(i, j));
                sy.add(s * (*y)(i, j));
            }
        }
    }
    return {cc.value(), cs.value(), ss.value(), cy.value(), sy.value()};
}

double guarded_det(const RegressorSums& s, Index M, Index N)
{
    const double det = s.cc * s.ss - s.cs * s.cs;
    const auto mn = static_cast<double>(M * N);
    if (!(det > kDegenerateRelTol * mn * mn)) {
        throw DegenerateBasis("2-D chirp regressor W^T W is numerically singular");
    }
    return det;
}

constexpr double kHalfPi = 0.5 * std::numbers::pi;

NonlinearPair mirror(NonlinearPair p) noexcept { return {std::numbers::pi - p.freq, std::numbers::pi - p.rate}; }

// Energy captured by the least-squares fit on W at the given pairs.
double explained_energy(const SignalGrid& grid, NonlinearPair cp, NonlinearPair rp)
{
    const RegressorSums s = regressor_sums(grid.rows(), grid.cols(), cp, rp, &grid.matrix());
    const double det = s.cc * s.ss - s.cs * s.cs;
    const auto mn = static_cast<double>(grid.size());
    if (!(det > kDegenerateRelTol * mn * mn)) {
        return 0.0;
    }
    return (s.ss * s.cy * s.cy - 2.0 * s.cs * s.cy * s.sy + s.cc * s.sy * s.sy) / det;
}

StandardErrors standard_errors(const ComponentEstimate& est, double sigma2, Index M, Index N)
{
    StandardErrors se{};
    const auto& c = est.component;
    if (est.power > 0.0) {
        const AsymptoticCovariance cov = asymptotic_covariance(c, sigma2, M, N);
        se[0] = std::sqrt(cov.var_A);
        se[1] = std::sqrt(cov.var_B);
        se[2] = std::sqrt(cov.var_alpha);
        se[3] = std::sqrt(cov.var_beta);
        se[4] = std::sqrt(cov.var_gamma);
        se[5] = std::sqrt(cov.var_delta);
    } else {
        se.fill(kNaN);
    }
    return se;
}

} // namespace

void EstimatorConfig::validate() const
{
    if (p < 1) {
        throw std::invalid_argument("EstimatorConfig: p must be at least 1");
    }
    if (!(order_threshold > 0.0 && order_threshold < 1.0)) {
        throw std::invalid_argument("EstimatorConfig: order_threshold must lie in (0, 1)");
    }
    if (amplitude_bound && !(*amplitude_bound > 0.0)) {
        throw std::invalid_argument("EstimatorConfig: amplitude bound must be positive");
    }
    if (column_grid) {
        column_grid->validate();
    }
    if (row_grid) {
        row_grid->validate();
    }
    refine.validate();
}

AsymptoticCovariance asymptotic_covariance(const ChirpComponent& c, double sigma2, Index M, Index N)
{
    if (!(sigma2 >= 0.0)) {
        throw std::invalid_argument("asymptotic_covariance: sigma2 must be nonnegative");
    }
    if (M < 1 || N < 1) {
        throw std::invalid_argument("asymptotic_covariance: sizes must be positive");
    }
    const double rho = c.power();
    if (!(rho > 0.0)) {
        throw ZeroPower("asymptotic_covariance: component has zero power");
    }
    const auto m = static_cast<double>(M);
    const auto n = static_cast<double>(N);
    // 2 sigma^2 (2 / rho) [[96, -90], [-90, 90]] scaled by the D1 / D2 rates.
    const double k = 4.0 * sigma2 / rho;
    AsymptoticCovariance cov;
    const double mn = m * n;
    cov.var_A = 2.0 * sigma2 * (c.A * c.A + 17.0 * c.B * c.B) / (rho * mn);
    cov.var_B = 2.0 * sigma2 * (17.0 * c.A * c.A + c.B * c.B) / (rho * mn);
    cov.cov_A_B = -32.0 * sigma2 * c.A * c.B / (rho * mn);
    cov.var_alpha = k * 96.0 / (std::pow(m, 3) * n);
    cov.var_beta = k * 90.0 / (std::pow(m, 5) * n);
    cov.cov_alpha_beta = -k * 90.0 / (std::pow(m, 4) * n);
    cov.var_gamma = k * 96.0 / (m * std::pow(n, 3));
    cov.var_delta = k * 90.0 / (m * std::pow(n, 5));
    cov.cov_gamma_delta = -k * 90.0 / (m * std::pow(n, 4));
    return cov;
}

std::pair<double, double> estimate_linear(const SignalGrid& grid, NonlinearPair column_pair, NonlinearPair row_pair)
{
    if (!in_domain(column_pair) || !in_domain(row_pair)) {
        throw std::invalid_argument("estimate_linear: pairs must lie in (0, pi)^2");
    }
    const Index M = grid.rows();
    const Index N = grid.cols();
    const RegressorSums s = regressor_sums(M, N, column_pair, row_pair, &grid.matrix());
    const double det = guarded_det(s, M, N);
    const double a = (s.ss * s.cy - s.cs * s.sy) / det;
    const double b = (s.cc * s.sy - s.cs * s.cy) / det;
    return {a, b};
}

double sigma2_hat(const SignalGrid& residual)
{
    CompensatedSum s;
    const auto& v = residual.matrix();
    for (Index j = 0; j < v.cols(); ++j) {
        for (Index i = 0; i < v.rows(); ++i) {
            s.add(v(i, j) * v(i, j));
        }
    }
    return s.value() / static_cast<double>(v.size());
}

OneComponentFit estimate_one(const SignalGrid& grid, const EstimatorConfig& cfg)
{
    cfg.validate();
    if (grid.rows() < 8 || grid.cols() < 8) {
        throw std::invalid_argument("estimate_one: grid must be at least 8x8");
    }
    const GridPlan col_plan = cfg.column_grid.value_or(GridPlan::for_length(grid.rows()));
    const GridPlan row_plan = cfg.row_grid.value_or(GridPlan::for_length(grid.cols()));

    OneComponentFit fit;
    tbb::parallel_invoke(
        [&] {
            const AxisCriterion crit(grid, Axis::columns, cfg.criterion);
            fit.trace.columns = solve_pair(crit, col_plan, cfg.refine);
        },
        [&] {
            const AxisCriterion crit(grid, Axis::rows, cfg.criterion);
            fit.trace.rows = solve_pair(crit, row_plan, cfg.refine);
        });

    // R1, R2, I1 and I2 all take equal values at (f, r) and (pi - f, pi - r):
    // the phase changes sign modulo 2 pi and the cos/sin span is unchanged.
    // The column pair is put on the rate <= pi/2 sheet; of the two row
    // candidates, the one whose 2-D regression explains more energy is kept
    // (the other describes a different 2-D chirp).
    NonlinearPair cp = fit.trace.columns.pair;
    if (cp.rate > kHalfPi) {
        cp = mirror(cp);
        fit.trace.column_mirrored = true;
    }
    NonlinearPair rp = fit.trace.rows.pair;
    if (explained_energy(grid, cp, mirror(rp)) > explained_energy(grid, cp, rp)) {
        rp = mirror(rp);
        fit.trace.row_mirrored = true;
    }
    const auto [a, b] = estimate_linear(grid, cp, rp);

    ComponentEstimate& est = fit.estimate;
    est.component = {a, b, cp.freq, cp.rate, rp.freq, rp.rate};
    est.power = est.component.power();
    est.flat = fit.trace.columns.flat || fit.trace.rows.flat;
    if (cfg.amplitude_bound) {
        est.exceeds_bound = std::abs(a) >= *cfg.amplitude_bound || std::abs(b) >= *cfg.amplitude_bound;
    }
    return fit;
}

FitResult sequential_estimate(const SignalGrid& grid, const EstimatorConfig& cfg)
{
    cfg.validate();
    FitResult result;
    SignalGrid current = grid;
    for (int k = 0; k < cfg.p; ++k) {
        OneComponentFit fit = estimate_one(current, cfg);
        current = subtract(current, {fit.estimate.component});
        result.components.push_back(fit.estimate);
        result.trace.push_back(std::move(fit.trace));
    }
    result.sigma2_hat = sigma2_hat(current);

    const double first_power = result.components.front().power;
    for (std::size_t k = 0; k < result.components.size(); ++k) {
        ComponentEstimate& est = result.components[k];
        est.likely_overfit = k > 0 && est.power < cfg.order_threshold * first_power;
        est.se = standard_errors(est, result.sigma2_hat, grid.rows(), grid.cols());
    }
    result.residual = std::move(current);
    return result;
}

int detect_order(const SignalGrid& grid, EstimatorConfig cfg, int max_p)
{
    if (max_p < 1) {
        throw std::invalid_argument("detect_order: max_p must be at least 1");
    }
    cfg.p = max_p;
    const FitResult fit = sequential_estimate(grid, cfg);
    const ComponentEstimate& first = fit.components.front();
    if (first.flat || !(first.power > 0.0)) {
        return 0;
    }
    int order = 1;
    for (std::size_t k = 1; k < fit.components.size(); ++k) {
        if (fit.components[k].power >= cfg.order_threshold * first.power) {
            order = static_cast<int>(k) + 1;
        }
    }
    return order;
}

} // namespace chirp2d
