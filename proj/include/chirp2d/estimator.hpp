#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "chirp2d/criterion.hpp"
#include "chirp2d/optimizer.hpp"
#include "chirp2d/signal_model.hpp"

namespace chirp2d {

struct EstimatorConfig {
    int p = 1; ///< number of components to extract
    /// Coarse grids for the column (alpha, beta) and row (gamma, delta)
    /// searches; GridPlan::for_length(M) / for_length(N) when unset.
    std::optional<GridPlan> column_grid;
    std::optional<GridPlan> row_grid;
    RefineSettings refine;
    /// residual: minimize R1/R2 (the reduced least-squares criteria).
    /// periodogram: maximize I1/I2 (approximate least squares).
    CriterionKind criterion = CriterionKind::residual;
    /// Optional bound K on |A|, |B|; estimates beyond it are flagged, not rejected.
    std::optional<double> amplitude_bound;
    /// A stage whose power falls below this fraction of the first stage's
    /// power is flagged as a likely overfit.
    double order_threshold = 0.01;

    void validate() const;
};

/// Standard errors in parameter order (A, B, alpha, beta, gamma, delta).
using StandardErrors = std::array<double, 6>;

struct ComponentEstimate {
    ChirpComponent component;
    StandardErrors se{};
    double power = 0.0;
    bool flat = false;          ///< a coarse search saw a flat criterion
    bool likely_overfit = false; ///< power below order_threshold x stage-1 power
    bool exceeds_bound = false;  ///< |A| or |B| >= amplitude_bound
};

struct StageTrace {
    OptimumReport columns;
    OptimumReport rows;
    /// The reported pair is (pi - f, pi - r) of the optimizer's pair.
    bool column_mirrored = false;
    bool row_mirrored = false;
};

struct FitResult {
    std::vector<ComponentEstimate> components;
    double sigma2_hat = 0.0;
    SignalGrid residual;
    std::vector<StageTrace> trace;
};

/// Asymptotic covariance blocks at finite (M, N):
///   [alpha, beta] ~ 2 sigma^2 D1 Sigma D1,  [gamma, delta] ~ 2 sigma^2 D2 Sigma D2,
/// Sigma = (2/rho) [[96, -90], [-90, 90]], rho = A^2 + B^2,
/// D1 = diag(M^-3/2 N^-1/2, M^-5/2 N^-1/2), D2 = diag(M^-1/2 N^-3/2, M^-1/2 N^-5/2).
/// The amplitudes come from the same full-model information matrix:
///   var A = 2 sigma^2 (A^2 + 17 B^2) / (rho M N),  var B = 2 sigma^2 (17 A^2 + B^2) / (rho M N),
///   cov(A, B) = -32 sigma^2 A B / (rho M N).
/// The cross-block between the column and row pairs vanishes asymptotically.
struct AsymptoticCovariance {
    double var_A = 0.0;
    double var_B = 0.0;
    double cov_A_B = 0.0;
    double var_alpha = 0.0;
    double var_beta = 0.0;
    double cov_alpha_beta = 0.0;
    double var_gamma = 0.0;
    double var_delta = 0.0;
    double cov_gamma_delta = 0.0;
};

/// Throws ZeroPower if A^2 + B^2 == 0, std::invalid_argument on sigma2 < 0 or
/// nonpositive sizes.
[[nodiscard]] AsymptoticCovariance asymptotic_covariance(const ChirpComponent& c, double sigma2, Index M, Index N);

/// Least-squares amplitudes on the MN x 2 regressor W with rows
/// (cos phi(m,n), sin phi(m,n)), stacked column-major (m fastest).
[[nodiscard]] std::pair<double, double> estimate_linear(const SignalGrid& grid, NonlinearPair column_pair,
                                                        NonlinearPair row_pair);

/// Mean of squared entries.
[[nodiscard]] double sigma2_hat(const SignalGrid& residual);

struct OneComponentFit {
    ComponentEstimate estimate;
    StageTrace trace;
};

/// One component: (alpha, beta) from the column criterion, (gamma, delta)
/// from the row criterion, then (A, B) by linear regression.
///
/// The reduced criteria cannot tell (f, r) from (pi - f, pi - r), and the
/// full model is unchanged by mirroring all four nonlinear parameters and
/// negating B. Estimates are reported with beta <= pi/2; the row pair's
/// mirror is chosen by the 2-D regression fit. Standard errors
/// are left at zero; sequential_estimate fills them from the final residual.
/// Requires a grid of at least 8 x 8.
[[nodiscard]] OneComponentFit estimate_one(const SignalGrid& grid, const EstimatorConfig& cfg);

/// Sequential extraction of cfg.p components: fit the strongest remaining
/// component, subtract it, repeat. Standard errors use sigma2_hat from the
/// final residual in place of the unknown sigma^2.
[[nodiscard]] FitResult sequential_estimate(const SignalGrid& grid, const EstimatorConfig& cfg);

/// Model order from amplitude collapse: fits max_p stages and returns the
/// largest k with power_k >= order_threshold x power_1, or 0 when the first
/// stage is flat. Unreliable at low signal-to-noise ratio.
[[nodiscard]] int detect_order(const SignalGrid& grid, EstimatorConfig cfg, int max_p);

} // namespace chirp2d
