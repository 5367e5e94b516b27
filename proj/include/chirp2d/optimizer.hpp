#pragma once

#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "chirp2d/criterion.hpp"

namespace chirp2d {

enum class Sense { minimize, maximize };

/// Open interval (lo, hi) inside (0, pi).
struct Interval {
    double lo = 0.0;
    double hi = std::numbers::pi;
};

/// Coarse search grid over (freq, rate). Nodes sit at cell centres, half a
/// cell away from the interval ends, so every node is strictly interior.
struct GridPlan {
    Index freq_points = 8;
    Index rate_points = 8;
    Interval freq_range{};
    Interval rate_range{};
    /// Set by for_length() when the T^2 rate count was capped.
    bool rate_capped = false;

    static constexpr Index kMaxRatePoints = 20000;

    /// Default plan for an axis of length T: T frequency nodes and T^2 rate
    /// nodes (capped at kMaxRatePoints, which binds for T > 141), with a
    /// floor of 8 nodes per coordinate.
    [[nodiscard]] static GridPlan for_length(Index T);

    /// Throws std::invalid_argument on fewer than 8 nodes per coordinate or a
    /// range that is not an open subinterval of (0, pi).
    void validate() const;

    [[nodiscard]] double freq_cell() const noexcept;
    [[nodiscard]] double rate_cell() const noexcept;
    [[nodiscard]] double freq_node(Index i) const noexcept;
    [[nodiscard]] double rate_node(Index j) const noexcept;
    [[nodiscard]] FreqLine freq_line() const noexcept;
};

struct RefineSettings {
    double x_tol = 1e-8;  ///< simplex diameter (original units) at which to stop
    double f_tol = 1e-10; ///< relative spread of simplex values at which to stop
    int max_iters = 500;

    void validate() const;
};

struct OptimumReport {
    NonlinearPair pair;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    /// Objective was constant over the coarse grid (within 1e-12 relative).
    bool flat = false;
    NonlinearPair grid_cell; ///< winning coarse node
    double grid_value = 0.0; ///< objective at the winning coarse node
    std::string note;
};

using PairObjective = std::function<double(NonlinearPair)>;
/// Objective along a uniform frequency line at fixed rate, written to `out`.
using LineObjective = std::function<void(double rate, const FreqLine& line, std::span<double> out)>;

/// Exhaustive evaluation of all plan nodes. Rate lines are evaluated in
/// parallel; the reduction is ordered so ties resolve to the smaller
/// frequency, then the smaller rate, independent of scheduling.
/// Non-finite node values are skipped; throws AllInvalid if none is finite.
OptimumReport coarse_grid_search(const LineObjective& f, const GridPlan& plan, Sense sense);
OptimumReport coarse_grid_search(const PairObjective& f, const GridPlan& plan, Sense sense);

/// Nelder-Mead simplex descent from `start`, confined to (0, pi)^2 by
/// reflecting proposals off the boundary. `scale` sets the initial simplex
/// edge per coordinate (typically one coarse-grid cell). Never returns a
/// point worse than `start`.
OptimumReport refine(const PairObjective& f, NonlinearPair start, const RefineSettings& settings, Sense sense,
                     NonlinearPair scale = {0.05, 0.05});

/// coarse_grid_search followed by refine() from the winning node. A flat
/// grid is reported as such and not refined.
OptimumReport solve_pair(const PairObjective& f, const LineObjective& line, const GridPlan& plan,
                         const RefineSettings& settings, Sense sense);

/// Convenience overload driving an AxisCriterion in its natural sense
/// (residual minimized, periodogram maximized).
OptimumReport solve_pair(const AxisCriterion& criterion, const GridPlan& plan, const RefineSettings& settings);

} // namespace chirp2d
