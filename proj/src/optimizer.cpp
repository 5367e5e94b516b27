#include "chirp2d/optimizer.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>

#include "chirp2d/errors.hpp"

namespace chirp2d {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-line summary of a coarse-grid row (fixed rate).
struct LineSummary {
    Index best = -1; // first node attaining the best value on the line
    double best_value = 0.0;
    Index first_finite = -1;
    double min = kInf;
    double max = -kInf;
};

bool better(double a, double b, Sense sense) noexcept { return sense == Sense::minimize ? a < b : a > b; }

// Fold a coordinate into (0, pi) by mirroring at 0 and pi.
double fold(double x) noexcept
{
    if (x > 0.0 && x < kPi) {
        return x;
    }
    double y = std::fmod(std::abs(x), 2.0 * kPi);
    if (y > kPi) {
        y = 2.0 * kPi - y;
    }
    if (!(y > 0.0)) {
        y = std::nextafter(0.0, 1.0);
    } else if (!(y < kPi)) {
        y = std::nextafter(kPi, 0.0);
    }
    return y;
}

bool open_interval_ok(const Interval& r) noexcept { return r.lo >= 0.0 && r.hi <= kPi && r.lo < r.hi; }

} // namespace

GridPlan GridPlan::for_length(Index T)
{
    if (T < 2) {
        throw std::invalid_argument("GridPlan::for_length: T must be at least 2");
    }
    GridPlan plan;
    plan.freq_points = std::max<Index>(T, 8);
    const Index squared = T * T;
    plan.rate_points = std::clamp<Index>(squared, 8, kMaxRatePoints);
    plan.rate_capped = squared > kMaxRatePoints;
    return plan;
}

void GridPlan::validate() const
{
    if (freq_points < 8 || rate_points < 8) {
        throw std::invalid_argument("GridPlan: at least 8 nodes per coordinate required");
    }
    if (!open_interval_ok(freq_range) || !open_interval_ok(rate_range)) {
        throw std::invalid_argument("GridPlan: ranges must be nonempty subintervals of (0, pi)");
    }
}

double GridPlan::freq_cell() const noexcept
{
    return (freq_range.hi - freq_range.lo) / static_cast<double>(freq_points);
}

double GridPlan::rate_cell() const noexcept
{
    return (rate_range.hi - rate_range.lo) / static_cast<double>(rate_points);
}

FreqLine GridPlan::freq_line() const noexcept
{
    return {freq_range.lo + 0.5 * freq_cell(), freq_cell(), freq_points};
}

double GridPlan::freq_node(Index i) const noexcept
{
    const FreqLine line = freq_line();
    return line.first + static_cast<double>(i) * line.step;
}

double GridPlan::rate_node(Index j) const noexcept
{
    return rate_range.lo + (static_cast<double>(j) + 0.5) * rate_cell();
}

void RefineSettings::validate() const
{
    if (!(x_tol > 0.0) || !(f_tol > 0.0) || max_iters < 1) {
        throw std::invalid_argument("RefineSettings: tolerances must be positive and max_iters >= 1");
    }
}

OptimumReport coarse_grid_search(const LineObjective& f, const GridPlan& plan, Sense sense)
{
    plan.validate();
    const FreqLine line = plan.freq_line();
    std::vector<LineSummary> lines(static_cast<std::size_t>(plan.rate_points));

    tbb::parallel_for(tbb::blocked_range<Index>(0, plan.rate_points), [&](const tbb::blocked_range<Index>& r) {
        std::vector<double> values(static_cast<std::size_t>(line.count));
        for (Index j = r.begin(); j != r.end(); ++j) {
            f(plan.rate_node(j), line, values);
            LineSummary s;
            for (Index i = 0; i < line.count; ++i) {
                const double v = values[static_cast<std::size_t>(i)];
                if (!std::isfinite(v)) {
                    continue;
                }
                if (s.first_finite < 0) {
                    s.first_finite = i;
                }
                s.min = std::min(s.min, v);
                s.max = std::max(s.max, v);
                if (s.best < 0 || better(v, s.best_value, sense)) {
                    s.best = i;
                    s.best_value = v;
                }
            }
            lines[static_cast<std::size_t>(j)] = s;
        }
    });

    // Ordered reduction: lexicographic (freq, rate) tie-break.
    Index best_i = -1;
    Index best_j = -1;
    double best_value = 0.0;
    Index first_i = -1;
    Index first_j = -1;
    double lo = kInf;
    double hi = -kInf;
    for (Index j = 0; j < plan.rate_points; ++j) {
        const LineSummary& s = lines[static_cast<std::size_t>(j)];
        if (s.best < 0) {
            continue;
        }
        lo = std::min(lo, s.min);
        hi = std::max(hi, s.max);
        if (first_i < 0 || s.first_finite < first_i) {
            first_i = s.first_finite;
            first_j = j;
        }
        if (best_i < 0 || better(s.best_value, best_value, sense)
            || (s.best_value == best_value && s.best < best_i)) {
            best_i = s.best;
            best_j = j;
            best_value = s.best_value;
        }
    }
    if (best_i < 0) {
        throw AllInvalid("coarse grid search: objective is non-finite at every node");
    }

    OptimumReport report;
    report.flat = (hi - lo) < 1e-12 * std::max(1.0, std::abs(hi));
    if (report.flat) {
        best_i = first_i;
        best_j = first_j;
        report.note = "flat";
    }
    report.grid_cell = {plan.freq_node(best_i), plan.rate_node(best_j)};
    report.pair = report.grid_cell;
    // On a flat grid every node agrees to 1e-12, so the line minimum stands in.
    report.grid_value = report.flat ? lines[static_cast<std::size_t>(best_j)].min : best_value;
    report.value = report.grid_value;
    report.evaluations = static_cast<int>(std::min<Index>(plan.freq_points * plan.rate_points,
                                                          std::numeric_limits<int>::max()));
    return report;
}

OptimumReport coarse_grid_search(const PairObjective& f, const GridPlan& plan, Sense sense)
{
    const LineObjective line = [&f](double rate, const FreqLine& l, std::span<double> out) {
        for (Index i = 0; i < l.count; ++i) {
            out[static_cast<std::size_t>(i)] = f({l.first + static_cast<double>(i) * l.step, rate});
        }
    };
    return coarse_grid_search(line, plan, sense);
}

OptimumReport refine(const PairObjective& f, NonlinearPair start, const RefineSettings& settings, Sense sense,
                     NonlinearPair scale)
{
    settings.validate();
    if (!in_domain(start)) {
        throw std::invalid_argument("refine: start outside (0, pi)^2");
    }
    if (!(scale.freq > 0.0) || !(scale.rate > 0.0)) {
        throw std::invalid_argument("refine: simplex scale must be positive");
    }

    using Point = std::array<double, 2>;
    int evaluations = 0;
    // Minimized objective; non-finite values rank last.
    auto g = [&](const Point& p) {
        ++evaluations;
        const double v = f({p[0], p[1]});
        if (!std::isfinite(v)) {
            return kInf;
        }
        return sense == Sense::minimize ? v : -v;
    };
    auto folded = [](Point p) { return Point{fold(p[0]), fold(p[1])}; };

    std::array<Point, 3> x{Point{start.freq, start.rate}, folded({start.freq + scale.freq, start.rate}),
                           folded({start.freq, start.rate + scale.rate})};
    std::array<double, 3> fx{g(x[0]), g(x[1]), g(x[2])};

    auto order = [&] {
        // Stable so that the start vertex wins ties.
        std::array<int, 3> idx{0, 1, 2};
        std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return fx[a] < fx[b]; });
        std::array<Point, 3> xs{x[idx[0]], x[idx[1]], x[idx[2]]};
        std::array<double, 3> fs{fx[idx[0]], fx[idx[1]], fx[idx[2]]};
        x = xs;
        fx = fs;
    };

    OptimumReport report;
    int iter = 0;
    bool converged = false;
    order();
    while (true) {
        double diameter = 0.0;
        for (int k = 1; k < 3; ++k) {
            diameter = std::max(diameter, std::hypot(x[k][0] - x[0][0], x[k][1] - x[0][1]));
        }
        const double spread = fx[2] - fx[0];
        if (diameter < settings.x_tol) {
            converged = true;
            report.note = "x_tol";
            break;
        }
        if (std::isfinite(spread) && spread <= settings.f_tol * std::abs(fx[0])) {
            converged = true;
            report.note = "f_tol";
            break;
        }
        if (iter >= settings.max_iters) {
            report.note = "max_iters";
            break;
        }
        ++iter;

        const Point c{0.5 * (x[0][0] + x[1][0]), 0.5 * (x[0][1] + x[1][1])};
        auto along = [&](double t) { return folded({c[0] + t * (x[2][0] - c[0]), c[1] + t * (x[2][1] - c[1])}); };

        const Point xr = along(-1.0);
        const double fr = g(xr);
        if (fr < fx[0]) {
            const Point xe = along(-2.0);
            const double fe = g(xe);
            if (fe < fr) {
                x[2] = xe;
                fx[2] = fe;
            } else {
                x[2] = xr;
                fx[2] = fr;
            }
        } else if (fr < fx[1]) {
            x[2] = xr;
            fx[2] = fr;
        } else {
            const bool outside = fr < fx[2];
            const Point xc = along(outside ? -0.5 : 0.5);
            const double fc = g(xc);
            if (fc < (outside ? fr : fx[2])) {
                x[2] = xc;
                fx[2] = fc;
            } else {
                for (int k = 1; k < 3; ++k) {
                    x[k] = folded({x[0][0] + 0.5 * (x[k][0] - x[0][0]), x[0][1] + 0.5 * (x[k][1] - x[0][1])});
                    fx[k] = g(x[k]);
                }
            }
        }
        order();
    }

    report.pair = {x[0][0], x[0][1]};
    report.value = sense == Sense::minimize ? fx[0] : -fx[0];
    report.iterations = iter;
    report.evaluations = evaluations;
    report.converged = converged;
    report.grid_cell = start;
    report.grid_value = report.value;
    return report;
}

OptimumReport solve_pair(const PairObjective& f, const LineObjective& line, const GridPlan& plan,
                         const RefineSettings& settings, Sense sense)
{
    OptimumReport coarse = coarse_grid_search(line, plan, sense);
    const std::string capped = plan.rate_capped ? "; rate grid capped at " + std::to_string(plan.rate_points) : "";
    if (coarse.flat) {
        coarse.note += capped;
        return coarse;
    }
    OptimumReport fine = refine(f, coarse.grid_cell, settings, sense, {plan.freq_cell(), plan.rate_cell()});
    fine.grid_cell = coarse.grid_cell;
    fine.grid_value = f(coarse.grid_cell);
    fine.evaluations += coarse.evaluations;
    fine.note += capped;
    return fine;
}

OptimumReport solve_pair(const AxisCriterion& criterion, const GridPlan& plan, const RefineSettings& settings)
{
    const Sense sense = criterion.kind() == CriterionKind::residual ? Sense::minimize : Sense::maximize;
    const PairObjective point = [&criterion](NonlinearPair p) { return criterion(p); };
    const LineObjective line = [&criterion](double rate, const FreqLine& l, std::span<double> out) {
        criterion.evaluate_line(rate, l, out);
    };
    return solve_pair(point, line, plan, settings, sense);
}

} // namespace chirp2d
