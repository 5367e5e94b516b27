#pragma once

#include <span>

#include <Eigen/Core>

#include "chirp2d/signal_model.hpp"

namespace chirp2d {

/// A (frequency, frequency-rate) point of the search domain (0, pi)^2.
struct NonlinearPair {
    double freq = 0.0;
    double rate = 0.0;

    friend bool operator==(const NonlinearPair&, const NonlinearPair&) = default;
};

[[nodiscard]] bool in_domain(const NonlinearPair& p) noexcept;

/// Determinant guard for 2x2 normal matrices: det > kDegenerateRelTol * T^2.
inline constexpr double kDegenerateRelTol = 1e-12;

/// T x 2 chirp basis, row t = (cos(t f + t^2 r), sin(t f + t^2 r)), t = 1..T,
/// together with its 2x2 Gram matrix Z^T Z.
class BasisMatrix {
public:
    using Values = Eigen::Matrix<double, Eigen::Dynamic, 2>;

    BasisMatrix(Values values, NonlinearPair pair);

    [[nodiscard]] Index length() const noexcept { return values_.rows(); }
    [[nodiscard]] const NonlinearPair& pair() const noexcept { return pair_; }
    [[nodiscard]] const Values& values() const noexcept { return values_; }
    [[nodiscard]] const Eigen::Matrix2d& gram() const noexcept { return gram_; }
    [[nodiscard]] bool degenerate() const noexcept { return degenerate_; }

    /// (Z^T Z)^{-1} v. Throws DegenerateBasis when the Gram matrix fails the guard.
    [[nodiscard]] Eigen::Vector2d solve(const Eigen::Vector2d& v) const;

private:
    Values values_;
    NonlinearPair pair_;
    Eigen::Matrix2d gram_;
    Eigen::Matrix2d gram_inverse_;
    bool degenerate_ = false;
};

/// Requires T >= 2 and a pair inside (0, pi)^2.
[[nodiscard]] BasisMatrix basis(Index T, NonlinearPair pair);

/// y^T (I - P_Z) y through the 2x2 normal equations, clamped at zero.
[[nodiscard]] double projection_residual(const Eigen::Ref<const Eigen::VectorXd>& y, const BasisMatrix& Z);

/// (Z^T Z)^{-1} Z^T y: the per-column amplitudes (A(n0), B(n0)).
[[nodiscard]] Eigen::Vector2d column_amplitudes(const Eigen::Ref<const Eigen::VectorXd>& y, const BasisMatrix& Z);

/// R1(alpha, beta): sum over columns of the projection residual on Z_M.
[[nodiscard]] double reduced_criterion_cols(const SignalGrid& grid, NonlinearPair pair);
/// R2(gamma, delta): sum over rows of the projection residual on Z_N.
[[nodiscard]] double reduced_criterion_rows(const SignalGrid& grid, NonlinearPair pair);

/// I1(alpha, beta) = 2/(MN) sum_n |Z_M^T Y_n|^2 (no normal-matrix inverse).
[[nodiscard]] double periodogram_cols(const SignalGrid& grid, NonlinearPair pair);
/// I2(gamma, delta) = 2/(MN) sum_m |Z_N^T Y_m|^2.
[[nodiscard]] double periodogram_rows(const SignalGrid& grid, NonlinearPair pair);

enum class Axis { columns, rows };

/// Reduced residual criterion (minimized) or periodogram-type function (maximized).
enum class CriterionKind { residual, periodogram };

/// A uniform line of frequencies at a fixed rate: freq_j = first + j * step.
struct FreqLine {
    double first = 0.0;
    double step = 0.0;
    Index count = 0;
};

/// Batched evaluator of one criterion along one axis of a grid.
///
/// The scalar free functions above are the reference definitions. This class
/// evaluates the same quantities for whole lines of the coarse search grid at
/// once: the bases of a line are generated by phase recurrence and the
/// Z^T Y products for all of them come out of a single matrix product.
/// Per-node reductions on the line path use Eigen's vectorized dot products;
/// the single-pair path uses compensated sums. The two agree to ~1e-12 of the
/// total energy.
/// Instances are immutable and safe to share between threads.
class AxisCriterion {
public:
    AxisCriterion(const SignalGrid& grid, Axis axis, CriterionKind kind);

    /// Length of the 1-D vectors being projected (M for columns, N for rows).
    [[nodiscard]] Index length() const noexcept { return data_.cols(); }
    /// Number of 1-D vectors summed over (N for columns, M for rows).
    [[nodiscard]] Index count() const noexcept { return data_.rows(); }
    [[nodiscard]] Axis axis() const noexcept { return axis_; }
    [[nodiscard]] CriterionKind kind() const noexcept { return kind_; }
    /// Sum of Y^T Y over all vectors.
    [[nodiscard]] double total_energy() const noexcept { return energy_; }

    /// Criterion at one pair. Degenerate bases give NaN.
    [[nodiscard]] double operator()(NonlinearPair pair) const;

    /// Criterion at every node of `line`; out.size() must equal line.count.
    void evaluate_line(double rate, const FreqLine& line, std::span<double> out) const;

private:
    double finish(double g11, double g12, double g22, double scc, double scs, double sss) const;

    Eigen::MatrixXd data_; ///< one 1-D vector per row
    Axis axis_;
    CriterionKind kind_;
    double energy_ = 0.0;
};

} // namespace chirp2d
