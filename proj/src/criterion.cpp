#include "chirp2d/criterion.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chirp2d/errors.hpp"
#include "chirp2d/summation.hpp"

namespace chirp2d {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Phase recurrence along a frequency line is re-anchored on an exact
// evaluation every kReseed nodes.
constexpr Index kReseed = 32;

void require_pair(const NonlinearPair& p)
{
    if (!in_domain(p)) {
        std::ostringstream msg;
        msg << "pair (" << p.freq << ", " << p.rate << ") outside (0, pi)^2";
        throw std::invalid_argument(msg.str());
    }
}

bool gram_ok(double det, Index T) noexcept
{
    const auto t = static_cast<double>(T);
    return det > kDegenerateRelTol * t * t;
}

double clamp_residual(double r, double yy)
{
    assert(r >= -1e-9 * yy || !(yy > 0.0));
    (void)yy;
    return r > 0.0 ? r : 0.0;
}

template<typename F>
double sum_over_vectors(const SignalGrid& grid, Axis axis, F&& per_vector)
{
    CompensatedSum total;
    if (axis == Axis::columns) {
        for (Index j = 0; j < grid.cols(); ++j) {
            total.add(per_vector(grid.matrix().col(j)));
        }
    } else {
        for (Index i = 0; i < grid.rows(); ++i) {
            Eigen::VectorXd y = grid.matrix().row(i).transpose();
            total.add(per_vector(y));
        }
    }
    return total.value();
}

double reduced_criterion(const SignalGrid& grid, NonlinearPair pair, Axis axis)
{
    const Index T = axis == Axis::columns ? grid.rows() : grid.cols();
    const BasisMatrix Z = basis(T, pair);
    if (Z.degenerate()) {
        throw DegenerateBasis("reduced criterion: degenerate basis");
    }
    return sum_over_vectors(grid, axis, [&](const auto& y) { return projection_residual(y, Z); });
}

double periodogram(const SignalGrid& grid, NonlinearPair pair, Axis axis)
{
    const Index T = axis == Axis::columns ? grid.rows() : grid.cols();
    const BasisMatrix Z = basis(T, pair);
    const double s = sum_over_vectors(grid, axis, [&](const auto& y) {
        const double c = compensated_dot(y, Z.values().col(0), T);
        const double d = compensated_dot(y, Z.values().col(1), T);
        return c * c + d * d;
    });
    return 2.0 * s / static_cast<double>(grid.rows() * grid.cols());
}

} // namespace

bool in_domain(const NonlinearPair& p) noexcept
{
    return p.freq > 0.0 && p.freq < std::numbers::pi && p.rate > 0.0 && p.rate < std::numbers::pi;
}

BasisMatrix::BasisMatrix(Values values, NonlinearPair pair) : values_(std::move(values)), pair_(pair)
{
    const Index T = values_.rows();
    const double g11 = compensated_dot(values_.col(0), values_.col(0), T);
    const double g12 = compensated_dot(values_.col(0), values_.col(1), T);
    const double g22 = compensated_dot(values_.col(1), values_.col(1), T);
    gram_ << g11, g12, g12, g22;
    const double det = g11 * g22 - g12 * g12;
    degenerate_ = !gram_ok(det, T);
    if (!degenerate_) {
        gram_inverse_ << g22 / det, -g12 / det, -g12 / det, g11 / det;
    } else {
        gram_inverse_.setConstant(kNaN);
    }
}

Eigen::Vector2d BasisMatrix::solve(const Eigen::Vector2d& v) const
{
    if (degenerate_) {
        std::ostringstream msg;
        msg << "degenerate chirp basis at (" << pair_.freq << ", " << pair_.rate << ")";
        throw DegenerateBasis(msg.str());
    }
    return gram_inverse_ * v;
}

BasisMatrix basis(Index T, NonlinearPair pair)
{
    if (T < 2) {
        throw std::invalid_argument("basis: length must be at least 2");
    }
    require_pair(pair);
    BasisMatrix::Values values(T, 2);
    for (Index t = 1; t <= T; ++t) {
        const auto dt = static_cast<double>(t);
        const double phi = pair.freq * dt + pair.rate * dt * dt;
        values(t - 1, 0) = std::cos(phi);
        values(t - 1, 1) = std::sin(phi);
    }
    return BasisMatrix(std::move(values), pair);
}

double projection_residual(const Eigen::Ref<const Eigen::VectorXd>& y, const BasisMatrix& Z)
{
    const Index T = Z.length();
    if (y.size() != T) {
        throw std::invalid_argument("projection_residual: length mismatch");
    }
    const double yy = compensated_dot(y, y, T);
    const Eigen::Vector2d b(compensated_dot(Z.values().col(0), y, T), compensated_dot(Z.values().col(1), y, T));
    const Eigen::Vector2d coef = Z.solve(b);
    return clamp_residual(yy - b.dot(coef), yy);
}

Eigen::Vector2d column_amplitudes(const Eigen::Ref<const Eigen::VectorXd>& y, const BasisMatrix& Z)
{
    const Index T = Z.length();
    if (y.size() != T) {
        throw std::invalid_argument("column_amplitudes: length mismatch");
    }
    const Eigen::Vector2d b(compensated_dot(Z.values().col(0), y, T), compensated_dot(Z.values().col(1), y, T));
    return Z.solve(b);
}

double reduced_criterion_cols(const SignalGrid& grid, NonlinearPair pair)
{
    return reduced_criterion(grid, pair, Axis::columns);
}

double reduced_criterion_rows(const SignalGrid& grid, NonlinearPair pair)
{
    return reduced_criterion(grid, pair, Axis::rows);
}

double periodogram_cols(const SignalGrid& grid, NonlinearPair pair) { return periodogram(grid, pair, Axis::columns); }

double periodogram_rows(const SignalGrid& grid, NonlinearPair pair) { return periodogram(grid, pair, Axis::rows); }

AxisCriterion::AxisCriterion(const SignalGrid& grid, Axis axis, CriterionKind kind)
    : data_(axis == Axis::columns ? Eigen::MatrixXd(grid.matrix().transpose()) : grid.matrix())
    , axis_(axis)
    , kind_(kind)
{
    if (length() < 2) {
        throw std::invalid_argument("AxisCriterion: vectors must have length >= 2");
    }
    CompensatedSum e;
    for (Index j = 0; j < data_.cols(); ++j) {
        for (Index i = 0; i < data_.rows(); ++i) {
            e.add(data_(i, j) * data_(i, j));
        }
    }
    energy_ = e.value();
}

double AxisCriterion::finish(double g11, double g12, double g22, double scc, double scs, double sss) const
{
    if (kind_ == CriterionKind::periodogram) {
        return 2.0 * (scc + sss) / static_cast<double>(length() * count());
    }
    const double det = g11 * g22 - g12 * g12;
    if (!gram_ok(det, length())) {
        return kNaN;
    }
    const double explained = (g22 * scc - 2.0 * g12 * scs + g11 * sss) / det;
    return clamp_residual(energy_ - explained, energy_);
}

double AxisCriterion::operator()(NonlinearPair pair) const
{
    const BasisMatrix Z = basis(length(), pair);
    const Eigen::Matrix<double, Eigen::Dynamic, 2> C = data_ * Z.values();
    const Index n = count();
    const double scc = compensated_dot(C.col(0), C.col(0), n);
    const double scs = compensated_dot(C.col(0), C.col(1), n);
    const double sss = compensated_dot(C.col(1), C.col(1), n);
    return finish(Z.gram()(0, 0), Z.gram()(0, 1), Z.gram()(1, 1), scc, scs, sss);
}

void AxisCriterion::evaluate_line(double rate, const FreqLine& line, std::span<double> out) const
{
    const Index K = line.count;
    if (static_cast<Index>(out.size()) != K) {
        throw std::invalid_argument("evaluate_line: output size mismatch");
    }
    if (K == 0) {
        return;
    }
    const Index T = length();
    Eigen::MatrixXd B(T, 2 * K);
    for (Index t = 1; t <= T; ++t) {
        const auto dt = static_cast<double>(t);
        const double chirp = rate * dt * dt;
        const double cw = std::cos(line.step * dt);
        const double sw = std::sin(line.step * dt);
        double c = 0.0;
        double s = 0.0;
        for (Index j = 0; j < K; ++j) {
            if (j % kReseed == 0) {
                const double phi = (line.first + static_cast<double>(j) * line.step) * dt + chirp;
                c = std::cos(phi);
                s = std::sin(phi);
            }
            B(t - 1, j) = c;
            B(t - 1, K + j) = s;
            const double c_next = c * cw - s * sw;
            s = s * cw + c * sw;
            c = c_next;
        }
    }

    const Eigen::MatrixXd C = data_ * B;
    for (Index j = 0; j < K; ++j) {
        const auto cc = C.col(j);
        const auto ss = C.col(K + j);
        const auto bc = B.col(j);
        const auto bs = B.col(K + j);
        out[static_cast<std::size_t>(j)] = finish(bc.squaredNorm(), bc.dot(bs), bs.squaredNorm(), cc.squaredNorm(), cc.dot(ss), ss.squaredNorm());
    }
}

} // namespace chirp2d
