#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "chirp2d/criterion.hpp"
#include "chirp2d/errors.hpp"
#include "chirp2d/rng.hpp"
#include "oracles.hpp"

using namespace chirp2d;

namespace {

constexpr double kPi = std::numbers::pi;
const ChirpComponent kCaseI{2.0, 3.0, 1.5, 0.5, 2.5, 0.75};

SignalGrid case_one(Index M, Index N) { return synthesize({{kCaseI}, {}}, M, N); }

SignalGrid random_grid(std::mt19937_64& rng, Index M, Index N)
{
    std::normal_distribution<double> g(0.0, 1.0);
    Eigen::MatrixXd y(M, N);
    for (Index i = 0; i < y.size(); ++i) {
        y.data()[i] = g(rng);
    }
    return SignalGrid(y);
}

NonlinearPair random_pair(std::mt19937_64& rng)
{
    std::uniform_real_distribution<double> u(0.05, kPi - 0.05);
    return {u(rng), u(rng)};
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

} // namespace

TEST(Basis, NearZeroPairLimit)
{
    const BasisMatrix Z = basis(3, {1e-12, 1e-12});
    for (Index t = 0; t < 3; ++t) {
        EXPECT_NEAR(Z.values()(t, 0), 1.0, 1e-10);
        EXPECT_NEAR(Z.values()(t, 1), 0.0, 1e-10);
    }
    EXPECT_TRUE(Z.degenerate());
    EXPECT_THROW((void)Z.solve(Eigen::Vector2d(1, 1)), DegenerateBasis);
}

TEST(Basis, QuarterPeriod)
{
    const BasisMatrix Z = basis(4, {kPi / 2, 1e-15});
    const double expected[4][2] = {{0, 1}, {-1, 0}, {0, -1}, {1, 0}};
    for (Index t = 0; t < 4; ++t) {
        EXPECT_NEAR(Z.values()(t, 0), expected[t][0], 1e-12);
        EXPECT_NEAR(Z.values()(t, 1), expected[t][1], 1e-12);
    }
}

TEST(Basis, CaseIRowTwo)
{
    const BasisMatrix Z = basis(25, {1.5, 0.5});
    EXPECT_NEAR(Z.values()(1, 0), 0.283662185463226, 1e-14);
    EXPECT_NEAR(Z.values()(1, 1), -0.958924274663138, 1e-14);
    EXPECT_LE(Z.values().cwiseAbs().maxCoeff(), 1.0);
    EXPECT_LT((Z.values() - oracle::chirp_basis(25, 1.5, 0.5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Basis, Preconditions)
{
    EXPECT_THROW((void)basis(1, {1.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((void)basis(5, {0.0, 1.0}), std::invalid_argument);
    EXPECT_THROW((void)basis(5, {1.0, kPi}), std::invalid_argument);
}

TEST(ProjectionResidual, ZeroAndSpanMembers)
{
    const BasisMatrix Z = basis(25, {0.7, 0.3});
    EXPECT_EQ(projection_residual(Eigen::VectorXd::Zero(25), Z), 0.0);

    const Eigen::VectorXd y = 3.0 * Z.values().col(0) - 4.0 * Z.values().col(1);
    EXPECT_LE(projection_residual(y, Z), 1e-10 * y.squaredNorm());
    const Eigen::Vector2d ab = column_amplitudes(y, Z);
    EXPECT_NEAR(ab(0), 3.0, 1e-10);
    EXPECT_NEAR(ab(1), -4.0, 1e-10);
    EXPECT_EQ(column_amplitudes(Eigen::VectorXd::Zero(25), Z), Eigen::Vector2d::Zero());
}

TEST(ProjectionResidual, TrueColumnOfCaseI)
{
    const SignalGrid g = case_one(25, 25);
    const BasisMatrix Z = basis(25, {1.5, 0.5});
    const Eigen::VectorXd y = g.column(1);
    EXPECT_LE(projection_residual(y, Z), 1e-8 * y.squaredNorm());

    // Column n0 = 1 carries (A(1), B(1)) from the rotation identity.
    const Eigen::Vector2d ab = column_amplitudes(y, Z);
    EXPECT_NEAR(ab(0), -2.312844755751418, 1e-10);
    EXPECT_NEAR(ab(1), -2.765998759181422, 1e-10);
}

TEST(ProjectionResidual, DegenerateBasisSignals)
{
    const BasisMatrix Z = basis(6, {1e-13, 1e-13});
    EXPECT_THROW((void)projection_residual(Eigen::VectorXd::Ones(6), Z), DegenerateBasis);
}

TEST(ReducedCriterion, ZeroGrid)
{
    const SignalGrid z(12, 14);
    EXPECT_EQ(reduced_criterion_cols(z, {1.0, 1.0}), 0.0);
    EXPECT_EQ(reduced_criterion_rows(z, {1.0, 1.0}), 0.0);
    EXPECT_EQ(periodogram_cols(z, {1.0, 1.0}), 0.0);
    EXPECT_EQ(periodogram_rows(z, {1.0, 1.0}), 0.0);
}

TEST(ReducedCriterion, NoiselessCaseI)
{
    const SignalGrid g = case_one(25, 25);
    const double at_truth = reduced_criterion_cols(g, {1.5, 0.5});
    EXPECT_LT(at_truth, 1e-6);
    const double off = reduced_criterion_cols(g, {1.6, 0.5});
    EXPECT_GT(off, 0.0);
    EXPECT_GT(off, at_truth);
    EXPECT_NEAR(off, oracle::cols_residual(g, 1.6, 0.5), 1e-9 * off);
    EXPECT_LT(reduced_criterion_rows(g, {2.5, 0.75}), 1e-6);
}

TEST(ReducedCriterion, TransposeDuality)
{
    std::mt19937_64 rng(5);
    for (int k = 0; k < 10; ++k) {
        const SignalGrid g = random_grid(rng, 9 + k, 14 - k);
        const NonlinearPair p = random_pair(rng);
        EXPECT_LE(rel(reduced_criterion_rows(g, p), reduced_criterion_cols(g.transposed(), p)), 1e-12);
        EXPECT_LE(rel(periodogram_rows(g, p), periodogram_cols(g.transposed(), p)), 1e-12);
    }
}

TEST(ReducedCriterion, MatchesDenseProjectorOracle)
{
    // T = 2 is skipped: two basis vectors span R^2 and the residual is zero.
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<Index> size(3, 16);
    for (int k = 0; k < 50; ++k) {
        const SignalGrid g = random_grid(rng, size(rng), size(rng));
        const NonlinearPair p = random_pair(rng);
        if (basis(g.rows(), p).degenerate() || basis(g.cols(), p).degenerate()) {
            continue;
        }
        EXPECT_LE(rel(reduced_criterion_cols(g, p), oracle::cols_residual(g, p.freq, p.rate)), 1e-9);
        EXPECT_LE(rel(reduced_criterion_rows(g, p), oracle::rows_residual(g, p.freq, p.rate)), 1e-9);
        EXPECT_LE(rel(periodogram_cols(g, p), oracle::cols_periodogram(g, p.freq, p.rate)), 1e-12);
    }
}

TEST(ReducedCriterion, Nonnegative)
{
    std::mt19937_64 rng(23);
    for (int k = 0; k < 200; ++k) {
        const SignalGrid g = random_grid(rng, 10, 10);
        const NonlinearPair p = random_pair(rng);
        EXPECT_GE(reduced_criterion_cols(g, p), 0.0);
        EXPECT_GE(reduced_criterion_rows(g, p), 0.0);
        EXPECT_GE(periodogram_cols(g, p), 0.0);
        EXPECT_GE(periodogram_rows(g, p), 0.0);
    }
}

TEST(ReducedCriterion, TruePairIsStrictOptimum)
{
    const SignalGrid g = case_one(25, 25);
    const double r0 = reduced_criterion_cols(g, {1.5, 0.5});
    const double i0 = periodogram_cols(g, {1.5, 0.5});
    for (double f = 0.1; f < kPi; f += 0.13) {
        for (double r = 0.07; r < kPi; r += 0.11) {
            if (std::abs(f - 1.5) < 1e-9 && std::abs(r - 0.5) < 1e-9) {
                continue;
            }
            // The mirror (pi - f, pi - r) ties with the truth, so keep away from it.
            if (std::abs(f - (kPi - 1.5)) < 1e-3 && std::abs(r - (kPi - 0.5)) < 1e-3) {
                continue;
            }
            ASSERT_GT(reduced_criterion_cols(g, {f, r}), r0);
            ASSERT_LT(periodogram_cols(g, {f, r}), i0);
        }
    }
}

TEST(ReducedCriterion, MirrorSymmetry)
{
    std::mt19937_64 rng(8);
    const SignalGrid g = random_grid(rng, 13, 11);
    for (int k = 0; k < 20; ++k) {
        const NonlinearPair p = random_pair(rng);
        const NonlinearPair q{kPi - p.freq, kPi - p.rate};
        EXPECT_LE(rel(reduced_criterion_cols(g, p), reduced_criterion_cols(g, q)), 1e-9);
        EXPECT_LE(rel(periodogram_rows(g, p), periodogram_rows(g, q)), 1e-9);
    }
}

TEST(Periodogram, TruePairBeatsDisplaced)
{
    const SignalGrid g = case_one(25, 25);
    EXPECT_GT(periodogram_cols(g, {1.5, 0.5}), periodogram_cols(g, {1.8, 0.7}));
}

TEST(Periodogram, ResidualRelationshipAtFifty)
{
    const SignalGrid g = case_one(50, 50);
    const double N = 50.0;
    const double energy = g.energy() / N;
    const double gap = std::abs(reduced_criterion_cols(g, {1.5, 0.5}) / N - (energy - periodogram_cols(g, {1.5, 0.5})));
    EXPECT_LE(gap, 0.02 * energy);
}

TEST(AxisCriterion, PointMatchesFreeFunctions)
{
    std::mt19937_64 rng(3);
    const SignalGrid g = random_grid(rng, 15, 12);
    for (int k = 0; k < 20; ++k) {
        const NonlinearPair p = random_pair(rng);
        EXPECT_LE(rel(AxisCriterion(g, Axis::columns, CriterionKind::residual)(p), reduced_criterion_cols(g, p)), 1e-12);
        EXPECT_LE(rel(AxisCriterion(g, Axis::rows, CriterionKind::residual)(p), reduced_criterion_rows(g, p)), 1e-12);
        EXPECT_LE(rel(AxisCriterion(g, Axis::columns, CriterionKind::periodogram)(p), periodogram_cols(g, p)), 1e-12);
        EXPECT_LE(rel(AxisCriterion(g, Axis::rows, CriterionKind::periodogram)(p), periodogram_rows(g, p)), 1e-12);
    }
}

TEST(AxisCriterion, LineMatchesPointwise)
{
    std::mt19937_64 rng(4);
    const SignalGrid g(synthesize({{kCaseI}, {0.3, 77}}, 40, 35));
    for (const auto axis : {Axis::columns, Axis::rows}) {
        for (const auto kind : {CriterionKind::residual, CriterionKind::periodogram}) {
            const AxisCriterion crit(g, axis, kind);
            const FreqLine line{0.01, (kPi - 0.02) / 99.0, 100};
            std::vector<double> out(100);
            for (double rate : {0.003, 0.5, 1.7, 3.1}) {
                crit.evaluate_line(rate, line, out);
                for (Index j = 0; j < line.count; ++j) {
                    const double ref = crit({line.first + j * line.step, rate});
                    ASSERT_NEAR(out[j], ref, 1e-11 * crit.total_energy()) << "rate " << rate << " node " << j;
                }
            }
        }
    }
}
