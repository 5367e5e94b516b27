#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace chirp2d {

using Index = Eigen::Index;

/// One 2-D chirp component:
///   A cos(phi) + B sin(phi),  phi = alpha m + beta m^2 + gamma n + delta n^2.
/// alpha/gamma are frequencies and beta/delta frequency rates (rad/sample and
/// rad/sample^2); all four live in the open interval (0, pi).
struct ChirpComponent {
    double A = 0.0;
    double B = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double gamma = 0.0;
    double delta = 0.0;

    [[nodiscard]] double power() const noexcept { return A * A + B * B; }

    friend bool operator==(const ChirpComponent&, const ChirpComponent&) = default;
};

/// True when all four nonlinear parameters lie strictly inside (0, pi).
[[nodiscard]] bool in_domain(const ChirpComponent& c) noexcept;

/// Phase polynomial at the 1-based sample (m, n).
[[nodiscard]] double phase(const ChirpComponent& c, Index m, Index n);

/// M x N real observation matrix y(m, n).
///
/// The math layer is 1-based (m = 1..M, n = 1..N, matching the chirp phase);
/// storage is a column-major Eigen matrix addressed 0-based. at() takes
/// 1-based indices, matrix() exposes the 0-based storage.
class SignalGrid {
public:
    SignalGrid() = default;
    SignalGrid(Index rows, Index cols);
    /// Throws std::invalid_argument if any entry is non-finite.
    explicit SignalGrid(Eigen::MatrixXd values);

    [[nodiscard]] Index rows() const noexcept { return values_.rows(); }
    [[nodiscard]] Index cols() const noexcept { return values_.cols(); }
    [[nodiscard]] Index size() const noexcept { return values_.size(); }
    [[nodiscard]] double at(Index m, Index n) const;

    [[nodiscard]] const Eigen::MatrixXd& matrix() const noexcept { return values_; }

    /// Y_{n0}: the n0-th column (1-based), length M.
    [[nodiscard]] Eigen::VectorXd column(Index n0) const;
    /// Y_{m0}: the m0-th row (1-based), length N.
    [[nodiscard]] Eigen::VectorXd row(Index m0) const;

    [[nodiscard]] SignalGrid transposed() const;

    /// Sum of squared entries.
    [[nodiscard]] double energy() const;

    friend bool operator==(const SignalGrid& a, const SignalGrid& b)
    {
        return a.values_.rows() == b.values_.rows() && a.values_.cols() == b.values_.cols()
            && a.values_ == b.values_;
    }

private:
    Eigen::MatrixXd values_;
};

enum class NoiseDistribution { gaussian };

struct NoiseSpec {
    double sigma = 0.0; ///< standard deviation; 0 means noiseless
    std::uint64_t seed = 0;
    NoiseDistribution distribution = NoiseDistribution::gaussian;
};

struct ModelSpec {
    std::vector<ChirpComponent> components;
    NoiseSpec noise;
};

/// Validates a model for synthesis. Hard violations (empty component list,
/// nonlinear parameters outside (0, pi), repeated (alpha, beta) or
/// (gamma, delta) pairs, negative sigma) throw std::invalid_argument.
/// Soft violations are returned as human-readable warnings: component powers
/// that are not strictly decreasing, which the sequential estimator tolerates.
std::vector<std::string> check_model(const ModelSpec& spec);

/// Noiseless sum of components on an M x N grid.
[[nodiscard]] SignalGrid render(const std::vector<ChirpComponent>& components, Index M, Index N);

/// Synthesize y = sum_k chirp_k + X with X drawn from spec.noise.
/// Requires M, N >= 4. Identical inputs give bit-identical grids.
[[nodiscard]] SignalGrid synthesize(const ModelSpec& spec, Index M, Index N);

/// grid + i.i.d. noise; sigma = 0 returns the grid unchanged.
[[nodiscard]] SignalGrid add_noise(const SignalGrid& grid, const NoiseSpec& noise);

/// y - sum_k chirp_k evaluated on the grid.
[[nodiscard]] SignalGrid subtract(const SignalGrid& grid, const std::vector<ChirpComponent>& components);

} // namespace chirp2d
