#include "chirp2d/signal_model.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chirp2d/rng.hpp"

namespace chirp2d {

namespace {

bool open_unit_pi(double x) noexcept { return x > 0.0 && x < std::numbers::pi; }

void require_dims(Index M, Index N, Index minimum)
{
    if (M < minimum || N < minimum) {
        std::ostringstream msg;
        msg << "grid must be at least " << minimum << "x" << minimum << ", got " << M << "x" << N;
        throw std::invalid_argument(msg.str());
    }
}

} // namespace

bool in_domain(const ChirpComponent& c) noexcept
{
    return open_unit_pi(c.alpha) && open_unit_pi(c.beta) && open_unit_pi(c.gamma) && open_unit_pi(c.delta);
}

double phase(const ChirpComponent& c, Index m, Index n)
{
    if (m < 1 || n < 1) {
        throw std::invalid_argument("phase: indices are 1-based");
    }
    const auto dm = static_cast<double>(m);
    const auto dn = static_cast<double>(n);
    return c.alpha * dm + c.beta * dm * dm + c.gamma * dn + c.delta * dn * dn;
}

SignalGrid::SignalGrid(Index rows, Index cols) : values_(Eigen::MatrixXd::Zero(rows, cols))
{
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("SignalGrid: dimensions must be positive");
    }
}

SignalGrid::SignalGrid(Eigen::MatrixXd values) : values_(std::move(values))
{
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw std::invalid_argument("SignalGrid: dimensions must be positive");
    }
    if (!values_.allFinite()) {
        throw std::invalid_argument("SignalGrid: non-finite entry");
    }
}

double SignalGrid::at(Index m, Index n) const
{
    if (m < 1 || m > rows() || n < 1 || n > cols()) {
        throw std::out_of_range("SignalGrid::at: index outside 1..M x 1..N");
    }
    return values_(m - 1, n - 1);
}

Eigen::VectorXd SignalGrid::column(Index n0) const
{
    if (n0 < 1 || n0 > cols()) {
        throw std::out_of_range("SignalGrid::column");
    }
    return values_.col(n0 - 1);
}

Eigen::VectorXd SignalGrid::row(Index m0) const
{
    if (m0 < 1 || m0 > rows()) {
        throw std::out_of_range("SignalGrid::row");
    }
    return values_.row(m0 - 1).transpose();
}

SignalGrid SignalGrid::transposed() const { return SignalGrid(Eigen::MatrixXd(values_.transpose())); }

double SignalGrid::energy() const { return values_.squaredNorm(); }

std::vector<std::string> check_model(const ModelSpec& spec)
{
    if (spec.components.empty()) {
        throw std::invalid_argument("model has no components");
    }
    if (!(spec.noise.sigma >= 0.0) || !std::isfinite(spec.noise.sigma)) {
        throw std::invalid_argument("noise sigma must be finite and nonnegative");
    }
    const auto& comps = spec.components;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const auto& c = comps[i];
        if (!std::isfinite(c.A) || !std::isfinite(c.B)) {
            throw std::invalid_argument("component " + std::to_string(i + 1) + ": non-finite amplitude");
        }
        if (!in_domain(c)) {
            throw std::invalid_argument("component " + std::to_string(i + 1)
                                        + ": frequencies and rates must lie in (0, pi)");
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (comps[j].alpha == c.alpha && comps[j].beta == c.beta) {
                throw std::invalid_argument("components " + std::to_string(j + 1) + " and "
                                            + std::to_string(i + 1) + " share (alpha, beta)");
            }
            if (comps[j].gamma == c.gamma && comps[j].delta == c.delta) {
                throw std::invalid_argument("components " + std::to_string(j + 1) + " and "
                                            + std::to_string(i + 1) + " share (gamma, delta)");
            }
        }
    }

    std::vector<std::string> warnings;
    for (std::size_t i = 1; i < comps.size(); ++i) {
        if (!(comps[i].power() < comps[i - 1].power())) {
            std::ostringstream msg;
            msg << "component powers not strictly decreasing at component " << i + 1 << " ("
                << comps[i - 1].power() << " -> " << comps[i].power()
                << "); sequential estimates may come out in a different order";
            warnings.push_back(msg.str());
        }
    }
    return warnings;
}

SignalGrid render(const std::vector<ChirpComponent>& components, Index M, Index N)
{
    require_dims(M, N, 1);
    Eigen::MatrixXd values = Eigen::MatrixXd::Zero(M, N);
    for (const auto& c : components) {
        for (Index j = 0; j < N; ++j) {
            for (Index i = 0; i < M; ++i) {
                const double phi = phase(c, i + 1, j + 1);
                values(i, j) += c.A * std::cos(phi) + c.B * std::sin(phi);
            }
        }
    }
    return SignalGrid(std::move(values));
}

SignalGrid synthesize(const ModelSpec& spec, Index M, Index N)
{
    require_dims(M, N, 4);
    check_model(spec);
    return add_noise(render(spec.components, M, N), spec.noise);
}

SignalGrid add_noise(const SignalGrid& grid, const NoiseSpec& noise)
{
    if (!(noise.sigma >= 0.0) || !std::isfinite(noise.sigma)) {
        throw std::invalid_argument("noise sigma must be finite and nonnegative");
    }
    if (noise.sigma == 0.0) {
        return grid;
    }
    Eigen::MatrixXd values = grid.matrix();
    GaussianSource draw(noise.seed);
    // Column-major draw order: y(1,1), y(2,1), ..., y(M,N).
    for (Index j = 0; j < values.cols(); ++j) {
        for (Index i = 0; i < values.rows(); ++i) {
            values(i, j) += noise.sigma * draw();
        }
    }
    return SignalGrid(std::move(values));
}

SignalGrid subtract(const SignalGrid& grid, const std::vector<ChirpComponent>& components)
{
    return SignalGrid(Eigen::MatrixXd(grid.matrix() - render(components, grid.rows(), grid.cols()).matrix()));
}

} // namespace chirp2d
