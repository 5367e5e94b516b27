#include "chirp2d/rng.hpp"

#include <cmath>

namespace chirp2d {

std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path) noexcept
{
    std::uint64_t h = mix64(base);
    for (std::uint64_t index : path) {
        h = mix64(h ^ mix64(index + 0x632be59bd9b4e019ULL));
    }
    return h;
}

GaussianSource::GaussianSource(std::uint64_t seed) : engine_(mix64(seed)) {}

double GaussianSource::uniform()
{
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double GaussianSource::operator()()
{
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u = 0.0;
    double v = 0.0;
    double s = 0.0;
    do {
        u = 2.0 * uniform() - 1.0;
        v = 2.0 * uniform() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

} // namespace chirp2d
