#pragma once

#include <cmath>

namespace chirp2d {

/// Neumaier (improved Kahan) running sum.
class CompensatedSum {
public:
    void add(double x) noexcept
    {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            carry_ += (sum_ - t) + x;
        } else {
            carry_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept
    {
        add(x);
        return *this;
    }

    [[nodiscard]] double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

/// Compensated dot product of two strided sequences of length n.
template<typename A, typename B>
[[nodiscard]] double compensated_dot(const A& a, const B& b, long n) noexcept
{
    CompensatedSum s;
    for (long i = 0; i < n; ++i) {
        s.add(a[i] * b[i]);
    }
    return s.value();
}

} // namespace chirp2d
