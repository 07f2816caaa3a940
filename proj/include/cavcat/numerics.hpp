#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <vector>

namespace cavcat {

// Neumaier-compensated accumulator.
template <std::floating_point Scalar>
class CompensatedSum {
public:
    void add(Scalar x)
    {
        const Scalar t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }

    Scalar value() const { return sum_ + comp_; }

private:
    Scalar sum_{0};
    Scalar comp_{0};
};

// Sums the terms in ascending magnitude with compensation. Reorders `terms`.
template <std::floating_point Scalar>
Scalar sum_ascending(std::vector<Scalar>& terms)
{
    std::sort(terms.begin(), terms.end(),
              [](Scalar a, Scalar b) { return std::abs(a) < std::abs(b); });
    CompensatedSum<Scalar> acc;
    for (Scalar x : terms)
        acc.add(x);
    return acc.value();
}

// log of mean^x e^{-mean} / Gamma(x + 1) for real x >= 0.
template <std::floating_point Scalar>
Scalar log_poisson_weight(Scalar mean, Scalar x)
{
    if (mean == Scalar(0))
        return x == Scalar(0) ? Scalar(0) : -std::numeric_limits<Scalar>::infinity();
    return x * std::log(mean) - mean - std::lgamma(x + Scalar(1));
}

// log Gamma(a) - log Gamma(b) for positive arguments.
template <std::floating_point Scalar>
Scalar log_gamma_ratio(Scalar a, Scalar b)
{
    return std::lgamma(a) - std::lgamma(b);
}

} // namespace cavcat
