#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cavcat/asymptotics.hpp"
#include "cavcat/errors.hpp"
#include "cavcat/photon_states.hpp"

using namespace cavcat;
using doctest::Approx;

namespace {

constexpr double kBensonKappa = 8.33, kBensonG = 36000.0;

ResumParams benson(double nbar, double phase, int order, double nb = 0.1)
{
    return ResumParams(nbar, phase, order, DampingParams(kBensonKappa, nb), kBensonG);
}

// Location of the largest |revival_wave| sample in [lo, hi] (gt units).
double wave_peak(const ResumParams& params, double nu, double lo, double hi)
{
    double best = -1.0, at = lo;
    for (double gt = lo; gt <= hi; gt += 0.002) {
        const double v = std::abs(revival_wave(params, nu, gt / params.g()));
        if (v > best) {
            best = v;
            at = gt;
        }
    }
    return at;
}

} // namespace

TEST_SUITE("asymptotics") {

TEST_CASE("fractional Poisson weight")
{
    CHECK(fractional_poisson(49.0, 49.0) == Approx(0.05690).epsilon(1e-4));
    CHECK(fractional_poisson(49.0, 49.0) == Approx(coherent_distribution(49.0, 120)[49]).epsilon(1e-12));
    CHECK(fractional_poisson(49.0, 0.0) == Approx(std::exp(-49.0)));
    const double peak = fractional_poisson(49.0, 49.0);
    CHECK(fractional_poisson(49.0, 48.5) == Approx(peak).epsilon(0.01));
    CHECK(fractional_poisson(49.0, 49.5) == Approx(peak).epsilon(0.01));
    CHECK_THROWS_AS(fractional_poisson(49.0, -0.5), InvalidArgument);
}

TEST_CASE("collapse and revival waves")
{
    const auto params = benson(49.0, 0.0, 3);
    CHECK(collapse_wave(params, 0.0) == 1.0);
    CHECK(std::abs(revival_wave(params, 1.0, 1e-3 / kBensonG)) < 1e-20);
    for (double nu : {0.5, 1.0, 1.5}) {
        const double expected = 2 * std::numbers::pi * nu * 7.0;
        CHECK(wave_peak(params, nu, 0.6 * expected, 1.4 * expected) == Approx(expected).epsilon(0.03));
    }
    CHECK_THROWS_AS(revival_wave(params, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("resummed probability")
{
    const auto even = benson(49.0, 0.0, 3);
    CHECK(resummed_p_excited(even, 0.0).value == Approx(1.0).epsilon(1e-14));
    CHECK_FALSE(resummed_p_excited(even, 0.0).warning.has_value());

    // cos(phi) = 0 leaves collapse and integer-order waves only
    const auto quarter = benson(49.0, std::numbers::pi / 2, 3);
    for (double gt : {5.0, 22.0, 44.0}) {
        const double t = gt / kBensonG;
        double waves = collapse_wave(quarter, t);
        for (int nu = 1; nu <= 3; ++nu)
            waves += revival_wave(quarter, nu, t);
        const double expected = 0.5 * std::exp(-2 * kBensonKappa * 0.1 * t) +
                                0.5 * std::exp(-quarter.alpha_nbar() * t) * waves;
        CHECK(resummed_p_excited(quarter, t).value == Approx(expected).epsilon(1e-10));
    }
}

TEST_CASE("phase enters through cos(phi) only")
{
    for (double phi : {0.3, 1.9, 4.0}) {
        for (double gt : {11.0, 22.5, 40.0}) {
            const double t = gt / kBensonG;
            const double base = resummed_p_excited(benson(49.0, phi, 3), t).value;
            CHECK(resummed_p_excited(benson(49.0, -phi, 3), t).value == Approx(base).epsilon(1e-12));
            CHECK(resummed_p_excited(benson(49.0, phi + 2 * std::numbers::pi, 3), t).value ==
                  Approx(base).epsilon(1e-12));
        }
    }
}

TEST_CASE("resummation order converges")
{
    double worst = 0.0;
    for (double gt = 0.0; gt <= 50.0; gt += 0.01) {
        const double t = gt / kBensonG;
        worst = std::max(worst, std::abs(resummed_p_excited(benson(49.0, 0.0, 3), t).value -
                                         resummed_p_excited(benson(49.0, 0.0, 6), t).value));
    }
    CHECK(worst < 1e-3);
}

TEST_CASE("validity notes")
{
    CHECK(resummed_p_excited(benson(5.0, 0.0, 3), 1e-4).warning.has_value());
    const ResumParams strong(49.0, 0.0, 3, DampingParams(2500.0, 0.1), 24000.0);
    CHECK(resummed_p_excited(strong, 1e-4).warning.has_value());
    CHECK_THROWS_AS(ResumParams(49.0, 0.0, 0, DampingParams(1.0, 0.0), 1.0), InvalidArgument);
    CHECK_THROWS_AS(ResumParams(0.0, 0.0, 3, DampingParams(1.0, 0.0), 1.0), InvalidArgument);
}

} // TEST_SUITE
