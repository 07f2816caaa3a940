#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cavcat/errors.hpp"
#include "cavcat/photon_states.hpp"

using namespace cavcat;
using doctest::Approx;

namespace {

// Poisson pmf by the product recurrence p_n = p_{n-1} mean / n in long double.
long double poisson_by_products(double mean, int n)
{
    long double p = std::exp(-static_cast<long double>(mean));
    for (int k = 1; k <= n; ++k)
        p *= static_cast<long double>(mean) / k;
    return p;
}

} // namespace

TEST_SUITE("photon_states") {

TEST_CASE("vacuum is a single Fock state")
{
    const auto p = coherent_distribution(0.0, 8);
    CHECK(p[0] == 1.0);
    for (int n = 1; n <= 8; ++n)
        CHECK(p[n] == 0.0);
}

TEST_CASE("coherent weights at mean 49")
{
    const auto p = coherent_distribution(49.0, 120);
    CHECK(p[49] == Approx(0.05690).epsilon(1e-4));
    for (int n : {0, 10, 49, 80, 120})
        CHECK(p[n] == Approx(double(poisson_by_products(49.0, n))).epsilon(1e-12));
    CHECK(std::abs(p.total() - 1.0) < 1e-10);
    CHECK(p.mean() == Approx(49.0).epsilon(1e-9));
}

TEST_CASE("truncation that drops real mass is refused")
{
    CHECK_THROWS_AS(coherent_distribution(49.0, 60), TruncationLossError);
    CHECK_THROWS_AS(coherent_distribution(-1.0, 60), InvalidArgument);
}

TEST_CASE("default truncation rule")
{
    CHECK(default_truncation(0.0) == 32);
    CHECK(default_truncation(4.0) == 32);
    CHECK(default_truncation(49.0) == static_cast<int>(std::ceil(49.0 + 10.0 * std::sqrt(50.0))));
}

TEST_CASE("even cat has no odd components")
{
    const auto p = cat_distribution(CatSpec(49.0, 0.0), 120);
    for (int n = 1; n <= 120; n += 2)
        CHECK(p[n] == 0.0);
    CHECK(std::abs(p.total() - 1.0) < 1e-10);
}

TEST_CASE("odd cat at zero intensity is degenerate")
{
    CHECK_THROWS_AS(cat_distribution(CatSpec(0.0, std::numbers::pi), 8), DegenerateStateError);
}

TEST_CASE("quarter-phase cat equals the coherent state")
{
    const auto cat = cat_distribution(CatSpec(49.0, std::numbers::pi / 2), 120);
    const auto coh = coherent_distribution(49.0, 120);
    for (int n = 0; n <= 120; ++n)
        CHECK(std::abs(cat[n] - coh[n]) < 1e-12);
}

TEST_CASE("cat mean photon number")
{
    CHECK(cat_mean_photons(CatSpec(49.0, 0.0)) == Approx(49.0 * std::tanh(49.0)));
    CHECK(cat_mean_photons(CatSpec(3.3, 0.0)) == Approx(3.3 * std::tanh(3.3)).epsilon(1e-12));
    CHECK(cat_mean_photons(CatSpec(49.0, std::numbers::pi / 2)) == Approx(49.0).epsilon(1e-15));
}

TEST_CASE("branch overlap")
{
    CHECK(branch_overlap(49.0) == Approx(2.75e-43).epsilon(1e-2));
    CHECK(branch_overlap(0.0) == 1.0);
    CHECK(branch_overlap(1.0) == Approx(0.1353).epsilon(1e-3));
}

TEST_CASE("phase is reduced to [0, 2 pi)")
{
    CHECK(CatSpec(1.0, -std::numbers::pi / 2).phase() == Approx(1.5 * std::numbers::pi));
    CHECK(CatSpec(1.0, 2 * std::numbers::pi).phase() == Approx(0.0));
    CHECK_THROWS_AS(CatSpec(-1.0, 0.0), InvalidArgument);
}

TEST_CASE("cat amplitudes reproduce the distribution")
{
    const CatSpec cat(2.5, 1.1);
    const auto amp = cat_amplitudes(cat, 40);
    const auto p = cat_distribution(cat, 40);
    CHECK(amp.squaredNorm() == Approx(1.0).epsilon(1e-12));
    for (int n = 0; n <= 40; ++n)
        CHECK(std::norm(amp[n]) == Approx(p[n]).epsilon(1e-12));
}

} // TEST_SUITE
