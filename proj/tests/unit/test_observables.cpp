#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"

#include "cavcat/errors.hpp"
#include "cavcat/lindblad_oracle.hpp"
#include "cavcat/observables.hpp"

using namespace cavcat;
using doctest::Approx;

namespace {

constexpr double kBensonKappa = 8.33, kBensonG = 36000.0;
constexpr double kBruneKappa = 2500.0, kBruneG = 24000.0;

ExperimentConfig coherent_config(double nbar, double kappa, double g, double nb)
{
    return ExperimentConfig(JCParams(g), DampingParams(kappa, nb),
                            coherent_distribution(nbar, default_truncation(nbar)));
}

// Oracle joint probability: evolve to t_a, keep the branch s1, re-inject an
// excited atom and evolve for another t_b - t_a.
double oracle_joint(const oracle::DensityMatrix& rho0, const oracle::BlockPropagator& propagator,
                    double t_a, double t_b, Outcome s1, Outcome s2)
{
    const auto first = propagator.propagate(rho0, t_a);
    const auto second = propagator.propagate(oracle::condition_and_reinject(first, s1), t_b - t_a);
    const double excited = second.field_block(AtomLevel::Excited).trace().real();
    return s2 == Outcome::Excited ? excited : second.trace().real() - excited;
}

} // namespace

TEST_SUITE("observables") {

TEST_CASE("configuration guards")
{
    const auto p = coherent_distribution(4.0, 32);
    CHECK_THROWS_AS(ExperimentConfig(JCParams(1.0, 0.1), DampingParams(0.01, 0.0), p),
                    UnsupportedRegimeError);
    CHECK(coherent_config(4.0, kBensonKappa, kBensonG, 0.1).warnings().empty());
    CHECK(coherent_config(3.3, kBruneKappa, kBruneG, 0.1).warnings().size() == 1);
    CHECK(coherent_config(3.3, kBensonKappa, kBensonG, 0.7).warnings().size() == 1);
    const ExperimentConfig cat(JCParams(kBensonG), DampingParams(kBensonKappa, 0.0), CatSpec(49.0, 0.0));
    CHECK(cat.truncation() == default_truncation(49.0));
    CHECK(cat.mean_photons() == Approx(49.0));
}

TEST_CASE("P_+ at t = 0 and coherent revival")
{
    const auto config = coherent_config(49.0, kBensonKappa, kBensonG, 0.1);
    CHECK(p_excited(config, 0.0) == Approx(1.0).epsilon(1e-14));
    double best = -1.0, best_gt = 0.0;
    for (double gt = 33.0; gt <= 55.0; gt += 0.01) {
        const double v = p_excited(config, gt / kBensonG);
        if (v > best) {
            best = v;
            best_gt = gt;
        }
    }
    CHECK(best_gt == Approx(2 * std::numbers::pi * 7.0).epsilon(0.05));
}

TEST_CASE("conditioned fields")
{
    const auto config = coherent_config(9.0, kBensonKappa, kBensonG, 0.1);
    const auto plus0 = conditioned_field(config, 0.0, Outcome::Excited);
    CHECK(plus0.weight == Approx(1.0));
    CHECK((plus0.dist - config.initial_distribution().probs()).cwiseAbs().maxCoeff() < 1e-15);
    const auto minus0 = conditioned_field(config, 0.0, Outcome::Ground);
    CHECK(std::abs(minus0.weight) < 1e-14);
    CHECK(minus0.dist.size() == config.truncation() + 2);

    for (double gt : {0.3, 5.0, 22.0, 300.0}) {
        const double t = gt / kBensonG;
        const auto plus = conditioned_field(config, t, Outcome::Excited);
        const auto minus = conditioned_field(config, t, Outcome::Ground);
        CHECK(plus.weight + minus.weight == Approx(1.0).epsilon(1e-12));
        CHECK(plus.weight == Approx(p_excited(config, t)).epsilon(1e-12));
        CHECK(plus.dist.minCoeff() >= 0.0);
        CHECK(minus.dist.minCoeff() >= 0.0);
    }
}

TEST_CASE("joint probabilities")
{
    const auto config = coherent_config(9.0, kBensonKappa, kBensonG, 0.1);
    CHECK(p_joint(config, 0.0, 0.0, Outcome::Excited, Outcome::Excited) == Approx(1.0));
    CHECK(p_joint(config, 0.0, 0.0, Outcome::Excited, Outcome::Ground) == Approx(0.0).scale(1.0));
    CHECK(p_joint(config, 0.0, 0.0, Outcome::Ground, Outcome::Excited) == Approx(0.0).scale(1.0));
    CHECK(p_joint(config, 0.0, 0.0, Outcome::Ground, Outcome::Ground) == Approx(0.0).scale(1.0));
    for (double gt : {0.7, 3.0, 12.5}) {
        const double t = gt / kBensonG;
        CHECK(p_joint(config, t, t, Outcome::Excited, Outcome::Excited) ==
              Approx(p_excited(config, t)).epsilon(1e-12));
        for (Outcome s1 : {Outcome::Excited, Outcome::Ground}) {
            const double sum = p_joint(config, t, 2 * t, s1, Outcome::Excited) +
                               p_joint(config, t, 2 * t, s1, Outcome::Ground);
            const double marginal = s1 == Outcome::Excited ? p_excited(config, t) : 1.0 - p_excited(config, t);
            CHECK(std::abs(sum - marginal) < 1e-8);
        }
        CHECK(p_joint(config, t, 2 * t, Outcome::Excited, Outcome::Excited) <= p_excited(config, t));
    }
    CHECK_THROWS_AS(p_joint(config, 2.0, 1.0, Outcome::Excited, Outcome::Excited), InvalidArgument);
}

TEST_CASE("eta correlation")
{
    const auto config = coherent_config(49.0, kBensonKappa, kBensonG, 0.1);
    CHECK_FALSE(eta_correlation(config, 0.0).has_value());
    for (double gt = 0.5; gt <= 60.0; gt += 0.5) {
        const auto eta = eta_correlation(config, gt / kBensonG);
        REQUIRE(eta.has_value());
        CHECK(std::abs(*eta) <= 1.0);
    }
}

TEST_CASE("decoherence time")
{
    const auto cold = coherent_config(49.0, kBensonKappa, kBensonG, 0.0);
    CHECK(decoherence_time(cold) == Approx(1.0 / 16.66 / 49.0));
    CHECK(decoherence_time(cold) * kBensonG == Approx(44.1).epsilon(1e-3));
    const auto doubled = coherent_config(98.0, kBensonKappa, kBensonG, 0.0);
    CHECK(decoherence_time(doubled) == Approx(decoherence_time(cold) / 2).epsilon(1e-9));
    const auto warm = coherent_config(49.0, kBensonKappa, kBensonG, 0.2);
    CHECK(decoherence_time(warm) == Approx(decoherence_time(cold) / 1.2));
    const auto empty = coherent_config(0.0, kBensonKappa, kBensonG, 0.0);
    CHECK_THROWS_AS(decoherence_time(empty), InvalidArgument);
}

TEST_CASE("P_+ and conditioned fields agree with the oracle at zero temperature")
{
    const auto config = coherent_config(4.0, kBensonKappa, kBensonG, 0.0);
    const int N = config.truncation();
    const JCParams jc(kBensonG);
    const oracle::LindbladGenerator generator(jc, oracle::Dissipation(kBensonKappa, 0.0), N);
    const oracle::BlockPropagator propagator(generator);
    const auto rho0 = oracle::build_coherent_initial_state(4.0, N);

    for (double gt : {1.0, 7.3, 40.0, 900.0}) {
        const double t = gt / kBensonG;
        const auto rho = propagator.propagate(rho0, t);
        CHECK(std::abs(rho.field_block(AtomLevel::Excited).trace().real() - p_excited(config, t)) < 1e-3);
        const Eigen::VectorXd oracle_plus = rho.field_block(AtomLevel::Excited).diagonal().real();
        const Eigen::VectorXd oracle_minus = rho.field_block(AtomLevel::Ground).diagonal().real();
        const auto plus = conditioned_field(config, t, Outcome::Excited);
        const auto minus = conditioned_field(config, t, Outcome::Ground);
        CHECK((plus.dist - oracle_plus).cwiseAbs().maxCoeff() < 1e-3);
        CHECK((minus.dist.head(N + 1) - oracle_minus).cwiseAbs().maxCoeff() < 1e-3);
    }
}

TEST_CASE("finite-temperature drift from the oracle grows with n_b kappa t")
{
    // the closed form drops gamma_n (F_n - F_{n-1}), so the gap opens linearly in time
    const double nb = 0.1;
    const auto config = coherent_config(4.0, kBensonKappa, kBensonG, nb);
    const int N = config.truncation();
    const oracle::LindbladGenerator generator(JCParams(kBensonG), oracle::Dissipation(kBensonKappa, nb), N);
    const oracle::BlockPropagator propagator(generator);
    const auto rho0 = oracle::build_coherent_initial_state(4.0, N);
    for (double gt : {40.0, 300.0, 900.0}) {
        const double t = gt / kBensonG;
        const double envelope = 3.0 * nb * kBensonKappa * t + 1e-3;
        const auto rho = propagator.propagate(rho0, t);
        CHECK(std::abs(rho.field_block(AtomLevel::Excited).trace().real() - p_excited(config, t)) < envelope);
        const Eigen::VectorXd oracle_minus = rho.field_block(AtomLevel::Ground).diagonal().real();
        const auto minus = conditioned_field(config, t, Outcome::Ground);
        CHECK((minus.dist.head(N + 1) - oracle_minus).cwiseAbs().maxCoeff() < envelope);
    }
}

TEST_CASE("joint probabilities agree with the oracle")
{
    const auto config = coherent_config(4.0, kBensonKappa, kBensonG, 0.0);
    const int N = config.truncation();
    const JCParams jc(kBensonG);
    const oracle::LindbladGenerator generator(jc, oracle::Dissipation(kBensonKappa, 0.0), N);
    const oracle::BlockPropagator propagator(generator);
    const auto rho0 = oracle::build_coherent_initial_state(4.0, N);
    for (double gt : {0.8, 6.0, 25.0}) {
        const double t = gt / kBensonG;
        for (Outcome s1 : {Outcome::Excited, Outcome::Ground})
            for (Outcome s2 : {Outcome::Excited, Outcome::Ground})
                CHECK(std::abs(p_joint(config, t, 2 * t, s1, s2) - oracle_joint(rho0, propagator, t, 2 * t, s1, s2)) <
                      2e-3); // a few nbar kappa / g
    }
}

TEST_CASE("cat joint probability at brune96 parameters: revival peak heights")
{
    const double nb = 0.1;
    const ExperimentConfig config(JCParams(kBruneG), DampingParams(kBruneKappa, nb), CatSpec(3.3, 0.0));
    const int N = config.truncation();
    const oracle::LindbladGenerator generator(JCParams(kBruneG), oracle::Dissipation(kBruneKappa, nb), N);
    const oracle::BlockPropagator propagator(generator);
    constexpr double step = 0.1;
    constexpr int count = 250;
    const auto stepper = propagator.stepper(step / kBruneG, count);

    std::vector<double> analytic, exact;
    auto rho = oracle::build_initial_state(CatSpec(3.3, 0.0), N);
    for (int k = 1; k <= count; ++k) {
        rho = stepper.advance(rho);
        const auto second = stepper.advance(oracle::condition_and_reinject(rho, AtomLevel::Excited), k);
        exact.push_back(second.field_block(AtomLevel::Excited).trace().real());
        const double t = k * step / kBruneG;
        analytic.push_back(p_joint(config, t, 2 * t, Outcome::Excited, Outcome::Excited));
    }
    // local maxima of the analytic curve past the initial Rabi transient (gt >= 3)
    double worst_peak = 0.0, worst = 0.0;
    int peaks = 0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        worst = std::max(worst, std::abs(analytic[k] - exact[k]));
        if (k == 0 || k + 1 == analytic.size() || (k + 1) * step < 3.0)
            continue;
        if (analytic[k] > analytic[k - 1] && analytic[k] >= analytic[k + 1]) {
            ++peaks;
            const auto lo = k >= 5 ? k - 5 : 0, hi = std::min(k + 5, exact.size() - 1);
            const double oracle_peak = *std::max_element(exact.begin() + lo, exact.begin() + hi + 1);
            worst_peak = std::max(worst_peak, std::abs(analytic[k] - oracle_peak));
        }
    }
    MESSAGE("brune96 cat P_++: peak height gap " << worst_peak << ", pointwise sup " << worst);
    CHECK(peaks >= 3);
    CHECK(worst_peak < 0.1);
}

} // TEST_SUITE
