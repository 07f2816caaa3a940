#include "cavcat/observables.hpp"

#include <cmath>
#include <sstream>

#include "cavcat/errors.hpp"
#include "cavcat/numerics.hpp"

namespace cavcat {

namespace {

constexpr double kNegativeTolerance = 1e-10;

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidArgument("time must be finite and >= 0");
}

PhotonDistribution make_initial(const InitialField& field, int truncation)
{
    if (const auto* cat = std::get_if<CatSpec>(&field)) {
        const int n = truncation > 0 ? truncation : default_truncation(cat_mean_photons(*cat));
        return cat_distribution(*cat, n);
    }
    const auto& dist = std::get<PhotonDistribution>(field);
    if (truncation > 0 && truncation != dist.truncation())
        throw InvalidArgument("truncation does not match the supplied distribution");
    return dist;
}

double sum_of(const Eigen::VectorXd& v)
{
    std::vector<double> terms(v.data(), v.data() + v.size());
    return sum_ascending(terms);
}

// sum_n e^{-alpha_n tau} cos(2 g tau sqrt(n+1)) w_n / 2
double oscillating_sum(const Eigen::VectorXd& weights, const ExperimentConfig& config, double tau)
{
    CompensatedSum<double> acc;
    const double g = config.jc().g;
    for (Eigen::Index n = 0; n < weights.size(); ++n) {
        if (weights[n] == 0.0)
            continue;
        const double alpha = rate_coefficients(config.damping(), int(n)).alpha;
        acc.add(0.5 * std::exp(-alpha * tau) * std::cos(2.0 * g * tau * std::sqrt(n + 1.0))
                * weights[n]);
    }
    return acc.value();
}

void require_non_negative(Eigen::VectorXd& dist)
{
    for (Eigen::Index n = 0; n < dist.size(); ++n) {
        if (dist[n] < -kNegativeTolerance) {
            std::ostringstream msg;
            msg << "conditioned photon weight " << n << " is negative (" << dist[n] << ")";
            throw ConsistencyError(msg.str());
        }
        if (dist[n] < 0.0)
            dist[n] = 0.0;
    }
}

} // namespace

ExperimentConfig::ExperimentConfig(JCParams jc, DampingParams damping, InitialField field,
                                   int truncation)
    : jc_(jc), damping_(damping), field_(std::move(field)), initial_(make_initial(field_, truncation))
{
    if (!jc_.resonant())
        throw UnsupportedRegimeError("the analytic path requires resonance; use the oracle");
    if (!(jc_.g > 0.0))
        throw InvalidArgument("the analytic path requires g > 0");
    const double ratio = damping_.kappa() / jc_.g;
    if (ratio >= kSecularLimit) {
        std::ostringstream msg;
        msg << "kappa/g = " << ratio << " is not below " << kSecularLimit
            << "; secular corrections of this size are not captured";
        warnings_.push_back(msg.str());
    }
    if (!damping_.small_thermal()) {
        std::ostringstream msg;
        msg << "n_b = " << damping_.n_thermal() << " exceeds "
            << DampingParams::kSmallThermalLimit;
        warnings_.push_back(msg.str());
    }
}

double ExperimentConfig::mean_photons() const
{
    if (const auto* cat = std::get_if<CatSpec>(&field_))
        return cat_mean_photons(*cat);
    return initial_.mean();
}

double p_excited(const ExperimentConfig& config, double t)
{
    check_time(t);
    const double f_ground = f_star_ground(config.initial_distribution(), config.damping(), t);
    return 0.5 - 0.25 * f_ground + oscillating_sum(config.initial_distribution().probs(), config, t);
}

ConditionedField conditioned_field(const ExperimentConfig& config, double t_a, Outcome outcome)
{
    check_time(t_a);
    const PhotonDistribution& p0 = config.initial_distribution();
    const Eigen::VectorXd f = f_star(p0, config.damping(), t_a);
    const int size = p0.truncation() + 1;
    const double g = config.jc().g;

    ConditionedField out;
    out.condition = outcome;
    if (outcome == Outcome::Excited) {
        out.dist.resize(size);
        for (int n = 0; n < size; ++n) {
            const double alpha = rate_coefficients(config.damping(), n).alpha;
            out.dist[n] = 0.5 * (f[n] + std::exp(-alpha * t_a)
                                             * std::cos(2.0 * g * t_a * std::sqrt(n + 1.0)) * p0[n]);
        }
    } else {
        // The atom emitted: weight of level n-1 moves to n; the ground sector feeds n = 0.
        out.dist.resize(size + 1);
        out.dist[0] = 0.5 * std::clamp(2.0 * (1.0 - sum_of(f)), 0.0, 2.0);
        for (int n = 1; n <= size; ++n) {
            const double alpha = rate_coefficients(config.damping(), n - 1).alpha;
            out.dist[n] = 0.5 * (f[n - 1] - std::exp(-alpha * t_a)
                                                 * std::cos(2.0 * g * t_a * std::sqrt(double(n)))
                                                 * p0[n - 1]);
        }
    }
    require_non_negative(out.dist);
    out.weight = sum_of(out.dist);
    return out;
}

double p_joint(const ExperimentConfig& config, double t_a, double t_b, Outcome s1, Outcome s2)
{
    check_time(t_a);
    if (!(t_b >= t_a))
        throw InvalidArgument("p_joint needs t_B >= t_A");
    const ConditionedField first = conditioned_field(config, t_a, s1);
    const double tau = t_b - t_a;
    const Eigen::VectorXd relaxed = f_star(first.dist, config.damping(), tau);
    const double excited = 0.5 * sum_of(relaxed) + oscillating_sum(first.dist, config, tau);
    return s2 == Outcome::Excited ? excited : first.weight - excited;
}

std::optional<double> eta_correlation(const ExperimentConfig& config, double t)
{
    check_time(t);
    const double p_plus = p_excited(config, t);
    const double p_minus = 1.0 - p_plus;
    if (p_plus < kEtaGuard || p_minus < kEtaGuard)
        return std::nullopt;
    const double pp = p_joint(config, t, 2.0 * t, Outcome::Excited, Outcome::Excited);
    const double mp = p_joint(config, t, 2.0 * t, Outcome::Ground, Outcome::Excited);
    return pp / p_plus - mp / p_minus;
}

double decoherence_time(const ExperimentConfig& config)
{
    const double nbar = config.mean_photons();
    if (!(nbar > 0.0))
        throw InvalidArgument("decoherence time needs a positive mean photon number");
    return config.damping().t_cav() / (nbar * (1.0 + config.damping().n_thermal()));
}

} // namespace cavcat
