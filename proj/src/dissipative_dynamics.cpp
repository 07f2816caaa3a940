#include "cavcat/dissipative_dynamics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cavcat/errors.hpp"
#include "cavcat/numerics.hpp"

namespace cavcat {

namespace {

constexpr double kClipTolerance = 1e-12;

void check_time(double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidArgument("time must be finite and >= 0");
}

double clip_probability(double value)
{
    if (value < -kClipTolerance) {
        std::ostringstream msg;
        msg << "F* came out negative (" << value << ")";
        throw ConsistencyError(msg.str());
    }
    return value < 0.0 ? 0.0 : value;
}

} // namespace

DampingParams::DampingParams(double kappa, double n_thermal)
    : kappa_(kappa), n_thermal_(n_thermal)
{
    if (!(kappa > 0.0) || !std::isfinite(kappa))
        throw InvalidArgument("kappa must be finite and > 0");
    if (!(n_thermal >= 0.0) || !std::isfinite(n_thermal))
        throw InvalidArgument("n_thermal must be finite and >= 0");
}

RateCoefficients rate_coefficients(const DampingParams& damping, int n)
{
    if (n < -1)
        throw InvalidArgument("rate coefficients are defined for n >= -1");
    const double k2 = 2.0 * damping.kappa();
    const double nb = damping.n_thermal();
    if (n == -1)
        return {k2 * nb, k2 * (nb + 1.0), 0.0};
    return {k2 * (2.0 * nb * (n + 1) + n + 0.5), k2 * (nb + 1.0) * (n + 1.5), k2 * nb * (n + 0.5)};
}

Eigen::VectorXd f_star(const Eigen::Ref<const Eigen::VectorXd>& weights,
                       const DampingParams& damping, double t)
{
    check_time(t);
    const Eigen::Index size = weights.size();
    const double nb = damping.n_thermal();
    const double rate = 2.0 * damping.kappa() * (nb + 1.0);
    // 1 - e^{-2 kappa (n_b + 1) t}
    const double feed = -std::expm1(-rate * t);
    const double log_feed = feed > 0.0 ? std::log(feed) : 0.0;

    Eigen::VectorXd log_weight(size);
    double max_log_weight = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < size; ++j) {
        log_weight[j] = weights[j] != 0.0 ? std::log(std::abs(weights[j])) : 0.0;
        if (weights[j] != 0.0)
            max_log_weight = std::max(max_log_weight, log_weight[j]);
    }
    // log(j + 1/2) and log(k) for the coefficient recurrence.
    Eigen::VectorXd log_half(size), log_int(size);
    for (Eigen::Index j = 0; j < size; ++j) {
        log_half[j] = std::log(j + 0.5);
        log_int[j] = j > 0 ? std::log(double(j)) : 0.0;
    }
    // Terms this far below the largest one cannot change a double sum.
    constexpr double kNegligible = 80.0;

    Eigen::VectorXd result(size);
    std::vector<double> terms;
    terms.reserve(size);
    for (Eigen::Index n = 0; n < size; ++n) {
        const double log_prefactor =
            -2.0 * damping.kappa() * t * ((n + 0.5) * (nb + 1.0) + nb);
        terms.clear();
        double log_coeff = 0.0; // log[Gamma(j+3/2) feed^{j-n} / (Gamma(n+3/2) (j-n)!)]
        double log_largest = -std::numeric_limits<double>::infinity();
        for (Eigen::Index j = n; j < size; ++j) {
            if (j > n) {
                if (feed == 0.0)
                    break;
                const double step = log_half[j] + log_feed - log_int[j - n];
                log_coeff += step;
                // The steps decrease in j, so once negative the coefficients only shrink.
                if (step < 0.0 && log_coeff + max_log_weight < log_largest - kNegligible)
                    break;
            }
            if (weights[j] == 0.0)
                continue;
            const double log_term = log_prefactor + log_coeff + log_weight[j];
            log_largest = std::max(log_largest, log_term - log_prefactor);
            const double magnitude = std::exp(log_term);
            terms.push_back(weights[j] > 0.0 ? magnitude : -magnitude);
        }
        result[n] = sum_ascending(terms);
    }
    return result;
}

Eigen::VectorXd f_star(const PhotonDistribution& p0, const DampingParams& damping, double t)
{
    Eigen::VectorXd f = f_star(p0.probs(), damping, t);
    for (Eigen::Index n = 0; n < f.size(); ++n)
        f[n] = clip_probability(f[n]);
    return f;
}

double f_star_ground(const PhotonDistribution& p0, const DampingParams& damping, double t)
{
    const Eigen::VectorXd f = f_star(p0, damping, t);
    std::vector<double> terms(f.data(), f.data() + f.size());
    const double total = sum_ascending(terms);
    return std::clamp(2.0 * (1.0 - total), 0.0, 2.0);
}

double f_star_ground_double_sum(const PhotonDistribution& p0, const DampingParams& damping,
                                double t)
{
    check_time(t);
    const double nb = damping.n_thermal();
    const double kappa = damping.kappa();
    const double log_gamma_half = std::lgamma(1.5);
    CompensatedSum<double> outer;
    for (int j = 0; j <= p0.truncation(); ++j) {
        if (p0[j] == 0.0)
            continue;
        CompensatedSum<double> inner;
        for (int k = 0; k <= j; ++k) {
            const double log_coeff = std::lgamma(j + 1.5) - std::lgamma(j - k + 1.0)
                                     - std::lgamma(k + 1.0) - log_gamma_half;
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            inner.add(sign * std::exp(log_coeff - kappa * (2 * k + 1) * (nb + 1.0) * t)
                      / (k + 0.5));
        }
        outer.add(inner.value() * p0[j]);
    }
    return 2.0 - std::exp(-2.0 * kappa * nb * t) * outer.value();
}

Eigen::VectorXd offdiag_decay(const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const DampingParams& damping, double t)
{
    check_time(t);
    Eigen::VectorXd out(weights.size());
    for (Eigen::Index n = 0; n < weights.size(); ++n)
        out[n] = 0.5 * std::exp(-rate_coefficients(damping, int(n)).alpha * t) * weights[n];
    return out;
}

Eigen::VectorXd offdiag_decay(const PhotonDistribution& p0, const DampingParams& damping,
                              double t)
{
    return offdiag_decay(p0.probs(), damping, t);
}

DampedFieldState initial_field_state(const PhotonDistribution& p0)
{
    DampedFieldState state;
    state.f = p0.probs();
    state.f_ground = 0.0;
    state.offdiag = 0.5 * p0.probs();
    state.time = 0.0;
    return state;
}

DampedFieldState evolve(const DampedFieldState& state0, const DampingParams& damping, double t)
{
    if (state0.time != 0.0 || state0.f_ground != 0.0)
        throw InvalidArgument("evolve needs a t = 0 state");
    return evolve(PhotonDistribution(state0.f), damping, t);
}

DampedFieldState evolve(const PhotonDistribution& p0, const DampingParams& damping, double t)
{
    DampedFieldState state;
    state.f = f_star(p0, damping, t);
    std::vector<double> terms(state.f.data(), state.f.data() + state.f.size());
    state.f_ground = std::clamp(2.0 * (1.0 - sum_ascending(terms)), 0.0, 2.0);
    state.offdiag = offdiag_decay(p0, damping, t);
    state.time = t;
    if (!damping.small_thermal()) {
        std::ostringstream msg;
        msg << "n_b = " << damping.n_thermal() << " exceeds " << DampingParams::kSmallThermalLimit
            << "; the closed-form F* is only accurate for small n_b";
        state.warnings.push_back(msg.str());
    }
    return state;
}

ResidualReport residual_diagnostics(const PhotonDistribution& p0, const DampingParams& damping,
                                    double t, double dt)
{
    check_time(t);
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be > 0");

    const Eigen::VectorXd f = f_star(p0.probs(), damping, t);
    Eigen::VectorXd df;
    double f_ground = 2.0 * (1.0 - f.sum());
    double df_ground = 0.0;
    if (t >= dt) {
        const Eigen::VectorXd fp = f_star(p0.probs(), damping, t + dt);
        const Eigen::VectorXd fm = f_star(p0.probs(), damping, t - dt);
        df = (fp - fm) / (2.0 * dt);
        df_ground = -(fp.sum() - fm.sum()) / dt;
    } else {
        const Eigen::VectorXd f1 = f_star(p0.probs(), damping, t + dt);
        const Eigen::VectorXd f2 = f_star(p0.probs(), damping, t + 2.0 * dt);
        df = (-3.0 * f + 4.0 * f1 - f2) / (2.0 * dt);
        df_ground = -2.0 * (-3.0 * f.sum() + 4.0 * f1.sum() - f2.sum()) / (2.0 * dt);
    }

    ResidualReport report;
    const Eigen::Index size = f.size();
    for (Eigen::Index n = 0; n < size; ++n) {
        const auto c = rate_coefficients(damping, int(n));
        const double upper = n + 1 < size ? f[n + 1] : 0.0;
        const double lower = n > 0 ? f[n - 1] : f_ground;
        const double residual = df[n] + c.alpha * f[n] - c.beta * upper - c.gamma * lower
                                - c.gamma * (f[n] - lower);
        report.recurrence = std::max(report.recurrence, std::abs(residual));
        report.approximation_term =
            std::max(report.approximation_term, c.gamma * std::abs(f[n] - lower));
    }
    const auto g = rate_coefficients(damping, -1);
    report.ground_ode =
        std::abs(df_ground + g.alpha * f_ground - g.beta * f[0] - 4.0 * damping.kappa() * damping.n_thermal());
    return report;
}

} // namespace cavcat
