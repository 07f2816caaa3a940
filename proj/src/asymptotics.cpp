#include "cavcat/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cavcat/errors.hpp"
#include "cavcat/numerics.hpp"

namespace cavcat {

ResumParams::ResumParams(double nbar, double phase, int max_order, DampingParams damping, double g)
    : nbar_(nbar), phase_(phase), max_order_(max_order), damping_(damping), g_(g)
{
    if (!(nbar > 0.0) || !std::isfinite(nbar))
        throw InvalidArgument("nbar must be finite and > 0");
    if (!std::isfinite(phase))
        throw InvalidArgument("phase must be finite");
    if (max_order < 1)
        throw InvalidArgument("resummation order must be >= 1");
    if (!(g > 0.0))
        throw InvalidArgument("g must be > 0");
}

double ResumParams::alpha_nbar() const
{
    const double nb = damping_.n_thermal();
    return 2.0 * damping_.kappa() * (2.0 * nb * (1.0 + nbar_) + nbar_ + 0.5);
}

double fractional_poisson(double nbar, double x)
{
    if (!(x >= 0.0))
        throw InvalidArgument("fractional_poisson needs x >= 0");
    return std::exp(log_poisson_weight(nbar, x));
}

double collapse_wave(const ResumParams& params, double t)
{
    const double gt = params.g() * t;
    return std::exp(-gt * gt / 2.0) * std::cos(2.0 * gt * std::sqrt(params.nbar()));
}

double revival_wave(const ResumParams& params, double nu, double t)
{
    if (!(nu > 0.0))
        throw InvalidArgument("revival order must be > 0");
    if (!(t >= 0.0))
        throw InvalidArgument("time must be >= 0");
    constexpr double pi = std::numbers::pi;
    const double gt = params.g() * t;
    const double x = gt * gt / (4.0 * pi * pi * nu * nu);
    const double amplitude = fractional_poisson(params.nbar(), x) * gt / (pi * std::sqrt(2.0 * nu * nu * nu));
    return amplitude * std::cos(gt * gt / (2.0 * pi * nu) - pi / 4.0);
}

ResummedProbability resummed_p_excited(const ResumParams& params, double t)
{
    if (!(t >= 0.0) || !std::isfinite(t))
        throw InvalidArgument("time must be finite and >= 0");
    const double kappa = params.damping().kappa();
    const double nb = params.damping().n_thermal();
    const double cos_phase = std::cos(params.phase());

    double waves = collapse_wave(params, t);
    if (t > 0.0) {
        for (int nu = 1; nu <= params.max_order(); ++nu)
            waves += revival_wave(params, nu, t) - revival_wave(params, nu - 0.5, t) * cos_phase;
    }

    ResummedProbability out;
    out.value = 0.5 * std::exp(-2.0 * kappa * nb * t) + 0.5 * std::exp(-params.alpha_nbar() * t) * waves;
    const double ratio = params.alpha_nbar() / params.g();
    if (ratio >= ResumParams::kValidityRatio) {
        std::ostringstream msg;
        msg << "alpha_nbar/g = " << ratio << " is not small; damping treated only to leading order";
        out.warning = msg.str();
    } else if (params.nbar() < ResumParams::kSmallNbar) {
        out.warning = "nbar below 10: the resummation is an asymptotic large-nbar form";
    }
    return out;
}

} // namespace cavcat
