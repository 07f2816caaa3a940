#pragma once

#include <optional>
#include <string>

#include "cavcat/dissipative_dynamics.hpp"

namespace cavcat {

// Large-nbar resummation of P_+ for a cat (or, at phase pi/2, coherent) field.
class ResumParams {
public:
    // Valid while alpha_nbar / g stays below this.
    static constexpr double kValidityRatio = 0.1;
    static constexpr double kSmallNbar = 10.0;

    ResumParams(double nbar, double phase, int max_order, DampingParams damping, double g);

    double nbar() const { return nbar_; }
    double phase() const { return phase_; }
    int max_order() const { return max_order_; }
    const DampingParams& damping() const { return damping_; }
    double g() const { return g_; }

    // alpha evaluated at the mean photon number.
    double alpha_nbar() const;

private:
    double nbar_;
    double phase_;
    int max_order_;
    DampingParams damping_;
    double g_;
};

struct ResummedProbability {
    double value = 0.0;
    std::optional<std::string> warning;
};

// nbar^x e^{-nbar} / Gamma(x + 1) for real x >= 0.
double fractional_poisson(double nbar, double x);

// Collapse term: e^{-g^2 t^2 / 2} cos(2 g t sqrt(nbar)).
double collapse_wave(const ResumParams& params, double t);

// Revival wave of order nu > 0 (integer or half-integer).
double revival_wave(const ResumParams& params, double nu, double t);

ResummedProbability resummed_p_excited(const ResumParams& params, double t);

} // namespace cavcat
