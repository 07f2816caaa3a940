#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cavcat/photon_states.hpp"

namespace cavcat {

// Cavity damping: field decay constant kappa (2 kappa = 1/t_cav) and thermal
// occupation n_b of the mode.
class DampingParams {
public:
    // Above this n_b the closed-form F* is outside its small-n_b regime.
    static constexpr double kSmallThermalLimit = 0.5;

    DampingParams(double kappa, double n_thermal);

    double kappa() const { return kappa_; }
    double n_thermal() const { return n_thermal_; }
    double t_cav() const { return 1.0 / (2.0 * kappa_); }
    bool small_thermal() const { return n_thermal_ <= kSmallThermalLimit; }

private:
    double kappa_;
    double n_thermal_;
};

struct RateCoefficients {
    double alpha;
    double beta;
    double gamma;
};

// alpha_n, beta_n, gamma_n of the secular rate equations for F_n (n >= -1).
RateCoefficients rate_coefficients(const DampingParams& damping, int n);

// Closed-form approximate F*_n(t), n = 0..N, for arbitrary non-negative initial
// weights (they need not be normalized). Linear in `weights`.
Eigen::VectorXd f_star(const Eigen::Ref<const Eigen::VectorXd>& weights,
                       const DampingParams& damping, double t);
Eigen::VectorXd f_star(const PhotonDistribution& p0, const DampingParams& damping, double t);

// F*_{-1}(t) = 2 (1 - sum_n F*_n(t)), clamped to [0, 2].
double f_star_ground(const PhotonDistribution& p0, const DampingParams& damping, double t);

// F*_{-1}(t) from the alternating double sum over j, k. Only usable for small
// N (cancellation); kept as an independent cross-check of f_star_ground.
double f_star_ground_double_sum(const PhotonDistribution& p0, const DampingParams& damping,
                                double t);

// <psi^{+-}_n|W(t)|psi^{-+}_n> = e^{-alpha_n t} p_n / 2.
Eigen::VectorXd offdiag_decay(const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const DampingParams& damping, double t);
Eigen::VectorXd offdiag_decay(const PhotonDistribution& p0, const DampingParams& damping,
                              double t);

struct DampedFieldState {
    Eigen::VectorXd f;       // F*_n
    double f_ground = 0.0;   // F*_{-1}
    Eigen::VectorXd offdiag; // <psi^+_n|W|psi^-_n>
    double time = 0.0;       // s
    std::vector<std::string> warnings;

    double unitarity_defect() const { return f_ground / 2.0 + f.sum() - 1.0; }
};

DampedFieldState initial_field_state(const PhotonDistribution& p0);

// Packages F*, F*_{-1} and the off-diagonal decay at time t, starting from a
// t = 0 state (whose F_n are the photon probabilities).
DampedFieldState evolve(const DampedFieldState& state0, const DampingParams& damping, double t);
DampedFieldState evolve(const PhotonDistribution& p0, const DampingParams& damping, double t);

struct ResidualReport {
    // max_n |dF*_n + alpha_n F*_n - beta_n F*_{n+1} - gamma_n F*_{n-1} - gamma_n (F*_n - F*_{n-1})|
    double recurrence = 0.0;
    // |dF*_{-1} + alpha_{-1} F*_{-1} - beta_{-1} F*_0 - 4 kappa n_b|
    double ground_ode = 0.0;
    // max_n gamma_n |F*_n - F*_{n-1}|: the neglected term itself.
    double approximation_term = 0.0;
};

// Time derivatives by centered differences with step dt (forward at t < dt).
ResidualReport residual_diagnostics(const PhotonDistribution& p0, const DampingParams& damping,
                                    double t, double dt);

} // namespace cavcat
