#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "cavcat/dissipative_dynamics.hpp"
#include "cavcat/jc_core.hpp"
#include "cavcat/photon_states.hpp"

namespace cavcat {

// Measured state of an atom leaving the cavity.
using Outcome = AtomLevel;

using InitialField = std::variant<CatSpec, PhotonDistribution>;

// One atom-cavity experiment evaluated on the analytic path. The initial
// photon distribution is computed once at construction.
class ExperimentConfig {
public:
    // Above this kappa/g the secular approximation is no longer small.
    static constexpr double kSecularLimit = 0.1;

    // truncation <= 0 selects default_truncation(mean photon number).
    ExperimentConfig(JCParams jc, DampingParams damping, InitialField field, int truncation = 0);

    const JCParams& jc() const { return jc_; }
    const DampingParams& damping() const { return damping_; }
    const InitialField& field() const { return field_; }
    const PhotonDistribution& initial_distribution() const { return initial_; }
    int truncation() const { return initial_.truncation(); }
    double mean_photons() const;

    // Regime notes (small n_b, kappa << g) that do not prevent evaluation.
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    JCParams jc_;
    DampingParams damping_;
    InitialField field_;
    PhotonDistribution initial_;
    std::vector<std::string> warnings_;
};

// Unnormalized field distribution after the atom is found in `condition`.
struct ConditionedField {
    Eigen::VectorXd dist;
    double weight = 0.0; // = P_condition(t_A)
    Outcome condition = Outcome::Excited;
};

// P_+(t) for an atom entering in the excited state.
double p_excited(const ExperimentConfig& config, double t);

ConditionedField conditioned_field(const ExperimentConfig& config, double t_a, Outcome outcome);

// Joint probability P(first atom s1 at t_A, next atom s2 at t_B).
double p_joint(const ExperimentConfig& config, double t_a, double t_b, Outcome s1, Outcome s2);

// eta(t) = P_{++}/P_+ - P_{-+}/P_- with t_A = t, t_B = 2t. Empty when P_+ or P_-
// falls below kEtaGuard.
inline constexpr double kEtaGuard = 1e-6;
std::optional<double> eta_correlation(const ExperimentConfig& config, double t);

// t_cav / (nbar (1 + n_b)).
double decoherence_time(const ExperimentConfig& config);

} // namespace cavcat
