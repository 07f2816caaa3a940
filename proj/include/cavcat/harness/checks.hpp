#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cavcat/harness/config.hpp"

// Measurements shared by `cavcat validate` and the acceptance suite. Each
// returns the measured quantity; the callers own the bounds.
namespace cavcat::harness {

// Max |F*_n - F_n(oracle)| over n and over `samples` + 1 equally spaced times
// in kappa t in [0, kappa_t_max]. The oracle runs with kappa * oracle_kappa_scale.
double oracle_f_star_error(double nbar, const Preset& preset, double n_thermal,
                           double kappa_t_max, int samples, double oracle_kappa_scale = 1.0);

// Max over sample windows of the W-equation residual divided by kappa ||W||.
double w_residual_ratio(double nbar, const Preset& preset, double n_thermal);

struct SecularEnvelope {
    std::vector<double> ratios;     // g / kappa
    std::vector<double> mismatches; // secular_mismatch at each ratio
    double slope = 0.0;             // fitted d log(mismatch) / d log(kappa / g)
    double prefactor = 0.0;         // max mismatch * g / kappa
};

// Integrated secular mismatch over g t in [0, gt_max] at several g / kappa.
SecularEnvelope secular_envelope(double nbar, double n_thermal, const std::vector<double>& ratios,
                                 double gt_max = 40.0);

struct DecoherenceScaling {
    double exponent = 0.0;       // d log t_d / d log nbar, averaged over n_b
    double thermal_factor = 0.0; // t_d(n_b = 0) / t_d(n_b), averaged over nbar
    double n_thermal = 0.0;
    std::vector<double> times;   // [n_b index][nbar index], row major
};

DecoherenceScaling decoherence_scaling(const Preset& preset, const std::vector<double>& nbars,
                                       double n_thermal);

// Largest |F_{-1}/2 + sum F_n - 1| at `samples` times in kappa t in [0, 2].
double unitarity_defect(const Preset& preset, double nbar, double n_thermal, int samples);

// Largest |f_star_ground - f_star_ground_double_sum| over a few times, for a
// Poisson(nbar) distribution cut at N and renormalized.
double double_sum_mismatch(const Preset& preset, double nbar, double n_thermal, int truncation);

// Centre of the oscillation envelope: argmax over [lo, hi] of the moving RMS
// (window `width` in gt) of values minus their moving mean.
std::optional<double> envelope_peak(const std::vector<double>& gt, const std::vector<double>& values,
                                    double lo, double hi, double width);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

enum class ValidationLevel { Fast, Full };

std::vector<CheckResult> run_validate(ValidationLevel level, std::ostream* progress = nullptr);

} // namespace cavcat::harness
