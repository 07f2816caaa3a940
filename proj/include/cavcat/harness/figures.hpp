#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cavcat/harness/config.hpp"
#include "cavcat/observables.hpp"

namespace cavcat::harness {

enum class FigureId { Fig1, Fig2, Fig3 };

FigureId parse_figure_id(std::string_view id);
std::string_view figure_name(FigureId id);

// Unset fields come from the config file, then from per-figure defaults.
// n_thermal has no default.
struct FigureOptions {
    std::optional<std::string> preset;
    std::optional<double> nbar;
    std::optional<double> phi;
    std::optional<double> n_thermal;
    std::optional<double> gt_max;
    std::optional<double> gt_step;
    std::optional<std::filesystem::path> out_dir;
    std::optional<bool> si_time;

    // Fields set in `over` replace ours.
    FigureOptions overlaid(const FigureOptions& over) const;
};

// Reads the [fig1] / [fig2] / [fig3] section (with unnamed-section fallback).
FigureOptions options_from_config(const ConfigFile& file, FigureId id);

// One curve pair (coherent and cat) on one preset, fully resolved.
struct CurveSetup {
    Preset preset;
    double nbar;      // mean photon number of both fields
    double phi;       // cat phase
    double n_thermal;
    double gt_max;
    double gt_step;
    bool si_time;

    std::vector<double> gt_grid() const;
    double time(double gt) const { return gt / preset.g; }
    ExperimentConfig coherent() const;
    ExperimentConfig cat() const;
};

// Resolves defaults. fig3 yields one setup per preset unless a preset is named.
// Throws ConfigError when n_thermal is missing.
std::vector<CurveSetup> resolve(FigureId id, const FigureOptions& options);

// |z|^2 for a cat of the given phase whose mean photon number is `nbar`.
double cat_intensity_for_mean(double nbar, double phase);

struct RevivalCurves {
    std::vector<double> gt;
    std::vector<double> p_plus;
    std::vector<double> p_plusplus; // joint, t_A = t, t_B = 2t
};

RevivalCurves revival_curves(const ExperimentConfig& config, const std::vector<double>& gt, double g);
std::vector<std::optional<double>> eta_curve(const ExperimentConfig& config,
                                             const std::vector<double>& gt, double g);

// Writes the figure's CSV files into the output directory and returns their paths.
std::vector<std::filesystem::path> run_figure(FigureId id, const FigureOptions& options);

std::string version_string();

} // namespace cavcat::harness
