#include "cavcat/harness/figures.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

#include "cavcat/errors.hpp"

#ifndef CAVCAT_VERSION
#define CAVCAT_VERSION "unknown"
#endif

namespace cavcat::harness {

namespace {

struct FigureDefaults {
    double nbar;
    double gt_max;
    double gt_step;
};

constexpr FigureDefaults kLargeField{49.0, 60.0, 0.05};
constexpr FigureDefaults kSmallField{3.3, 30.0, 0.02};

// fig1 and fig2 fix the field; fig3 follows the preset.
FigureDefaults defaults_for(FigureId id, const std::string& preset)
{
    if (id == FigureId::Fig1)
        return kLargeField;
    if (id == FigureId::Fig2)
        return kSmallField;
    return preset == "brune96" ? kSmallField : kLargeField;
}

std::string format_number(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", x);
    return buf;
}

double cat_mean(double intensity, double c)
{
    const double e = std::exp(-2.0 * intensity);
    return intensity * (1.0 - c * e) / (1.0 + c * e);
}

std::string metadata(FigureId id, const CurveSetup& s, const std::string& curve,
                     const std::vector<const ExperimentConfig*>& configs)
{
    std::ostringstream m;
    m << "# cavcat " << version_string() << "; figure=" << figure_name(id) << "; curve=" << curve
      << "; preset=" << s.preset.name << "; kappa=" << format_number(s.preset.kappa)
      << "; g=" << format_number(s.preset.g) << "; nbar=" << format_number(s.nbar)
      << "; cat_intensity=" << format_number(cat_intensity_for_mean(s.nbar, s.phi))
      << "; phi=" << format_number(s.phi) << "; n_b=" << format_number(s.n_thermal)
      << "; gt_max=" << format_number(s.gt_max) << "; gt_step=" << format_number(s.gt_step);
    for (const auto* c : configs)
        m << "; truncation=" << c->truncation();
    m << "; time_axis=" << (s.si_time ? "t_seconds" : "gt");
    return m.str();
}

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
    if (!out)
        throw ConfigError("write failed for '" + path.string() + "'");
}

std::string revival_csv(FigureId id, const CurveSetup& s, const std::string& curve,
                        const ExperimentConfig& config)
{
    const auto grid = s.gt_grid();
    const RevivalCurves r = revival_curves(config, grid, s.preset.g);
    std::ostringstream csv;
    csv << metadata(id, s, curve, {&config}) << '\n';
    csv << (s.si_time ? "t" : "gt") << ",P_plus,P_plusplus\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double axis = s.si_time ? s.time(grid[k]) : grid[k];
        csv << format_number(axis) << ',' << format_number(r.p_plus[k]) << ','
            << format_number(r.p_plusplus[k]) << '\n';
    }
    return csv.str();
}

std::string eta_csv(const CurveSetup& s)
{
    const auto grid = s.gt_grid();
    const ExperimentConfig coherent = s.coherent();
    const ExperimentConfig cat = s.cat();
    auto coherent_eta = std::async(std::launch::async, [&] { return eta_curve(coherent, grid, s.preset.g); });
    const auto cat_eta = eta_curve(cat, grid, s.preset.g);
    const auto coh = coherent_eta.get();

    std::ostringstream csv;
    csv << metadata(FigureId::Fig3, s, "eta", {&coherent, &cat}) << '\n';
    csv << (s.si_time ? "t" : "gt") << ",eta_coherent,eta_cat\n";
    const auto cell = [](const std::optional<double>& v) { return v ? format_number(*v) : std::string(); };
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double axis = s.si_time ? s.time(grid[k]) : grid[k];
        csv << format_number(axis) << ',' << cell(coh[k]) << ',' << cell(cat_eta[k]) << '\n';
    }
    return csv.str();
}

} // namespace

std::string version_string()
{
    return CAVCAT_VERSION;
}

FigureId parse_figure_id(std::string_view id)
{
    if (id == "fig1")
        return FigureId::Fig1;
    if (id == "fig2")
        return FigureId::Fig2;
    if (id == "fig3")
        return FigureId::Fig3;
    throw ConfigError("unknown figure '" + std::string(id) + "' (expected fig1, fig2 or fig3)");
}

std::string_view figure_name(FigureId id)
{
    switch (id) {
    case FigureId::Fig1: return "fig1";
    case FigureId::Fig2: return "fig2";
    case FigureId::Fig3: return "fig3";
    }
    return "?";
}

FigureOptions FigureOptions::overlaid(const FigureOptions& over) const
{
    FigureOptions out = *this;
    if (over.preset) out.preset = over.preset;
    if (over.nbar) out.nbar = over.nbar;
    if (over.phi) out.phi = over.phi;
    if (over.n_thermal) out.n_thermal = over.n_thermal;
    if (over.gt_max) out.gt_max = over.gt_max;
    if (over.gt_step) out.gt_step = over.gt_step;
    if (over.out_dir) out.out_dir = over.out_dir;
    if (over.si_time) out.si_time = over.si_time;
    return out;
}

FigureOptions options_from_config(const ConfigFile& file, FigureId id)
{
    const std::string_view section = figure_name(id);
    FigureOptions o;
    o.preset = file.get(section, "preset");
    o.nbar = file.get_number(section, "nbar");
    o.phi = file.get_number(section, "phi");
    o.n_thermal = file.get_number(section, "nb");
    o.gt_max = file.get_number(section, "gt_max");
    o.gt_step = file.get_number(section, "gt_step");
    if (auto dir = file.get(section, "out"))
        o.out_dir = *dir;
    if (auto si = file.get(section, "si_time")) {
        if (*si != "true" && *si != "false")
            throw ConfigError("si_time must be true or false");
        o.si_time = *si == "true";
    }
    return o;
}

std::vector<double> CurveSetup::gt_grid() const
{
    const auto count = static_cast<long>(std::floor(gt_max / gt_step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(count + 1));
    for (long k = 0; k <= count; ++k)
        grid.push_back(static_cast<double>(k) * gt_step);
    return grid;
}

ExperimentConfig CurveSetup::coherent() const
{
    return ExperimentConfig(JCParams(preset.g), DampingParams(preset.kappa, n_thermal),
                            coherent_distribution(nbar, default_truncation(nbar)));
}

ExperimentConfig CurveSetup::cat() const
{
    return ExperimentConfig(JCParams(preset.g), DampingParams(preset.kappa, n_thermal),
                            CatSpec(cat_intensity_for_mean(nbar, phi), phi));
}

std::vector<CurveSetup> resolve(FigureId id, const FigureOptions& options)
{
    if (!options.n_thermal)
        throw ConfigError("n_b is required: pass --nb or set 'nb' in the config "
                          "(the thermal photon number has no default)");
    if (*options.n_thermal < 0.0)
        throw ConfigError("n_b must be >= 0");

    std::vector<std::string> names;
    if (options.preset)
        names.push_back(*options.preset);
    else if (id == FigureId::Fig1)
        names.emplace_back("benson97");
    else if (id == FigureId::Fig2)
        names.emplace_back("brune96");
    else
        for (const auto& p : presets())
            names.push_back(p.name);

    std::vector<CurveSetup> setups;
    for (const auto& name : names) {
        const Preset& preset = find_preset(name);
        const FigureDefaults d = defaults_for(id, preset.name);
        CurveSetup s{preset,
                     options.nbar.value_or(d.nbar),
                     options.phi.value_or(0.0),
                     *options.n_thermal,
                     options.gt_max.value_or(d.gt_max),
                     options.gt_step.value_or(d.gt_step),
                     options.si_time.value_or(false)};
        if (!(s.nbar > 0.0))
            throw ConfigError("nbar must be > 0");
        if (!(s.gt_step > 0.0) || !(s.gt_max >= 0.0))
            throw ConfigError("need gt_step > 0 and gt_max >= 0");
        if (s.gt_max / s.gt_step > 1e7)
            throw ConfigError("time grid too large (more than 1e7 points)");
        setups.push_back(s);
    }
    return setups;
}

double cat_intensity_for_mean(double nbar, double phase)
{
    if (!(nbar > 0.0))
        throw InvalidArgument("mean photon number must be > 0");
    const double c = std::cos(phase);
    double lo = 1e-6;
    double hi = nbar + 2.0;
    if (cat_mean(lo, c) > nbar)
        throw InvalidArgument("no cat state with this phase has mean photon number " +
                              format_number(nbar));
    for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (cat_mean(mid, c) < nbar ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RevivalCurves revival_curves(const ExperimentConfig& config, const std::vector<double>& gt, double g)
{
    RevivalCurves r;
    r.gt = gt;
    r.p_plus.reserve(gt.size());
    r.p_plusplus.reserve(gt.size());
    for (double x : gt) {
        const double t = x / g;
        r.p_plus.push_back(p_excited(config, t));
        r.p_plusplus.push_back(p_joint(config, t, 2.0 * t, Outcome::Excited, Outcome::Excited));
    }
    return r;
}

std::vector<std::optional<double>> eta_curve(const ExperimentConfig& config,
                                             const std::vector<double>& gt, double g)
{
    std::vector<std::optional<double>> out;
    out.reserve(gt.size());
    for (double x : gt)
        out.push_back(eta_correlation(config, x / g));
    return out;
}

std::vector<std::filesystem::path> run_figure(FigureId id, const FigureOptions& options)
{
    const auto setups = resolve(id, options);
    const std::filesystem::path dir = options.out_dir.value_or(".");
    std::filesystem::create_directories(dir);

    std::vector<std::pair<std::filesystem::path, std::future<std::string>>> jobs;
    for (const auto& s : setups) {
        if (id == FigureId::Fig3) {
            jobs.emplace_back(dir / ("fig3_" + s.preset.name + ".csv"),
                              std::async(std::launch::async, [s] { return eta_csv(s); }));
            continue;
        }
        const std::string stem(figure_name(id));
        jobs.emplace_back(dir / (stem + "_coherent.csv"),
                          std::async(std::launch::async,
                                     [id, s] { return revival_csv(id, s, "coherent", s.coherent()); }));
        jobs.emplace_back(dir / (stem + "_cat.csv"),
                          std::async(std::launch::async,
                                     [id, s] { return revival_csv(id, s, "cat", s.cat()); }));
    }
    std::vector<std::filesystem::path> written;
    for (auto& [path, job] : jobs) {
        write_file(path, job.get());
        written.push_back(path);
    }
    return written;
}

} // namespace cavcat::harness
