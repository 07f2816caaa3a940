#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "cavcat/dissipative_dynamics.hpp"
#include "cavcat/errors.hpp"
#include "cavcat/harness/checks.hpp"
#include "cavcat/harness/figures.hpp"
#include "cavcat/lindblad_oracle.hpp"

namespace {

using namespace cavcat;
using namespace cavcat::harness;

struct OracleOptions {
    double nbar = 4.0;
    std::optional<double> n_thermal;
    std::optional<double> t_max;
    std::string preset = "benson97";
    std::string field = "coherent";
    double phi = 0.0;
    int samples = 50;
    std::string dump;
};

int run_oracle(const OracleOptions& o)
{
    if (!o.n_thermal)
        throw ConfigError("n_b is required: pass --nb");
    const Preset& preset = find_preset(o.preset);
    const JCParams jc(preset.g);
    const DampingParams damping(preset.kappa, *o.n_thermal);
    const double t_max = o.t_max.value_or(damping.t_cav());
    if (!(t_max > 0.0) || o.samples < 1)
        throw ConfigError("need --t-max > 0 and --samples >= 1");

    const int truncation = default_truncation(o.nbar);
    oracle::DensityMatrix rho = [&] {
        if (o.field == "coherent")
            return oracle::build_coherent_initial_state(o.nbar, truncation);
        if (o.field == "cat")
            return oracle::build_initial_state(CatSpec(cat_intensity_for_mean(o.nbar, o.phi), o.phi),
                                               truncation);
        throw ConfigError("--field must be coherent or cat");
    }();
    const PhotonDistribution p0 = [&] {
        Eigen::VectorXd diag = rho.field_block(AtomLevel::Excited).diagonal().real();
        return PhotonDistribution(diag);
    }();

    const DressedFrame frame(jc, truncation);
    const oracle::LindbladGenerator generator(jc, oracle::Dissipation(damping), truncation);
    const oracle::BlockPropagator propagator(generator);
    const auto stepper = propagator.stepper(t_max / o.samples);

    std::vector<oracle::OracleSnapshot> snapshots;
    double worst = 0.0;
    for (int k = 0; k <= o.samples; ++k) {
        if (k > 0)
            rho = stepper.advance(rho);
        snapshots.push_back(oracle::oracle_observables(rho, frame));
        const Eigen::VectorXd analytic = f_star(p0, damping, rho.time()).head(truncation);
        worst = std::max(worst, (snapshots.back().f - analytic).cwiseAbs().maxCoeff());
    }

    if (!o.dump.empty()) {
        std::ofstream out(o.dump);
        if (!out)
            throw ConfigError("cannot write '" + o.dump + "'");
        oracle::write_trajectory_dump(out, snapshots);
    } else {
        oracle::write_trajectory_dump(std::cout, snapshots);
    }
    std::cerr << "oracle: preset=" << preset.name << " field=" << o.field << " nbar=" << o.nbar
              << " n_b=" << *o.n_thermal << " N=" << truncation << " t_max=" << t_max
              << " s; max |F_n - F*_n| = " << worst << '\n';
    for (const auto& w : evolve(p0, damping, 0.0).warnings)
        std::cerr << "note: " << w << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Cavity cat-state revivals: figures, validation and a master-equation oracle"};
    app.require_subcommand(1);

    FigureOptions cli;
    std::string figure_id;
    std::string config_path;
    auto* figure = app.add_subcommand("figure", "write CSV data for fig1, fig2 or fig3");
    figure->add_option("id", figure_id, "fig1 | fig2 | fig3")->required();
    figure->add_option("--preset", cli.preset, "benson97 | brune96");
    figure->add_option("--nbar", cli.nbar, "mean photon number");
    figure->add_option("--phi", cli.phi, "cat phase");
    figure->add_option("--nb", cli.n_thermal, "thermal photon number (required)");
    figure->add_option("--gt-max", cli.gt_max, "end of the gt axis");
    figure->add_option("--gt-step", cli.gt_step, "gt spacing");
    figure->add_option("--out", cli.out_dir, "output directory");
    figure->add_option("--config", config_path, "key = value config file");
    figure->add_flag("--si-time", cli.si_time, "time axis in seconds instead of gt");

    std::string level = "fast";
    auto* validate = app.add_subcommand("validate", "run invariant and oracle checks");
    validate->add_option("--level", level, "fast | full")->check(CLI::IsMember({"fast", "full"}));

    OracleOptions oracle_options;
    auto* oracle_cmd = app.add_subcommand("oracle", "integrate the full master equation");
    oracle_cmd->add_option("--nbar", oracle_options.nbar, "mean photon number");
    oracle_cmd->add_option("--nb", oracle_options.n_thermal, "thermal photon number (required)");
    oracle_cmd->add_option("--t-max", oracle_options.t_max, "duration in seconds (default t_cav)");
    oracle_cmd->add_option("--preset", oracle_options.preset, "benson97 | brune96");
    oracle_cmd->add_option("--field", oracle_options.field, "coherent | cat");
    oracle_cmd->add_option("--phi", oracle_options.phi, "cat phase");
    oracle_cmd->add_option("--samples", oracle_options.samples, "number of output steps");
    oracle_cmd->add_option("--dump", oracle_options.dump, "write the trajectory here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*figure) {
            const FigureId id = parse_figure_id(figure_id);
            FigureOptions options;
            if (!config_path.empty())
                options = options_from_config(ConfigFile::load(config_path), id);
            options = options.overlaid(cli);
            for (const auto& path : run_figure(id, options))
                std::cout << path.string() << '\n';
            return 0;
        }
        if (*validate) {
            const auto results = run_validate(level == "full" ? ValidationLevel::Full : ValidationLevel::Fast,
                                              &std::cout);
            int failed = 0;
            for (const auto& r : results)
                failed += r.passed ? 0 : 1;
            std::cout << results.size() - failed << "/" << results.size() << " checks passed\n";
            return failed == 0 ? 0 : 1;
        }
        return run_oracle(oracle_options);
    } catch (const ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const cavcat::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
