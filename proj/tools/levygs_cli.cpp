// Command-line driver: compute, simulate, compare and sweep expected
// discounted penalties for spectrally negative Levy surplus processes under
// severity-marked excursion bankruptcy.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "levygs/commands.hpp"
#include "levygs/run_config.hpp"

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw levygs::ValidationError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw levygs::ValidationError("cannot open output file: " + out_path);
    out << text;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gerber-Shiu penalties at severity-marked excursion bankruptcy"};
    app.require_subcommand(0, 1);
    app.fallthrough();  // global flags may follow the subcommand

    std::string config_path, out_path, sweep_axis = "b";
    bool json = false, print_config = false;
    long long paths_override = -1;
    long long seed_override = -1;
    double z_max_override = -1.0;

    app.add_option("--config", config_path, "run configuration file");
    app.add_option("--out", out_path, "write the result table here (default stdout)");
    app.add_flag("--json", json, "emit line-delimited JSON instead of CSV");
    app.add_flag("--print-config", print_config,
                 "print the configuration with all defaults materialized and exit");
    app.add_option("--seed", seed_override, "override sim.seed");
    app.add_option("--paths", paths_override, "override sim.n_paths");
    app.add_option("--z-max", z_max_override, "override compare.z_max");

    auto* c_compute = app.add_subcommand("compute", "closed-form values with term breakdown");
    auto* c_simulate = app.add_subcommand("simulate", "Monte Carlo estimates");
    auto* c_compare = app.add_subcommand("compare", "formula vs Monte Carlo z-scores");
    auto* c_sweep = app.add_subcommand("sweep", "one-axis long-format table");
    c_sweep->add_option("--axis", sweep_axis, "x | q | b | y_scale");

    CLI11_PARSE(app, argc, argv);

    try {
        levygs::RunConfig cfg;
        if (!config_path.empty()) cfg = levygs::RunConfig::parse(read_file(config_path));
        if (seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(seed_override);
        if (paths_override > 0) cfg.n_paths = paths_override;
        if (z_max_override > 0.0) cfg.z_max = z_max_override;

        if (print_config) {
            write_output(cfg.to_string(), out_path);
            return 0;
        }

        levygs::CommandResult res;
        if (c_compute->parsed()) res = levygs::cmd_compute(cfg, json);
        else if (c_simulate->parsed()) res = levygs::cmd_simulate(cfg, json);
        else if (c_compare->parsed()) res = levygs::cmd_compare(cfg, json);
        else if (c_sweep->parsed()) res = levygs::cmd_sweep(cfg, sweep_axis, json);
        else {
            std::cerr << app.help();
            return 2;
        }
        write_output(res.table, out_path);
        return res.exit_code;
    } catch (const levygs::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const levygs::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
