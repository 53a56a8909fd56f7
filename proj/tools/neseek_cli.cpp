// Command-line front end for the equilibrium-seeking library.
//
//   neseek run <config.json> [--output-dir DIR]
//   neseek preset <name> [--emit-config] [--output-dir DIR]
//   neseek sweep <config.json> --axis PATH --values a,b,c [--output-dir DIR]
//   neseek oracle <config.json>
//
// Exit codes: 0 success, 2 configuration error, 3 divergence, 4 non-convergence.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "neseek/errors.hpp"
#include "neseek/presets.hpp"
#include "neseek/runner.hpp"

namespace {

using namespace neseek;

void print_summary(const RunSummary& s) {
    std::printf("run       : %s (hash %s)\n", s.name.c_str(), s.hash.c_str());
    std::printf("status    : %s\n", s.status == IntegrationStatus::ok ? "ok" : "diverged");
    std::printf("converged : %s\n", s.converged ? "yes" : "no");
    std::printf("t_final   : %g\n", s.t_final);
    std::printf("ne_error  : %.6e (inf %.6e)\n", s.final_ne_error, s.final_ne_error_inf);
    std::printf("consensus : %.6e\n", s.final_consensus_error);
    if (s.final_gains.size() > 0) {
        std::printf("gains     :");
        for (Eigen::Index i = 0; i < s.final_gains.size(); ++i)
            std::printf(" %.6g", s.final_gains(i));
        std::printf("\n");
    }
    if (s.condition_checked) {
        std::printf("lambda2   : %.6g (coupling condition %s)\n", s.lambda2,
                    s.condition_held ? "holds" : "fails");
        std::printf("min k*    : %.6g\n", s.min_k_star_value);
    }
    std::printf("oracle    : residual %.3e, %s\n", s.oracle_residual,
                s.oracle_converged ? "converged" : "NOT converged");
    std::printf("wall time : %.3f s\n", s.wall_seconds);
}

int do_run(ScenarioConfig cfg, const std::string& output_dir) {
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    RunOutput out = run_scenario(cfg);
    print_summary(out.summary);
    std::printf("outputs   : %s/trajectory.csv, %s/summary.json\n", cfg.output_dir.c_str(),
                cfg.output_dir.c_str());
    return out.summary.exit_code();
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            std::size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            vals.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError("", "sweep values: '" + tok + "' is not a number");
        }
    }
    if (vals.empty()) throw ConfigError("", "sweep values: empty list");
    return vals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed Nash-equilibrium-seeking scenarios"};
    app.require_subcommand(1);

    std::string config_path, output_dir, preset_name, axis, values_csv;
    bool emit_config = false;

    CLI::App* run = app.add_subcommand("run", "Run a scenario from a JSON config");
    run->add_option("config", config_path, "Scenario config file")->required();
    run->add_option("--output-dir", output_dir, "Override the config's output directory");

    CLI::App* preset_cmd = app.add_subcommand("preset", "Run (or print) a built-in scenario");
    preset_cmd->add_option("name", preset_name, "Preset name")->required();
    preset_cmd->add_flag("--emit-config", emit_config,
                         "Print the preset's config as JSON instead of running it");
    preset_cmd->add_option("--output-dir", output_dir, "Override the output directory");

    CLI::App* sweep_cmd = app.add_subcommand("sweep", "Run a scenario across an axis of values");
    sweep_cmd->add_option("config", config_path, "Base scenario config file")->required();
    sweep_cmd->add_option("--axis", axis, "Config field to sweep (e.g. gamma)")->required();
    sweep_cmd->add_option("--values", values_csv, "Comma-separated numeric values")->required();
    sweep_cmd->add_option("--output-dir", output_dir, "Override the output directory");

    CLI::App* oracle_cmd = app.add_subcommand("oracle", "Solve only the equilibrium of a config");
    oracle_cmd->add_option("config", config_path, "Scenario config file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(load_config_file(config_path), output_dir);

        if (preset_cmd->parsed()) {
            ScenarioConfig cfg = preset(preset_name);
            if (emit_config) {
                std::cout << to_json(cfg).dump(2) << "\n";
                return 0;
            }
            return do_run(cfg, output_dir);
        }

        if (sweep_cmd->parsed()) {
            ScenarioConfig base = load_config_file(config_path);
            if (!output_dir.empty()) base.output_dir = output_dir;
            std::vector<double> values = parse_values(values_csv);
            std::vector<SweepRow> rows = sweep(base, axis, values);
            std::printf("%-20s %-10s %-14s %-14s %s\n", axis.c_str(), "status", "ne_error_inf",
                        "consensus", "exit");
            int worst = 0;
            for (const SweepRow& row : rows) {
                if (row.failed) {
                    std::printf("%-20.10g %-10s %-14s %-14s -  (%s)\n", row.value, "error", "-",
                                "-", row.error.c_str());
                    worst = std::max(worst, 2);
                    continue;
                }
                std::printf("%-20.10g %-10s %-14.6e %-14.6e %d\n", row.value,
                            row.summary.status == IntegrationStatus::ok ? "ok" : "diverged",
                            row.summary.final_ne_error_inf, row.summary.final_consensus_error,
                            row.summary.exit_code());
                worst = std::max(worst, row.summary.exit_code());
            }
            return worst;
        }

        if (oracle_cmd->parsed()) {
            ScenarioConfig cfg = load_config_file(config_path);
            Game game = cfg.game.build();
            QuadraticGame q = cfg.game.build_quadratic();
            Constants consts = exact_constants(q);
            OracleResult res =
                game.is_constrained()
                    ? nash_oracle_vi(game, Vec::Zero(game.total_dim()),
                                     recommended_vi_step(consts), cfg.oracle_tol)
                    : nash_oracle_unconstrained(game, Vec::Zero(game.total_dim()), cfg.oracle_tol);
            std::printf("x*        :");
            for (Eigen::Index i = 0; i < res.x_star.size(); ++i)
                std::printf(" %.12g", res.x_star(i));
            std::printf("\nresidual  : %.3e\niterations: %d\nconverged : %s\n", res.residual,
                        res.iterations, res.converged ? "yes" : "no");
            return res.converged ? 0 : 4;
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ConstructionError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const InputError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
