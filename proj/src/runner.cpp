#include "neseek/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "neseek/errors.hpp"
#include "neseek/rng.hpp"

namespace neseek {

using nlohmann::json;

namespace {

// Fixed-width rendering: 17 significant digits round-trip any double, so a
// repeated run emits identical bytes.
std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

Vec initial_state(const ScenarioConfig& cfg, const Game& game, int x_dim) {
    Vec x;
    switch (cfg.init.kind) {
    case InitSpec::Kind::zeros:
        x = Vec::Zero(x_dim);
        break;
    case InitSpec::Kind::profile:
        if (cfg.flow == FlowKind::full_info) {
            x = cfg.init.value;
        } else {
            x.resize(x_dim);
            for (int i = 0; i < game.n_players(); ++i)
                x.segment(static_cast<Eigen::Index>(i) * game.total_dim(), game.total_dim()) =
                    cfg.init.value;
        }
        break;
    case InitSpec::Kind::stacked:
        x = cfg.init.value;
        break;
    case InitSpec::Kind::random_box: {
        Rng rng(cfg.init.seed);
        x = rng.uniform_vec(x_dim, cfg.init.lo, cfg.init.hi);
        break;
    }
    }
    return x;
}

std::string status_name(IntegrationStatus s) {
    return s == IntegrationStatus::ok ? "ok" : "diverged";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("output_dir", "cannot write " + path.string());
    out << content;
}

} // namespace

int RunSummary::exit_code() const {
    if (status == IntegrationStatus::diverged) return 3;
    if (!converged || !oracle_converged) return 4;
    return 0;
}

std::string render_trajectory_csv(const ScenarioConfig& cfg, const std::string& hash,
                                  const TrajectoryLog& log,
                                  const std::vector<MetricsRow>& metrics) {
    if (metrics.size() != log.size())
        throw InputError("csv: metrics and log row counts differ");
    Selection sel(cfg.game.dims);
    const int m = sel.total_dim();
    const int agents = log.x_dim / m;

    std::ostringstream os;
    os << "# name=" << cfg.name << " hash=" << hash << " seed=" << cfg.init.seed << "\n";
    os << "t";
    for (int i = 0; i < agents; ++i)
        for (int c = 0; c < m; ++c) os << ",x[" << i << "." << c << "]";
    for (int i = 0; i < log.gain_dim; ++i) os << ",k[" << i << "]";
    os << ",ne_error,consensus_error,avg_error,W\n";

    for (std::size_t r = 0; r < log.size(); ++r) {
        os << fmt17(log.times[r]);
        const Vec& y = log.states[r];
        for (Eigen::Index c = 0; c < y.size(); ++c) os << "," << fmt17(y(c));
        const MetricsRow& row = metrics[r];
        os << "," << fmt17(row.ne_error) << "," << fmt17(row.consensus_error) << ","
           << fmt17(row.avg_error) << "," << fmt17(row.W) << "\n";
    }
    return os.str();
}

RunOutput run_scenario(const ScenarioConfig& cfg, bool write_files) {
    const auto t0 = std::chrono::steady_clock::now();

    Game game = cfg.game.build();
    std::optional<Graph> graph;
    if (cfg.graph) graph = cfg.graph->build();

    // Regularity constants: exact for these game kinds (affine pseudo-gradient).
    QuadraticGame q = cfg.game.build_quadratic();
    Constants consts = exact_constants(q);

    RunOutput out;
    out.summary.name = cfg.name;
    out.summary.hash = config_hash(cfg);

    // Independent equilibrium oracle.
    const int M = game.total_dim();
    if (game.is_constrained()) {
        double step = recommended_vi_step(consts);
        out.oracle = nash_oracle_vi(game, Vec::Zero(M), step, cfg.oracle_tol);
    } else {
        out.oracle = nash_oracle_unconstrained(game, Vec::Zero(M), cfg.oracle_tol);
    }
    out.x_star = out.oracle.x_star;
    out.summary.oracle_residual = out.oracle.residual;
    out.summary.oracle_converged = out.oracle.converged;

    // Coupling condition and certificate gain (informational for adaptive
    // flows; decisive for the static one).
    double k_star_ref = -1.0;
    if (graph) {
        out.summary.lambda2 = graph->algebraic_connectivity();
        if (consts.mu > 0) {
            out.summary.condition_checked = true;
            out.summary.condition_held =
                strong_coupling_holds(out.summary.lambda2, consts.ell(), consts.mu);
            out.summary.min_k_star_value = min_k_star(consts, out.summary.lambda2);
            k_star_ref = 1.1 * out.summary.min_k_star_value;
        }
    }

    // Integrate.
    DaiParams params;
    Flow flow = [&]() {
        if (cfg.flow == FlowKind::full_info) return make_full_info_flow(game);
        if (flow_is_adaptive(cfg.flow))
            params = DaiParams::uniform(game.n_players(), cfg.gamma, cfg.k_init);
        return make_flow(cfg.flow, game, *graph, params);
    }();
    Vec x0 = initial_state(cfg, game, flow.x_dim());
    Vec y0(flow.state_dim());
    y0.head(flow.x_dim()) = x0;
    if (flow.gain_dim() > 0) y0.tail(flow.gain_dim()) = params.k_init;

    IntegrationResult result = integrate(flow, y0, cfg.integrator);
    out.log = std::move(result.log);
    out.summary.status = result.status;
    out.summary.t_final = result.t_final;

    // Metrics. Non-adaptive flows carry no gains, so W reduces to the
    // estimate part; adaptive flows use the certificate gain when available.
    double metrics_k_star = flow.adaptive() ? k_star_ref : 0.0;
    Vec gamma_vec = flow.adaptive() ? params.gamma : Vec();
    out.metrics = convergence_metrics(out.log, out.x_star, metrics_k_star, gamma_vec);

    const MetricsRow& last = out.metrics.back();
    out.summary.final_ne_error = last.ne_error;
    out.summary.final_consensus_error = last.consensus_error;
    out.summary.final_gains = last.gains;
    {
        Vec Xf = out.log.x_at(out.log.size() - 1);
        double worst = 0;
        const int agents = out.log.x_dim / M;
        for (int i = 0; i < agents; ++i)
            worst = std::max(worst, (Xf.segment(static_cast<Eigen::Index>(i) * M, M) - out.x_star)
                                        .lpNorm<Eigen::Infinity>());
        out.summary.final_ne_error_inf = worst;
    }
    out.summary.converged = out.summary.status == IntegrationStatus::ok &&
                            out.summary.final_ne_error_inf <= cfg.converged_threshold;

    out.summary.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (write_files) {
        std::filesystem::path dir(cfg.output_dir);
        std::filesystem::create_directories(dir);
        write_file(dir / "trajectory.csv",
                   render_trajectory_csv(cfg, out.summary.hash, out.log, out.metrics));

        json s;
        s["name"] = out.summary.name;
        s["config_hash"] = out.summary.hash;
        s["config"] = to_json(cfg);
        s["status"] = status_name(out.summary.status);
        s["converged"] = out.summary.converged;
        s["converged_threshold"] = cfg.converged_threshold;
        s["t_final"] = out.summary.t_final;
        s["final_ne_error"] = out.summary.final_ne_error;
        s["final_ne_error_inf"] = out.summary.final_ne_error_inf;
        s["final_consensus_error"] = out.summary.final_consensus_error;
        json gains = json::array();
        for (Eigen::Index i = 0; i < out.summary.final_gains.size(); ++i)
            gains.push_back(out.summary.final_gains(i));
        s["final_gains"] = gains;
        s["condition_checked"] = out.summary.condition_checked;
        s["condition_held"] = out.summary.condition_held;
        s["lambda2"] = out.summary.lambda2;
        s["min_k_star"] = out.summary.min_k_star_value;
        s["oracle"] = {{"residual", out.summary.oracle_residual},
                       {"iterations", out.oracle.iterations},
                       {"converged", out.summary.oracle_converged}};
        s["wall_seconds"] = out.summary.wall_seconds;
        s["exit_code"] = out.summary.exit_code();
        write_file(dir / "summary.json", s.dump(2) + "\n");
    }
    return out;
}

std::vector<SweepRow> sweep(const ScenarioConfig& base, const std::string& axis,
                            const std::vector<double>& values, bool write_files) {
    if (values.empty()) return {};
    {
        // Fail fast on a bad axis before fanning out.
        ScenarioConfig probe = base;
        apply_axis(probe, axis, values.front());
    }
    std::string axis_dir = axis;
    for (char& c : axis_dir)
        if (c == '.') c = '_';

    std::vector<SweepRow> rows(values.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < static_cast<int>(values.size()); ++i) {
        SweepRow& row = rows[i];
        row.value = values[i];
        try {
            ScenarioConfig cfg = base;
            apply_axis(cfg, axis, values[i]);
            cfg.name = base.name + "/" + axis + "=" + fmt17(values[i]);
            cfg.output_dir = (std::filesystem::path(base.output_dir) /
                              (axis_dir + "_" + std::to_string(i)))
                                 .string();
            row.summary = run_scenario(cfg, write_files).summary;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    }
    return rows;
}

} // namespace neseek
