#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "neseek/config.hpp"
#include "neseek/diagnostics.hpp"
#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/presets.hpp"
#include "neseek/rng.hpp"
#include "neseek/reference.hpp"
#include "neseek/runner.hpp"
#include "neseek/sets.hpp"
#include "neseek/solver.hpp"

using namespace neseek;

namespace {

// One printed line per criterion so the run doubles as a checklist.
void report(const std::string& id, bool ok, const std::string& detail) {
    std::printf("[%s] %s  %s\n", id.c_str(), ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    CHECK_MESSAGE(ok, id << ": " << detail);
}

struct LinFit {
    double slope = 0;
    double r2 = 0;
};

LinFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
    const double n = static_cast<double>(t.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        st += t[i];
        sy += y[i];
        stt += t[i] * t[i];
        sty += t[i] * y[i];
    }
    LinFit f;
    f.slope = (n * sty - st * sy) / (n * stt - st * st);
    const double intercept = (sy - f.slope * st) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double fit = f.slope * t[i] + intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    f.r2 = 1.0 - ss_res / ss_tot;
    return f;
}

// Nash point by nested grid refinement over the box actions, using only the
// cost functions (an independent route from both oracles).
Vec grid_nash(const Game& g, double lo, double hi) {
    Vec x = Vec::Constant(2, 0.5 * (lo + hi));
    double half = 0.5 * (hi - lo);
    for (int level = 0; level < 5; ++level) {
        for (int sweep = 0; sweep < 30; ++sweep) {
            for (int i = 0; i < 2; ++i) {
                const double a = std::max(lo, x(i) - half);
                const double b = std::min(hi, x(i) + half);
                double best_v = std::numeric_limits<double>::infinity();
                double best_a = x(i);
                for (int s = 0; s <= 400; ++s) {
                    Vec cand = x;
                    cand(i) = a + (b - a) * s / 400.0;
                    double v = g.cost(i, cand);
                    if (v < best_v) {
                        best_v = v;
                        best_a = cand(i);
                    }
                }
                x(i) = best_a;
            }
        }
        half *= 0.02;  // a couple of grid cells at the previous resolution
    }
    return x;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

} // namespace

TEST_CASE("acceptance: baseline gradient play (S1)") {
    RunOutput out = run_scenario(preset("S1_full_info"), false);
    bool ok = out.summary.exit_code() == 0 && out.summary.final_ne_error_inf < 1e-6 &&
              out.summary.wall_seconds < 1.0;
    report("S1", ok,
           "final_ne_error_inf=" + fmt(out.summary.final_ne_error_inf) +
               " wall_s=" + fmt(out.summary.wall_seconds));
}

TEST_CASE("acceptance: static coupling above the threshold (S2)") {
    RunOutput out = run_scenario(preset("S2_static_strong"), false);
    Constants c = exact_constants(preset("S2_static_strong").game.build_quadratic());
    const double threshold = strong_coupling_threshold(c.ell(), c.mu);
    bool margin = out.summary.lambda2 >= 2.0 * threshold;
    bool held = out.summary.condition_checked && out.summary.condition_held;
    bool tight = out.summary.final_ne_error_inf < 1e-5;

    std::vector<double> ts, logs;
    for (const MetricsRow& row : out.metrics) {
        if (row.t >= 5.0 && row.t <= 45.0 && row.ne_error > 0) {
            ts.push_back(row.t);
            logs.push_back(std::log(row.ne_error));
        }
    }
    LinFit fit = fit_line(ts, logs);
    bool linear = fit.r2 > 0.99 && fit.slope < 0;

    report("S2", margin && held && tight && linear,
           "lambda2=" + fmt(out.summary.lambda2) + " threshold=" + fmt(threshold) +
               " final_ne_error_inf=" + fmt(out.summary.final_ne_error_inf) +
               " fit_r2=" + fmt(fit.r2) + " slope=" + fmt(fit.slope));
}

TEST_CASE("acceptance: gain adaptation below the threshold (S3)") {
    RunOutput out = run_scenario(preset("S3_dai_weak"), false);
    bool weak = out.summary.condition_checked && !out.summary.condition_held;
    bool converged = out.summary.final_ne_error_inf < 1e-4 && out.summary.exit_code() == 0;

    bool monotone = true;
    for (std::size_t r = 0; r + 1 < out.metrics.size() && monotone; ++r)
        monotone = ((out.metrics[r + 1].gains - out.metrics[r].gains).array() >= -1e-12).all();

    // Gains settle: negligible growth over the last quarter of the horizon.
    const double t_end = out.metrics.back().t;
    Vec late = out.metrics.back().gains;
    for (const MetricsRow& row : out.metrics) {
        if (row.t >= 0.75 * t_end) {
            late = row.gains;
            break;
        }
    }
    bool settled = ((out.metrics.back().gains - late).array() < 1e-6).all();

    RunOutput contrast = run_scenario(preset("S3_static_contrast"), false);
    bool static_fails = !contrast.summary.converged;

    report("S3", weak && converged && monotone && settled && static_fails,
           "final_ne_error_inf=" + fmt(out.summary.final_ne_error_inf) + " gains=(" +
               fmt(out.summary.final_gains(0)) + "," + fmt(out.summary.final_gains(1)) + "," +
               fmt(out.summary.final_gains(2)) + ") static_contrast_error=" +
               fmt(contrast.summary.final_ne_error_inf) +
               (contrast.summary.status == IntegrationStatus::diverged ? " (diverged)" : ""));
}

TEST_CASE("acceptance: certified energy decay along the adaptive run (S4)") {
    ScenarioConfig cfg = preset("S3_dai_weak");
    RunOutput out = run_scenario(cfg, false);

    Constants c = exact_constants(cfg.game.build_quadratic());
    const double lambda2 = out.summary.lambda2;
    const double k_star = 1.1 * min_k_star(c, lambda2);
    Certificate cert = make_certificate(c, lambda2, k_star);
    Vec gamma = Vec::Constant(3, cfg.gamma);

    std::vector<double> W;
    W.reserve(out.log.size());
    for (std::size_t r = 0; r < out.log.size(); ++r)
        W.push_back(lyapunov_W(ExtendedState{out.log.x_at(r), out.log.gains_at(r)}, out.x_star,
                               k_star, gamma));
    bool nonincreasing = true;
    const double slack = 1e-6 * (1.0 + W.front());
    for (std::size_t r = 0; r + 1 < W.size(); ++r)
        nonincreasing = nonincreasing && W[r + 1] <= W[r] + slack;

    Game game = cfg.game.build();
    Graph graph = cfg.graph->build();
    Flow flow = make_flow(FlowKind::dai, game, graph,
                          DaiParams::uniform(3, cfg.gamma, cfg.k_init));
    double worst_wdot = -std::numeric_limits<double>::infinity();
    for (int s = 0; s < 100; ++s) {
        std::size_t r = s * (out.log.size() - 1) / 99;
        ExtendedState state{out.log.x_at(r), out.log.gains_at(r)};
        worst_wdot = std::max(worst_wdot, w_dot_along(flow, state, cert, gamma, out.x_star));
    }
    bool dissipative = worst_wdot <= 1e-8;

    report("S4", cert.pd && nonincreasing && dissipative,
           "k_star=" + fmt(k_star) + " W0=" + fmt(W.front()) + " W_end=" + fmt(W.back()) +
               " worst_wdot=" + fmt(worst_wdot));
}

TEST_CASE("acceptance: projected adaptation on box constraints (S5)") {
    ScenarioConfig cfg = preset("S5_projected_dai");
    RunOutput out = run_scenario(cfg, false);
    bool tight = out.summary.final_ne_error_inf < 1e-3 && out.summary.exit_code() == 0;

    Game game = cfg.game.build();
    const Selection& sel = game.selection();
    bool feasible = true;
    for (std::size_t r = 0; r < out.log.size() && feasible; ++r) {
        Vec X = out.log.x_at(r);
        for (int i = 0; i < game.n_players(); ++i)
            feasible = feasible &&
                       game.constraint(i).contains(X.segment(sel.own_start(i), sel.dim(i)), 0.0);
    }

    Vec grid = grid_nash(game, -1.0, 1.0);
    double gap = (grid - out.oracle.x_star).lpNorm<Eigen::Infinity>();
    bool agreed = gap < 1e-4;

    report("S5", tight && feasible && agreed,
           "final_ne_error_inf=" + fmt(out.summary.final_ne_error_inf) + " grid_gap=" +
               fmt(gap) + " feasible_rows=" + (feasible ? "all" : "violated"));
}

TEST_CASE("acceptance: oracle point is variationally stationary (S6)") {
    ScenarioConfig cfg = preset("S5_projected_dai");
    RunOutput out = run_scenario(cfg, false);
    Game game = cfg.game.build();
    const Selection& sel = game.selection();
    Vec F = game.pseudo_gradient(out.oracle.x_star);
    double sq = 0;
    for (int i = 0; i < game.n_players(); ++i) {
        Vec own = out.oracle.x_star.segment(sel.offset(i), sel.dim(i));
        Vec push = -F.segment(sel.offset(i), sel.dim(i));
        sq += game.constraint(i).tangent_project(own, push).squaredNorm();
    }
    double residual = std::sqrt(sq);
    report("S6", out.oracle.converged && residual < 1e-8,
           "stationarity_residual=" + fmt(residual) +
               " oracle_residual=" + fmt(out.oracle.residual));
}

TEST_CASE("acceptance: cross-validation properties (P1)") {
    std::ostringstream detail;
    bool all_ok = true;
    auto sub = [&](const char* name, bool ok) {
        all_ok = all_ok && ok;
        detail << name << "=" << (ok ? "pass" : "FAIL") << " ";
    };

    // Finite differences confirm every analytic gradient.
    {
        Mat a(3, 3);
        a << 1, 3, -3, -3, 1, 3, 3, -3, 1;
        Vec b(3);
        b << 3.5, 2.5, -6.5;
        Game rot = QuadraticGame({1, 1, 1}, a, b).to_game();
        Game boxed = preset("S5_projected_dai").game.build();
        Rng rng(5);
        double worst = 0;
        for (int trial = 0; trial < 20; ++trial) {
            worst = std::max(worst, check_gradient(rot, rng.uniform_vec(3, -2, 2), 1e-5));
            worst = std::max(worst, check_gradient(boxed, rng.uniform_vec(2, -1, 1), 1e-5));
        }
        sub("gradient_fd", worst < 1e-6);
    }

    // Tangent cones agree with their projection limit quotients.
    {
        Mat G(3, 2);
        G << -1, 0, 0, -1, 1, 1;
        Vec h(3);
        h << 0, 0, 1;
        std::vector<ConvexSet> sets;
        sets.push_back(ConvexSet::box(Vec::Constant(2, 0.0), Vec::Constant(2, 1.0)));
        sets.push_back(ConvexSet::ball(Vec::Zero(2), 1.0));
        sets.push_back(ConvexSet::polyhedron(G, h));
        Rng rng(11);
        bool ok = true;
        for (const ConvexSet& s : sets) {
            for (int trial = 0; trial < 50; ++trial) {
                Vec x = s.project(rng.uniform_vec(2, -2, 2));
                Vec v = rng.uniform_vec(2, -2, 2);
                double delta = s.kind() == ConvexSet::Kind::ball ? 1e-6 : 1e-8;
                double gap = (s.tangent_project(x, v) - s.tangent_project_numeric(x, v, delta))
                                 .norm();
                ok = ok && gap < 1e-4 * (1.0 + v.norm());
            }
        }
        sub("tangent_numeric", ok);
    }

    // Blockwise network terms equal the materialized matrix route.
    {
        Rng rng(17);
        bool ok = true;
        Graph g = Graph::erdos_renyi(6, 0.5, 12);
        Mat L = g.laplacian();
        for (int trial = 0; trial < 30; ++trial) {
            Vec X = rng.uniform_vec(12, -2, 2);
            Vec k = rng.uniform_vec(6, 0, 3);
            Vec via_kron = -ref::kron(L * k.asDiagonal() * L, Mat::Identity(2, 2)) * X;
            ok = ok && (dai_coupling(g, k, X) - via_kron).norm() < 1e-10;
        }
        sub("coupling_matrix", ok);
    }

    // The integrator shows fourth-order self-convergence.
    {
        auto decay = [](const Vec& y) -> Vec { return -y; };
        auto err = [&](double h) {
            IntegratorSpec spec;
            spec.method = Method::rk4;
            spec.step = h;
            spec.t_end = 2.0;
            IntegrationResult r = integrate_smooth(decay, Vec::Ones(1), spec, 1, 0);
            return std::abs(r.log.states.back()(0) - std::exp(-2.0));
        };
        double ratio = err(0.1) / err(0.05);
        sub("rk4_order", ratio > 12.0 && ratio < 20.0);
    }

    // Consensus split is an orthogonal decomposition.
    {
        Rng rng(23);
        bool ok = true;
        for (int trial = 0; trial < 50; ++trial) {
            Vec X = rng.uniform_vec(12, -3, 3);
            ConsensusSplit s = consensus_split(X, 4);
            double rhs = s.off_norm * s.off_norm + 4.0 * s.average.squaredNorm();
            ok = ok && std::abs(X.squaredNorm() - rhs) < 1e-10 * (1.0 + X.squaredNorm());
        }
        sub("consensus_split", ok);
    }

    // The certificate flips exactly at the minimal gain, by two definiteness tests.
    {
        Mat a(3, 3);
        a << 1, 3, -3, -3, 1, 3, 3, -3, 1;
        Constants c = exact_constants(QuadraticGame({1, 1, 1}, a, Vec::Zero(3)));
        double kmin = min_k_star(c, 1.0);
        bool ok = !make_certificate(c, 1.0, kmin - 0.1).pd &&
                  make_certificate(c, 1.0, kmin + 0.1).pd;
        for (double k = kmin - 5.0; k <= kmin + 5.0; k += 0.25) {
            Certificate cert = make_certificate(c, 1.0, k);
            Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cert.m);
            ok = ok && cert.pd == (es.eigenvalues().minCoeff() > 0);
        }
        sub("certificate_flip", ok);
    }

    // Bit-identical reruns.
    {
        ScenarioConfig cfg = preset("decoupled_edge_dai");
        RunOutput a = run_scenario(cfg, false);
        RunOutput b = run_scenario(cfg, false);
        std::string ca = render_trajectory_csv(cfg, a.summary.hash, a.log, a.metrics);
        std::string cb = render_trajectory_csv(cfg, b.summary.hash, b.log, b.metrics);
        sub("determinism", ca == cb);
    }

    report("P1", all_ok, detail.str());
}
