#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

#include "neseek/diagnostics.hpp"
#include "neseek/dynamics.hpp"
#include "neseek/errors.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/rng.hpp"
#include "neseek/solver.hpp"

using namespace neseek;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

Vec v3(double a, double b, double c) {
    Vec v(3);
    v << a, b, c;
    return v;
}

QuadraticGame rotational_game() {
    Mat a(3, 3);
    a << 1, 3, -3, -3, 1, 3, 3, -3, 1;
    Vec b(3);
    b << 3.5, 2.5, -6.5;
    return QuadraticGame({1, 1, 1}, a, b);
}

Game rotational_closures() {
    Mat a(3, 3);
    a << 1, 3, -3, -3, 1, 3, 3, -3, 1;
    Vec b(3);
    b << 3.5, 2.5, -6.5;
    return Game({1, 1, 1}, [a, b](int i, const Vec& x) -> Vec {
        Vec r(1);
        r(0) = a.row(i).dot(x) + b(i);
        return r;
    });
}

} // namespace

TEST_CASE("closed form constants of reference games") {
    Constants rot = exact_constants(rotational_game());
    CHECK(rot.exact);
    CHECK(rot.mu == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(rot.ell_F == doctest::Approx(std::sqrt(28.0)).epsilon(1e-12));
    CHECK(rot.ell_bold == doctest::Approx(std::sqrt(19.0)).epsilon(1e-12));
    CHECK(rot.ell() == doctest::Approx(std::sqrt(28.0)).epsilon(1e-12));

    Mat ut(2, 2);
    ut << 2, 1, 0, 2;
    Constants tri = exact_constants(QuadraticGame({1, 1}, ut, Vec::Zero(2)));
    CHECK(tri.mu == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(tri.ell_F == doctest::Approx(std::sqrt((9.0 + std::sqrt(17.0)) / 2.0)).epsilon(1e-12));
    CHECK(tri.ell_bold == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));

    Mat sym(2, 2);
    sym << 2, 0.5, 0.5, 2;
    Constants cs = exact_constants(QuadraticGame({1, 1}, sym, v2(-2, 2)));
    CHECK(cs.mu == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(cs.ell_F == doctest::Approx(2.5).epsilon(1e-12));
    CHECK(cs.ell_bold == doctest::Approx(std::sqrt(4.25)).epsilon(1e-12));

    Constants dec = exact_constants(make_decoupled_game({1, 1}, v2(1, -1)));
    CHECK(dec.mu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dec.ell_F == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dec.ell_bold == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sampled constants use the closed form when available") {
    QuadraticGame q = rotational_game();
    Constants exact = exact_constants(q);
    Constants est = estimate_constants(q.to_game(), Vec::Constant(3, -2), Vec::Constant(3, 2),
                                       50, 1);
    CHECK(est.exact);
    CHECK(est.mu == doctest::Approx(exact.mu).epsilon(1e-14));
    CHECK(est.ell_F == doctest::Approx(exact.ell_F).epsilon(1e-14));
    CHECK(est.ell_bold == doctest::Approx(exact.ell_bold).epsilon(1e-14));
}

TEST_CASE("sampled constants bracket the exact ones") {
    Game g = rotational_closures();
    CHECK_FALSE(g.affine().has_value());
    Constants est = estimate_constants(g, Vec::Constant(3, -2), Vec::Constant(3, 2), 400, 7);
    CHECK_FALSE(est.exact);
    // Sampled ratios can only shrink the spread: mu from below is an
    // overestimate, the Lipschitz constants are underestimates.
    CHECK(est.mu >= 1.0 - 1e-9);
    CHECK(est.ell_F <= std::sqrt(28.0) + 1e-9);
    CHECK(est.ell_bold <= std::sqrt(19.0) + 1e-9);
    CHECK(est.mu <= est.ell_F + 1e-12);
    CHECK(est.ell_F >= 1.0 - 1e-9);  // monotonicity forces ratios >= mu
}

TEST_CASE("sampled constants are exact for a uniform scaling map") {
    // F(x) = 2x: every difference ratio of the flat map equals 2 in every
    // direction, so mu and ell_F are exact. The stacked map reads only the
    // own coordinate of each estimate, so its sampled ratio stays below 2
    // for more than one player and collapses to the flat map for a single
    // player, where it is exact as well.
    Game g({1, 1}, [](int i, const Vec& x) -> Vec {
        Vec r(1);
        r(0) = 2.0 * x(i);
        return r;
    });
    Constants est = estimate_constants(g, Vec::Constant(2, -1), Vec::Constant(2, 1), 100, 3);
    CHECK(est.mu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(est.ell_F == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(est.ell_bold <= 2.0 + 1e-12);
    CHECK(est.ell_bold >= 1.0);

    Game solo({1}, [](int, const Vec& x) -> Vec { return 2.0 * x; });
    Constants one = estimate_constants(solo, Vec::Constant(1, -1), Vec::Constant(1, 1), 100, 3);
    CHECK(one.mu == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(one.ell_F == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(one.ell_bold == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("sampled constants input validation") {
    Game g = rotational_closures();
    CHECK_THROWS_AS(estimate_constants(g, Vec::Zero(3), Vec::Zero(3), 50, 1), InputError);
    CHECK_THROWS_AS(estimate_constants(g, Vec::Ones(3), Vec::Zero(3), 50, 1), InputError);
    CHECK_THROWS_AS(estimate_constants(g, Vec::Zero(2), Vec::Ones(2), 50, 1), InputError);
    CHECK_THROWS_AS(estimate_constants(g, Vec::Zero(3), Vec::Ones(3), 1, 1), InputError);
}

TEST_CASE("recommended extragradient step") {
    Constants c{1.5, 2.5, std::sqrt(4.25), true};
    CHECK(recommended_vi_step(c) == doctest::Approx(0.24).epsilon(1e-12));
    Constants d{2.0, 2.0, 2.0, true};
    CHECK(recommended_vi_step(d) == doctest::Approx(0.45).epsilon(1e-12));
    Constants bad{0.0, 1.0, 1.0, true};
    CHECK_THROWS_AS(recommended_vi_step(bad), InputError);
}

TEST_CASE("minimal certified gain") {
    Constants flat{2.0, 2.0, 2.0, true};
    CHECK(min_k_star(flat, 2.0) == doctest::Approx(1.0).epsilon(1e-12));

    Constants rot = exact_constants(rotational_game());
    CHECK(min_k_star(rot, 1.0) == doctest::Approx(std::sqrt(19.0) + 28.0).epsilon(1e-12));
    // Better connectivity lowers the required gain.
    CHECK(min_k_star(rot, 2.0) < min_k_star(rot, 1.0));
    CHECK(min_k_star(rot, 2.0) == doctest::Approx((std::sqrt(19.0) + 28.0) / 4.0).epsilon(1e-12));

    Constants bad{0.0, 1.0, 1.0, true};
    CHECK_THROWS_AS(min_k_star(bad, 1.0), InputError);
    CHECK_THROWS_AS(min_k_star(flat, 0.0), InputError);
}

TEST_CASE("certificate matrix entries and definiteness flip") {
    Constants rot = exact_constants(rotational_game());
    const double lambda2 = 1.0;
    const double threshold = min_k_star(rot, lambda2);

    Certificate at = make_certificate(rot, lambda2, 35.0);
    CHECK(at.k_star == 35.0);
    CHECK(at.lambda2 == lambda2);
    CHECK(at.m(0, 0) == doctest::Approx(-std::sqrt(19.0) + 35.0).epsilon(1e-12));
    CHECK(at.m(0, 1) == doctest::Approx(std::sqrt(28.0)).epsilon(1e-12));
    CHECK(at.m(1, 0) == at.m(0, 1));
    CHECK(at.m(1, 1) == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_FALSE(make_certificate(rot, lambda2, threshold - 0.1).pd);
    CHECK(make_certificate(rot, lambda2, threshold + 0.1).pd);

    // Minor test and eigenvalue test agree on a grid around the flip.
    for (double k = 20.0; k <= 45.0; k += 0.5) {
        Certificate cert = make_certificate(rot, lambda2, k);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(cert.m);
        bool pd_eig = es.eigenvalues().minCoeff() > 0;
        CHECK(cert.pd == pd_eig);
        CHECK(cert.pd == (k > threshold));
    }
    CHECK_THROWS_AS(make_certificate(rot, 0.0, 1.0), InputError);
}

TEST_CASE("lyapunov function hand values") {
    Vec x_star = v2(0, 0);
    // Consensus at the equilibrium with matched gains: W = 0.
    CHECK(lyapunov_W(ExtendedState{Vec::Zero(4), v2(3, 3)}, x_star, 3.0, v2(1, 1)) == 0.0);

    // Estimate part alone: ||X - 1 kron x*||^2 = 2.
    Vec X(4);
    X << 1, 0, 1, 0;
    CHECK(lyapunov_W(ExtendedState{X, v2(3, 3)}, x_star, 3.0, v2(1, 1)) ==
          doctest::Approx(1.0).epsilon(1e-14));

    // Gain part alone, weighted by the rates: 1/2 (4/2 + 4/4) = 1.5.
    CHECK(lyapunov_W(ExtendedState{Vec::Zero(4), v2(5, 5)}, x_star, 3.0, v2(2, 4)) ==
          doctest::Approx(1.5).epsilon(1e-14));

    CHECK_THROWS_AS(lyapunov_W(ExtendedState{Vec::Zero(4), v2(3, 3)}, x_star, 3.0, v2(1, -1)),
                    InputError);
    CHECK_THROWS_AS(lyapunov_W(ExtendedState{Vec::Zero(4), v2(3, 3)}, x_star, 3.0, Vec::Ones(3)),
                    InputError);
    CHECK_THROWS_AS(lyapunov_W(ExtendedState{Vec::Zero(5), v2(3, 3)}, x_star, 3.0, v2(1, 1)),
                    InputError);
}

TEST_CASE("storage function") {
    Vec a(1), b(1);
    a << 3;
    b << 0;
    CHECK(storage_V(a, b) == doctest::Approx(4.5).epsilon(1e-14));
    CHECK(storage_V(a, b) == storage_V(b, a));
    CHECK(storage_V(a, a) == 0.0);
    CHECK_THROWS_AS(storage_V(a, Vec::Zero(2)), InputError);
}

TEST_CASE("w_dot matches a finite difference of W along the flow") {
    QuadraticGame q = rotational_game();
    Game g = q.to_game();
    Graph p3 = Graph::path(3, 1.0);
    Vec gamma = v3(1, 2, 3);
    DaiParams params;
    params.gamma = gamma;
    params.k_init = Vec::Zero(3);
    Flow flow = make_flow(FlowKind::dai, g, p3, params);
    Vec x_star = q.nash_equilibrium();
    Certificate cert = make_certificate(exact_constants(q), p3.algebraic_connectivity(), 35.0);

    Rng rng(19);
    for (int trial = 0; trial < 25; ++trial) {
        ExtendedState s{rng.uniform_vec(9, -2, 2), rng.uniform_vec(3, 0, 3)};
        double wd = w_dot_along(flow, s, cert, gamma, x_star);
        // W is quadratic, so the central difference along the flow direction
        // is exact up to rounding.
        const double h = 1e-4;
        Vec y = flow.pack(s);
        Vec f = flow(y);
        double wp = lyapunov_W(flow.unpack(y + h * f), x_star, cert.k_star, gamma);
        double wm = lyapunov_W(flow.unpack(y - h * f), x_star, cert.k_star, gamma);
        double fd = (wp - wm) / (2.0 * h);
        CHECK(std::abs(wd - fd) < 1e-6 * (1.0 + std::abs(wd)));
    }

    // At the stacked equilibrium the derivative vanishes identically.
    ExtendedState rest{stack_consensus(x_star, 3), v3(1, 1, 1)};
    CHECK(w_dot_along(flow, rest, cert, gamma, x_star) == 0.0);

    Flow stat = make_flow(FlowKind::static_consensus, g, p3);
    CHECK_THROWS_AS(w_dot_along(stat, rest, cert, gamma, x_star), InputError);
}

TEST_CASE("convergence metrics hand values") {
    Vec x_star = v3(1, -1, 0.5);
    Vec on = stack_consensus(x_star, 3);
    Vec w = v3(0.3, 0, 0);
    Vec off = on;
    off.head(3) += w;  // perturb only the first agent's estimate

    TrajectoryLog log;
    log.x_dim = 9;
    log.gain_dim = 3;
    log.times = {0.0, 1.0};
    Vec s0(12), s1(12);
    s0 << on, 2.0, 2.0, 2.0;
    s1 << off, 2.0, 2.0, 2.0;
    log.states = {s0, s1};

    std::vector<MetricsRow> rows = convergence_metrics(log, x_star, 2.0, Vec::Ones(3));
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].ne_error == 0.0);
    CHECK(rows[0].consensus_error == 0.0);
    CHECK(rows[0].avg_error == 0.0);
    CHECK(rows[0].W == 0.0);
    CHECK(rows[0].gains.size() == 3);

    CHECK(rows[1].ne_error == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(rows[1].consensus_error == doctest::Approx(std::sqrt(2.0 / 3.0) * 0.3).epsilon(1e-12));
    CHECK(rows[1].avg_error == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(rows[1].W == doctest::Approx(0.5 * 0.09).epsilon(1e-12));

    // Without a gain reference the W column is marked absent.
    std::vector<MetricsRow> no_w = convergence_metrics(log, x_star);
    CHECK(std::isnan(no_w[1].W));
}

TEST_CASE("convergence metrics without gains and for single agents") {
    Vec x_star = v2(1, -1);
    TrajectoryLog log;
    log.x_dim = 4;
    log.gain_dim = 0;
    log.times = {0.0};
    Vec s(4);
    s << 1, -1, 1, -0.5;  // second agent is off by 0.5 in one coordinate
    log.states = {s};
    std::vector<MetricsRow> rows = convergence_metrics(log, x_star, 0.0);
    CHECK(rows[0].ne_error == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rows[0].W == doctest::Approx(0.5 * 0.25).epsilon(1e-12));
    CHECK(rows[0].gains.size() == 0);

    TrajectoryLog single;
    single.x_dim = 2;
    single.gain_dim = 0;
    single.times = {0.0};
    Vec y(2);
    y << 2, -1;
    single.states = {y};
    std::vector<MetricsRow> srows = convergence_metrics(single, x_star);
    CHECK(srows[0].consensus_error == 0.0);
    CHECK(srows[0].ne_error == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(srows[0].avg_error == doctest::Approx(1.0).epsilon(1e-12));

    CHECK_THROWS_AS(convergence_metrics(log, Vec()), InputError);
    CHECK_THROWS_AS(convergence_metrics(log, v3(1, 2, 3)), InputError);
    CHECK_THROWS_AS(convergence_metrics(log, x_star, 1.0, Vec::Ones(2)), InputError);
}
