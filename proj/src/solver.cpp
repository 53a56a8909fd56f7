#include "neseek/solver.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "neseek/errors.hpp"

namespace neseek {

std::string to_string(Method m) {
    switch (m) {
    case Method::rk4: return "rk4";
    case Method::euler: return "euler";
    case Method::projected_euler: return "projected_euler";
    }
    return "unknown";
}

Method method_from_string(const std::string& name) {
    if (name == "rk4") return Method::rk4;
    if (name == "euler") return Method::euler;
    if (name == "projected_euler") return Method::projected_euler;
    throw InputError("unknown method '" + name + "' (expected rk4, euler, projected_euler)");
}

void IntegratorSpec::validate() const {
    if (!(step > 0) || !std::isfinite(step))
        throw ConstructionError("integrator: step must be positive and finite");
    if (!(t_end > 0) || !std::isfinite(t_end))
        throw ConstructionError("integrator: t_end must be positive and finite");
    if (log_every < 1) throw ConstructionError("integrator: log_every must be >= 1");
    if (n_steps() > 100'000'000) throw ConstructionError("integrator: too many steps");
}

int IntegratorSpec::n_steps() const {
    return static_cast<int>(std::ceil(t_end / step - 1e-12));
}

namespace {

bool out_of_bounds(const Vec& y) {
    return !y.allFinite() || y.lpNorm<Eigen::Infinity>() > kDivergenceGuard;
}

struct Logger {
    TrajectoryLog log;
    int log_every;

    void push(double t, const Vec& y) {
        log.times.push_back(t);
        log.states.push_back(y);
    }
    void maybe_push(int step_index, double t, const Vec& y) {
        if (step_index % log_every == 0) push(t, y);
    }
};

} // namespace

IntegrationResult integrate_smooth(const std::function<Vec(const Vec&)>& rhs, const Vec& y0,
                                   const IntegratorSpec& spec, int x_dim, int gain_dim) {
    spec.validate();
    if (spec.method == Method::projected_euler)
        throw InputError("integrate_smooth: projected_euler needs the flow's action sets; "
                         "use integrate_projected");
    if (y0.size() != x_dim + gain_dim)
        throw InputError("integrate_smooth: initial state has wrong length");
    if (out_of_bounds(y0)) throw InputError("integrate_smooth: initial state out of bounds");

    const int n = spec.n_steps();
    const double h = spec.step;
    Logger lg{TrajectoryLog{{}, {}, x_dim, gain_dim}, spec.log_every};
    lg.push(0.0, y0);

    Vec y = y0;
    double t = 0;
    for (int s = 1; s <= n; ++s) {
        // Last step lands exactly on t_end.
        const double hs = (s == n) ? spec.t_end - t : h;
        if (spec.method == Method::rk4) {
            Vec k1 = rhs(y);
            Vec k2 = rhs(y + 0.5 * hs * k1);
            Vec k3 = rhs(y + 0.5 * hs * k2);
            Vec k4 = rhs(y + hs * k3);
            y += (hs / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        } else {
            y += hs * rhs(y);
        }
        t = (s == n) ? spec.t_end : s * h;
        if (out_of_bounds(y)) {
            lg.push(t, y);
            return IntegrationResult{std::move(lg.log), IntegrationStatus::diverged, t};
        }
        if (s == n && s % spec.log_every != 0)
            lg.push(t, y);  // always keep the endpoint
        else
            lg.maybe_push(s, t, y);
    }
    return IntegrationResult{std::move(lg.log), IntegrationStatus::ok, spec.t_end};
}

IntegrationResult integrate_projected(const Flow& flow, const Vec& y0, const IntegratorSpec& spec) {
    spec.validate();
    if (flow.kind() != FlowKind::projected_dai)
        throw InputError("integrate_projected: flow must be projected_dai");
    if (y0.size() != flow.state_dim())
        throw InputError("integrate_projected: initial state has wrong length");
    const Game& game = flow.game();
    const Selection& sel = game.selection();

    // Own blocks must start feasible; each step re-projects them exactly.
    auto reproject_own = [&](Vec& y) {
        for (int i = 0; i < game.n_players(); ++i) {
            auto own = y.segment(sel.own_start(i), sel.dim(i));
            own = game.constraint(i).project(own);
        }
    };
    Vec y = y0;
    {
        ExtendedState s0 = flow.unpack(y);
        for (int i = 0; i < game.n_players(); ++i) {
            Vec own = s0.X.segment(sel.own_start(i), sel.dim(i));
            if (!game.constraint(i).contains(own, kMembershipTol))
                throw InputError("integrate_projected: initial own block of agent " +
                                 std::to_string(i) + " lies outside its action set");
        }
    }
    reproject_own(y);  // absorb membership-tolerance slack so logs are exactly feasible
    if (out_of_bounds(y)) throw InputError("integrate_projected: initial state out of bounds");

    const int n = spec.n_steps();
    const double h = spec.step;
    Logger lg{TrajectoryLog{{}, {}, flow.x_dim(), flow.gain_dim()}, spec.log_every};
    lg.push(0.0, y);

    double t = 0;
    for (int s = 1; s <= n; ++s) {
        const double hs = (s == n) ? spec.t_end - t : h;
        y += hs * flow(y);
        reproject_own(y);
        t = (s == n) ? spec.t_end : s * h;
        if (out_of_bounds(y)) {
            lg.push(t, y);
            return IntegrationResult{std::move(lg.log), IntegrationStatus::diverged, t};
        }
        if (s == n && s % spec.log_every != 0)
            lg.push(t, y);
        else
            lg.maybe_push(s, t, y);
    }
    return IntegrationResult{std::move(lg.log), IntegrationStatus::ok, spec.t_end};
}

IntegrationResult integrate(const Flow& flow, const Vec& y0, const IntegratorSpec& spec) {
    if (flow.kind() == FlowKind::projected_dai) {
        if (spec.method != Method::projected_euler)
            throw InputError("integrate: projected_dai requires the projected_euler method");
        return integrate_projected(flow, y0, spec);
    }
    if (spec.method == Method::projected_euler)
        throw InputError("integrate: projected_euler only applies to projected_dai flows");
    return integrate_smooth([&flow](const Vec& y) { return flow(y); }, y0, spec, flow.x_dim(),
                            flow.gain_dim());
}

OracleResult nash_oracle_unconstrained(const Game& game, const Vec& x0, double tol, int max_iter) {
    if (x0.size() != game.total_dim())
        throw InputError("equilibrium oracle: start point has wrong length");
    if (game.is_constrained())
        throw InputError("equilibrium oracle: game is constrained; use the VI oracle");

    // Already at a root: report without spending an iteration.
    {
        double res0 = game.pseudo_gradient(x0).norm();
        if (res0 <= tol) return OracleResult{x0, res0, 0, true};
    }

    // Affine pseudo-gradient: one linear solve.
    if (game.affine()) {
        const auto& [A, b] = *game.affine();
        Eigen::FullPivLU<Mat> lu(A);
        if (lu.isInvertible()) {
            Vec x = lu.solve(-b);
            double res = game.pseudo_gradient(x).norm();
            return OracleResult{std::move(x), res, 1, res <= tol};
        }
    }

    // Damped Newton with a central-difference Jacobian.
    const int M = game.total_dim();
    Vec x = x0;
    Vec f = game.pseudo_gradient(x);
    for (int it = 1; it <= max_iter; ++it) {
        if (f.norm() <= tol) return OracleResult{x, f.norm(), it - 1, true};
        Mat J(M, M);
        const double fd = 1e-6 * (1.0 + x.norm());
        for (int c = 0; c < M; ++c) {
            Vec e = Vec::Zero(M);
            e(c) = fd;
            J.col(c) = (game.pseudo_gradient(x + e) - game.pseudo_gradient(x - e)) / (2.0 * fd);
        }
        Vec d = J.fullPivLu().solve(-f);
        if (!d.allFinite()) break;
        double alpha = 1.0;
        Vec x_next = x + d;
        Vec f_next = game.pseudo_gradient(x_next);
        while (f_next.norm() >= f.norm() && alpha > 1e-10) {
            alpha *= 0.5;
            x_next = x + alpha * d;
            f_next = game.pseudo_gradient(x_next);
        }
        if (alpha <= 1e-10) break;  // no descent: stop with the current point
        x = std::move(x_next);
        f = std::move(f_next);
    }
    return OracleResult{x, f.norm(), max_iter, f.norm() <= tol};
}

OracleResult nash_oracle_vi(const Game& game, const Vec& x0, double step, double tol,
                            int max_iter) {
    if (x0.size() != game.total_dim())
        throw InputError("VI oracle: start point has wrong length");
    if (!game.has_constraints())
        throw InputError("VI oracle: game carries no action sets");
    if (!(step > 0)) throw InputError("VI oracle: step must be positive");

    // Extragradient iteration; the natural residual x - P(x - step F(x))
    // doubles as the convergence measure.
    Vec x = game.project_profile(x0);
    for (int it = 1; it <= max_iter; ++it) {
        Vec half = game.project_profile(x - step * game.pseudo_gradient(x));
        double res = (x - half).lpNorm<Eigen::Infinity>();
        if (res <= tol) return OracleResult{x, res, it - 1, true};
        x = game.project_profile(x - step * game.pseudo_gradient(half));
        if (!x.allFinite()) throw InputError("VI oracle: iteration left the finite range");
    }
    Vec half = game.project_profile(x - step * game.pseudo_gradient(x));
    double res = (x - half).lpNorm<Eigen::Infinity>();
    return OracleResult{x, res, max_iter, res <= tol};
}

} // namespace neseek
