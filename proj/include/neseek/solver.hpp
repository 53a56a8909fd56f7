#pragma once

#include <functional>
#include <string>

#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/trajectory.hpp"
#include "neseek/types.hpp"

namespace neseek {

/// State magnitude beyond which an integration run is declared divergent.
inline constexpr double kDivergenceGuard = 1e12;

enum class Method { rk4, euler, projected_euler };
std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// Fixed-step integrator settings. `log_every` keeps every n-th step in the
/// log (the initial state and the final step are always kept).
struct IntegratorSpec {
    Method method = Method::rk4;
    double step = 1e-2;
    double t_end = 10.0;
    int log_every = 1;

    void validate() const;
    int n_steps() const;
};

enum class IntegrationStatus { ok, diverged };

struct IntegrationResult {
    TrajectoryLog log;
    IntegrationStatus status = IntegrationStatus::ok;
    double t_final = 0;   // time actually reached (< t_end when diverged)
};

/// Classical RK4 / explicit Euler on an arbitrary smooth right-hand side.
/// Aborts early (status = diverged) when the state leaves the divergence
/// guard or stops being finite.
IntegrationResult integrate_smooth(const std::function<Vec(const Vec&)>& rhs, const Vec& y0,
                                   const IntegratorSpec& spec, int x_dim, int gain_dim);

/// Explicit Euler followed by an exact re-projection of every own block onto
/// its action set after each step, so all logged iterates are feasible.
/// Requires a projected_dai flow (game carries one set per player).
IntegrationResult integrate_projected(const Flow& flow, const Vec& y0, const IntegratorSpec& spec);

/// Convenience: pick the integration scheme required by the flow/method
/// combination and run it.
IntegrationResult integrate(const Flow& flow, const Vec& y0, const IntegratorSpec& spec);

/// Independent equilibrium solvers (never reuse flow code): their output is
/// the reference the dynamics are judged against.
struct OracleResult {
    Vec x_star;
    double residual = 0;   // ||F(x*)|| or natural-residual norm
    int iterations = 0;
    bool converged = false;
};

/// Unconstrained game: solves F(x) = 0 by damped Newton with a
/// finite-difference Jacobian; affine games short-circuit to a direct solve.
OracleResult nash_oracle_unconstrained(const Game& game, const Vec& x0, double tol = 1e-10,
                                       int max_iter = 100);

/// Constrained game: extragradient iteration on the variational inequality
/// over Omega_1 x ... x Omega_N. `step` is the extragradient step size; see
/// recommended_vi_step for a safe default.
OracleResult nash_oracle_vi(const Game& game, const Vec& x0, double step, double tol = 1e-10,
                            int max_iter = 200000);

} // namespace neseek
