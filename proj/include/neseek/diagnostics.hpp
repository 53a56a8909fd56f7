#pragma once

#include <cstdint>
#include <vector>

#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/trajectory.hpp"
#include "neseek/types.hpp"

namespace neseek {

/// Regularity constants of a game's pseudo-gradient maps.
struct Constants {
    double mu = 0;        // strong-monotonicity modulus of F
    double ell_F = 0;     // Lipschitz constant of F
    double ell_bold = 0;  // Lipschitz constant of the extended map
    bool exact = false;   // closed form (quadratic game) vs sampled estimate

    double ell() const { return ell_F > ell_bold ? ell_F : ell_bold; }
};

/// Closed-form constants of a quadratic game: mu = lambda_min((A+A^T)/2),
/// ell_F = sigma_max(A), ell_bold = max_i sigma_max(row block A_i).
Constants exact_constants(const QuadraticGame& q);

/// Sampled estimates over random pairs drawn from the box [lo, hi]^M:
/// mu from the smallest monotonicity ratio, the Lipschitz constants from the
/// largest difference ratios. Games with an attached affine form use the
/// closed forms instead. Pairs closer than 1e-12 are skipped.
Constants estimate_constants(const Game& game, const Vec& region_lo, const Vec& region_hi,
                             int n_samples, std::uint64_t seed);

/// Step size for the extragradient equilibrium oracle that is contractive
/// for a mu-strongly monotone, ell-Lipschitz map: min(mu/ell^2, 0.9/ell).
double recommended_vi_step(const Constants& c);

/// Smallest gain reference k* for which the 2x2 certificate matrix is
/// positive definite: (ell_bold + ell^2/mu) / lambda2^2. Requires mu > 0,
/// lambda2 > 0.
double min_k_star(const Constants& c, double lambda2);

/// The certificate matrix M = [[-ell_bold + k* lambda2^2, ell], [ell, mu]]
/// together with its definiteness check.
struct Certificate {
    double k_star = 0;
    Eigen::Matrix2d m;
    bool pd = false;
    double lambda2 = 0;
};
Certificate make_certificate(const Constants& c, double lambda2, double k_star);

/// W(X, k) = 1/2 ||X - 1 kron x*||^2 + 1/2 sum_i (k_i - k*)^2 / gamma_i.
double lyapunov_W(const ExtendedState& state, const Vec& x_star, double k_star,
                  const Vec& gamma);

/// V(X, Y) = 1/2 ||X - Y||^2.
double storage_V(const Vec& X, const Vec& Y);

/// Time derivative of W along the flow at `state`: gradient of W dotted with
/// the flow right-hand side. x* comes from an equilibrium oracle, k* from
/// the certificate.
double w_dot_along(const Flow& flow, const ExtendedState& state, const Certificate& cert,
                   const Vec& gamma, const Vec& x_star);

/// Per-logged-time convergence quantities.
struct MetricsRow {
    double t = 0;
    double ne_error = 0;         // ||X - 1 kron x*||
    double consensus_error = 0;  // disagreement norm ||(P kron I) X||
    double avg_error = 0;        // ||avg(X) - x*||
    Vec gains;                   // empty for non-adaptive flows
    double W = 0;                // NaN when no k* provided
};

/// Metrics along a logged trajectory. For single-agent logs (full_info) the
/// consensus error is zero and avg(X) is the state itself. Pass k_star < 0
/// to skip the W column.
std::vector<MetricsRow> convergence_metrics(const TrajectoryLog& log, const Vec& x_star,
                                            double k_star = -1.0, const Vec& gamma = Vec());

} // namespace neseek
