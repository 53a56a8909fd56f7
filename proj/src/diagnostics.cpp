#include "neseek/diagnostics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "neseek/errors.hpp"
#include "neseek/graph.hpp"
#include "neseek/rng.hpp"

namespace neseek {

Constants exact_constants(const QuadraticGame& q) {
    Constants c;
    c.mu = q.strong_monotonicity();
    c.ell_F = q.lipschitz();
    c.ell_bold = q.extended_lipschitz();
    c.exact = true;
    return c;
}

Constants estimate_constants(const Game& game, const Vec& region_lo, const Vec& region_hi,
                             int n_samples, std::uint64_t seed) {
    const int M = game.total_dim();
    if (region_lo.size() != M || region_hi.size() != M)
        throw InputError("constant estimation: region box must match the profile dimension");
    if ((region_lo.array() > region_hi.array()).any())
        throw InputError("constant estimation: region lower bound exceeds upper bound");
    if (n_samples < 2) throw InputError("constant estimation: need at least two samples");

    if (game.affine()) {
        QuadraticGame q(game.selection().dims(), game.affine()->A, game.affine()->b);
        return exact_constants(q);
    }

    // Pairwise difference ratios over random draws. For the extended map the
    // pair lives in the stacked space: each agent evaluates its own gradient
    // at its own profile copy.
    const int N = game.n_players();
    const Selection& sel = game.selection();
    Rng rng(seed);
    double mu = std::numeric_limits<double>::infinity();
    double ell_F = 0, ell_bold = 0;
    for (int s = 0; s < n_samples; ++s) {
        Vec xa(M), xb(M);
        for (int c = 0; c < M; ++c) xa(c) = rng.uniform(region_lo(c), region_hi(c));
        for (int c = 0; c < M; ++c) xb(c) = rng.uniform(region_lo(c), region_hi(c));
        Vec dx = xa - xb;
        if (dx.norm() >= 1e-12) {
            Vec df = game.pseudo_gradient(xa) - game.pseudo_gradient(xb);
            mu = std::min(mu, dx.dot(df) / dx.squaredNorm());
            ell_F = std::max(ell_F, df.norm() / dx.norm());
        }

        // Stacked pair: independent profile per agent.
        Vec Xa(N * M), Xb(N * M);
        for (int c = 0; c < N * M; ++c) Xa(c) = rng.uniform(region_lo(c % M), region_hi(c % M));
        for (int c = 0; c < N * M; ++c) Xb(c) = rng.uniform(region_lo(c % M), region_hi(c % M));
        Vec dX = Xa - Xb;
        if (dX.norm() >= 1e-12) {
            Vec dF(M);
            for (int i = 0; i < N; ++i) {
                Vec ga = game.partial_gradient(i, Xa.segment(static_cast<Eigen::Index>(i) * M, M));
                Vec gb = game.partial_gradient(i, Xb.segment(static_cast<Eigen::Index>(i) * M, M));
                dF.segment(sel.offset(i), sel.dim(i)) = ga - gb;
            }
            ell_bold = std::max(ell_bold, dF.norm() / dX.norm());
        }
    }
    if (!std::isfinite(mu))
        throw InputError("constant estimation: all sampled pairs were degenerate");
    Constants c;
    c.mu = mu;
    c.ell_F = ell_F;
    c.ell_bold = ell_bold;
    c.exact = false;
    return c;
}

double recommended_vi_step(const Constants& c) {
    double ell = c.ell();
    if (!(c.mu > 0) || !(ell > 0))
        throw InputError("VI step: needs positive monotonicity and Lipschitz constants");
    return std::min(c.mu / (ell * ell), 0.9 / ell);
}

double min_k_star(const Constants& c, double lambda2) {
    if (!(c.mu > 0)) throw InputError("min k*: strong-monotonicity constant must be positive");
    if (!(lambda2 > 0)) throw InputError("min k*: algebraic connectivity must be positive");
    double ell = c.ell();
    return (c.ell_bold + ell * ell / c.mu) / (lambda2 * lambda2);
}

Certificate make_certificate(const Constants& c, double lambda2, double k_star) {
    if (!(lambda2 > 0)) throw InputError("certificate: algebraic connectivity must be positive");
    Certificate cert;
    cert.k_star = k_star;
    cert.lambda2 = lambda2;
    double ell = c.ell();
    cert.m << -c.ell_bold + k_star * lambda2 * lambda2, ell, ell, c.mu;
    // Positive definiteness via the leading principal minors.
    cert.pd = cert.m(0, 0) > 0 && cert.m.determinant() > 0;
    return cert;
}

double lyapunov_W(const ExtendedState& state, const Vec& x_star, double k_star,
                  const Vec& gamma) {
    const Eigen::Index n = state.K.size();
    if (gamma.size() != n) throw InputError("lyapunov: need one rate per gain");
    if ((gamma.array() <= 0).any()) throw InputError("lyapunov: rates must be positive");
    if (x_star.size() == 0 || state.X.size() % x_star.size() != 0 ||
        state.X.size() / x_star.size() != n)
        throw InputError("lyapunov: state/equilibrium dimensions mismatch");
    const Eigen::Index m = x_star.size();
    double acc = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += (state.X.segment(i * m, m) - x_star).squaredNorm();
    double gain_part = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        double dk = state.K(i) - k_star;
        gain_part += dk * dk / gamma(i);
    }
    return 0.5 * acc + 0.5 * gain_part;
}

double storage_V(const Vec& X, const Vec& Y) {
    if (X.size() != Y.size()) throw InputError("storage: arguments must have the same length");
    return 0.5 * (X - Y).squaredNorm();
}

double w_dot_along(const Flow& flow, const ExtendedState& state, const Certificate& cert,
                   const Vec& gamma, const Vec& x_star) {
    if (!flow.adaptive())
        throw InputError("w_dot: defined along the adaptive flows (gains enter W)");
    Vec y = flow.pack(state);
    ExtendedState deriv = flow.unpack(flow(y));  // X/K components of the derivative

    // grad_X W = X - 1 kron x*, grad_k W = Gamma^{-1}(k - k* 1).
    const Eigen::Index n = state.K.size();
    const Eigen::Index m = x_star.size();
    double acc = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        acc += (state.X.segment(i * m, m) - x_star).dot(deriv.X.segment(i * m, m));
    for (Eigen::Index i = 0; i < n; ++i)
        acc += (state.K(i) - cert.k_star) / gamma(i) * deriv.K(i);
    return acc;
}

std::vector<MetricsRow> convergence_metrics(const TrajectoryLog& log, const Vec& x_star,
                                            double k_star, const Vec& gamma) {
    const Eigen::Index m = x_star.size();
    if (m == 0) throw InputError("metrics: empty equilibrium");
    if (log.x_dim % m != 0) throw InputError("metrics: state not a multiple of the equilibrium");
    const int n_agents = static_cast<int>(log.x_dim / m);
    const bool with_W = k_star >= 0;
    if (with_W && gamma.size() != log.gain_dim)
        throw InputError("metrics: need one rate per gain for the W column");

    std::vector<MetricsRow> rows;
    rows.reserve(log.size());
    for (std::size_t r = 0; r < log.size(); ++r) {
        MetricsRow row;
        row.t = log.times[r];
        Vec X = log.x_at(r);
        double sq = 0;
        for (int i = 0; i < n_agents; ++i)
            sq += (X.segment(static_cast<Eigen::Index>(i) * m, m) - x_star).squaredNorm();
        row.ne_error = std::sqrt(sq);
        ConsensusSplit split = consensus_split(X, n_agents);
        row.consensus_error = split.off_norm;
        row.avg_error = (split.average - x_star).norm();
        row.gains = log.gains_at(r);
        if (with_W && log.gain_dim > 0)
            row.W = lyapunov_W(ExtendedState{X, row.gains}, x_star, k_star, gamma);
        else if (with_W)
            row.W = 0.5 * sq;  // no gains: only the estimate part remains
        else
            row.W = std::numeric_limits<double>::quiet_NaN();
        rows.push_back(std::move(row));
    }
    return rows;
}

} // namespace neseek
