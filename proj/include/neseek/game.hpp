#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "neseek/sets.hpp"
#include "neseek/types.hpp"

namespace neseek {

/// Block layout of a joint action x = (x_1, ..., x_N) in R^M and the
/// bookkeeping for the stacked estimate vector in R^{NM}, where agent i's
/// copy of the full profile occupies rows [i*M, (i+1)*M).
class Selection {
public:
    explicit Selection(std::vector<int> dims);

    int n_players() const { return static_cast<int>(dims_.size()); }
    int total_dim() const { return total_; }
    int dim(int i) const { return dims_.at(i); }
    int offset(int i) const { return offsets_.at(i); }
    const std::vector<int>& dims() const { return dims_; }

    /// Start of agent i's own block inside the stacked vector.
    int own_start(int i) const { return i * total_ + offsets_.at(i); }

    /// Extract own blocks: stacked R^{NM} -> profile R^M.
    Vec extract_own(const Vec& stacked) const;

    /// Scatter a profile into its own blocks of a zero stacked vector
    /// (adjoint of extract_own): R^M -> R^{NM}.
    Vec embed_own(const Vec& profile) const;

    /// Zero the own blocks of a stacked vector, keeping the rest.
    Vec zero_own(const Vec& stacked) const;

private:
    std::vector<int> dims_;
    std::vector<int> offsets_;
    int total_ = 0;
};

/// Game with cost gradient F(x) = (grad_1 J_1(x), ..., grad_N J_N(x)).
/// Costs are optional (only needed for finite-difference gradient checks);
/// the dynamics consume the gradient alone. Per-player constraint sets are
/// optional; when present there is one per player (full_space entries allowed).
class Game {
public:
    using GradientFn = std::function<Vec(int player, const Vec& profile)>;
    using CostFn = std::function<double(int player, const Vec& profile)>;

    Game(std::vector<int> dims, GradientFn grad);
    Game(std::vector<int> dims, GradientFn grad, CostFn cost);

    const Selection& selection() const { return sel_; }
    int n_players() const { return sel_.n_players(); }
    int total_dim() const { return sel_.total_dim(); }

    /// grad_i J_i evaluated at a full profile (length M); returns length dims(i).
    Vec partial_gradient(int player, const Vec& profile) const;

    /// Stacked pseudo-gradient F(x) in R^M.
    Vec pseudo_gradient(const Vec& profile) const;

    bool has_costs() const { return static_cast<bool>(cost_); }
    double cost(int player, const Vec& profile) const;

    /// Attach one constraint set per player. Throws on count/dim mismatch.
    void set_constraints(std::vector<ConvexSet> sets);
    bool has_constraints() const { return !sets_.empty(); }
    /// True when at least one player's set is a proper subset of its space.
    bool is_constrained() const;
    const ConvexSet& constraint(int player) const;
    const std::vector<ConvexSet>& constraints() const { return sets_; }

    /// Blockwise projection of a profile onto Omega_1 x ... x Omega_N.
    Vec project_profile(const Vec& profile) const;
    bool profile_in_constraints(const Vec& profile, double tol = kMembershipTol) const;

    /// Set when the pseudo-gradient is affine, F(x) = A x + b; lets
    /// diagnostics and oracles take exact routes.
    struct AffineForm {
        Mat A;
        Vec b;
    };
    const std::optional<AffineForm>& affine() const { return affine_; }
    void set_affine(Mat A, Vec b);

private:
    Selection sel_;
    GradientFn grad_;
    CostFn cost_;
    std::vector<ConvexSet> sets_;
    std::optional<AffineForm> affine_;
};

/// Quadratic game data: pseudo-gradient F(x) = A x + b over the block layout
/// `dims`. Closed-form regularity constants and equilibrium.
struct QuadraticGame {
    std::vector<int> dims;
    Mat A;
    Vec b;

    QuadraticGame(std::vector<int> dims_, Mat A_, Vec b_);

    int total_dim() const { return static_cast<int>(A.rows()); }

    /// Strong-monotonicity modulus: lambda_min((A + A^T)/2). Must be > 0 for
    /// the convergence certificates to apply; the constructor only checks shape.
    double strong_monotonicity() const;

    /// Lipschitz constant of F: sigma_max(A).
    double lipschitz() const;

    /// Lipschitz constant of the stacked extended map x -> (grad_i J_i(x^i))_i,
    /// which is block-diagonal in the row blocks of A: max_i sigma_max(A_i).
    double extended_lipschitz() const;

    /// Unique solution of A x = -b (requires invertible A).
    Vec nash_equilibrium() const;

    /// Materialize as a Game (with costs when every diagonal block is
    /// symmetric, so that the quadratic costs reproduce F exactly).
    Game to_game() const;
};

/// Decoupled quadratic game: J_i(x) = weight * ||x_i - target_i||^2, so
/// F(x) = 2*weight*(x - target) and the equilibrium is the stacked target.
QuadraticGame make_decoupled_game(const std::vector<int>& dims, const Vec& target,
                                  double weight = 1.0);

/// 1_N kron profile: the stacked vector with every agent's estimate equal to
/// the given profile (the consensus embedding).
Vec stack_consensus(const Vec& profile, int n_agents);

/// Max absolute deviation between the analytic partial gradients and central
/// finite differences of the costs at x, over all players and own-block
/// components. Requires cost functions; h is the difference step.
double check_gradient(const Game& game, const Vec& x, double h);

} // namespace neseek
