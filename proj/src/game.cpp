#include "neseek/game.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <utility>

#include "neseek/errors.hpp"

namespace neseek {

Selection::Selection(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty()) throw ConstructionError("selection: need at least one player");
    offsets_.reserve(dims_.size());
    for (int d : dims_) {
        if (d <= 0) throw ConstructionError("selection: player dimensions must be positive");
        offsets_.push_back(total_);
        total_ += d;
    }
}

Vec Selection::extract_own(const Vec& stacked) const {
    const int n = n_players();
    if (stacked.size() != static_cast<Eigen::Index>(n) * total_)
        throw InputError("extract_own: stacked vector has wrong length");
    Vec out(total_);
    for (int i = 0; i < n; ++i)
        out.segment(offsets_[i], dims_[i]) = stacked.segment(own_start(i), dims_[i]);
    return out;
}

Vec Selection::embed_own(const Vec& profile) const {
    if (profile.size() != total_) throw InputError("embed_own: profile has wrong length");
    Vec out = Vec::Zero(static_cast<Eigen::Index>(n_players()) * total_);
    for (int i = 0; i < n_players(); ++i)
        out.segment(own_start(i), dims_[i]) = profile.segment(offsets_[i], dims_[i]);
    return out;
}

Vec Selection::zero_own(const Vec& stacked) const {
    if (stacked.size() != static_cast<Eigen::Index>(n_players()) * total_)
        throw InputError("zero_own: stacked vector has wrong length");
    Vec out = stacked;
    for (int i = 0; i < n_players(); ++i)
        out.segment(own_start(i), dims_[i]).setZero();
    return out;
}

Game::Game(std::vector<int> dims, GradientFn grad) : sel_(std::move(dims)), grad_(std::move(grad)) {
    if (!grad_) throw ConstructionError("game: gradient function required");
}

Game::Game(std::vector<int> dims, GradientFn grad, CostFn cost)
    : sel_(std::move(dims)), grad_(std::move(grad)), cost_(std::move(cost)) {
    if (!grad_) throw ConstructionError("game: gradient function required");
}

Vec Game::partial_gradient(int player, const Vec& profile) const {
    if (player < 0 || player >= n_players()) throw InputError("partial_gradient: player out of range");
    if (profile.size() != total_dim()) throw InputError("partial_gradient: profile has wrong length");
    Vec g = grad_(player, profile);
    if (g.size() != sel_.dim(player))
        throw InputError("partial_gradient: gradient block has wrong length");
    return g;
}

Vec Game::pseudo_gradient(const Vec& profile) const {
    if (profile.size() != total_dim()) throw InputError("pseudo_gradient: profile has wrong length");
    Vec out(total_dim());
    for (int i = 0; i < n_players(); ++i)
        out.segment(sel_.offset(i), sel_.dim(i)) = partial_gradient(i, profile);
    return out;
}

double Game::cost(int player, const Vec& profile) const {
    if (!cost_) throw InputError("cost: game has no cost functions");
    if (player < 0 || player >= n_players()) throw InputError("cost: player out of range");
    if (profile.size() != total_dim()) throw InputError("cost: profile has wrong length");
    return cost_(player, profile);
}

void Game::set_constraints(std::vector<ConvexSet> sets) {
    if (static_cast<int>(sets.size()) != n_players())
        throw ConstructionError("constraints: need exactly one set per player");
    for (int i = 0; i < n_players(); ++i)
        if (sets[i].dim() != sel_.dim(i))
            throw ConstructionError("constraints: set dimension mismatch for player " +
                                    std::to_string(i));
    sets_ = std::move(sets);
}

bool Game::is_constrained() const {
    for (const auto& s : sets_)
        if (!s.is_full_space()) return true;
    return false;
}

const ConvexSet& Game::constraint(int player) const {
    if (sets_.empty()) throw InputError("constraint: game has no constraint sets");
    if (player < 0 || player >= n_players()) throw InputError("constraint: player out of range");
    return sets_[player];
}

Vec Game::project_profile(const Vec& profile) const {
    if (sets_.empty()) throw InputError("project_profile: game has no constraint sets");
    if (profile.size() != total_dim()) throw InputError("project_profile: profile has wrong length");
    Vec out(total_dim());
    for (int i = 0; i < n_players(); ++i)
        out.segment(sel_.offset(i), sel_.dim(i)) =
            sets_[i].project(profile.segment(sel_.offset(i), sel_.dim(i)));
    return out;
}

bool Game::profile_in_constraints(const Vec& profile, double tol) const {
    if (sets_.empty()) throw InputError("profile_in_constraints: game has no constraint sets");
    if (profile.size() != total_dim())
        throw InputError("profile_in_constraints: profile has wrong length");
    for (int i = 0; i < n_players(); ++i)
        if (!sets_[i].contains(profile.segment(sel_.offset(i), sel_.dim(i)), tol)) return false;
    return true;
}

void Game::set_affine(Mat A, Vec b) {
    if (A.rows() != total_dim() || A.cols() != total_dim() || b.size() != total_dim())
        throw ConstructionError("affine form: dimension mismatch");
    affine_ = AffineForm{std::move(A), std::move(b)};
}

QuadraticGame::QuadraticGame(std::vector<int> dims_, Mat A_, Vec b_)
    : dims(std::move(dims_)), A(std::move(A_)), b(std::move(b_)) {
    Selection sel(dims);  // validates the block layout
    if (A.rows() != sel.total_dim() || A.cols() != sel.total_dim())
        throw ConstructionError("quadratic game: A must be M x M for M = sum of player dims");
    if (b.size() != sel.total_dim())
        throw ConstructionError("quadratic game: b must have length M");
}

double QuadraticGame::strong_monotonicity() const {
    Mat sym = 0.5 * (A + A.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(sym);
    return es.eigenvalues()(0);
}

double QuadraticGame::lipschitz() const {
    return A.jacobiSvd().singularValues()(0);
}

double QuadraticGame::extended_lipschitz() const {
    Selection sel(dims);
    double worst = 0;
    for (int i = 0; i < sel.n_players(); ++i) {
        Mat block = A.middleRows(sel.offset(i), sel.dim(i));
        worst = std::max(worst, block.jacobiSvd().singularValues()(0));
    }
    return worst;
}

Vec QuadraticGame::nash_equilibrium() const {
    Eigen::FullPivLU<Mat> lu(A);
    if (!lu.isInvertible())
        throw InputError("quadratic game: A is singular, no unique equilibrium");
    return lu.solve(-b);
}

Game QuadraticGame::to_game() const {
    Selection sel(dims);
    const Mat Ac = A;
    const Vec bc = b;
    Game::GradientFn grad = [sel, Ac, bc](int player, const Vec& x) -> Vec {
        return Ac.middleRows(sel.offset(player), sel.dim(player)) * x +
               bc.segment(sel.offset(player), sel.dim(player));
    };

    // Quadratic costs reproduce grad_i exactly only when the diagonal blocks
    // are symmetric (always true for scalar players).
    bool sym_diag = true;
    for (int i = 0; i < sel.n_players(); ++i) {
        Mat d = A.block(sel.offset(i), sel.offset(i), sel.dim(i), sel.dim(i));
        if (!d.isApprox(d.transpose(), 1e-14)) sym_diag = false;
    }

    Game g = [&]() {
        if (!sym_diag) return Game(dims, grad);
        Game::CostFn cost = [sel, Ac, bc](int player, const Vec& x) -> double {
            const int off = sel.offset(player), d = sel.dim(player);
            Vec xi = x.segment(off, d);
            Mat Aii = Ac.block(off, off, d, d);
            Vec rest = Ac.middleRows(off, d) * x - Aii * xi;  // off-diagonal part
            return 0.5 * xi.dot(Aii * xi) + xi.dot(rest) + xi.dot(bc.segment(off, d));
        };
        return Game(dims, grad, cost);
    }();
    g.set_affine(A, b);
    return g;
}

QuadraticGame make_decoupled_game(const std::vector<int>& dims, const Vec& target, double weight) {
    Selection sel(dims);
    if (target.size() != sel.total_dim())
        throw ConstructionError("decoupled game: target must have length M");
    if (weight <= 0) throw ConstructionError("decoupled game: weight must be positive");
    Mat A = 2.0 * weight * Mat::Identity(sel.total_dim(), sel.total_dim());
    Vec b = -2.0 * weight * target;
    return QuadraticGame(dims, std::move(A), std::move(b));
}

Vec stack_consensus(const Vec& profile, int n_agents) {
    if (n_agents < 1) throw InputError("stack_consensus: need at least one agent");
    if (profile.size() == 0) throw InputError("stack_consensus: empty profile");
    Vec out(static_cast<Eigen::Index>(n_agents) * profile.size());
    for (int i = 0; i < n_agents; ++i)
        out.segment(static_cast<Eigen::Index>(i) * profile.size(), profile.size()) = profile;
    return out;
}

double check_gradient(const Game& game, const Vec& x, double h) {
    if (!game.has_costs()) throw InputError("gradient check: game has no cost functions");
    if (!(h > 0)) throw InputError("gradient check: step must be positive");
    if (x.size() != game.total_dim()) throw InputError("gradient check: profile has wrong length");
    const Selection& sel = game.selection();
    double worst = 0;
    for (int i = 0; i < game.n_players(); ++i) {
        Vec gi = game.partial_gradient(i, x);
        for (int c = 0; c < sel.dim(i); ++c) {
            Vec xp = x, xm = x;
            xp(sel.offset(i) + c) += h;
            xm(sel.offset(i) + c) -= h;
            double fd = (game.cost(i, xp) - game.cost(i, xm)) / (2.0 * h);
            worst = std::max(worst, std::abs(fd - gi(c)));
        }
    }
    return worst;
}

} // namespace neseek
