#include "neseek/dynamics.hpp"

#include <cmath>
#include <utility>

#include "neseek/errors.hpp"

namespace neseek {

std::string to_string(FlowKind kind) {
    switch (kind) {
    case FlowKind::full_info: return "full_info";
    case FlowKind::static_consensus: return "static_consensus";
    case FlowKind::dai: return "dai";
    case FlowKind::dai_local: return "dai_local";
    case FlowKind::projected_dai: return "projected_dai";
    }
    return "unknown";
}

FlowKind flow_kind_from_string(const std::string& name) {
    if (name == "full_info") return FlowKind::full_info;
    if (name == "static_consensus") return FlowKind::static_consensus;
    if (name == "dai") return FlowKind::dai;
    if (name == "dai_local") return FlowKind::dai_local;
    if (name == "projected_dai") return FlowKind::projected_dai;
    throw InputError("unknown flow kind '" + name +
                     "' (expected full_info, static_consensus, dai, dai_local, projected_dai)");
}

bool flow_is_adaptive(FlowKind kind) {
    return kind == FlowKind::dai || kind == FlowKind::dai_local ||
           kind == FlowKind::projected_dai;
}

DaiParams DaiParams::uniform(int n_agents, double gamma, double k0) {
    DaiParams p;
    p.gamma = Vec::Constant(n_agents, gamma);
    p.k_init = Vec::Constant(n_agents, k0);
    p.validate(n_agents);
    return p;
}

void DaiParams::validate(int n_agents) const {
    if (gamma.size() != n_agents || k_init.size() != n_agents)
        throw ConstructionError("adaptation parameters: need one rate and one initial gain per agent");
    if ((gamma.array() <= 0).any())
        throw ConstructionError("adaptation parameters: rates must be positive");
}

namespace {

// Shared validation for the stacked-estimate operations.
int check_stacked(const Graph& graph, const Vec& X) {
    const int n = graph.n_nodes();
    if (X.size() == 0 || X.size() % n != 0)
        throw InputError("stacked vector length must be a positive multiple of the node count");
    return static_cast<int>(X.size() / n);
}

void check_game_graph(const Game& game, const Graph& graph) {
    if (game.n_players() != graph.n_nodes())
        throw InputError("game and graph disagree on the number of agents");
}

void check_unconstrained(const Game& game, const char* flow) {
    if (game.is_constrained())
        throw InputError(std::string(flow) + ": flow requires an unconstrained game "
                                             "(use projected_dai for local action sets)");
}

// rho_i = sum_j a_ij (X_j - X_i), one agent per iteration. The OpenMP split
// writes disjoint blocks, so both policies produce identical bytes.
void local_average_into(const Graph& graph, const Vec& X, int m, Vec& rho, Exec exec) {
    const int n = graph.n_nodes();
    const Mat& w = graph.weights();
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        auto out = rho.segment(static_cast<Eigen::Index>(i) * m, m);
        out.setZero();
        for (int j = 0; j < n; ++j) {
            double a = w(i, j);
            if (a == 0) continue;
            out += a * (X.segment(static_cast<Eigen::Index>(j) * m, m) -
                        X.segment(static_cast<Eigen::Index>(i) * m, m));
        }
    }
}

// u_i = -sum_j a_ij (k_j rho_j - k_i rho_i) given precomputed rho.
void dai_coupling_into(const Graph& graph, const Vec& k, const Vec& rho, int m, Vec& u,
                       Exec exec) {
    const int n = graph.n_nodes();
    const Mat& w = graph.weights();
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        auto out = u.segment(static_cast<Eigen::Index>(i) * m, m);
        out.setZero();
        for (int j = 0; j < n; ++j) {
            double a = w(i, j);
            if (a == 0) continue;
            out -= a * (k(j) * rho.segment(static_cast<Eigen::Index>(j) * m, m) -
                        k(i) * rho.segment(static_cast<Eigen::Index>(i) * m, m));
        }
    }
}

void gain_rates_into(const DaiParams& params, const Vec& rho, int m, Vec& dK, Exec exec) {
    const int n = static_cast<int>(params.gamma.size());
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i)
        dK(i) = params.gamma(i) * rho.segment(static_cast<Eigen::Index>(i) * m, m).squaredNorm();
}

void check_extended(const Graph& graph, const DaiParams& params, const ExtendedState& state) {
    const int n = graph.n_nodes();
    params.validate(n);
    if (state.K.size() != n) throw InputError("extended state: need one gain per agent");
}

} // namespace

Vec rhs_full_info(const Game& game, const Vec& profile) {
    check_unconstrained(game, "full_info");
    return -game.pseudo_gradient(profile);
}

Vec local_average(const Graph& graph, const Vec& X, Exec exec) {
    const int m = check_stacked(graph, X);
    Vec rho(X.size());
    local_average_into(graph, X, m, rho, exec);
    return rho;
}

Vec rhs_static_consensus(const Game& game, const Graph& graph, const Vec& X, Exec exec) {
    check_game_graph(game, graph);
    check_unconstrained(game, "static_consensus");
    const int m = check_stacked(graph, X);
    if (m != game.total_dim())
        throw InputError("static_consensus: estimate block size must equal the profile dimension");
    const int n = graph.n_nodes();
    const Selection& sel = game.selection();

    Vec dX(X.size());
    local_average_into(graph, X, m, dX, exec);
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        Vec gi = game.partial_gradient(i, X.segment(static_cast<Eigen::Index>(i) * m, m));
        dX.segment(sel.own_start(i), sel.dim(i)) -= gi;
    }
    return dX;
}

Vec dai_coupling(const Graph& graph, const Vec& k, const Vec& X, Exec exec) {
    const int m = check_stacked(graph, X);
    if (k.size() != graph.n_nodes()) throw InputError("dai coupling: need one gain per agent");
    Vec rho(X.size());
    local_average_into(graph, X, m, rho, exec);
    Vec u(X.size());
    dai_coupling_into(graph, k, rho, m, u, exec);
    return u;
}

StateDeriv rhs_dai(const Game& game, const Graph& graph, const DaiParams& params,
                   const ExtendedState& state, Exec exec) {
    check_game_graph(game, graph);
    check_unconstrained(game, "dai");
    check_extended(graph, params, state);
    const int m = check_stacked(graph, state.X);
    if (m != game.total_dim())
        throw InputError("dai: estimate block size must equal the profile dimension");
    const int n = graph.n_nodes();
    const Selection& sel = game.selection();

    Vec rho(state.X.size());
    local_average_into(graph, state.X, m, rho, exec);
    StateDeriv d;
    d.dX.resize(state.X.size());
    dai_coupling_into(graph, state.K, rho, m, d.dX, exec);
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        Vec gi = game.partial_gradient(i, state.X.segment(static_cast<Eigen::Index>(i) * m, m));
        d.dX.segment(sel.own_start(i), sel.dim(i)) -= gi;
    }
    d.dK.resize(n);
    gain_rates_into(params, rho, m, d.dK, exec);
    return d;
}

StateDeriv rhs_dai_local(const Game& game, const Graph& graph, const DaiParams& params,
                         const ExtendedState& state, Exec exec) {
    check_game_graph(game, graph);
    check_unconstrained(game, "dai_local");
    check_extended(graph, params, state);
    const int m = check_stacked(graph, state.X);
    if (m != game.total_dim())
        throw InputError("dai_local: estimate block size must equal the profile dimension");
    const int n = graph.n_nodes();
    const Selection& sel = game.selection();

    Vec rho(state.X.size());
    local_average_into(graph, state.X, m, rho, exec);
    StateDeriv d;
    d.dX.resize(state.X.size());
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        auto out = d.dX.segment(static_cast<Eigen::Index>(i) * m, m);
        out = state.K(i) * rho.segment(static_cast<Eigen::Index>(i) * m, m);
        Vec gi = game.partial_gradient(i, state.X.segment(static_cast<Eigen::Index>(i) * m, m));
        out.segment(sel.offset(i), sel.dim(i)) -= gi;
    }
    d.dK.resize(n);
    gain_rates_into(params, rho, m, d.dK, exec);
    return d;
}

StateDeriv rhs_projected_dai(const Game& game, const Graph& graph, const DaiParams& params,
                             const ExtendedState& state, Exec exec) {
    check_game_graph(game, graph);
    check_extended(graph, params, state);
    if (!game.has_constraints())
        throw InputError("projected_dai: game must carry one action set per player");
    const int m = check_stacked(graph, state.X);
    if (m != game.total_dim())
        throw InputError("projected_dai: estimate block size must equal the profile dimension");
    const int n = graph.n_nodes();
    const Selection& sel = game.selection();

    // Membership is validated serially up front: a throw from inside the
    // parallel loop below could not propagate.
    for (int i = 0; i < n; ++i) {
        if (!game.constraint(i).contains(state.X.segment(sel.own_start(i), sel.dim(i))))
            throw InputError("projected_dai: own estimate block lies outside its action set");
    }

    Vec rho(state.X.size());
    local_average_into(graph, state.X, m, rho, exec);
    StateDeriv d;
    d.dX.resize(state.X.size());
    dai_coupling_into(graph, state.K, rho, m, d.dX, exec);
#pragma omp parallel for schedule(static) if (exec == Exec::openmp)
    for (int i = 0; i < n; ++i) {
        // Own block: tangent-cone projection of the sum of the gradient push
        // and the own part of the coupling; estimates of others are untouched.
        const int di = sel.dim(i);
        Vec own = state.X.segment(sel.own_start(i), di);
        Vec gi = game.partial_gradient(i, state.X.segment(static_cast<Eigen::Index>(i) * m, m));
        Vec drive = d.dX.segment(sel.own_start(i), di) - gi;
        d.dX.segment(sel.own_start(i), di) = game.constraint(i).tangent_project(own, drive);
    }
    d.dK.resize(n);
    gain_rates_into(params, rho, m, d.dK, exec);
    return d;
}

double equilibrium_residual(const Game& game, const Graph& graph, const DaiParams& params,
                            const ExtendedState& state, FlowKind kind) {
    switch (kind) {
    case FlowKind::full_info:
        return rhs_full_info(game, state.X).lpNorm<Eigen::Infinity>();
    case FlowKind::static_consensus:
        return rhs_static_consensus(game, graph, state.X).lpNorm<Eigen::Infinity>();
    case FlowKind::dai: {
        StateDeriv d = rhs_dai(game, graph, params, state);
        return std::max(d.dX.lpNorm<Eigen::Infinity>(), d.dK.lpNorm<Eigen::Infinity>());
    }
    case FlowKind::dai_local: {
        StateDeriv d = rhs_dai_local(game, graph, params, state);
        return std::max(d.dX.lpNorm<Eigen::Infinity>(), d.dK.lpNorm<Eigen::Infinity>());
    }
    case FlowKind::projected_dai: {
        StateDeriv d = rhs_projected_dai(game, graph, params, state);
        return std::max(d.dX.lpNorm<Eigen::Infinity>(), d.dK.lpNorm<Eigen::Infinity>());
    }
    }
    throw InputError("equilibrium residual: unknown flow kind");
}

Flow::Flow(FlowKind kind, Game game, std::optional<Graph> graph, DaiParams params, Exec exec)
    : kind_(kind), game_(std::move(game)), graph_(std::move(graph)), params_(std::move(params)),
      exec_(exec) {
    if (kind_ != FlowKind::full_info) {
        if (!graph_) throw ConstructionError("flow: this kind requires a graph");
        if (game_.n_players() != graph_->n_nodes())
            throw ConstructionError("flow: game and graph disagree on the number of agents");
    }
    if (adaptive()) params_.validate(game_.n_players());
    if (kind_ == FlowKind::projected_dai && !game_.has_constraints())
        throw ConstructionError("flow: projected_dai requires one action set per player");
    if (kind_ != FlowKind::projected_dai && kind_ != FlowKind::full_info)
        check_unconstrained(game_, to_string(kind_).c_str());
    if (kind_ == FlowKind::full_info) check_unconstrained(game_, "full_info");
}

const Graph& Flow::graph() const {
    if (!graph_) throw InputError("flow: full_info flows carry no graph");
    return *graph_;
}

int Flow::x_dim() const {
    if (kind_ == FlowKind::full_info) return game_.total_dim();
    return game_.n_players() * game_.total_dim();
}

int Flow::gain_dim() const {
    return adaptive() ? game_.n_players() : 0;
}

Vec Flow::operator()(const Vec& flat_state) const {
    if (flat_state.size() != state_dim()) throw InputError("flow: flat state has wrong length");
    switch (kind_) {
    case FlowKind::full_info:
        return rhs_full_info(game_, flat_state);
    case FlowKind::static_consensus:
        return rhs_static_consensus(game_, *graph_, flat_state, exec_);
    default: {
        ExtendedState s = unpack(flat_state);
        StateDeriv d = kind_ == FlowKind::dai ? rhs_dai(game_, *graph_, params_, s, exec_)
                       : kind_ == FlowKind::dai_local
                           ? rhs_dai_local(game_, *graph_, params_, s, exec_)
                           : rhs_projected_dai(game_, *graph_, params_, s, exec_);
        return pack(ExtendedState{std::move(d.dX), std::move(d.dK)});
    }
    }
}

Vec Flow::pack(const ExtendedState& s) const {
    Vec flat(s.X.size() + s.K.size());
    flat.head(s.X.size()) = s.X;
    flat.tail(s.K.size()) = s.K;
    return flat;
}

ExtendedState Flow::unpack(const Vec& flat_state) const {
    if (flat_state.size() != state_dim()) throw InputError("flow: flat state has wrong length");
    return ExtendedState{flat_state.head(x_dim()), flat_state.tail(gain_dim())};
}

Flow make_flow(FlowKind kind, const Game& game, const Graph& graph, DaiParams params, Exec exec) {
    if (flow_is_adaptive(kind) && params.gamma.size() == 0)
        params = DaiParams::uniform(game.n_players());
    return Flow(kind, game, graph, std::move(params), exec);
}

Flow make_full_info_flow(const Game& game) {
    return Flow(FlowKind::full_info, game, std::nullopt, DaiParams{}, Exec::serial);
}

} // namespace neseek
