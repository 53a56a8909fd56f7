#pragma once

#include <optional>
#include <string>

#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/types.hpp"

namespace neseek {

/// The equilibrium-seeking dynamics implemented here.
///  - full_info:         central baseline x' = -F(x), no network.
///  - static_consensus:  estimate exchange with fixed unit coupling gain.
///  - dai:               distributed averaging integral gain adaptation.
///  - dai_local:         variant where each agent feeds back only its own
///                       weighted disagreement (k_i * rho_i); experimental.
///  - projected_dai:     dai with own blocks confined to local action sets.
enum class FlowKind { full_info, static_consensus, dai, dai_local, projected_dai };

std::string to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& name);
bool flow_is_adaptive(FlowKind kind);

/// Per-agent adaptation rates and initial gains for the adaptive flows.
struct DaiParams {
    Vec gamma;   // adaptation rates, all > 0
    Vec k_init;  // initial gains

    static DaiParams uniform(int n_agents, double gamma = 1.0, double k0 = 0.0);
    void validate(int n_agents) const;
};

/// State of an adaptive flow: stacked estimates X in R^{NM} and gains K in R^N.
struct ExtendedState {
    Vec X;
    Vec K;
};

/// Time derivative of an ExtendedState.
struct StateDeriv {
    Vec dX;
    Vec dK;
};

/// Central baseline: -F(x) on the true profile (length M).
Vec rhs_full_info(const Game& game, const Vec& profile);

/// Weighted neighborhood disagreement rho_i = sum_j a_ij (X_j - X_i),
/// stacked; equals -(L kron I_M) X. Block dimension inferred from sizes.
Vec local_average(const Graph& graph, const Vec& X, Exec exec = Exec::openmp);

/// Static consensus coupling: X_i' = -R_i^T grad_i(X_i) + rho_i.
/// Unconstrained regime only.
Vec rhs_static_consensus(const Game& game, const Graph& graph, const Vec& X,
                         Exec exec = Exec::openmp);

/// Gain-weighted coupling u = -(L K L kron I_M) X computed blockwise:
/// u_i = -sum_j a_ij (k_j rho_j - k_i rho_i) with rho = local_average.
Vec dai_coupling(const Graph& graph, const Vec& k, const Vec& X, Exec exec = Exec::openmp);

/// Distributed averaging integral dynamics:
///   X_i' = -R_i^T grad_i(X_i) + u_i,   k_i' = gamma_i ||rho_i||^2.
StateDeriv rhs_dai(const Game& game, const Graph& graph, const DaiParams& params,
                   const ExtendedState& state, Exec exec = Exec::openmp);

/// Variant coupling u_i = k_i rho_i (each agent scales only its own
/// disagreement). No convergence certificate; kept for experiments.
StateDeriv rhs_dai_local(const Game& game, const Graph& graph, const DaiParams& params,
                         const ExtendedState& state, Exec exec = Exec::openmp);

/// Projected variant for games with local action sets: own blocks follow the
/// tangent-cone projection of (-grad_i + own part of u_i) at the current
/// point, all other entries follow u_i unchanged, and gains adapt exactly as
/// in rhs_dai (gains are never projected). Requires one set per player and
/// own blocks inside their sets.
StateDeriv rhs_projected_dai(const Game& game, const Graph& graph, const DaiParams& params,
                             const ExtendedState& state, Exec exec = Exec::openmp);

/// Norm of the full state derivative at `state`; zero exactly at the
/// equilibria of the flow.
double equilibrium_residual(const Game& game, const Graph& graph, const DaiParams& params,
                            const ExtendedState& state, FlowKind kind);

/// A flow bundled with everything needed to evaluate it as a plain ODE
/// right-hand side on a flat state vector [X; K] (gains absent for
/// non-adaptive kinds). Owns copies of the game and graph; full_info flows
/// carry no graph.
class Flow {
public:
    Flow(FlowKind kind, Game game, std::optional<Graph> graph, DaiParams params, Exec exec);

    FlowKind kind() const { return kind_; }
    const Game& game() const { return game_; }
    const Graph& graph() const;
    const DaiParams& params() const { return params_; }
    bool adaptive() const { return flow_is_adaptive(kind_); }

    int x_dim() const;       // M for full_info, N*M otherwise
    int gain_dim() const;    // N for adaptive flows, else 0
    int state_dim() const { return x_dim() + gain_dim(); }

    Vec operator()(const Vec& flat_state) const;

    Vec pack(const ExtendedState& s) const;
    ExtendedState unpack(const Vec& flat_state) const;

private:
    FlowKind kind_;
    Game game_;
    std::optional<Graph> graph_;
    DaiParams params_;
    Exec exec_;
};

Flow make_flow(FlowKind kind, const Game& game, const Graph& graph,
               DaiParams params = {}, Exec exec = Exec::openmp);
Flow make_full_info_flow(const Game& game);

} // namespace neseek
