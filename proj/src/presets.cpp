#include "neseek/presets.hpp"

#include <sstream>

#include "neseek/errors.hpp"

namespace neseek {

namespace {

// Shared three-player quadratic game with a strong rotational component:
// strongly monotone (mu = 1) but far from symmetric, so the static coupling
// needs a genuinely large connectivity while the adaptive coupling finds its
// own gains. Equilibrium at (1, -1, 1/2).
GameSpec rotational_game() {
    GameSpec g;
    g.kind = GameSpec::Kind::quadratic;
    g.dims = {1, 1, 1};
    g.A.resize(3, 3);
    g.A << 1, 3, -3, -3, 1, 3, 3, -3, 1;
    g.b.resize(3);
    g.b << 3.5, 2.5, -6.5;
    return g;
}

// Two-player coupled quadratic game whose unconstrained equilibrium
// (4/3, -4/3) sits outside the unit boxes; the constrained equilibrium is
// exactly (1, -1).
GameSpec boxed_game() {
    GameSpec g;
    g.kind = GameSpec::Kind::quadratic;
    g.dims = {1, 1};
    g.A.resize(2, 2);
    g.A << 2, 0.5, 0.5, 2;
    g.b.resize(2);
    g.b << -2, 2;
    for (int i = 0; i < 2; ++i) {
        SetSpec s;
        s.kind = ConvexSet::Kind::box;
        s.lo = Vec::Constant(1, -1.0);
        s.hi = Vec::Constant(1, 1.0);
        g.constraints.push_back(s);
    }
    return g;
}

GameSpec two_player_decoupled() {
    GameSpec g;
    g.kind = GameSpec::Kind::decoupled;
    g.dims = {1, 1};
    g.target = Vec(2);
    g.target << 1, -1;
    g.weight = 1.0;
    return g;
}

GraphSpec graph_spec(GraphSpec::Kind kind, int n, double weight) {
    GraphSpec s;
    s.kind = kind;
    s.n = n;
    s.weight = weight;
    return s;
}

ScenarioConfig s1_full_info() {
    ScenarioConfig cfg;
    cfg.name = "S1_full_info";
    cfg.game = two_player_decoupled();
    cfg.flow = FlowKind::full_info;
    cfg.integrator = {Method::rk4, 1e-2, 10.0, 1};
    cfg.init.kind = InitSpec::Kind::zeros;
    cfg.converged_threshold = 1e-6;
    return cfg;
}

ScenarioConfig s2_static_strong() {
    ScenarioConfig cfg;
    cfg.name = "S2_static_strong";
    cfg.game = rotational_game();
    cfg.flow = FlowKind::static_consensus;
    // lambda2 of the complete graph is 3 * 22.2 = 66.6, about twice the
    // coupling threshold ell + ell^2/mu = 33.3 of this game.
    cfg.graph = graph_spec(GraphSpec::Kind::complete, 3, 22.2);
    cfg.integrator = {Method::rk4, 1e-2, 50.0, 1};
    cfg.init.kind = InitSpec::Kind::zeros;
    cfg.converged_threshold = 1e-5;
    return cfg;
}

ScenarioConfig s3_dai_weak() {
    ScenarioConfig cfg;
    cfg.name = "S3_dai_weak";
    cfg.game = rotational_game();
    cfg.flow = FlowKind::dai;
    // lambda2 of the unit path on three nodes is 1: far below the static
    // coupling threshold, yet the adaptive gains still close the loop.
    cfg.graph = graph_spec(GraphSpec::Kind::path, 3, 1.0);
    cfg.gamma = 1.0;
    cfg.k_init = 0.0;
    cfg.integrator = {Method::rk4, 1e-2, 300.0, 1};
    cfg.init.kind = InitSpec::Kind::zeros;
    cfg.converged_threshold = 1e-4;
    return cfg;
}

ScenarioConfig s3_static_contrast() {
    ScenarioConfig cfg = s3_dai_weak();
    cfg.name = "S3_static_contrast";
    cfg.flow = FlowKind::static_consensus;
    // Same game and graph as S3_dai_weak but with unit coupling: the
    // coupling condition fails and the run is expected not to converge.
    return cfg;
}

ScenarioConfig s5_projected_dai() {
    ScenarioConfig cfg;
    cfg.name = "S5_projected_dai";
    cfg.game = boxed_game();
    cfg.flow = FlowKind::projected_dai;
    cfg.graph = graph_spec(GraphSpec::Kind::complete, 2, 1.0);
    cfg.gamma = 1.0;
    cfg.k_init = 0.0;
    cfg.integrator = {Method::projected_euler, 1e-3, 100.0, 10};
    cfg.init.kind = InitSpec::Kind::zeros;
    cfg.converged_threshold = 1e-3;
    return cfg;
}

ScenarioConfig decoupled_edge_dai() {
    ScenarioConfig cfg;
    cfg.name = "decoupled_edge_dai";
    cfg.game = two_player_decoupled();
    cfg.flow = FlowKind::dai;
    cfg.graph = graph_spec(GraphSpec::Kind::complete, 2, 1.0);
    cfg.gamma = 1.0;
    cfg.k_init = 0.0;
    cfg.integrator = {Method::rk4, 1e-2, 50.0, 1};
    cfg.init.kind = InitSpec::Kind::zeros;
    cfg.converged_threshold = 1e-4;
    return cfg;
}

ScenarioConfig dai_local_edge() {
    ScenarioConfig cfg = decoupled_edge_dai();
    cfg.name = "dai_local_edge";
    // The variant where each agent scales only its own disagreement; no
    // certificate backs it, so it ships as an experiment.
    cfg.flow = FlowKind::dai_local;
    cfg.k_init = 1.0;
    return cfg;
}

} // namespace

std::vector<std::string> preset_names() {
    return {"S1_full_info",  "S2_static_strong",  "S3_dai_weak", "S3_static_contrast",
            "S5_projected_dai", "decoupled_edge_dai", "dai_local_edge"};
}

ScenarioConfig preset(const std::string& name) {
    if (name == "S1_full_info") return s1_full_info();
    if (name == "S2_static_strong") return s2_static_strong();
    if (name == "S3_dai_weak") return s3_dai_weak();
    if (name == "S3_static_contrast") return s3_static_contrast();
    if (name == "S5_projected_dai") return s5_projected_dai();
    if (name == "decoupled_edge_dai") return decoupled_edge_dai();
    if (name == "dai_local_edge") return dai_local_edge();
    std::ostringstream os;
    os << "unknown preset '" << name << "'; available:";
    for (const auto& p : preset_names()) os << " " << p;
    throw ConfigError("", os.str());
}

} // namespace neseek
