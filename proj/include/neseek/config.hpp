#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/sets.hpp"
#include "neseek/solver.hpp"
#include "neseek/types.hpp"

namespace neseek {

/// Declarative description of a scenario, parsed from / serialized to JSON.
/// See README for the schema. Parsing performs validation only; object
/// construction happens in the runner.

struct SetSpec {
    ConvexSet::Kind kind = ConvexSet::Kind::full_space;
    Vec lo, hi;        // box
    Vec center;        // ball
    double radius = 0;
    Mat G;             // polyhedron
    Vec h;

    ConvexSet build(int dim) const;
};

struct GameSpec {
    enum class Kind { quadratic, decoupled };
    Kind kind = Kind::quadratic;
    std::vector<int> dims;
    Mat A;                       // quadratic
    Vec b;
    Vec target;                  // decoupled
    double weight = 1.0;
    std::vector<SetSpec> constraints;  // empty, or one per player

    QuadraticGame build_quadratic() const;
    Game build() const;
};

struct GraphSpec {
    enum class Kind { path, cycle, star, complete, erdos_renyi, explicit_weights };
    Kind kind = Kind::complete;
    int n = 0;
    double weight = 1.0;
    double p = 0.5;              // erdos_renyi
    std::uint64_t seed = 0;
    Mat weights;                 // explicit_weights

    Graph build() const;
};

struct InitSpec {
    enum class Kind { zeros, profile, stacked, random_box };
    Kind kind = Kind::zeros;
    Vec value;                   // profile (copied to every agent) or stacked
    double lo = -1.0, hi = 1.0;  // random_box bounds
    std::uint64_t seed = 0;
};

struct ScenarioConfig {
    std::string name = "scenario";
    GameSpec game;
    std::optional<GraphSpec> graph;   // required unless flow == full_info
    FlowKind flow = FlowKind::static_consensus;
    double gamma = 1.0;               // uniform adaptation rate
    double k_init = 0.0;              // uniform initial gain
    IntegratorSpec integrator;
    InitSpec init;
    double converged_threshold = 1e-6;
    double oracle_tol = 1e-10;
    std::string output_dir = "out";
};

/// Parse/serialize. parse_config throws ConfigError carrying the JSON path
/// of the offending field. to_json(parse_config(j)) is the canonical form.
ScenarioConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioConfig& cfg);
ScenarioConfig load_config_file(const std::string& path);

/// FNV-1a hash of the canonical serialized form, as fixed-width hex. Stamped
/// into every output so runs can be traced back to their exact inputs.
std::string config_hash(const ScenarioConfig& cfg);

/// Overwrite the numeric field addressed by a dotted path (the sweep axes:
/// "gamma", "k_init", "integrator.step", "integrator.t_end", "graph.weight",
/// "game.weight", "converged_threshold"). Unknown paths raise ConfigError
/// listing the supported axes.
void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value);
std::vector<std::string> sweep_axes();

} // namespace neseek
