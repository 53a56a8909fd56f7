#include "neseek/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "neseek/errors.hpp"
#include "neseek/rng.hpp"

namespace neseek {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
    throw ConfigError(where, msg);
}

const json& need(const json& j, const std::string& where, const char* key) {
    if (!j.is_object()) fail(where, "expected an object");
    auto it = j.find(key);
    if (it == j.end()) fail(where + "." + key, "missing required field");
    return *it;
}

double get_num(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    return j.get<double>();
}

double opt_num(const json& j, const std::string& where, const char* key, double fallback) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return get_num(j.at(key), where + "." + key);
}

std::string get_str(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

std::uint64_t get_seed(const json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !j.is_number_integer()) fail(where, "expected an integer seed");
    auto v = j.get<std::int64_t>();
    if (v < 0) fail(where, "seed must be nonnegative");
    return static_cast<std::uint64_t>(v);
}

Vec get_vec(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where, "expected an array of numbers");
    Vec v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = get_num(j[i], where + "[" + std::to_string(i) + "]");
    return v;
}

Mat get_mat(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of rows");
    const std::size_t rows = j.size();
    std::size_t cols = 0;
    Mat m;
    for (std::size_t r = 0; r < rows; ++r) {
        Vec row = get_vec(j[r], where + "[" + std::to_string(r) + "]");
        if (r == 0) {
            cols = static_cast<std::size_t>(row.size());
            m.resize(rows, cols);
        } else if (static_cast<std::size_t>(row.size()) != cols) {
            fail(where, "rows must all have the same length");
        }
        m.row(static_cast<Eigen::Index>(r)) = row;
    }
    return m;
}

json vec_to_json(const Vec& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

json mat_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vec_to_json(m.row(r)));
    return rows;
}

SetSpec parse_set(const json& j, const std::string& where) {
    SetSpec s;
    std::string kind = get_str(need(j, where, "kind"), where + ".kind");
    if (kind == "full_space") {
        s.kind = ConvexSet::Kind::full_space;
    } else if (kind == "box") {
        s.kind = ConvexSet::Kind::box;
        s.lo = get_vec(need(j, where, "lo"), where + ".lo");
        s.hi = get_vec(need(j, where, "hi"), where + ".hi");
    } else if (kind == "ball") {
        s.kind = ConvexSet::Kind::ball;
        s.center = get_vec(need(j, where, "center"), where + ".center");
        s.radius = get_num(need(j, where, "radius"), where + ".radius");
    } else if (kind == "polyhedron") {
        s.kind = ConvexSet::Kind::polyhedron;
        s.G = get_mat(need(j, where, "G"), where + ".G");
        s.h = get_vec(need(j, where, "h"), where + ".h");
    } else {
        fail(where + ".kind", "unknown set kind '" + kind +
                                  "' (expected full_space, box, ball, polyhedron)");
    }
    return s;
}

json set_to_json(const SetSpec& s) {
    json j;
    switch (s.kind) {
    case ConvexSet::Kind::full_space:
        j["kind"] = "full_space";
        break;
    case ConvexSet::Kind::box:
        j["kind"] = "box";
        j["lo"] = vec_to_json(s.lo);
        j["hi"] = vec_to_json(s.hi);
        break;
    case ConvexSet::Kind::ball:
        j["kind"] = "ball";
        j["center"] = vec_to_json(s.center);
        j["radius"] = s.radius;
        break;
    case ConvexSet::Kind::polyhedron:
        j["kind"] = "polyhedron";
        j["G"] = mat_to_json(s.G);
        j["h"] = vec_to_json(s.h);
        break;
    }
    return j;
}

std::vector<int> parse_dims(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(where, "expected a nonempty array of positive integers");
    std::vector<int> dims;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& e = j[i];
        std::string w = where + "[" + std::to_string(i) + "]";
        if (!e.is_number_integer()) fail(w, "expected an integer");
        int d = e.get<int>();
        if (d <= 0) fail(w, "player dimension must be positive");
        dims.push_back(d);
    }
    return dims;
}

GameSpec parse_game(const json& j, const std::string& where) {
    GameSpec g;
    std::string kind = get_str(need(j, where, "kind"), where + ".kind");
    g.dims = parse_dims(need(j, where, "dims"), where + ".dims");
    if (kind == "quadratic") {
        g.kind = GameSpec::Kind::quadratic;
        g.A = get_mat(need(j, where, "A"), where + ".A");
        g.b = get_vec(need(j, where, "b"), where + ".b");
    } else if (kind == "decoupled") {
        g.kind = GameSpec::Kind::decoupled;
        g.target = get_vec(need(j, where, "target"), where + ".target");
        g.weight = opt_num(j, where, "weight", 1.0);
        if (g.weight <= 0) fail(where + ".weight", "must be positive");
    } else {
        fail(where + ".kind", "unknown game kind '" + kind + "' (expected quadratic, decoupled)");
    }
    if (j.contains("constraints")) {
        const json& cs = j.at("constraints");
        if (!cs.is_array()) fail(where + ".constraints", "expected an array of sets");
        if (cs.size() != g.dims.size())
            fail(where + ".constraints", "need exactly one set per player");
        for (std::size_t i = 0; i < cs.size(); ++i)
            g.constraints.push_back(
                parse_set(cs[i], where + ".constraints[" + std::to_string(i) + "]"));
    }
    return g;
}

json game_to_json(const GameSpec& g) {
    json j;
    if (g.kind == GameSpec::Kind::quadratic) {
        j["kind"] = "quadratic";
        j["A"] = mat_to_json(g.A);
        j["b"] = vec_to_json(g.b);
    } else {
        j["kind"] = "decoupled";
        j["target"] = vec_to_json(g.target);
        j["weight"] = g.weight;
    }
    j["dims"] = g.dims;
    if (!g.constraints.empty()) {
        json cs = json::array();
        for (const auto& s : g.constraints) cs.push_back(set_to_json(s));
        j["constraints"] = cs;
    }
    return j;
}

GraphSpec parse_graph(const json& j, const std::string& where) {
    GraphSpec g;
    std::string kind = get_str(need(j, where, "kind"), where + ".kind");
    if (kind == "path") g.kind = GraphSpec::Kind::path;
    else if (kind == "cycle") g.kind = GraphSpec::Kind::cycle;
    else if (kind == "star") g.kind = GraphSpec::Kind::star;
    else if (kind == "complete") g.kind = GraphSpec::Kind::complete;
    else if (kind == "erdos_renyi") g.kind = GraphSpec::Kind::erdos_renyi;
    else if (kind == "explicit") g.kind = GraphSpec::Kind::explicit_weights;
    else
        fail(where + ".kind", "unknown graph kind '" + kind +
                                  "' (expected path, cycle, star, complete, erdos_renyi, explicit)");
    if (g.kind == GraphSpec::Kind::explicit_weights) {
        g.weights = get_mat(need(j, where, "weights"), where + ".weights");
        g.n = static_cast<int>(g.weights.rows());
    } else {
        const json& n = need(j, where, "n");
        if (!n.is_number_integer()) fail(where + ".n", "expected an integer");
        g.n = n.get<int>();
        if (g.n < 2) fail(where + ".n", "need at least two nodes");
        g.weight = opt_num(j, where, "weight", 1.0);
        if (g.weight <= 0) fail(where + ".weight", "must be positive");
        if (g.kind == GraphSpec::Kind::erdos_renyi) {
            g.p = opt_num(j, where, "p", 0.5);
            if (!(g.p > 0) || g.p > 1) fail(where + ".p", "must lie in (0, 1]");
            if (j.contains("seed")) g.seed = get_seed(j.at("seed"), where + ".seed");
        }
    }
    return g;
}

json graph_to_json(const GraphSpec& g) {
    json j;
    switch (g.kind) {
    case GraphSpec::Kind::path: j["kind"] = "path"; break;
    case GraphSpec::Kind::cycle: j["kind"] = "cycle"; break;
    case GraphSpec::Kind::star: j["kind"] = "star"; break;
    case GraphSpec::Kind::complete: j["kind"] = "complete"; break;
    case GraphSpec::Kind::erdos_renyi: j["kind"] = "erdos_renyi"; break;
    case GraphSpec::Kind::explicit_weights: j["kind"] = "explicit"; break;
    }
    if (g.kind == GraphSpec::Kind::explicit_weights) {
        j["weights"] = mat_to_json(g.weights);
    } else {
        j["n"] = g.n;
        j["weight"] = g.weight;
        if (g.kind == GraphSpec::Kind::erdos_renyi) {
            j["p"] = g.p;
            j["seed"] = g.seed;
        }
    }
    return j;
}

InitSpec parse_init(const json& j, const std::string& where) {
    InitSpec s;
    std::string kind = get_str(need(j, where, "kind"), where + ".kind");
    if (kind == "zeros") {
        s.kind = InitSpec::Kind::zeros;
    } else if (kind == "profile") {
        s.kind = InitSpec::Kind::profile;
        s.value = get_vec(need(j, where, "value"), where + ".value");
    } else if (kind == "stacked") {
        s.kind = InitSpec::Kind::stacked;
        s.value = get_vec(need(j, where, "value"), where + ".value");
    } else if (kind == "random_box") {
        s.kind = InitSpec::Kind::random_box;
        s.lo = opt_num(j, where, "lo", -1.0);
        s.hi = opt_num(j, where, "hi", 1.0);
        if (s.lo > s.hi) fail(where + ".lo", "lower bound exceeds upper bound");
        if (j.contains("seed")) s.seed = get_seed(j.at("seed"), where + ".seed");
    } else {
        fail(where + ".kind",
             "unknown init kind '" + kind + "' (expected zeros, profile, stacked, random_box)");
    }
    return s;
}

json init_to_json(const InitSpec& s) {
    json j;
    switch (s.kind) {
    case InitSpec::Kind::zeros:
        j["kind"] = "zeros";
        break;
    case InitSpec::Kind::profile:
        j["kind"] = "profile";
        j["value"] = vec_to_json(s.value);
        break;
    case InitSpec::Kind::stacked:
        j["kind"] = "stacked";
        j["value"] = vec_to_json(s.value);
        break;
    case InitSpec::Kind::random_box:
        j["kind"] = "random_box";
        j["lo"] = s.lo;
        j["hi"] = s.hi;
        j["seed"] = s.seed;
        break;
    }
    return j;
}

IntegratorSpec parse_integrator(const json& j, const std::string& where) {
    IntegratorSpec s;
    s.method = [&] {
        std::string m = get_str(need(j, where, "method"), where + ".method");
        try {
            return method_from_string(m);
        } catch (const InputError& e) {
            fail(where + ".method", e.what());
        }
    }();
    s.step = get_num(need(j, where, "step"), where + ".step");
    s.t_end = get_num(need(j, where, "t_end"), where + ".t_end");
    if (j.contains("log_every")) {
        const json& le = j.at("log_every");
        if (!le.is_number_integer()) fail(where + ".log_every", "expected an integer");
        s.log_every = le.get<int>();
    }
    try {
        s.validate();
    } catch (const ConstructionError& e) {
        fail(where, e.what());
    }
    return s;
}

json integrator_to_json(const IntegratorSpec& s) {
    json j;
    j["method"] = to_string(s.method);
    j["step"] = s.step;
    j["t_end"] = s.t_end;
    j["log_every"] = s.log_every;
    return j;
}

} // namespace

ConvexSet SetSpec::build(int dim) const {
    switch (kind) {
    case ConvexSet::Kind::full_space:
        return ConvexSet::full_space(dim);
    case ConvexSet::Kind::box:
        if (lo.size() != dim) throw ConstructionError("set: box bounds do not match player dim");
        return ConvexSet::box(lo, hi);
    case ConvexSet::Kind::ball:
        if (center.size() != dim) throw ConstructionError("set: ball center does not match player dim");
        return ConvexSet::ball(center, radius);
    case ConvexSet::Kind::polyhedron:
        if (G.cols() != dim) throw ConstructionError("set: polyhedron columns do not match player dim");
        return ConvexSet::polyhedron(G, h);
    }
    throw ConstructionError("set: unknown kind");
}

QuadraticGame GameSpec::build_quadratic() const {
    if (kind == GameSpec::Kind::quadratic) return QuadraticGame(dims, A, b);
    return make_decoupled_game(dims, target, weight);
}

Game GameSpec::build() const {
    Game g = build_quadratic().to_game();
    if (!constraints.empty()) {
        std::vector<ConvexSet> sets;
        const Selection& sel = g.selection();
        for (std::size_t i = 0; i < constraints.size(); ++i)
            sets.push_back(constraints[i].build(sel.dim(static_cast<int>(i))));
        g.set_constraints(std::move(sets));
    }
    return g;
}

Graph GraphSpec::build() const {
    switch (kind) {
    case Kind::path: return Graph::path(n, weight);
    case Kind::cycle: return Graph::cycle(n, weight);
    case Kind::star: return Graph::star(n, weight);
    case Kind::complete: return Graph::complete(n, weight);
    case Kind::erdos_renyi: return Graph::erdos_renyi(n, p, seed, weight);
    case Kind::explicit_weights: return Graph(weights);
    }
    throw ConstructionError("graph: unknown kind");
}

ScenarioConfig parse_config(const json& j) {
    if (!j.is_object()) throw ConfigError("", "config root must be an object");
    ScenarioConfig cfg;
    if (j.contains("name")) cfg.name = get_str(j.at("name"), "name");
    cfg.game = parse_game(need(j, "", "game"), "game");
    cfg.flow = [&] {
        std::string f = get_str(need(j, "", "flow"), "flow");
        try {
            return flow_kind_from_string(f);
        } catch (const InputError& e) {
            fail("flow", e.what());
        }
    }();
    if (j.contains("graph")) cfg.graph = parse_graph(j.at("graph"), "graph");
    if (cfg.flow != FlowKind::full_info && !cfg.graph)
        fail("graph", "required for every flow except full_info");
    if (flow_is_adaptive(cfg.flow)) {
        cfg.gamma = opt_num(j, "", "gamma", 1.0);
        if (cfg.gamma <= 0) fail("gamma", "must be positive");
        cfg.k_init = opt_num(j, "", "k_init", 0.0);
    }
    cfg.integrator = parse_integrator(need(j, "", "integrator"), "integrator");
    if (cfg.flow == FlowKind::projected_dai) {
        if (cfg.integrator.method != Method::projected_euler)
            fail("integrator.method", "projected_dai requires projected_euler");
        if (cfg.game.constraints.empty())
            fail("game.constraints", "projected_dai requires one set per player");
    } else if (cfg.integrator.method == Method::projected_euler) {
        fail("integrator.method", "projected_euler only applies to projected_dai");
    }
    if (j.contains("init")) cfg.init = parse_init(j.at("init"), "init");
    cfg.converged_threshold = opt_num(j, "", "converged_threshold", 1e-6);
    if (cfg.converged_threshold <= 0) fail("converged_threshold", "must be positive");
    cfg.oracle_tol = opt_num(j, "", "oracle_tol", 1e-10);
    if (cfg.oracle_tol <= 0) fail("oracle_tol", "must be positive");
    if (j.contains("output_dir")) cfg.output_dir = get_str(j.at("output_dir"), "output_dir");

    // Cross-field dimension checks that don't need object construction.
    Selection sel(cfg.game.dims);
    const int M = sel.total_dim();
    if (cfg.game.kind == GameSpec::Kind::quadratic) {
        if (cfg.game.A.rows() != M || cfg.game.A.cols() != M)
            fail("game.A", "must be M x M with M the sum of player dims");
        if (cfg.game.b.size() != M) fail("game.b", "must have length M");
    } else if (cfg.game.target.size() != M) {
        fail("game.target", "must have length M");
    }
    if (cfg.graph && cfg.graph->n != sel.n_players())
        fail("graph.n", "graph nodes must match the number of players");
    const Eigen::Index state_len =
        cfg.flow == FlowKind::full_info ? M : static_cast<Eigen::Index>(sel.n_players()) * M;
    if (cfg.init.kind == InitSpec::Kind::profile && cfg.init.value.size() != M)
        fail("init.value", "profile must have length M");
    if (cfg.init.kind == InitSpec::Kind::stacked && cfg.init.value.size() != state_len)
        fail("init.value", "stacked init must have length N*M (or M for full_info)");
    return cfg;
}

json to_json(const ScenarioConfig& cfg) {
    json j;
    j["name"] = cfg.name;
    j["game"] = game_to_json(cfg.game);
    j["flow"] = to_string(cfg.flow);
    if (cfg.graph) j["graph"] = graph_to_json(*cfg.graph);
    if (flow_is_adaptive(cfg.flow)) {
        j["gamma"] = cfg.gamma;
        j["k_init"] = cfg.k_init;
    }
    j["integrator"] = integrator_to_json(cfg.integrator);
    j["init"] = init_to_json(cfg.init);
    j["converged_threshold"] = cfg.converged_threshold;
    j["oracle_tol"] = cfg.oracle_tol;
    j["output_dir"] = cfg.output_dir;
    return j;
}

ScenarioConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return parse_config(j);
}

std::string config_hash(const ScenarioConfig& cfg) {
    // FNV-1a over the canonical dump (nlohmann objects iterate sorted keys).
    const std::string dump = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : dump) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

std::vector<std::string> sweep_axes() {
    return {"gamma",        "k_init",      "integrator.step",
            "integrator.t_end", "graph.weight", "game.weight",
            "converged_threshold"};
}

void apply_axis(ScenarioConfig& cfg, const std::string& axis, double value) {
    if (axis == "gamma") {
        if (!flow_is_adaptive(cfg.flow))
            throw ConfigError("gamma", "only the adaptive flows have adaptation rates");
        cfg.gamma = value;
    } else if (axis == "k_init") {
        if (!flow_is_adaptive(cfg.flow))
            throw ConfigError("k_init", "only the adaptive flows have gains");
        cfg.k_init = value;
    } else if (axis == "integrator.step") {
        cfg.integrator.step = value;
    } else if (axis == "integrator.t_end") {
        cfg.integrator.t_end = value;
    } else if (axis == "graph.weight") {
        if (!cfg.graph) throw ConfigError("graph", "scenario has no graph to sweep");
        if (cfg.graph->kind == GraphSpec::Kind::explicit_weights)
            throw ConfigError("graph.weight", "explicit weight matrices have no uniform weight");
        cfg.graph->weight = value;
    } else if (axis == "game.weight") {
        if (cfg.game.kind != GameSpec::Kind::decoupled)
            throw ConfigError("game.weight", "only decoupled games have a weight field");
        cfg.game.weight = value;
    } else if (axis == "converged_threshold") {
        cfg.converged_threshold = value;
    } else {
        std::ostringstream os;
        os << "unknown sweep axis '" << axis << "'; supported:";
        for (const auto& a : sweep_axes()) os << " " << a;
        throw ConfigError("", os.str());
    }
    // Re-validate through the canonical round trip so bad values fail with
    // the same messages as hand-written configs.
    cfg = parse_config(to_json(cfg));
}

} // namespace neseek
