// Timing comparison of the flow right-hand-side implementations:
// the scalar-loop reference, the blockwise kernels run serially, and the
// same kernels distributed with OpenMP. Also reports the worst elementwise
// disagreement between routes as a sanity check.
//
//   bench_rhs [--agents N] [--dim M] [--evals K] [--seed S]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <string>

#include "CLI11.hpp"
#include "neseek/dynamics.hpp"
#include "neseek/reference.hpp"
#include "neseek/rng.hpp"

using namespace neseek;

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

template <typename F>
double time_evals(int evals, F&& body) {
    body();  // warm up
    double t0 = now_seconds();
    for (int i = 0; i < evals; ++i) body();
    return (now_seconds() - t0) / evals;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flow right-hand-side benchmark"};
    int n_agents = 64, dim = 64, evals = 20;
    std::uint64_t seed = 1;
    app.add_option("--agents", n_agents, "Number of agents (graph nodes)");
    app.add_option("--dim", dim, "Profile dimension (every player scalar)");
    app.add_option("--evals", evals, "Timed evaluations per route");
    app.add_option("--seed", seed, "Seed for game, graph and state");
    CLI11_PARSE(app, argc, argv);

    if (dim < n_agents) dim = n_agents;
    Rng rng(seed);

    // Scalar players padded to the requested profile dimension by giving the
    // first players extra coordinates.
    std::vector<int> dims(n_agents, 1);
    for (int c = 0; c < dim - n_agents; ++c) dims[c % n_agents] += 1;

    // Any dense quadratic game works here: the kernels are timed on a single
    // evaluation, not on convergence.
    Mat A(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) A(i, j) = rng.uniform(-1.0, 1.0);
    Vec b = rng.uniform_vec(dim, -1.0, 1.0);
    Game game = QuadraticGame(dims, A, b).to_game();

    Graph graph = Graph::erdos_renyi(n_agents, 0.3, seed, 1.0);
    DaiParams params = DaiParams::uniform(n_agents, 1.0, 0.5);
    ExtendedState state{rng.uniform_vec(static_cast<Eigen::Index>(n_agents) * dim, -1.0, 1.0),
                        rng.uniform_vec(n_agents, 0.0, 2.0)};

    std::printf("agents=%d dim=%d state=%d threads=%d evals=%d\n", n_agents, dim,
                n_agents * dim + n_agents, omp_get_max_threads(), evals);

    StateDeriv d_ref = ref::rhs_dai(game, graph, params, state);
    StateDeriv d_serial = rhs_dai(game, graph, params, state, Exec::serial);
    StateDeriv d_omp = rhs_dai(game, graph, params, state, Exec::openmp);
    double dev_serial = (d_ref.dX - d_serial.dX).lpNorm<Eigen::Infinity>();
    double dev_omp = (d_serial.dX - d_omp.dX).lpNorm<Eigen::Infinity>();

    double t_ref = time_evals(evals, [&] { ref::rhs_dai(game, graph, params, state); });
    double t_serial =
        time_evals(evals, [&] { rhs_dai(game, graph, params, state, Exec::serial); });
    double t_omp = time_evals(evals, [&] { rhs_dai(game, graph, params, state, Exec::openmp); });

    std::printf("%-22s %12s %10s %14s\n", "route", "sec/eval", "speedup", "max |diff|");
    std::printf("%-22s %12.3e %10s %14s\n", "reference (loops)", t_ref, "1.00x", "-");
    std::printf("%-22s %12.3e %9.2fx %14.3e\n", "blockwise serial", t_serial, t_ref / t_serial,
                dev_serial);
    std::printf("%-22s %12.3e %9.2fx %14.3e\n", "blockwise openmp", t_omp, t_ref / t_omp,
                dev_omp);
    return 0;
}
