#pragma once

#include "neseek/dynamics.hpp"
#include "neseek/game.hpp"
#include "neseek/graph.hpp"
#include "neseek/types.hpp"

/// Straight-line serial implementations of the flow right-hand sides,
/// written entirely with scalar loops against the defining sums. They are
/// the correctness reference for the blockwise kernels (tests compare both
/// routes; the benchmark tool times them side by side) and are kept free of
/// Eigen expression shortcuts on purpose.
namespace neseek::ref {

/// Kronecker product A kron B, materialized. Test-scale sizes only.
Mat kron(const Mat& A, const Mat& B);

/// rho = -(L kron I_m) X computed from the defining neighborhood sums.
Vec local_average(const Graph& graph, const Vec& X);

/// u = -(L K L kron I_m) X via the per-agent double sum.
Vec dai_coupling(const Graph& graph, const Vec& k, const Vec& X);

Vec rhs_static_consensus(const Game& game, const Graph& graph, const Vec& X);
StateDeriv rhs_dai(const Game& game, const Graph& graph, const DaiParams& params,
                   const ExtendedState& state);
StateDeriv rhs_dai_local(const Game& game, const Graph& graph, const DaiParams& params,
                         const ExtendedState& state);

} // namespace neseek::ref
