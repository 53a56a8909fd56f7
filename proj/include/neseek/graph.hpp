#pragma once

#include <cstdint>

#include "neseek/types.hpp"

namespace neseek {

/// Undirected weighted communication graph on N nodes. Construction enforces
/// symmetry, nonnegative weights, zero diagonal, and connectivity.
class Graph {
public:
    explicit Graph(Mat weights);

    static Graph path(int n, double weight = 1.0);
    static Graph cycle(int n, double weight = 1.0);
    static Graph star(int n, double weight = 1.0);
    static Graph complete(int n, double weight = 1.0);
    /// Erdos-Renyi G(n, p); resamples (deterministically in `seed`) until the
    /// draw is connected.
    static Graph erdos_renyi(int n, double p, std::uint64_t seed, double weight = 1.0);

    int n_nodes() const { return static_cast<int>(w_.rows()); }
    const Mat& weights() const { return w_; }
    double weight(int i, int j) const { return w_(i, j); }

    /// Graph Laplacian L = D - W (symmetric PSD, L 1 = 0).
    const Mat& laplacian() const { return lap_; }

    /// Algebraic connectivity: second-smallest eigenvalue of L. Positive for
    /// every constructed graph (connectivity is enforced).
    double algebraic_connectivity() const { return lambda2_; }

private:
    Mat w_;
    Mat lap_;
    double lambda2_ = 0;
};

/// Laplacian together with its cached algebraic connectivity, for callers
/// that carry the matrix around without the graph.
struct Laplacian {
    Mat matrix;
    double lambda2;
};
Laplacian laplacian(const Graph& g);

/// lambda_2 of a symmetric Laplacian-like matrix (second-smallest eigenvalue).
double algebraic_connectivity(const Mat& laplacian_matrix);

/// Sufficient condition for the statically coupled dynamics to contract:
/// lambda2 > ell + ell^2 / mu with ell the Lipschitz constant of the
/// pseudo-gradient and mu the strong-monotonicity modulus.
bool strong_coupling_holds(double lambda2, double ell, double mu);
double strong_coupling_threshold(double ell, double mu);

/// Orthogonal split of a stacked vector into its consensus part (the average
/// profile, repeated) and the disagreement remainder.
struct ConsensusSplit {
    Vec average;            // mean of the N agent blocks, in R^M
    double off_norm;        // || X - 1 kron average ||
};
ConsensusSplit consensus_split(const Vec& stacked, int n_agents);

} // namespace neseek
