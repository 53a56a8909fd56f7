#include "neseek/graph.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "neseek/errors.hpp"
#include "neseek/rng.hpp"

namespace neseek {

namespace {

constexpr double kSymTol = 1e-12;

bool connected(const Mat& w) {
    const int n = static_cast<int>(w.rows());
    std::vector<char> seen(n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int u = stack.back();
        stack.pop_back();
        for (int v = 0; v < n; ++v) {
            if (!seen[v] && w(u, v) > 0) {
                seen[v] = 1;
                ++count;
                stack.push_back(v);
            }
        }
    }
    return count == n;
}

} // namespace

Graph::Graph(Mat weights) : w_(std::move(weights)) {
    const int n = static_cast<int>(w_.rows());
    if (n < 2 || w_.cols() != n)
        throw ConstructionError("graph: weight matrix must be square with at least two nodes");
    for (int i = 0; i < n; ++i) {
        if (w_(i, i) != 0) throw ConstructionError("graph: diagonal weights must be zero");
        for (int j = 0; j < n; ++j) {
            if (!(w_(i, j) >= 0)) throw ConstructionError("graph: weights must be nonnegative");
            if (std::abs(w_(i, j) - w_(j, i)) > kSymTol)
                throw ConstructionError("graph: weight matrix must be symmetric");
        }
    }
    if (!connected(w_)) throw ConstructionError("graph: must be connected");

    lap_ = -w_;
    for (int i = 0; i < n; ++i) lap_(i, i) = w_.row(i).sum();
    lambda2_ = neseek::algebraic_connectivity(lap_);
}

Graph Graph::path(int n, double weight) {
    if (n < 2) throw ConstructionError("path graph: need at least two nodes");
    if (weight <= 0) throw ConstructionError("path graph: weight must be positive");
    Mat w = Mat::Zero(n, n);
    for (int i = 0; i + 1 < n; ++i) w(i, i + 1) = w(i + 1, i) = weight;
    return Graph(std::move(w));
}

Graph Graph::cycle(int n, double weight) {
    if (n < 3) throw ConstructionError("cycle graph: need at least three nodes");
    if (weight <= 0) throw ConstructionError("cycle graph: weight must be positive");
    Mat w = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        int j = (i + 1) % n;
        w(i, j) = w(j, i) = weight;
    }
    return Graph(std::move(w));
}

Graph Graph::star(int n, double weight) {
    if (n < 2) throw ConstructionError("star graph: need at least two nodes");
    if (weight <= 0) throw ConstructionError("star graph: weight must be positive");
    Mat w = Mat::Zero(n, n);
    for (int i = 1; i < n; ++i) w(0, i) = w(i, 0) = weight;
    return Graph(std::move(w));
}

Graph Graph::complete(int n, double weight) {
    if (n < 2) throw ConstructionError("complete graph: need at least two nodes");
    if (weight <= 0) throw ConstructionError("complete graph: weight must be positive");
    Mat w = Mat::Constant(n, n, weight);
    w.diagonal().setZero();
    return Graph(std::move(w));
}

Graph Graph::erdos_renyi(int n, double p, std::uint64_t seed, double weight) {
    if (n < 2) throw ConstructionError("random graph: need at least two nodes");
    if (!(p > 0) || p > 1) throw ConstructionError("random graph: edge probability must be in (0, 1]");
    if (weight <= 0) throw ConstructionError("random graph: weight must be positive");
    Rng rng(seed);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        Mat w = Mat::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (rng.bernoulli(p)) w(i, j) = w(j, i) = weight;
        if (connected(w)) return Graph(std::move(w));
    }
    throw ConstructionError("random graph: no connected draw in 1000 attempts; raise p");
}

Laplacian laplacian(const Graph& g) {
    return Laplacian{g.laplacian(), g.algebraic_connectivity()};
}

double algebraic_connectivity(const Mat& laplacian_matrix) {
    if (laplacian_matrix.rows() != laplacian_matrix.cols() || laplacian_matrix.rows() < 2)
        throw InputError("algebraic connectivity: need a square matrix of order >= 2");
    Eigen::SelfAdjointEigenSolver<Mat> es(laplacian_matrix);
    return es.eigenvalues()(1);
}

double strong_coupling_threshold(double ell, double mu) {
    if (ell <= 0 || mu <= 0)
        throw InputError("strong coupling: ell and mu must be positive");
    return ell + ell * ell / mu;
}

bool strong_coupling_holds(double lambda2, double ell, double mu) {
    return lambda2 > strong_coupling_threshold(ell, mu);
}

ConsensusSplit consensus_split(const Vec& stacked, int n_agents) {
    if (n_agents < 1) throw InputError("consensus split: need at least one agent");
    if (stacked.size() % n_agents != 0)
        throw InputError("consensus split: vector length not divisible by agent count");
    const Eigen::Index m = stacked.size() / n_agents;
    Vec avg = Vec::Zero(m);
    for (int i = 0; i < n_agents; ++i) avg += stacked.segment(i * m, m);
    avg /= n_agents;
    double sq = 0;
    for (int i = 0; i < n_agents; ++i) sq += (stacked.segment(i * m, m) - avg).squaredNorm();
    return ConsensusSplit{std::move(avg), std::sqrt(sq)};
}

} // namespace neseek
