#include "neseek/reference.hpp"

#include "neseek/errors.hpp"

namespace neseek::ref {

Mat kron(const Mat& A, const Mat& B) {
    Mat out(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return out;
}

namespace {

int block_dim(const Graph& graph, const Vec& X) {
    const int n = graph.n_nodes();
    if (X.size() == 0 || X.size() % n != 0)
        throw InputError("reference: stacked vector length must be a positive multiple of N");
    return static_cast<int>(X.size() / n);
}

} // namespace

Vec local_average(const Graph& graph, const Vec& X) {
    const int n = graph.n_nodes();
    const int m = block_dim(graph, X);
    const Mat& w = graph.weights();
    Vec rho = Vec::Zero(X.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c)
                rho(i * m + c) += w(i, j) * (X(j * m + c) - X(i * m + c));
    return rho;
}

Vec dai_coupling(const Graph& graph, const Vec& k, const Vec& X) {
    const int n = graph.n_nodes();
    const int m = block_dim(graph, X);
    if (k.size() != n) throw InputError("reference: need one gain per agent");
    const Mat& w = graph.weights();
    Vec rho = ref::local_average(graph, X);
    Vec u = Vec::Zero(X.size());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int c = 0; c < m; ++c)
                u(i * m + c) -= w(i, j) * (k(j) * rho(j * m + c) - k(i) * rho(i * m + c));
    return u;
}

Vec rhs_static_consensus(const Game& game, const Graph& graph, const Vec& X) {
    const int n = graph.n_nodes();
    const int m = block_dim(graph, X);
    if (m != game.total_dim())
        throw InputError("reference: estimate block size must equal the profile dimension");
    const Selection& sel = game.selection();
    Vec dX = ref::local_average(graph, X);
    for (int i = 0; i < n; ++i) {
        Vec gi = game.partial_gradient(i, X.segment(static_cast<Eigen::Index>(i) * m, m));
        for (int c = 0; c < sel.dim(i); ++c) dX(sel.own_start(i) + c) -= gi(c);
    }
    return dX;
}

StateDeriv rhs_dai(const Game& game, const Graph& graph, const DaiParams& params,
                   const ExtendedState& state) {
    const int n = graph.n_nodes();
    const int m = block_dim(graph, state.X);
    if (m != game.total_dim())
        throw InputError("reference: estimate block size must equal the profile dimension");
    params.validate(n);
    const Selection& sel = game.selection();

    Vec rho = ref::local_average(graph, state.X);
    StateDeriv d;
    d.dX = ref::dai_coupling(graph, state.K, state.X);
    for (int i = 0; i < n; ++i) {
        Vec gi = game.partial_gradient(i, state.X.segment(static_cast<Eigen::Index>(i) * m, m));
        for (int c = 0; c < sel.dim(i); ++c) d.dX(sel.own_start(i) + c) -= gi(c);
    }
    d.dK = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) d.dK(i) += params.gamma(i) * rho(i * m + c) * rho(i * m + c);
    return d;
}

StateDeriv rhs_dai_local(const Game& game, const Graph& graph, const DaiParams& params,
                         const ExtendedState& state) {
    const int n = graph.n_nodes();
    const int m = block_dim(graph, state.X);
    if (m != game.total_dim())
        throw InputError("reference: estimate block size must equal the profile dimension");
    params.validate(n);
    const Selection& sel = game.selection();

    Vec rho = ref::local_average(graph, state.X);
    StateDeriv d;
    d.dX = Vec::Zero(state.X.size());
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) d.dX(i * m + c) = state.K(i) * rho(i * m + c);
    for (int i = 0; i < n; ++i) {
        Vec gi = game.partial_gradient(i, state.X.segment(static_cast<Eigen::Index>(i) * m, m));
        for (int c = 0; c < sel.dim(i); ++c) d.dX(sel.own_start(i) + c) -= gi(c);
    }
    d.dK = Vec::Zero(n);
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < m; ++c) d.dK(i) += params.gamma(i) * rho(i * m + c) * rho(i * m + c);
    return d;
}

} // namespace neseek::ref
