#include "neseek/sets.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "neseek/errors.hpp"

namespace neseek {

namespace {

void require_finite(const Vec& v, const char* what) {
    if (!v.allFinite()) throw ConstructionError(std::string(what) + ": entries must be finite");
}

// Row-normalized worst constraint violation of G y <= h.
double scaled_violation(const Mat& G, const Vec& h, const Vec& y) {
    double worst = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < G.rows(); ++j) {
        double scale = std::max(1.0, G.row(j).norm());
        worst = std::max(worst, (G.row(j).dot(y) - h(j)) / scale);
    }
    return worst;
}

} // namespace

Vec project_onto_polyhedron(const Mat& G, const Vec& h, const Vec& x) {
    const int m = static_cast<int>(G.rows());
    const Eigen::Index n = G.cols();
    if (h.size() != m || x.size() != n)
        throw InputError("polyhedron projection: dimension mismatch");
    if (m == 0) return x;

    // Dual active-set method: y = x - G_P^T z with (G_P G_P^T) z = G_P x - h_P
    // over the working set P, multipliers kept nonnegative NNLS-style.
    const double feas_tol = 1e-12 * (1.0 + h.cwiseAbs().maxCoeff() + x.norm());
    std::vector<int> P;
    Vec lambda = Vec::Zero(m);
    Vec y = x;

    auto solve_on = [&](const std::vector<int>& idx) -> Vec {
        Mat Gp(idx.size(), n);
        Vec rhs(idx.size());
        for (std::size_t r = 0; r < idx.size(); ++r) {
            Gp.row(r) = G.row(idx[r]);
            rhs(r) = Gp.row(r).dot(x) - h(idx[r]);
        }
        // Minimum-norm multipliers tolerate redundant active rows.
        Mat gram = Gp * Gp.transpose();
        return gram.completeOrthogonalDecomposition().solve(rhs);
    };

    const int max_outer = 50 * m + 100;
    for (int outer = 0; outer < max_outer; ++outer) {
        // Most violated constraint outside the working set.
        int jstar = -1;
        double worst = feas_tol;
        for (int j = 0; j < m; ++j) {
            if (std::find(P.begin(), P.end(), j) != P.end()) continue;
            double v = G.row(j).dot(y) - h(j);
            if (v > worst) {
                worst = v;
                jstar = j;
            }
        }
        if (jstar < 0) return y;  // KKT point: feasible, multipliers >= 0
        if (G.row(jstar).norm() < 1e-14)
            throw InputError("polyhedron projection: violated constraint with zero row");
        P.push_back(jstar);

        // Restore nonnegative multipliers on the working set.
        for (int inner = 0; inner <= max_outer; ++inner) {
            Vec z = solve_on(P);
            if (z.size() == 0) break;
            if (z.minCoeff() >= -1e-12) {
                for (std::size_t r = 0; r < P.size(); ++r) lambda(P[r]) = std::max(0.0, z(r));
                break;
            }
            // Step toward z until the first multiplier hits zero; drop it.
            double alpha = 1.0;
            for (std::size_t r = 0; r < P.size(); ++r)
                if (z(r) < 0 && lambda(P[r]) - z(r) > 0)
                    alpha = std::min(alpha, lambda(P[r]) / (lambda(P[r]) - z(r)));
            std::vector<int> keep;
            for (std::size_t r = 0; r < P.size(); ++r) {
                double lr = lambda(P[r]) + alpha * (z(r) - lambda(P[r]));
                lambda(P[r]) = std::max(0.0, lr);
                if (lr > 1e-12) keep.push_back(P[r]);
            }
            if (keep.size() == P.size()) keep.pop_back();  // degenerate guard: force progress
            P = std::move(keep);
        }

        y = x;
        for (int j : P) y -= lambda(j) * G.row(j).transpose();
    }
    throw InputError("polyhedron projection: active-set iteration failed to converge");
}

FeasibilityResult find_feasible_point(const Mat& G, const Vec& h) {
    const Eigen::Index n = G.cols();
    if (h.size() != G.rows()) throw InputError("feasibility: dimension mismatch");

    auto phi = [&](const Vec& y) { return 0.5 * (G * y - h).cwiseMax(0.0).squaredNorm(); };

    // Least-squares start, then Gauss-Newton on the squared positive part.
    Vec y = G.completeOrthogonalDecomposition().solve(h);
    const double tol = 1e-10 * (1.0 + h.cwiseAbs().maxCoeff());
    for (int iter = 0; iter < 200; ++iter) {
        Vec r = (G * y - h).cwiseMax(0.0);
        if (r.maxCoeff() <= tol) return FeasibilityResult{true, y, r.norm()};
        Vec grad = G.transpose() * r;
        Mat H = Mat::Zero(n, n);
        for (Eigen::Index j = 0; j < G.rows(); ++j)
            if (r(j) > 0) H += G.row(j).transpose() * G.row(j);
        H.diagonal().array() += 1e-12;
        Vec d = H.ldlt().solve(-grad);
        double base = phi(y), alpha = 1.0;
        while (alpha > 1e-14 && phi(y + alpha * d) >= base) alpha *= 0.5;
        if (alpha <= 1e-14) break;  // stalled: treat as infeasible
        y += alpha * d;
    }
    Vec r = (G * y - h).cwiseMax(0.0);
    return FeasibilityResult{false, y, r.norm()};
}

ConvexSet ConvexSet::full_space(int dim) {
    if (dim <= 0) throw ConstructionError("full space: dimension must be positive");
    return ConvexSet(Kind::full_space, dim);
}

ConvexSet ConvexSet::box(Vec lo, Vec hi) {
    if (lo.size() == 0 || lo.size() != hi.size())
        throw ConstructionError("box: bounds must be nonempty and equal-length");
    require_finite(lo, "box bounds");
    require_finite(hi, "box bounds");
    for (Eigen::Index i = 0; i < lo.size(); ++i)
        if (lo(i) > hi(i)) throw ConstructionError("box: lower bound exceeds upper bound");
    ConvexSet s(Kind::box, static_cast<int>(lo.size()));
    s.lo_ = std::move(lo);
    s.hi_ = std::move(hi);
    return s;
}

ConvexSet ConvexSet::ball(Vec center, double radius) {
    if (center.size() == 0) throw ConstructionError("ball: center must be nonempty");
    require_finite(center, "ball center");
    if (!(radius > 0) || !std::isfinite(radius))
        throw ConstructionError("ball: radius must be positive and finite");
    ConvexSet s(Kind::ball, static_cast<int>(center.size()));
    s.center_ = std::move(center);
    s.radius_ = radius;
    return s;
}

ConvexSet ConvexSet::polyhedron(Mat G, Vec h) {
    if (G.rows() == 0 || G.cols() == 0)
        throw ConstructionError("polyhedron: constraint matrix must be nonempty");
    if (h.size() != G.rows()) throw ConstructionError("polyhedron: offset length mismatch");
    if (!G.allFinite() || !h.allFinite())
        throw ConstructionError("polyhedron: entries must be finite");

    FeasibilityResult feas = find_feasible_point(G, h);
    if (!feas.feasible)
        throw ConstructionError("polyhedron: the system G y <= h has no solution (empty set)");

    // Bounded iff the recession cone {d : G d <= 0} is {0}, iff every signed
    // basis vector projects to zero on that cone.
    const Vec zero_h = Vec::Zero(G.rows());
    for (Eigen::Index k = 0; k < G.cols(); ++k) {
        for (double sgn : {1.0, -1.0}) {
            Vec e = Vec::Zero(G.cols());
            e(k) = sgn;
            if (project_onto_polyhedron(G, zero_h, e).norm() > 1e-8)
                throw ConstructionError("polyhedron: unbounded (recession direction found)");
        }
    }

    ConvexSet s(Kind::polyhedron, static_cast<int>(G.cols()));
    s.G_ = std::move(G);
    s.h_ = std::move(h);
    return s;
}

Vec ConvexSet::project(const Vec& x) const {
    if (x.size() != dim_) throw InputError("project: point has wrong dimension");
    switch (kind_) {
    case Kind::full_space:
        return x;
    case Kind::box:
        return x.cwiseMax(lo_).cwiseMin(hi_);
    case Kind::ball: {
        Vec d = x - center_;
        double n = d.norm();
        if (n <= radius_) return x;
        return center_ + (radius_ / n) * d;
    }
    case Kind::polyhedron:
        return project_onto_polyhedron(G_, h_, x);
    }
    throw InputError("project: unknown set kind");
}

double ConvexSet::distance(const Vec& x) const {
    return (x - project(x)).norm();
}

bool ConvexSet::contains(const Vec& x, double tol) const {
    if (x.size() != dim_) throw InputError("contains: point has wrong dimension");
    switch (kind_) {
    case Kind::full_space:
        return true;
    case Kind::box:
        return (x.array() >= lo_.array() - tol).all() && (x.array() <= hi_.array() + tol).all();
    case Kind::ball:
        return (x - center_).norm() <= radius_ + tol;
    case Kind::polyhedron:
        return scaled_violation(G_, h_, x) <= tol;
    }
    throw InputError("contains: unknown set kind");
}

Vec ConvexSet::tangent_project(const Vec& x, const Vec& v) const {
    if (x.size() != dim_ || v.size() != dim_)
        throw InputError("tangent projection: dimension mismatch");
    if (!contains(x, kMembershipTol))
        throw InputError("tangent projection: base point lies outside the set");
    switch (kind_) {
    case Kind::full_space:
        return v;
    case Kind::box: {
        Vec out = v;
        for (Eigen::Index i = 0; i < dim_; ++i) {
            if (x(i) <= lo_(i) + kActiveTol && v(i) < 0) out(i) = 0;
            if (x(i) >= hi_(i) - kActiveTol && v(i) > 0) out(i) = 0;
        }
        return out;
    }
    case Kind::ball: {
        Vec d = x - center_;
        double n = d.norm();
        if (n < radius_ - kActiveTol) return v;  // interior
        Vec normal = d / n;
        double out_comp = normal.dot(v);
        if (out_comp <= 0) return v;
        return v - out_comp * normal;
    }
    case Kind::polyhedron: {
        std::vector<int> active;
        for (Eigen::Index j = 0; j < G_.rows(); ++j) {
            double scale = std::max(1.0, G_.row(j).norm());
            if ((G_.row(j).dot(x) - h_(j)) / scale >= -kActiveTol)
                active.push_back(static_cast<int>(j));
        }
        if (active.empty()) return v;  // interior
        Mat Ga(active.size(), dim_);
        for (std::size_t r = 0; r < active.size(); ++r) Ga.row(r) = G_.row(active[r]);
        return project_onto_polyhedron(Ga, Vec::Zero(active.size()), v);
    }
    }
    throw InputError("tangent projection: unknown set kind");
}

Vec ConvexSet::tangent_project_numeric(const Vec& x, const Vec& v, double delta) const {
    if (!(delta > 0)) throw InputError("tangent projection: delta must be positive");
    return (project(x + delta * v) - x) / delta;
}

const Vec& ConvexSet::lower() const {
    if (kind_ != Kind::box) throw InputError("lower: not a box");
    return lo_;
}
const Vec& ConvexSet::upper() const {
    if (kind_ != Kind::box) throw InputError("upper: not a box");
    return hi_;
}
const Vec& ConvexSet::center() const {
    if (kind_ != Kind::ball) throw InputError("center: not a ball");
    return center_;
}
double ConvexSet::radius() const {
    if (kind_ != Kind::ball) throw InputError("radius: not a ball");
    return radius_;
}
const Mat& ConvexSet::constraint_matrix() const {
    if (kind_ != Kind::polyhedron) throw InputError("constraint_matrix: not a polyhedron");
    return G_;
}
const Vec& ConvexSet::constraint_offset() const {
    if (kind_ != Kind::polyhedron) throw InputError("constraint_offset: not a polyhedron");
    return h_;
}

std::string ConvexSet::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::full_space:
        os << "full space R^" << dim_;
        break;
    case Kind::box:
        os << "box in R^" << dim_;
        break;
    case Kind::ball:
        os << "ball in R^" << dim_ << " radius " << radius_;
        break;
    case Kind::polyhedron:
        os << "polyhedron in R^" << dim_ << " with " << G_.rows() << " faces";
        break;
    }
    return os.str();
}

} // namespace neseek
