#pragma once

#include <string>

#include "neseek/types.hpp"

namespace neseek {

/// Tolerance for "x belongs to the set" checks made before tangent-cone
/// projections. Points produced by the projected integrator satisfy this by
/// construction.
inline constexpr double kMembershipTol = 1e-9;

/// Slack below which an inequality constraint counts as active when building
/// the tangent cone at a boundary point.
inline constexpr double kActiveTol = 1e-9;

/// Closed convex set used as a local action constraint. Value type; one of
/// box, Euclidean ball, bounded polyhedron {y : G y <= h}, or the whole
/// space (no constraint).
class ConvexSet {
public:
    enum class Kind { full_space, box, ball, polyhedron };

    static ConvexSet full_space(int dim);
    static ConvexSet box(Vec lo, Vec hi);
    static ConvexSet ball(Vec center, double radius);
    /// Validates at construction that {y : G y <= h} is nonempty and bounded.
    static ConvexSet polyhedron(Mat G, Vec h);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    bool is_full_space() const { return kind_ == Kind::full_space; }

    /// Euclidean projection onto the set.
    Vec project(const Vec& x) const;

    /// Distance from x to the set: ||x - project(x)||.
    double distance(const Vec& x) const;

    bool contains(const Vec& x, double tol = kMembershipTol) const;

    /// Projection of direction v onto the tangent cone at x. Interior points
    /// return v unchanged; at the boundary the components pushing out of the
    /// set are removed. Requires contains(x, kMembershipTol).
    Vec tangent_project(const Vec& x, const Vec& v) const;

    /// Limit-quotient estimate (project(x + delta v) - x) / delta of the same
    /// quantity; independent route used to cross-check tangent_project.
    Vec tangent_project_numeric(const Vec& x, const Vec& v, double delta = 1e-8) const;

    // Accessors for the defining data (throw InputError on kind mismatch).
    const Vec& lower() const;
    const Vec& upper() const;
    const Vec& center() const;
    double radius() const;
    const Mat& constraint_matrix() const;
    const Vec& constraint_offset() const;

    std::string describe() const;

private:
    ConvexSet(Kind kind, int dim) : kind_(kind), dim_(dim) {}

    Kind kind_;
    int dim_ = 0;
    Vec lo_, hi_;      // box
    Vec center_;       // ball
    double radius_ = 0;
    Mat G_;            // polyhedron
    Vec h_;
};

/// Euclidean projection of x onto {y : G y <= h} via a dual active-set
/// method. Engine behind both the polyhedron projection and its tangent
/// cones (where h = 0 over the active rows); exposed for direct testing.
Vec project_onto_polyhedron(const Mat& G, const Vec& h, const Vec& x);

/// A point of {y : G y <= h}, or a failure report. Used by the polyhedron
/// constructor to reject empty sets.
struct FeasibilityResult {
    bool feasible = false;
    Vec point;          // valid when feasible
    double residual = 0; // ||(G y - h)_+|| at the last iterate
};
FeasibilityResult find_feasible_point(const Mat& G, const Vec& h);

} // namespace neseek
