#pragma once

#include "gaugeclust/types.hpp"

#include <string>
#include <vector>

namespace gaugeclust {

enum class GaugeKind { L1Ball, L2Ball, LinfBall, WeightedL2Ball, PolytopeVertices };

/// Smoothing parameter of the Nesterov surrogate. Always strictly positive.
class SmoothingParam {
public:
    explicit SmoothingParam(double mu);
    double value() const noexcept { return mu_; }

private:
    double mu_;
};

/// ‖F‖ = sup{‖x‖ : x ∈ F} and ‖F°‖ = sup{‖v‖ : v ∈ F°}.
struct NormBounds {
    double set_norm = 0.0;
    double polar_norm = 0.0;
};

/// Projection onto the polar of a vertex-listed polytope is iterative; these
/// bound it.
struct ProjectionOptions {
    double tol = 1e-10;
    int max_iter = 10000;
};

/// Minkowski gauge ρ_F(z) = inf{t ≥ 0 : z ∈ tF} of a compact convex set F with
/// the origin in its interior.
///
/// The gauge equals the support function of the polar set F°, so every
/// operation here is phrased in terms of F°: subgradients are maximizers over
/// F°, and the smoothed gauge ρ_μ(z) = max_{v∈F°} ⟨z,v⟩ − (μ/2)‖v‖² has gradient
/// P(z/μ; F°).
///
/// Instances are immutable after construction and safe to share across threads.
class Gauge {
public:
    static Gauge l1(int dim);
    static Gauge l2(int dim);
    static Gauge linf(int dim);
    /// F = {x : Σ w_i x_i² ≤ 1}, so ρ(z) = sqrt(Σ w_i z_i²).
    static Gauge weighted_l2(const Vector& weights);
    /// F = conv(vertex rows). Throws InvalidGauge unless a ball of radius 1e-9
    /// around the origin lies inside the hull.
    static Gauge polytope(const Matrix& vertices, ProjectionOptions opts = {});
    /// One vertex per row, comma separated, optional header row.
    static Gauge polytope_from_csv(const std::string& path, ProjectionOptions opts = {});

    GaugeKind kind() const noexcept { return kind_; }
    int dim() const noexcept { return dim_; }
    std::string describe() const;

    double value(RowRef z) const;

    /// Euclidean projection onto F°. out may alias v.
    void polar_project(RowRef v, RowOut out) const;
    Vector polar_project(RowRef v) const;

    /// A maximizer of ⟨v, z⟩ over F°. Zero at z = 0; polyhedral ties go to the
    /// lexicographically smallest maximizing vertex of F°.
    void subgradient(RowRef z, RowOut out) const;
    Vector subgradient(RowRef z) const;

    double smooth_value(SmoothingParam mu, RowRef z) const;
    Vector smooth_gradient(SmoothingParam mu, RowRef z) const;
    /// ρ_μ(z), writing ∇ρ_μ(z) = P(z/μ; F°) into grad. Hot-loop entry point.
    double smooth_eval(double mu, RowRef z, RowOut grad) const;

    NormBounds norm_bounds() const noexcept { return bounds_; }

    /// ⟨v, x⟩ ≤ 1 + tol for every extreme point x of F.
    bool in_polar(RowRef v, double tol = 1e-9) const;

    /// Vertex list of F (PolytopeVertices only; empty otherwise).
    const Matrix& vertices() const noexcept { return vertices_; }
    /// Vertex list of F° (PolytopeVertices only; empty otherwise).
    const Matrix& polar_vertices() const noexcept { return polar_vertices_; }
    const Vector& weights() const noexcept { return weights_; }

private:
    Gauge(GaugeKind kind, int dim) : kind_(kind), dim_(dim) {}

    void project_polytope(RowRef v, RowOut out) const;
    void project_ellipsoid(RowRef v, RowOut out) const;

    GaugeKind kind_;
    int dim_;
    NormBounds bounds_;
    Vector weights_;
    Matrix vertices_;
    Matrix polar_vertices_;
    double vertex_gram_norm_ = 0.0;
    ProjectionOptions proj_;
};

}  // namespace gaugeclust
