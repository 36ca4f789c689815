#pragma once

#include "gaugeclust/gauge.hpp"
#include "gaugeclust/types.hpp"

#include <optional>
#include <vector>

namespace gaugeclust {

/// Demand points, one per row, with optional ground-truth labels.
struct DataSet {
    Matrix points;
    std::optional<std::vector<int>> labels;

    Eigen::Index n() const noexcept { return points.rows(); }
    Eigen::Index d() const noexcept { return points.cols(); }

    /// Throws unless n ≥ 1, every entry is finite and labels (if any) match n.
    void validate() const;
};

/// Prototype matrix X: row ℓ is the center x_ℓ.
using Prototypes = Matrix;

struct ModelParams {
    double lambda = 0.0;  ///< fusion weight, λ ≥ 0
    double mu = 1.0;      ///< smoothing, μ > 0

    void validate() const;
};

/// Nearest-prototype structure. Indices are zero-based.
struct Assignment {
    std::vector<int> primary;                ///< smallest index in nearest[i]
    std::vector<std::vector<int>> nearest;   ///< L_i(X), ascending
    std::vector<std::vector<int>> members;   ///< I_ℓ(X), ascending

    /// Members under the disjoint primary-label partition.
    std::vector<std::vector<int>> primary_members(Eigen::Index k) const;
};

struct EffectiveClusters {
    int count = 0;
    std::vector<std::vector<int>> groups;  ///< classes of coincident prototypes
    std::vector<bool> owns_points;         ///< per group: merged point set nonempty
};

/// Relative tolerance on gauge values when forming the nearest sets L_i.
inline constexpr double kNearestTieRel = 1e-12;
inline constexpr double kDefaultDedupTol = 1e-8;

/// (λn/2) Σ_{s<t} ‖x_s − x_t‖², computed in the centered form (λn/2)·k·Σ‖x_s − x̄‖².
double fusion_penalty(const Prototypes& x, double lambda, Eigen::Index n);

/// Σ_i min_ℓ ρ(x_ℓ − a_i) + fusion penalty.
double objective(const DataSet& data, const Prototypes& x, double lambda, const Gauge& gauge);

/// Σ_i min_ℓ ρ_μ(x_ℓ − a_i) + fusion penalty.
double smoothed_objective(const DataSet& data, const Prototypes& x, const ModelParams& params,
                          const Gauge& gauge);

/// g_μ(X) = (1/2μ) Σ_i Σ_ℓ ‖x_ℓ − a_i‖² + fusion penalty.
double convex_part(const DataSet& data, const Prototypes& x, const ModelParams& params,
                   const Gauge& gauge);

struct ConcaveParts {
    double distance_term = 0.0;  ///< h⁽¹⁾: (μ/2) Σ_i Σ_ℓ d((x_ℓ − a_i)/μ; F°)²
    double max_term = 0.0;       ///< h⁽²⁾: Σ_i max_r Σ_{ℓ≠r} ρ_μ(x_ℓ − a_i); zero when k = 1
    double total() const noexcept { return distance_term + max_term; }
};

ConcaveParts concave_parts(const DataSet& data, const Prototypes& x, const ModelParams& params,
                           const Gauge& gauge);

/// h_μ = h⁽¹⁾ + h⁽²⁾, so convex_part − concave_part = smoothed_objective.
double concave_part(const DataSet& data, const Prototypes& x, const ModelParams& params,
                    const Gauge& gauge);

Assignment assign(const DataSet& data, const Prototypes& x, const Gauge& gauge);

/// Groups prototypes lying within dedup_tol of a class representative (the
/// first member, in index order) and counts the classes that own a point.
EffectiveClusters effective_clusters(const DataSet& data, const Prototypes& x, const Gauge& gauge,
                                     double dedup_tol = kDefaultDedupTol);

/// Σ_{ℓ<j} ‖x_ℓ − x_j‖.
double center_spread(const Prototypes& x);

/// Row mean of the data.
Vector centroid(const DataSet& data);

void check_compatible(const DataSet& data, const Prototypes& x, const Gauge& gauge);

}  // namespace gaugeclust
