#pragma once

#include "gaugeclust/gauge.hpp"
#include "gaugeclust/model.hpp"
#include "gaugeclust/solvers.hpp"

#include <vector>

namespace gaugeclust {

struct BruteForceResult {
    double value = 0.0;
    Prototypes x;  ///< centers in ascending order
    /// Bound on value − (true optimum) when the optimum lies in the final
    /// search window: Lipschitz constant of f on the domain times half the
    /// final grid diagonal.
    double resolution_slack = 0.0;
    int rounds = 0;
};

/// Global minimum of objective() for one-dimensional data and k ≤ 3.
///
/// Multiresolution grid over ordered configurations x_1 ≤ … ≤ x_k in
/// [min a − 0.1·span, max a + 0.1·span], at least three rounds of 200 points
/// per axis, refined until the spacing is at most `resolution`, then 50
/// coordinate polish sweeps at step 1e-6. Ties keep the lexicographically
/// smallest configuration.
BruteForceResult brute_force_global(const DataSet& data, int k, double lambda, const Gauge& gauge,
                                    double resolution = 1e-6);

struct CenterCheck {
    int index = 0;
    Vector minimizer;         ///< x*_ℓ, a minimizer of φ_ℓ
    double phi_center = 0.0;  ///< φ_ℓ(x̄_ℓ)
    double phi_min = 0.0;     ///< φ_ℓ(x*_ℓ)
    double gap = 0.0;         ///< φ_ℓ(x̄_ℓ) − φ_ℓ(x*_ℓ)
    bool pass = false;        ///< gap ≤ tol
    bool kink_certified = false;  ///< x*_ℓ is a data point certified by 0 ∈ ∂φ_ℓ
};

/// Necessary global-optimality condition: each center x̄_ℓ minimizes
///   φ_ℓ(x) = Σ_{i ∈ I_ℓ} ρ(x − a_i) + (λn/2) Σ_{j≠ℓ} ‖x − x̄_j‖².
/// A passing report does not prove global optimality of X̄.
struct OptimalityReport {
    std::vector<CenterCheck> centers;
    std::vector<bool> singleton;  ///< per point: L_i(X̄) has one element
    bool applicable = true;       ///< every nearest set is a singleton
    bool all_pass = true;         ///< every center passes

    /// "necessary condition holds", "necessary condition violated" or
    /// "not applicable".
    const char* verdict() const noexcept;
};

struct OptimalityOptions {
    double tol = 1e-6;             ///< pass threshold on the gap
    double smoothing = 1e-6;       ///< final μ_v of the smoothed surrogate
    double grad_tol = 1e-8;
    int max_iter_per_stage = 200000;
};

/// Throws ConvergenceError when neither the smoothed descent reaches grad_tol
/// nor a data point is certified as the minimizer.
OptimalityReport check_center_optimality(const DataSet& data, const Prototypes& xbar, double lambda,
                                         const Gauge& gauge, const OptimalityOptions& opts = {});

struct StabilityProbe {
    double value_a = 0.0;
    double value_b = 0.0;
    double lhs = 0.0;    ///< |V(A) − V(B)|
    double rhs = 0.0;    ///< ‖F°‖·√n·‖A − B‖_F
    double slack = 0.0;  ///< summed oracle resolution slack
    bool pass = false;   ///< lhs ≤ rhs + 2·slack
};

StabilityProbe value_stability_probe(const DataSet& a, const DataSet& b, int k, double lambda,
                                     const Gauge& gauge, double resolution = 1e-6);

struct DescentAudit {
    bool pass = true;
    double worst_slack = 0.0;  ///< min over steps of (decrease − bound) / max(1, |f_prev|)
    int worst_index = -1;      ///< record index of worst_slack, −1 for an empty trace
    int first_failure = -1;
};

inline constexpr double kDescentRelTol = 1e-9;

/// Checks f_μ(X^{t−1}) − f_μ(X^t) ≥ (n/2μ)‖X^t − X^{t−1}‖²_F per record,
/// recomputed from f_mu and step_norm. Records with gamma_ls > 0 come from a
/// boosted step, where step_norm is not the DCA displacement; for those the
/// recorded slack is used and f must still not increase.
DescentAudit descent_audit(const SolverTrace& trace, Eigen::Index n, double mu,
                           double rel_tol = kDescentRelTol);

}  // namespace gaugeclust
