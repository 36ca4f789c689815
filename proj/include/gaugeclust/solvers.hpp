#pragma once

#include "gaugeclust/gauge.hpp"
#include "gaugeclust/model.hpp"
#include "gaugeclust/types.hpp"

#include <string>
#include <vector>

namespace gaugeclust {

enum class Algorithm { DCA, BDCA, MIDCA };

/// How the max-of-sums part of h_μ is linearized.
enum class ConcaveOracle {
    /// Gradients of ρ_μ, a true subgradient of h_μ as used in f_μ.
    Smoothed,
    /// Exact gauge subgradients with active index chosen on ρ. The LDCA
    /// default; descent of f_μ is not guaranteed with it.
    ExactSubgradient,
};

struct SolverConfig {
    double tol = 1e-6;  ///< stop when ‖X⁺ − X‖_F < tol
    int max_iter = 500;
    double ls_alpha = 1e-4;
    double ls_beta = 0.5;
    double ls_min_step = 1e-12;
    std::vector<double> inertial_coeffs{0.3, 0.15};  ///< α_1..α_m of M-IDCA
    ConcaveOracle oracle = ConcaveOracle::Smoothed;

    int inertial_depth() const noexcept { return static_cast<int>(inertial_coeffs.size()); }
    void validate() const;
};

struct TraceRecord {
    int iter = 0;
    double f_mu = 0.0;
    double step_norm = 0.0;      ///< ‖X^{t} − X^{t−1}‖_F
    double descent_slack = 0.0;  ///< f_μ(X^{t−1}) − f_μ(X^t) − (n/2μ)‖W^{t−1} − X^{t−1}‖²
    double gamma_ls = 0.0;       ///< accepted line-search step (0 = plain DCA point)
};

/// Record 0 holds the starting point; record t the t-th iterate.
struct SolverTrace {
    std::vector<TraceRecord> records;
};

struct SolveResult {
    Prototypes x;
    SolverTrace trace;
    bool converged = false;
    int iterations = 0;
    double final_step = 0.0;
    /// ‖∇g_μ(X*) − Y‖_F for the oracle output Y that produced X*.
    double fixed_point_residual = 0.0;
    /// ‖∇g_μ(X*) − Y(X*)‖_F with a fresh oracle call at X*.
    double stationarity_gap = 0.0;
    Matrix last_oracle;
};

struct Constants {
    double strong_convexity = 0.0;  ///< γ = n/μ
    double lipschitz = 0.0;         ///< L = n/μ + λnk
};

/// Y ∈ ∂h_μ(X): Y⁽¹⁾ rows Σ_i [(x_p − a_i)/μ − P((x_p − a_i)/μ; F°)] plus, per
/// point, gauge (sub)gradients added to every row except the active index r_i
/// (smallest index attaining min_ℓ ρ_μ).
Matrix subgradient_h(const DataSet& data, const Prototypes& x, const ModelParams& params,
                     const Gauge& gauge, ConcaveOracle oracle = ConcaveOracle::Smoothed);

/// Row p: (n/μ)(x_p − Ā) + λn Σ_{j≠p}(x_p − x_j).
Matrix grad_g(const DataSet& data, const Prototypes& x, const ModelParams& params);

/// Unique solution X⁺ of ∇g_μ(X⁺) = Y, in closed form.
Prototypes dca_update(const DataSet& data, const Matrix& y, const ModelParams& params);

SolveResult dca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                      const Gauge& gauge, const SolverConfig& cfg = {});

/// Boosted DCA: after the DCA point W, searches W + γ(W − X) for γ = 1, β, β², …
/// accepting f_μ(W + γd) ≤ f_μ(W) − αγ²‖d‖²; falls back to W below ls_min_step.
SolveResult bdca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                       const Gauge& gauge, const SolverConfig& cfg = {});

/// Multi-step inertial variant: the boosted search direction is augmented by
/// Σ_{i=1}^{min(t,m)} α_i (X^{t+1−i} − X^{t−i}). With m = 0 it matches bdca_solve.
SolveResult midca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                        const Gauge& gauge, const SolverConfig& cfg = {});

SolveResult solve(Algorithm algo, const DataSet& data, const Prototypes& x0, const ModelParams& params,
                  const Gauge& gauge, const SolverConfig& cfg = {});

Constants constants(Eigen::Index n, Eigen::Index k, double lambda, double mu);

Algorithm parse_algorithm(const std::string& name);
std::string to_string(Algorithm algo);

}  // namespace gaugeclust
