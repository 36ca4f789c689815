#include "gaugeclust/solvers.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace gaugeclust {

void SolverConfig::validate() const {
    if (!(tol > 0.0)) throw std::invalid_argument("solver tolerance must be positive");
    if (max_iter < 1) throw std::invalid_argument("max_iter must be positive");
    if (!(ls_alpha > 0.0)) throw std::invalid_argument("ls_alpha must be positive");
    if (!(ls_beta > 0.0 && ls_beta < 1.0)) throw std::invalid_argument("ls_beta must lie in (0, 1)");
    if (!(ls_min_step > 0.0)) throw std::invalid_argument("ls_min_step must be positive");
    double sum = 0.0;
    for (double a : inertial_coeffs) {
        if (!(a >= 0.0)) throw std::invalid_argument("inertial coefficients must be nonnegative");
        sum += a;
    }
    if (!(sum < 1.0)) throw std::invalid_argument("inertial coefficients must sum to less than 1");
}

namespace {

// Per-solve state: precomputed centroid plus scratch rows so the oracle loop
// does not allocate.
class Engine {
public:
    Engine(const DataSet& data, const ModelParams& params, const Gauge& gauge, ConcaveOracle oracle)
        : data_(data),
          params_(params),
          gauge_(gauge),
          oracle_(oracle),
          n_(static_cast<double>(data.n())),
          centroid_(centroid(data)),
          diff_(data.d()),
          grad_(data.d()),
          sub_(data.d()) {}

    double n() const noexcept { return n_; }

    // f_μ(X) and, when y != nullptr, Y(X) ∈ ∂h_μ(X) in one pass.
    double evaluate(const Prototypes& x, Matrix* y) {
        const auto k = x.rows();
        const double mu = params_.mu;
        if (y) {
            y->setZero(k, x.cols());
            exact_.resize(static_cast<std::size_t>(k));
            grads_.resize(k, x.cols());
        }
        double fit = 0.0;
        for (Eigen::Index i = 0; i < data_.n(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            Eigen::Index active = 0;
            for (Eigen::Index l = 0; l < k; ++l) {
                diff_ = x.row(l) - data_.points.row(i);
                const double v = gauge_.smooth_eval(mu, diff_, grad_);
                if (v < best) {
                    best = v;
                    active = l;
                }
                if (y) {
                    y->row(l) += diff_ / mu - grad_;
                    grads_.row(l) = grad_;
                    if (oracle_ == ConcaveOracle::ExactSubgradient)
                        exact_[static_cast<std::size_t>(l)] = gauge_.value(diff_);
                }
            }
            fit += best;
            if (!y || k < 2) continue;
            if (oracle_ == ConcaveOracle::Smoothed) {
                for (Eigen::Index l = 0; l < k; ++l)
                    if (l != active) y->row(l) += grads_.row(l);
            } else {
                Eigen::Index exact_active = 0;
                for (Eigen::Index l = 1; l < k; ++l)
                    if (exact_[static_cast<std::size_t>(l)] < exact_[static_cast<std::size_t>(exact_active)])
                        exact_active = l;
                for (Eigen::Index l = 0; l < k; ++l) {
                    if (l == exact_active) continue;
                    diff_ = x.row(l) - data_.points.row(i);
                    gauge_.subgradient(diff_, sub_);
                    y->row(l) += sub_;
                }
            }
        }
        return fit + fusion_penalty(x, params_.lambda, data_.n());
    }

    Prototypes update(const Matrix& y) const {
        const auto k = y.rows();
        const double mu = params_.mu;
        const double lam = params_.lambda;
        Matrix b = y;
        b.rowwise() += (n_ / mu) * centroid_;
        const Vector sigma = (mu / n_) * b.colwise().sum();
        const double denom = n_ * (1.0 / mu + lam * static_cast<double>(k));
        Prototypes out = b;
        out.rowwise() += lam * n_ * sigma;
        out /= denom;
        return out;
    }

    Matrix gradient(const Prototypes& x) const {
        const double mu = params_.mu;
        const auto k = static_cast<double>(x.rows());
        const Vector sigma = x.colwise().sum();
        Matrix out = (n_ / mu) * (x.rowwise() - centroid_);
        Matrix fusion = k * x;
        fusion.rowwise() -= sigma;
        out += params_.lambda * n_ * fusion;
        return out;
    }

private:
    const DataSet& data_;
    ModelParams params_;
    const Gauge& gauge_;
    ConcaveOracle oracle_;
    double n_;
    Vector centroid_;
    Vector diff_;
    Vector grad_;
    Vector sub_;
    Matrix grads_;
    std::vector<double> exact_;
};

void check_finite(double f, const Prototypes& x, int iter) {
    if (!std::isfinite(f)) throw NumericalError("non-finite smoothed objective", static_cast<std::size_t>(iter));
    if (!x.allFinite()) throw NumericalError("non-finite prototype entry", static_cast<std::size_t>(iter));
}

void prepare(const DataSet& data, const Prototypes& x0, const ModelParams& params, const Gauge& gauge,
             const SolverConfig& cfg) {
    data.validate();
    params.validate();
    cfg.validate();
    check_compatible(data, x0, gauge);
    if (!x0.allFinite()) throw std::invalid_argument("initial prototypes must be finite");
}

void finish(Engine& engine, const Matrix& y_used, SolveResult& res) {
    res.fixed_point_residual = (engine.gradient(res.x) - y_used).norm();
    Matrix y_fresh;
    engine.evaluate(res.x, &y_fresh);
    res.stationarity_gap = (engine.gradient(res.x) - y_fresh).norm();
    res.last_oracle = y_used;
}

SolveResult run_dca(const DataSet& data, const Prototypes& x0, const ModelParams& params, const Gauge& gauge,
                    const SolverConfig& cfg) {
    prepare(data, x0, params, gauge, cfg);
    Engine engine(data, params, gauge, cfg.oracle);
    const double descent_coeff = engine.n() / (2.0 * params.mu);

    SolveResult res;
    Prototypes x = x0;
    Matrix y;
    double f = engine.evaluate(x, &y);
    check_finite(f, x, 0);
    res.trace.records.push_back({0, f, 0.0, 0.0, 0.0});
    Matrix y_used = y;

    for (int t = 1; t <= cfg.max_iter; ++t) {
        Prototypes next = engine.update(y);
        const double step = (next - x).norm();
        y_used = y;
        const double f_next = engine.evaluate(next, &y);
        check_finite(f_next, next, t);
        res.trace.records.push_back({t, f_next, step, f - f_next - descent_coeff * step * step, 0.0});
        x = std::move(next);
        f = f_next;
        res.iterations = t;
        res.final_step = step;
        if (step < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.x = x;
    finish(engine, y_used, res);
    return res;
}

SolveResult run_boosted(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                        const Gauge& gauge, const SolverConfig& cfg, int depth) {
    prepare(data, x0, params, gauge, cfg);
    Engine engine(data, params, gauge, cfg.oracle);
    const double descent_coeff = engine.n() / (2.0 * params.mu);

    SolveResult res;
    Prototypes x = x0;
    Matrix y;
    double f = engine.evaluate(x, &y);
    check_finite(f, x, 0);
    res.trace.records.push_back({0, f, 0.0, 0.0, 0.0});
    std::deque<Matrix> history;  // history[i] = X^{t−i} − X^{t−i−1}

    Matrix y_w;
    Matrix y_trial;
    for (int t = 1; t <= cfg.max_iter; ++t) {
        const Prototypes w = engine.update(y);
        const Matrix d = w - x;
        const double dnorm = d.norm();
        if (dnorm < cfg.tol) {
            // X already solves its own DCA subproblem to tolerance.
            res.converged = true;
            res.final_step = dnorm;
            break;
        }
        const double f_w = engine.evaluate(w, &y_w);
        check_finite(f_w, w, t);

        Matrix dir = d;
        for (int i = 0; i < depth && i < static_cast<int>(history.size()); ++i)
            dir += cfg.inertial_coeffs[static_cast<std::size_t>(i)] * history[static_cast<std::size_t>(i)];
        const double dir_sq = dir.squaredNorm();

        Prototypes next = w;
        double f_next = f_w;
        double gamma = 0.0;
        if (dir_sq > 0.0) {
            for (double g = 1.0; g >= cfg.ls_min_step; g *= cfg.ls_beta) {
                Prototypes trial = w + g * dir;
                const double f_trial = engine.evaluate(trial, nullptr);
                if (std::isfinite(f_trial) && f_trial <= f_w - cfg.ls_alpha * g * g * dir_sq) {
                    next = std::move(trial);
                    f_next = f_trial;
                    gamma = g;
                    break;
                }
            }
        }
        if (gamma > 0.0) {
            f_next = engine.evaluate(next, &y_trial);
            y = y_trial;
        } else {
            y = y_w;
        }
        check_finite(f_next, next, t);

        const double step = (next - x).norm();
        res.trace.records.push_back({t, f_next, step, f - f_next - descent_coeff * dnorm * dnorm, gamma});
        if (depth > 0) {
            history.push_front(next - x);
            if (static_cast<int>(history.size()) > depth) history.pop_back();
        }
        x = std::move(next);
        f = f_next;
        res.iterations = t;
        res.final_step = step;
        if (step < cfg.tol) {
            res.converged = true;
            break;
        }
    }
    res.x = x;
    // A boosted iterate does not solve ∇g = Y for the previous Y, so the
    // residual is taken against the oracle at X* itself.
    finish(engine, y, res);
    return res;
}

}  // namespace

Matrix subgradient_h(const DataSet& data, const Prototypes& x, const ModelParams& params, const Gauge& gauge,
                     ConcaveOracle oracle) {
    params.validate();
    check_compatible(data, x, gauge);
    Engine engine(data, params, gauge, oracle);
    Matrix y;
    engine.evaluate(x, &y);
    return y;
}

Matrix grad_g(const DataSet& data, const Prototypes& x, const ModelParams& params) {
    params.validate();
    require_dim(x.cols(), data.d(), "prototypes vs data");
    const Gauge unused = Gauge::l2(static_cast<int>(data.d()));
    return Engine(data, params, unused, ConcaveOracle::Smoothed).gradient(x);
}

Prototypes dca_update(const DataSet& data, const Matrix& y, const ModelParams& params) {
    params.validate();
    require_dim(y.cols(), data.d(), "oracle output vs data");
    if (y.rows() < 1) throw DimensionError("need at least one prototype");
    const Gauge unused = Gauge::l2(static_cast<int>(data.d()));
    return Engine(data, params, unused, ConcaveOracle::Smoothed).update(y);
}

SolveResult dca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params, const Gauge& gauge,
                      const SolverConfig& cfg) {
    return run_dca(data, x0, params, gauge, cfg);
}

SolveResult bdca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params, const Gauge& gauge,
                       const SolverConfig& cfg) {
    return run_boosted(data, x0, params, gauge, cfg, 0);
}

SolveResult midca_solve(const DataSet& data, const Prototypes& x0, const ModelParams& params, const Gauge& gauge,
                        const SolverConfig& cfg) {
    return run_boosted(data, x0, params, gauge, cfg, cfg.inertial_depth());
}

SolveResult solve(Algorithm algo, const DataSet& data, const Prototypes& x0, const ModelParams& params,
                  const Gauge& gauge, const SolverConfig& cfg) {
    switch (algo) {
        case Algorithm::DCA: return dca_solve(data, x0, params, gauge, cfg);
        case Algorithm::BDCA: return bdca_solve(data, x0, params, gauge, cfg);
        case Algorithm::MIDCA: return midca_solve(data, x0, params, gauge, cfg);
    }
    throw std::invalid_argument("unknown algorithm");
}

Constants constants(Eigen::Index n, Eigen::Index k, double lambda, double mu) {
    if (n < 1 || k < 1) throw std::invalid_argument("n and k must be positive");
    if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
    const double nn = static_cast<double>(n);
    const double gamma = nn / mu;
    return {gamma, gamma + lambda * nn * static_cast<double>(k)};
}

Algorithm parse_algorithm(const std::string& name) {
    if (name == "dca") return Algorithm::DCA;
    if (name == "bdca") return Algorithm::BDCA;
    if (name == "midca") return Algorithm::MIDCA;
    throw std::invalid_argument("unknown algorithm '" + name + "' (expected dca, bdca or midca)");
}

std::string to_string(Algorithm algo) {
    switch (algo) {
        case Algorithm::DCA: return "dca";
        case Algorithm::BDCA: return "bdca";
        case Algorithm::MIDCA: return "midca";
    }
    return "unknown";
}

}  // namespace gaugeclust
