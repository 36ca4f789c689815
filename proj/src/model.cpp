#include "gaugeclust/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gaugeclust {

void DataSet::validate() const {
    if (points.rows() < 1) throw std::invalid_argument("data set must contain at least one point");
    if (points.cols() < 1) throw std::invalid_argument("data points must have positive dimension");
    if (!points.allFinite()) throw std::invalid_argument("data set contains non-finite values");
    if (labels && static_cast<Eigen::Index>(labels->size()) != points.rows())
        throw std::invalid_argument("label count does not match point count");
}

void ModelParams::validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("lambda must be nonnegative");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be positive");
}

std::vector<std::vector<int>> Assignment::primary_members(Eigen::Index k) const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < primary.size(); ++i) out[static_cast<std::size_t>(primary[i])].push_back(static_cast<int>(i));
    return out;
}

void check_compatible(const DataSet& data, const Prototypes& x, const Gauge& gauge) {
    if (x.rows() < 1) throw DimensionError("need at least one prototype");
    require_dim(data.d(), gauge.dim(), "data vs gauge");
    require_dim(x.cols(), gauge.dim(), "prototypes vs gauge");
    if (data.n() < 1) throw DimensionError("data set is empty");
}

double fusion_penalty(const Prototypes& x, double lambda, Eigen::Index n) {
    if (lambda == 0.0 || x.rows() < 2) return 0.0;
    const Vector mean = x.colwise().mean();
    const double spread = (x.rowwise() - mean).squaredNorm();
    return 0.5 * lambda * static_cast<double>(n) * static_cast<double>(x.rows()) * spread;
}

double objective(const DataSet& data, const Prototypes& x, double lambda, const Gauge& gauge) {
    check_compatible(data, x, gauge);
    Vector diff(x.cols());
    double fit = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < x.rows(); ++l) {
            diff = x.row(l) - data.points.row(i);
            best = std::min(best, gauge.value(diff));
        }
        fit += best;
    }
    return fit + fusion_penalty(x, lambda, data.n());
}

double smoothed_objective(const DataSet& data, const Prototypes& x, const ModelParams& params,
                          const Gauge& gauge) {
    check_compatible(data, x, gauge);
    params.validate();
    Vector diff(x.cols());
    Vector grad(x.cols());
    double fit = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < x.rows(); ++l) {
            diff = x.row(l) - data.points.row(i);
            best = std::min(best, gauge.smooth_eval(params.mu, diff, grad));
        }
        fit += best;
    }
    return fit + fusion_penalty(x, params.lambda, data.n());
}

double convex_part(const DataSet& data, const Prototypes& x, const ModelParams& params,
                   const Gauge& gauge) {
    check_compatible(data, x, gauge);
    params.validate();
    double sq = 0.0;
    for (Eigen::Index i = 0; i < data.n(); ++i)
        for (Eigen::Index l = 0; l < x.rows(); ++l) sq += (x.row(l) - data.points.row(i)).squaredNorm();
    return sq / (2.0 * params.mu) + fusion_penalty(x, params.lambda, data.n());
}

ConcaveParts concave_parts(const DataSet& data, const Prototypes& x, const ModelParams& params,
                           const Gauge& gauge) {
    check_compatible(data, x, gauge);
    params.validate();
    const double mu = params.mu;
    Vector diff(x.cols());
    Vector proj(x.cols());
    ConcaveParts parts;
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        double sum = 0.0;
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < x.rows(); ++l) {
            diff = x.row(l) - data.points.row(i);
            const double smooth = gauge.smooth_eval(mu, diff, proj);
            parts.distance_term += 0.5 * mu * (diff / mu - proj).squaredNorm();
            sum += smooth;
            best = std::min(best, smooth);
        }
        // max_r Σ_{ℓ≠r} = Σ_ℓ − min_ℓ; for k = 1 the inner sum is empty.
        if (x.rows() > 1) parts.max_term += sum - best;
    }
    return parts;
}

double concave_part(const DataSet& data, const Prototypes& x, const ModelParams& params,
                    const Gauge& gauge) {
    return concave_parts(data, x, params, gauge).total();
}

Assignment assign(const DataSet& data, const Prototypes& x, const Gauge& gauge) {
    check_compatible(data, x, gauge);
    const auto n = data.n();
    const auto k = x.rows();
    Assignment out;
    out.primary.resize(static_cast<std::size_t>(n));
    out.nearest.resize(static_cast<std::size_t>(n));
    out.members.resize(static_cast<std::size_t>(k));
    std::vector<double> values(static_cast<std::size_t>(k));
    Vector diff(x.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (Eigen::Index l = 0; l < k; ++l) {
            diff = x.row(l) - data.points.row(i);
            values[static_cast<std::size_t>(l)] = gauge.value(diff);
            best = std::min(best, values[static_cast<std::size_t>(l)]);
        }
        auto& near = out.nearest[static_cast<std::size_t>(i)];
        for (Eigen::Index l = 0; l < k; ++l) {
            if (values[static_cast<std::size_t>(l)] - best <= kNearestTieRel * best) {
                near.push_back(static_cast<int>(l));
                out.members[static_cast<std::size_t>(l)].push_back(static_cast<int>(i));
            }
        }
        out.primary[static_cast<std::size_t>(i)] = near.front();
    }
    return out;
}

EffectiveClusters effective_clusters(const DataSet& data, const Prototypes& x, const Gauge& gauge,
                                     double dedup_tol) {
    if (!(dedup_tol >= 0.0)) throw std::invalid_argument("dedup tolerance must be nonnegative");
    const Assignment a = assign(data, x, gauge);
    EffectiveClusters out;
    for (Eigen::Index l = 0; l < x.rows(); ++l) {
        bool placed = false;
        for (auto& group : out.groups) {
            if ((x.row(group.front()) - x.row(l)).norm() <= dedup_tol) {
                group.push_back(static_cast<int>(l));
                placed = true;
                break;
            }
        }
        if (!placed) out.groups.push_back({static_cast<int>(l)});
    }
    for (const auto& group : out.groups) {
        const bool owns = std::any_of(group.begin(), group.end(), [&](int l) {
            return !a.members[static_cast<std::size_t>(l)].empty();
        });
        out.owns_points.push_back(owns);
        if (owns) ++out.count;
    }
    return out;
}

double center_spread(const Prototypes& x) {
    double total = 0.0;
    for (Eigen::Index s = 0; s < x.rows(); ++s)
        for (Eigen::Index t = s + 1; t < x.rows(); ++t) total += (x.row(s) - x.row(t)).norm();
    return total;
}

Vector centroid(const DataSet& data) { return data.points.colwise().mean(); }

}  // namespace gaugeclust
