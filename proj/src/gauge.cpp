#include "gaugeclust/gauge.hpp"

#include "csv_reader.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

namespace gaugeclust {

namespace {

constexpr double kTieRel = 1e-12;
constexpr double kInteriorRadius = 1e-9;

// Calls fn(indices) for every r-subset of {0, ..., m-1} in lexicographic order.
void for_each_subset(int m, int r, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int i = 0; i < r; ++i) idx[static_cast<std::size_t>(i)] = i;
    if (r > m) return;
    while (true) {
        fn(idx);
        int i = r - 1;
        while (i >= 0 && idx[static_cast<std::size_t>(i)] == m - r + i) --i;
        if (i < 0) return;
        ++idx[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < r; ++j)
            idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
    }
}

Matrix select_rows(const Matrix& m, const std::vector<int>& rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

bool lex_less(const Vector& a, const Vector& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// Facet normals a with ⟨a, x⟩ = 1 are the vertices of {v : Pv ≤ 1}; found by
// solving every nonsingular d-subset of vertices.
Matrix enumerate_polar_vertices(const Matrix& vertices) {
    const int m = static_cast<int>(vertices.rows());
    const int d = static_cast<int>(vertices.cols());
    std::vector<Vector> found;
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(d);
    for_each_subset(m, d, [&](const std::vector<int>& subset) {
        const Matrix sub = select_rows(vertices, subset);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.rank() < d) return;
        const Vector a = lu.solve(ones).transpose();
        if ((vertices * a.transpose()).maxCoeff() > 1.0 + 1e-9) return;
        for (const auto& f : found) {
            if ((f - a).norm() <= 1e-9 * (1.0 + a.norm())) return;
        }
        found.push_back(a);
    });
    std::sort(found.begin(), found.end(), lex_less);
    Matrix out(static_cast<Eigen::Index>(found.size()), d);
    for (std::size_t i = 0; i < found.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = found[i];
    return out;
}

// The polar {v : Pv ≤ 1} is bounded iff its recession cone {u : Pu ≤ 0} is
// trivial. With rank P = d that cone is pointed, so it is nontrivial iff it has
// an extreme ray, i.e. a direction annihilated by d-1 independent vertices.
bool polar_has_recession_ray(const Matrix& vertices) {
    const int m = static_cast<int>(vertices.rows());
    const int d = static_cast<int>(vertices.cols());
    const double scale = vertices.rowwise().norm().maxCoeff();
    bool ray = false;
    auto check = [&](const Vector& u) {
        const Eigen::VectorXd s = vertices * u.transpose();
        if (s.maxCoeff() <= 1e-12 * scale) ray = true;
    };
    if (d == 1) {
        Vector u(1);
        u << 1.0;
        check(u);
        check(-u);
        return ray;
    }
    for_each_subset(m, d - 1, [&](const std::vector<int>& subset) {
        if (ray) return;
        const Matrix sub = select_rows(vertices, subset);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
        if (lu.rank() != d - 1) return;
        const Eigen::MatrixXd kernel = lu.kernel();
        Vector u = kernel.col(0).transpose();
        u /= u.norm();
        check(u);
        check(-u);
    });
    return ray;
}

}  // namespace

SmoothingParam::SmoothingParam(double mu) : mu_(mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("smoothing parameter must be positive");
}

Gauge Gauge::l1(int dim) {
    if (dim < 1) throw InvalidGauge("gauge dimension must be positive");
    Gauge g(GaugeKind::L1Ball, dim);
    g.bounds_ = {1.0, std::sqrt(static_cast<double>(dim))};
    return g;
}

Gauge Gauge::l2(int dim) {
    if (dim < 1) throw InvalidGauge("gauge dimension must be positive");
    Gauge g(GaugeKind::L2Ball, dim);
    g.bounds_ = {1.0, 1.0};
    return g;
}

Gauge Gauge::linf(int dim) {
    if (dim < 1) throw InvalidGauge("gauge dimension must be positive");
    Gauge g(GaugeKind::LinfBall, dim);
    g.bounds_ = {std::sqrt(static_cast<double>(dim)), 1.0};
    return g;
}

Gauge Gauge::weighted_l2(const Vector& weights) {
    if (weights.size() < 1) throw InvalidGauge("weighted l2 gauge needs at least one weight");
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
        if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
            throw InvalidGauge("weighted l2 gauge weights must be positive and finite");
    }
    Gauge g(GaugeKind::WeightedL2Ball, static_cast<int>(weights.size()));
    g.weights_ = weights;
    g.bounds_ = {1.0 / std::sqrt(weights.minCoeff()), std::sqrt(weights.maxCoeff())};
    return g;
}

Gauge Gauge::polytope(const Matrix& vertices, ProjectionOptions opts) {
    const auto m = vertices.rows();
    const auto d = vertices.cols();
    if (d < 1) throw InvalidGauge("polytope vertices must have positive dimension");
    if (m < d + 1) throw InvalidGauge("polytope needs at least dim+1 vertices");
    if (!vertices.allFinite()) throw InvalidGauge("polytope vertices must be finite");
    if (Eigen::FullPivLU<Eigen::MatrixXd>(vertices).rank() < d)
        throw InvalidGauge("polytope is not full-dimensional");
    if (polar_has_recession_ray(vertices))
        throw InvalidGauge("origin is not in the interior of the vertex hull");

    Gauge g(GaugeKind::PolytopeVertices, static_cast<int>(d));
    g.vertices_ = vertices;
    g.polar_vertices_ = enumerate_polar_vertices(vertices);
    if (g.polar_vertices_.rows() == 0) throw InvalidGauge("polytope has no facets");
    const double polar_norm = g.polar_vertices_.rowwise().norm().maxCoeff();
    // Facet ⟨a, x⟩ = 1 lies at distance 1/‖a‖ from the origin.
    if (1.0 / polar_norm < kInteriorRadius)
        throw InvalidGauge("origin is within 1e-9 of the vertex hull boundary");
    g.bounds_ = {vertices.rowwise().norm().maxCoeff(), polar_norm};
    const Eigen::MatrixXd gram = vertices.transpose() * vertices;
    g.vertex_gram_norm_ = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram).eigenvalues().maxCoeff();
    g.proj_ = opts;
    return g;
}

Gauge Gauge::polytope_from_csv(const std::string& path, ProjectionOptions opts) {
    const auto table = detail::read_numeric_csv(path);
    const auto d = static_cast<Eigen::Index>(table.rows.front().size());
    Matrix v(static_cast<Eigen::Index>(table.rows.size()), d);
    for (std::size_t i = 0; i < table.rows.size(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) v(static_cast<Eigen::Index>(i), j) = table.rows[i][static_cast<std::size_t>(j)];
    return polytope(v, opts);
}

std::string Gauge::describe() const {
    std::ostringstream os;
    switch (kind_) {
        case GaugeKind::L1Ball: os << "l1"; break;
        case GaugeKind::L2Ball: os << "l2"; break;
        case GaugeKind::LinfBall: os << "linf"; break;
        case GaugeKind::WeightedL2Ball:
            os << "wl2:";
            for (Eigen::Index i = 0; i < weights_.size(); ++i) os << (i ? "," : "") << weights_[i];
            break;
        case GaugeKind::PolytopeVertices: os << "poly(" << vertices_.rows() << " vertices)"; break;
    }
    return os.str();
}

double Gauge::value(RowRef z) const {
    require_dim(z.size(), dim_, "gauge value");
    switch (kind_) {
        case GaugeKind::L1Ball: return z.lpNorm<1>();
        case GaugeKind::L2Ball: return z.norm();
        case GaugeKind::LinfBall: return z.size() ? z.lpNorm<Eigen::Infinity>() : 0.0;
        case GaugeKind::WeightedL2Ball: return std::sqrt((weights_.array() * z.array().square()).sum());
        case GaugeKind::PolytopeVertices:
            return std::max(0.0, (polar_vertices_ * z.transpose()).maxCoeff());
    }
    return 0.0;
}

void Gauge::polar_project(RowRef v, RowOut out) const {
    require_dim(v.size(), dim_, "polar projection");
    switch (kind_) {
        case GaugeKind::L1Ball:
            out = v.cwiseMax(-1.0).cwiseMin(1.0);
            return;
        case GaugeKind::L2Ball: {
            const double nv = v.norm();
            if (nv <= 1.0) out = v;
            else out = v / nv;
            return;
        }
        case GaugeKind::LinfBall: {
            // Sort-based projection onto the unit l1 ball.
            const double l1 = v.lpNorm<1>();
            if (l1 <= 1.0) {
                out = v;
                return;
            }
            std::vector<double> mags(static_cast<std::size_t>(v.size()));
            for (Eigen::Index i = 0; i < v.size(); ++i) mags[static_cast<std::size_t>(i)] = std::abs(v[i]);
            std::sort(mags.begin(), mags.end(), std::greater<>());
            double cumsum = 0.0;
            double theta = 0.0;
            for (std::size_t j = 0; j < mags.size(); ++j) {
                cumsum += mags[j];
                const double t = (cumsum - 1.0) / static_cast<double>(j + 1);
                if (mags[j] > t) theta = t;
            }
            for (Eigen::Index i = 0; i < v.size(); ++i) {
                const double mag = std::max(std::abs(v[i]) - theta, 0.0);
                out[i] = v[i] < 0.0 ? -mag : mag;
            }
            return;
        }
        case GaugeKind::WeightedL2Ball: project_ellipsoid(v, out); return;
        case GaugeKind::PolytopeVertices: project_polytope(v, out); return;
    }
}

Vector Gauge::polar_project(RowRef v) const {
    Vector out(v.size());
    polar_project(v, out);
    return out;
}

// F° = {v : Σ v_i² / w_i ≤ 1}. Outside points project to y_i = v_i w_i / (w_i + t)
// where t > 0 solves Σ w_i v_i² / (w_i + t)² = 1; the left side is convex and
// decreasing in t, so Newton from t = 0 increases monotonically to the root.
void Gauge::project_ellipsoid(RowRef v, RowOut out) const {
    const auto& w = weights_;
    const double inside = (v.array().square() / w.array()).sum();
    if (inside <= 1.0) {
        out = v;
        return;
    }
    double t = 0.0;
    for (int it = 0; it < 200; ++it) {
        const Eigen::Array<double, 1, Eigen::Dynamic> denom = w.array() + t;
        const Eigen::Array<double, 1, Eigen::Dynamic> wv2 = w.array() * v.array().square();
        const double phi = (wv2 / denom.square()).sum() - 1.0;
        const double dphi = -2.0 * (wv2 / denom.cube()).sum();
        const double step = phi / dphi;
        t -= step;
        if (std::abs(step) <= 1e-15 * (1.0 + t)) break;
    }
    out = (v.array() * w.array() / (w.array() + t)).matrix();
}

// Projection onto {v : Pv ≤ 1}: accelerated projected gradient on the dual
// variables θ ≥ 0 (v = y − Pᵀθ), with an exact equality-constrained solve on the
// current support of θ tried periodically.
void Gauge::project_polytope(RowRef y, RowOut out) const {
    const Matrix& P = vertices_;
    const Eigen::VectorXd py = P * y.transpose();
    if (py.maxCoeff() <= 1.0) {
        out = y;
        return;
    }
    const auto m = P.rows();
    const double step = 1.0 / vertex_gram_norm_;
    const double scale = 1.0 + y.norm();
    const double tol = proj_.tol;

    auto try_active_set = [&](const Eigen::VectorXd& theta, Vector& candidate) {
        std::vector<int> active;
        for (Eigen::Index j = 0; j < m; ++j)
            if (theta[j] > 0.0) active.push_back(static_cast<int>(j));
        if (active.empty()) return false;
        const Matrix pa = select_rows(P, active);
        const Eigen::MatrixXd gram = pa * pa.transpose();
        const Eigen::VectorXd rhs = pa * y.transpose() - Eigen::VectorXd::Ones(pa.rows());
        const Eigen::VectorXd mult = gram.completeOrthogonalDecomposition().solve(rhs);
        if (mult.minCoeff() < -tol) return false;
        candidate = y - mult.transpose() * pa;
        const Eigen::VectorXd s = P * candidate.transpose();
        if (s.maxCoeff() > 1.0 + tol) return false;
        if (((pa * candidate.transpose()).array() - 1.0).abs().maxCoeff() > tol) return false;
        return true;
    };

    Eigen::VectorXd theta = Eigen::VectorXd::Zero(m);
    Eigen::VectorXd zeta = theta;
    double t = 1.0;
    double residual = 0.0;
    Vector candidate(y.size());
    for (int it = 1; it <= proj_.max_iter; ++it) {
        const Vector w = y - zeta.transpose() * P;
        const Eigen::VectorXd grad = Eigen::VectorXd::Ones(m) - P * w.transpose();
        const Eigen::VectorXd next = (zeta - step * grad).cwiseMax(0.0);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        if ((zeta - next).dot(next - theta) > 0.0) {
            // Gradient-based restart keeps the momentum from overshooting.
            zeta = next;
            t = 1.0;
        } else {
            zeta = next + ((t - 1.0) / t_next) * (next - theta);
            t = t_next;
        }
        theta = next;

        if (it % 8 == 0 || it == proj_.max_iter) {
            if (try_active_set(theta, candidate)) {
                out = candidate;
                return;
            }
            const Vector v = y - theta.transpose() * P;
            const Eigen::VectorXd s = P * v.transpose();
            const double infeas = std::max(0.0, s.maxCoeff() - 1.0);
            const double gap = std::abs(theta.dot(Eigen::VectorXd::Ones(m) - s));
            residual = std::max(infeas, gap / scale);
            if (residual <= tol) {
                // Radial pull-back lands exactly in the star-shaped polar.
                out = v / std::max(1.0, s.maxCoeff());
                return;
            }
        }
    }
    throw ConvergenceError("polytope polar projection did not converge", residual);
}

void Gauge::subgradient(RowRef z, RowOut out) const {
    require_dim(z.size(), dim_, "gauge subgradient");
    if (z.isZero(0.0)) {
        out.setZero();
        return;
    }
    switch (kind_) {
        case GaugeKind::L2Ball: out = z / z.norm(); return;
        case GaugeKind::WeightedL2Ball: out = (weights_.array() * z.array()).matrix() / value(z); return;
        case GaugeKind::L1Ball: {
            // Vertices of the l-infinity ball; a zero coordinate ties ±1 and
            // the lexicographic rule picks −1.
            const double tie = kTieRel * z.lpNorm<Eigen::Infinity>();
            for (Eigen::Index i = 0; i < z.size(); ++i) out[i] = z[i] > tie ? 1.0 : -1.0;
            return;
        }
        case GaugeKind::LinfBall: {
            const double top = z.lpNorm<Eigen::Infinity>();
            const double tie = kTieRel * top;
            Vector best;
            for (Eigen::Index i = 0; i < z.size(); ++i) {
                if (std::abs(z[i]) < top - tie) continue;
                Vector cand = Vector::Zero(z.size());
                cand[i] = z[i] > 0.0 ? 1.0 : -1.0;
                if (best.size() == 0 || lex_less(cand, best)) best = cand;
            }
            out = best;
            return;
        }
        case GaugeKind::PolytopeVertices: {
            const Eigen::VectorXd scores = polar_vertices_ * z.transpose();
            const double top = scores.maxCoeff();
            const double tie = kTieRel * std::max(1.0, std::abs(top));
            Eigen::Index best = -1;
            for (Eigen::Index j = 0; j < scores.size(); ++j) {
                if (scores[j] < top - tie) continue;
                if (best < 0 || lex_less(polar_vertices_.row(j), polar_vertices_.row(best))) best = j;
            }
            out = polar_vertices_.row(best);
            return;
        }
    }
}

Vector Gauge::subgradient(RowRef z) const {
    Vector out(z.size());
    subgradient(z, out);
    return out;
}

double Gauge::smooth_eval(double mu, RowRef z, RowOut grad) const {
    // ρ_μ(z) = ‖z‖²/(2μ) − (μ/2) d(z/μ; F°)², evaluated through the maximizer
    // w = P(z/μ; F°) as ⟨z, w⟩ − (μ/2)‖w‖² to avoid cancellation for small μ.
    grad = z / mu;
    polar_project(grad, grad);
    return z.dot(grad) - 0.5 * mu * grad.squaredNorm();
}

double Gauge::smooth_value(SmoothingParam mu, RowRef z) const {
    Vector grad(z.size());
    return smooth_eval(mu.value(), z, grad);
}

Vector Gauge::smooth_gradient(SmoothingParam mu, RowRef z) const {
    Vector grad(z.size());
    smooth_eval(mu.value(), z, grad);
    return grad;
}

bool Gauge::in_polar(RowRef v, double tol) const {
    require_dim(v.size(), dim_, "polar membership");
    switch (kind_) {
        case GaugeKind::L1Ball: return v.lpNorm<Eigen::Infinity>() <= 1.0 + tol;
        case GaugeKind::L2Ball: return v.norm() <= 1.0 + tol;
        case GaugeKind::LinfBall: return v.lpNorm<1>() <= 1.0 + tol;
        case GaugeKind::WeightedL2Ball:
            return std::sqrt((v.array().square() / weights_.array()).sum()) <= 1.0 + tol;
        case GaugeKind::PolytopeVertices: return (vertices_ * v.transpose()).maxCoeff() <= 1.0 + tol;
    }
    return false;
}

}  // namespace gaugeclust
