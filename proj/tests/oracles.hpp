#pragma once

// Reference computations used only by the tests. None of these call into the
// library's solver or projection code.

#include "gaugeclust/gauge.hpp"
#include "gaugeclust/model.hpp"
#include "gaugeclust/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

using gaugeclust::Matrix;
using gaugeclust::Vector;

// Point-in-convex-polygon test for a 2-D vertex list in any order.
inline bool in_polygon(const Matrix& verts, double px, double py) {
    const Eigen::Index m = verts.rows();
    double cx = verts.col(0).mean(), cy = verts.col(1).mean();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::atan2(verts(a, 1) - cy, verts(a, 0) - cx) < std::atan2(verts(b, 1) - cy, verts(b, 0) - cx);
    });
    for (std::size_t s = 0; s < order.size(); ++s) {
        auto a = order[s], b = order[(s + 1) % order.size()];
        double cross = (verts(b, 0) - verts(a, 0)) * (py - verts(a, 1)) - (verts(b, 1) - verts(a, 1)) * (px - verts(a, 0));
        if (cross < -1e-15) return false;
    }
    return true;
}

// Gauge of a 2-D polygon by bisection on t with the membership test z/t ∈ F.
inline double polygon_gauge(const Matrix& verts, double zx, double zy) {
    if (zx == 0.0 && zy == 0.0) return 0.0;
    double lo = 0.0, hi = 1.0;
    while (!in_polygon(verts, zx / hi, zy / hi)) hi *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (in_polygon(verts, zx / mid, zy / mid)) hi = mid;
        else lo = mid;
    }
    return hi;
}

// max over a dense sample of the unit disc of ⟨z,v⟩ − (μ/2)‖v‖².
inline double sampled_l2_smooth(double zx, double zy, double mu, int radial = 2000, int angular = 2000) {
    double best = 0.0;
    for (int r = 0; r <= radial; ++r) {
        double rad = static_cast<double>(r) / radial;
        for (int a = 0; a < angular; ++a) {
            double th = 2.0 * M_PI * a / angular;
            double vx = rad * std::cos(th), vy = rad * std::sin(th);
            best = std::max(best, zx * vx + zy * vy - 0.5 * mu * rad * rad);
        }
    }
    return best;
}

// Dense (kd)×(kd) assembly of ∇g_μ(X) = Y, solved by full-pivot LU.
// ∇g_μ(X)_p = (n/μ)(x_p − Ā) + λn Σ_{j≠p}(x_p − x_j).
inline Matrix dense_dca_update(const Matrix& points, const Matrix& y, double lambda, double mu) {
    const Eigen::Index n = points.rows(), d = points.cols(), k = y.rows();
    const Vector abar = points.colwise().mean();
    const Eigen::Index dim = k * d;
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::VectorXd rhs(dim);
    const double nn = static_cast<double>(n);
    for (Eigen::Index p = 0; p < k; ++p) {
        for (Eigen::Index c = 0; c < d; ++c) {
            Eigen::Index row = p * d + c;
            h(row, row) += nn / mu;
            for (Eigen::Index j = 0; j < k; ++j) {
                if (j == p) continue;
                h(row, row) += lambda * nn;
                h(row, j * d + c) -= lambda * nn;
            }
            rhs(row) = y(p, c) + nn / mu * abar(c);
        }
    }
    Eigen::VectorXd sol = h.fullPivLu().solve(rhs);
    Matrix out(k, d);
    for (Eigen::Index p = 0; p < k; ++p)
        for (Eigen::Index c = 0; c < d; ++c) out(p, c) = sol(p * d + c);
    return out;
}

// Central differences of a scalar function of a matrix.
inline Matrix fd_gradient(const std::function<double(const Matrix&)>& f, const Matrix& x, double h = 1e-5) {
    Matrix g(x.rows(), x.cols());
    Matrix probe = x;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double keep = probe(i, j);
            probe(i, j) = keep + h;
            double fp = f(probe);
            probe(i, j) = keep - h;
            double fm = f(probe);
            probe(i, j) = keep;
            g(i, j) = (fp - fm) / (2.0 * h);
        }
    }
    return g;
}

// ARI from explicit pair enumeration: Hubert–Arabie form on the four pair counts.
inline double pair_count_ari(const std::vector<int>& a, const std::vector<int>& b) {
    const std::size_t n = a.size();
    double ss = 0, sd = 0, ds = 0, dd = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            bool sa = a[i] == a[j], sb = b[i] == b[j];
            if (sa && sb) ++ss;
            else if (sa) ++sd;
            else if (sb) ++ds;
            else ++dd;
        }
    double num = 2.0 * (ss * dd - sd * ds);
    double den = (ss + sd) * (sd + dd) + (ss + ds) * (ds + dd);
    return den == 0.0 ? 1.0 : num / den;
}

// Exact objective by direct loops, independent of the library's evaluation order.
inline double direct_objective(const Matrix& a, const Matrix& x, double lambda,
                               const std::function<double(const Vector&)>& rho) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        double best = INFINITY;
        for (Eigen::Index l = 0; l < x.rows(); ++l) best = std::min(best, rho(x.row(l) - a.row(i)));
        total += best;
    }
    double pairs = 0.0;
    for (Eigen::Index s = 0; s < x.rows(); ++s)
        for (Eigen::Index t = s + 1; t < x.rows(); ++t) pairs += (x.row(s) - x.row(t)).squaredNorm();
    return total + 0.5 * lambda * static_cast<double>(a.rows()) * pairs;
}

inline Matrix random_matrix(gaugeclust::SplitMix64& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) m(i, j) = scale * (2.0 * rng.uniform() - 1.0);
    return m;
}

}  // namespace oracle
