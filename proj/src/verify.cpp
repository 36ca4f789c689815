#include "gaugeclust/verify.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace gaugeclust {

namespace {

constexpr int kGridPoints = 200;
constexpr int kMinRounds = 3;
constexpr int kMaxRounds = 12;
constexpr int kPolishSweeps = 50;
constexpr double kPolishStep = 1e-6;
constexpr std::size_t kCandidates = 4;
constexpr int kBlocks = 8;

// A one-dimensional gauge is determined by its two slopes.
struct Objective1D {
    std::vector<double> a;
    double up = 1.0;    // ρ(+1)
    double down = 1.0;  // ρ(−1)
    double fusion = 0.0;  // λn/2

    double rho(double z) const { return z >= 0.0 ? up * z : -down * z; }

    double operator()(const std::array<double, 3>& x, int k) const {
        double f = 0.0;
        for (double ai : a) {
            double best = rho(x[0] - ai);
            for (int l = 1; l < k; ++l) best = std::min(best, rho(x[static_cast<std::size_t>(l)] - ai));
            f += best;
        }
        double pen = 0.0;
        for (int s = 0; s < k; ++s)
            for (int t = s + 1; t < k; ++t) {
                const double diff = x[static_cast<std::size_t>(s)] - x[static_cast<std::size_t>(t)];
                pen += diff * diff;
            }
        return f + fusion * pen;
    }
};

struct Candidate {
    double value;
    std::array<double, 3> x;
};

bool better(const Candidate& a, const Candidate& b, int k) {
    if (a.value != b.value) return a.value < b.value;
    for (int l = 0; l < k; ++l)
        if (a.x[static_cast<std::size_t>(l)] != b.x[static_cast<std::size_t>(l)])
            return a.x[static_cast<std::size_t>(l)] < b.x[static_cast<std::size_t>(l)];
    return false;
}

// Scans the ordered grid over the per-axis windows [lo_j, hi_j]. The grid is
// cut into `blocks` slabs per axis; the best configuration of each block is
// kept and the `keep` best of those are returned, best first.
std::vector<Candidate> scan(const Objective1D& f, int k, const std::array<double, 3>& lo,
                            const std::array<double, 3>& hi, int blocks, std::size_t keep) {
    std::array<double, 3> h{};
    for (int j = 0; j < k; ++j) {
        const auto js = static_cast<std::size_t>(j);
        h[js] = (hi[js] - lo[js]) / (kGridPoints - 1);
    }
    const int per_block = (kGridPoints + blocks - 1) / blocks;
    std::size_t cells = 1;
    for (int j = 0; j < k; ++j) cells *= static_cast<std::size_t>(blocks);
    std::vector<Candidate> best(cells, Candidate{std::numeric_limits<double>::infinity(), {}});

    std::array<double, 3> x{};
    std::array<int, 3> idx{};
    auto coord = [&](int j, int i) {
        const auto js = static_cast<std::size_t>(j);
        return i == kGridPoints - 1 ? hi[js] : lo[js] + i * h[js];
    };
    auto offer = [&] {
        std::size_t cell = 0;
        for (int j = 0; j < k; ++j) cell = cell * static_cast<std::size_t>(blocks) + static_cast<std::size_t>(idx[static_cast<std::size_t>(j)] / per_block);
        const Candidate c{f(x, k), x};
        if (better(c, best[cell], k)) best[cell] = c;
    };
    for (idx[0] = 0; idx[0] < kGridPoints; ++idx[0]) {
        x[0] = coord(0, idx[0]);
        if (k == 1) {
            offer();
            continue;
        }
        for (idx[1] = 0; idx[1] < kGridPoints; ++idx[1]) {
            x[1] = coord(1, idx[1]);
            if (x[1] < x[0]) continue;
            if (k == 2) {
                offer();
                continue;
            }
            for (idx[2] = 0; idx[2] < kGridPoints; ++idx[2]) {
                x[2] = coord(2, idx[2]);
                if (x[2] < x[1]) continue;
                offer();
            }
        }
    }

    std::vector<Candidate> out;
    for (const auto& c : best)
        if (std::isfinite(c.value)) out.push_back(c);
    std::sort(out.begin(), out.end(), [k](const auto& p, const auto& q) { return better(p, q, k); });
    if (out.size() > keep) out.resize(keep);
    return out;
}

void polish(const Objective1D& f, int k, Candidate& c) {
    for (int sweep = 0; sweep < kPolishSweeps; ++sweep) {
        for (int j = 0; j < k; ++j) {
            for (double dir : {1.0, -1.0}) {
                auto trial = c.x;
                trial[static_cast<std::size_t>(j)] += dir * kPolishStep;
                const double v = f(trial, k);
                if (v < c.value) c = {v, trial};
            }
        }
    }
}

}  // namespace

BruteForceResult brute_force_global(const DataSet& data, int k, double lambda, const Gauge& gauge,
                                    double resolution) {
    data.validate();
    if (data.d() != 1) throw DimensionError("brute_force_global: data must be one-dimensional");
    require_dim(gauge.dim(), 1, "brute_force_global gauge");
    if (k < 1 || k > 3) throw std::invalid_argument("brute_force_global: k must be 1, 2 or 3");
    if (!(resolution > 0.0)) throw std::invalid_argument("brute_force_global: resolution must be positive");
    if (!(lambda >= 0.0)) throw std::invalid_argument("brute_force_global: lambda must be nonnegative");

    Objective1D f;
    f.a.assign(data.points.data(), data.points.data() + data.n());
    Vector unit(1);
    unit(0) = 1.0;
    f.up = gauge.value(unit);
    unit(0) = -1.0;
    f.down = gauge.value(unit);
    f.fusion = 0.5 * lambda * static_cast<double>(data.n());

    const auto [amin, amax] = std::minmax_element(f.a.begin(), f.a.end());
    const double span = *amax - *amin;
    const double margin = span > 0.0 ? 0.1 * span : 1.0;
    const double dom_lo = *amin - margin;
    const double dom_hi = *amax + margin;

    std::array<double, 3> lo{dom_lo, dom_lo, dom_lo};
    std::array<double, 3> hi{dom_hi, dom_hi, dom_hi};
    double h = (dom_hi - dom_lo) / (kGridPoints - 1);
    auto candidates = scan(f, k, lo, hi, kBlocks, kCandidates);

    int rounds = 1;
    Candidate best = candidates.front();
    std::vector<Candidate> refined = candidates;
    while (rounds < kMinRounds || (h > resolution && rounds < kMaxRounds)) {
        const double width = 2.0 * h;
        for (auto& c : refined) {
            std::array<double, 3> wlo{};
            std::array<double, 3> whi{};
            for (int j = 0; j < k; ++j) {
                const auto js = static_cast<std::size_t>(j);
                wlo[js] = std::max(dom_lo, c.x[js] - width);
                whi[js] = std::min(dom_hi, c.x[js] + width);
            }
            const auto local = scan(f, k, wlo, whi, 1, 1);
            if (better(local.front(), c, k)) c = local.front();
        }
        h = 2.0 * width / (kGridPoints - 1);
        ++rounds;
    }
    for (auto& c : refined) {
        polish(f, k, c);
        if (better(c, best, k)) best = c;
    }

    BruteForceResult res;
    res.value = best.value;
    res.x.resize(k, 1);
    std::sort(best.x.begin(), best.x.begin() + k);
    for (int l = 0; l < k; ++l) res.x(l, 0) = best.x[static_cast<std::size_t>(l)];
    const double dims = static_cast<double>(k);
    const double n = static_cast<double>(data.n());
    const double lip = std::sqrt(dims) * (n * std::max(f.up, f.down) + lambda * n * (dims - 1.0) * (dom_hi - dom_lo));
    res.resolution_slack = lip * 0.5 * h * std::sqrt(dims);
    res.rounds = rounds;
    return res;
}

const char* OptimalityReport::verdict() const noexcept {
    if (!applicable) return "not applicable";
    return all_pass ? "necessary condition holds" : "necessary condition violated";
}

namespace {

struct Phi {
    const DataSet& data;
    const std::vector<int>& members;
    const Gauge& gauge;
    double quad = 0.0;  // λn
    Matrix others;      // x̄_j, j ≠ ℓ

    double exact(const Vector& x) const {
        double v = 0.0;
        for (int i : members) v += gauge.value(x - data.points.row(i));
        for (Eigen::Index j = 0; j < others.rows(); ++j) v += 0.5 * quad * (x - others.row(j)).squaredNorm();
        return v;
    }

    double smooth(const Vector& x, double mu, Vector& grad) const {
        double v = 0.0;
        grad.setZero(x.size());
        Vector w(x.size());
        for (int i : members) {
            v += gauge.smooth_eval(mu, x - data.points.row(i), w);
            grad += w;
        }
        for (Eigen::Index j = 0; j < others.rows(); ++j) {
            const Vector diff = x - others.row(j);
            v += 0.5 * quad * diff.squaredNorm();
            grad += quad * diff;
        }
        return v;
    }
};

// Gradient descent with backtracking and a growing trial step. Returns the
// final gradient norm.
double descend(const Phi& phi, double mu, Vector& x, double grad_tol, int max_iter) {
    Vector g(x.size());
    Vector trial_grad(x.size());
    double fx = phi.smooth(x, mu, g);
    double step = mu;
    for (int it = 0; it < max_iter; ++it) {
        const double gn2 = g.squaredNorm();
        if (std::sqrt(gn2) <= grad_tol) return std::sqrt(gn2);
        step *= 2.0;
        for (;;) {
            const Vector trial = x - step * g;
            const double ft = phi.smooth(trial, mu, trial_grad);
            if (ft <= fx - 0.5 * step * gn2) {
                x = trial;
                fx = ft;
                g = trial_grad;
                break;
            }
            step *= 0.5;
            if (step < 1e-300) return std::sqrt(gn2);
        }
    }
    return g.norm();
}

// 0 ∈ ∂φ(a_p) when the smooth part's gradient, negated, lies in c·F°, c being
// the number of member points at a_p. Uses one subgradient per other point,
// so a pass certifies but a failure proves nothing.
bool certify_kink(const Phi& phi, const Vector& p) {
    Vector s = Vector::Zero(p.size());
    int at = 0;
    for (int i : phi.members) {
        const Vector z = p - phi.data.points.row(i);
        if (z.isZero(0.0)) {
            ++at;
            continue;
        }
        s += phi.gauge.subgradient(z);
    }
    for (Eigen::Index j = 0; j < phi.others.rows(); ++j) s += phi.quad * (p - phi.others.row(j));
    if (at == 0) return false;
    return phi.gauge.in_polar(-s / static_cast<double>(at), 1e-9);
}

}  // namespace

OptimalityReport check_center_optimality(const DataSet& data, const Prototypes& xbar, double lambda,
                                         const Gauge& gauge, const OptimalityOptions& opts) {
    check_compatible(data, xbar, gauge);
    if (!(lambda >= 0.0)) throw std::invalid_argument("check_center_optimality: lambda must be nonnegative");
    const auto asg = assign(data, xbar, gauge);
    const auto k = xbar.rows();

    OptimalityReport rep;
    for (const auto& l : asg.nearest) {
        rep.singleton.push_back(l.size() == 1);
        rep.applicable = rep.applicable && l.size() == 1;
    }

    for (Eigen::Index l = 0; l < k; ++l) {
        Phi phi{data, asg.members[static_cast<std::size_t>(l)], gauge, lambda * static_cast<double>(data.n()),
                Matrix(k - 1, xbar.cols())};
        for (Eigen::Index j = 0, r = 0; j < k; ++j)
            if (j != l) phi.others.row(r++) = xbar.row(j);

        CenterCheck c;
        c.index = static_cast<int>(l);
        const Vector center = xbar.row(l);
        c.phi_center = phi.exact(center);

        const bool constant = phi.members.empty() && (phi.quad == 0.0 || k == 1);
        if (constant) {
            c.minimizer = center;
            c.phi_min = c.phi_center;
        } else {
            Vector x = center;
            double grad_norm = 0.0;
            for (double mu = 1.0; mu > opts.smoothing * 1.000001; mu *= 0.1) descend(phi, mu, x, opts.grad_tol, 2000);
            grad_norm = descend(phi, opts.smoothing, x, opts.grad_tol, opts.max_iter_per_stage);

            c.minimizer = x;
            c.phi_min = phi.exact(x);
            bool certified_any = false;
            for (int i : phi.members) {
                const Vector p = data.points.row(i);
                const bool cert = certify_kink(phi, p);
                certified_any = certified_any || cert;
                const double v = phi.exact(p);
                if (v < c.phi_min || (cert && v <= c.phi_min)) {
                    c.minimizer = p;
                    c.phi_min = v;
                    c.kink_certified = cert;
                }
            }
            if (grad_norm > opts.grad_tol && !certified_any) {
                throw ConvergenceError("check_center_optimality: minimization of phi_" + std::to_string(l) +
                                           " did not converge",
                                       grad_norm);
            }
            // The center itself is also feasible.
            if (c.phi_center < c.phi_min) {
                c.minimizer = center;
                c.phi_min = c.phi_center;
                c.kink_certified = false;
            }
        }
        c.gap = c.phi_center - c.phi_min;
        c.pass = c.gap <= opts.tol;
        rep.all_pass = rep.all_pass && c.pass;
        rep.centers.push_back(std::move(c));
    }
    return rep;
}

StabilityProbe value_stability_probe(const DataSet& a, const DataSet& b, int k, double lambda,
                                     const Gauge& gauge, double resolution) {
    if (a.n() != b.n() || a.d() != b.d()) throw DimensionError("value_stability_probe: data shapes differ");
    const auto va = brute_force_global(a, k, lambda, gauge, resolution);
    const auto vb = brute_force_global(b, k, lambda, gauge, resolution);
    StabilityProbe p;
    p.value_a = va.value;
    p.value_b = vb.value;
    p.lhs = std::abs(va.value - vb.value);
    p.rhs = gauge.norm_bounds().polar_norm * std::sqrt(static_cast<double>(a.n())) * (a.points - b.points).norm();
    p.slack = std::max(va.resolution_slack, vb.resolution_slack);
    p.pass = p.lhs <= p.rhs + 2.0 * p.slack;
    return p;
}

DescentAudit descent_audit(const SolverTrace& trace, Eigen::Index n, double mu, double rel_tol) {
    DescentAudit audit;
    const double coeff = static_cast<double>(n) / (2.0 * mu);
    const auto& r = trace.records;
    for (std::size_t t = 1; t < r.size(); ++t) {
        const double scale = std::max(1.0, std::abs(r[t - 1].f_mu));
        double slack;
        if (r[t].gamma_ls > 0.0) {
            slack = std::min(r[t].descent_slack, r[t - 1].f_mu - r[t].f_mu) / scale;
        } else {
            slack = (r[t - 1].f_mu - r[t].f_mu - coeff * r[t].step_norm * r[t].step_norm) / scale;
        }
        if (audit.worst_index < 0 || slack < audit.worst_slack) {
            audit.worst_slack = slack;
            audit.worst_index = static_cast<int>(t);
        }
        if (slack < -rel_tol && audit.first_failure < 0) {
            audit.first_failure = static_cast<int>(t);
            audit.pass = false;
        }
    }
    return audit;
}

}  // namespace gaugeclust
