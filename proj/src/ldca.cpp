#include "gaugeclust/ldca.hpp"

#include "gaugeclust/data.hpp"
#include "gaugeclust/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <thread>

namespace gaugeclust {

Prototypes kmeanspp_init(const DataSet& data, int k0, const Gauge& gauge, std::uint64_t seed) {
    data.validate();
    require_dim(data.d(), gauge.dim(), "kmeanspp_init");
    const auto n = data.n();
    if (k0 < 1) throw std::invalid_argument("kmeanspp_init: k0 must be at least 1");
    if (k0 > n) {
        throw std::invalid_argument("kmeanspp_init: k0 = " + std::to_string(k0) + " exceeds n = " +
                                    std::to_string(n));
    }
    SplitMix64 rng(seed);
    Prototypes x(k0, data.d());
    std::vector<bool> chosen(static_cast<std::size_t>(n), false);
    std::vector<double> dist(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());

    auto take = [&](Eigen::Index i, int slot) {
        chosen[static_cast<std::size_t>(i)] = true;
        x.row(slot) = data.points.row(i);
        for (Eigen::Index j = 0; j < n; ++j) {
            const double r = gauge.value(x.row(slot) - data.points.row(j));
            dist[static_cast<std::size_t>(j)] = std::min(dist[static_cast<std::size_t>(j)], r * r);
        }
    };

    take(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))), 0);
    for (int slot = 1; slot < k0; ++slot) {
        double total = 0.0;
        for (double w : dist) total += w;
        Eigen::Index pick = -1;
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            for (Eigen::Index j = 0; j < n; ++j) {
                const double w = dist[static_cast<std::size_t>(j)];
                if (w <= 0.0) continue;
                acc += w;
                pick = j;
                if (acc > target) break;
            }
        }
        if (pick < 0) {
            std::vector<Eigen::Index> free;
            for (Eigen::Index j = 0; j < n; ++j)
                if (!chosen[static_cast<std::size_t>(j)]) free.push_back(j);
            pick = free[rng.below(free.size())];
        }
        take(pick, slot);
    }
    return x;
}

namespace {

Prototypes keep_rows(const Prototypes& x, const std::vector<int>& rows) {
    Prototypes out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    return out;
}

}  // namespace

LdcaResult ldca_from(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                     const Gauge& gauge, const LdcaConfig& cfg) {
    if (cfg.max_rounds < 1) throw std::invalid_argument("ldca: max_rounds must be at least 1");
    check_compatible(data, x0, gauge);
    params.validate();

    LdcaResult res;
    Prototypes x = x0;
    for (int round = 0; round < cfg.max_rounds; ++round) {
        const auto k = x.rows();
        res.k_history.push_back(static_cast<int>(k));
        SolveResult inner;
        try {
            inner = solve(cfg.inner, data, x, params, gauge, cfg.solver);
        } catch (const std::exception& e) {
            throw SolveFailure("LDCA round " + std::to_string(round) + " (k = " + std::to_string(k) +
                                   "): " + e.what(),
                               round);
        }
        res.converged = res.converged && inner.converged;
        res.traces.push_back(std::move(inner.trace));
        x = std::move(inner.x);
        res.rounds = round + 1;

        if (!cfg.allow_deletion || k == 1) break;
        const auto members = assign(data, x, gauge).primary_members(k);
        std::vector<int> keep;
        for (Eigen::Index l = 0; l < k; ++l)
            if (!members[static_cast<std::size_t>(l)].empty()) keep.push_back(static_cast<int>(l));
        if (static_cast<Eigen::Index>(keep.size()) == k) break;
        x = keep_rows(x, keep);
    }

    res.assignment = assign(data, x, gauge);
    const auto eff = effective_clusters(data, x, gauge, cfg.dedup_tol);
    res.k_eff = eff.count;
    std::vector<int> rep(static_cast<std::size_t>(x.rows()));
    for (const auto& group : eff.groups)
        for (int l : group) rep[static_cast<std::size_t>(l)] = group.front();
    res.labels.resize(res.assignment.primary.size());
    for (std::size_t i = 0; i < res.labels.size(); ++i)
        res.labels[i] = rep[static_cast<std::size_t>(res.assignment.primary[i])];
    res.x = std::move(x);
    return res;
}

LdcaResult ldca_k(const DataSet& data, int k0, const ModelParams& params, const Gauge& gauge,
                  const LdcaConfig& cfg, std::uint64_t seed) {
    return ldca_from(data, kmeanspp_init(data, k0, gauge, seed), params, gauge, cfg);
}

Prototypes merge_duplicates(const Prototypes& x, double tol) {
    std::vector<int> reps;
    for (Eigen::Index l = 0; l < x.rows(); ++l) {
        bool dup = false;
        for (int r : reps) {
            if ((x.row(l) - x.row(r)).norm() <= tol) {
                dup = true;
                break;
            }
        }
        if (!dup) reps.push_back(static_cast<int>(l));
    }
    return keep_rows(x, reps);
}

std::vector<double> geomspace(double a, double b, int count) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("geomspace: endpoints must be positive");
    if (count < 1) throw std::invalid_argument("geomspace: count must be at least 1");
    std::vector<double> v(static_cast<std::size_t>(count));
    if (count == 1) {
        v[0] = a;
        return v;
    }
    const double la = std::log(a);
    const double step = (std::log(b) - la) / (count - 1);
    for (int i = 0; i < count; ++i) v[static_cast<std::size_t>(i)] = std::exp(la + step * i);
    v.front() = a;
    v.back() = b;
    return v;
}

PathSchedule PathSchedule::geometric(int count, double lambda_start, double lambda_end, double mu_start,
                                     double mu_end) {
    PathSchedule s{geomspace(lambda_start, lambda_end, count), geomspace(mu_start, mu_end, count)};
    s.validate();
    return s;
}

void PathSchedule::validate() const {
    if (lambda_values.empty()) throw std::invalid_argument("path schedule is empty");
    if (lambda_values.size() != mu_values.size())
        throw std::invalid_argument("path schedule: lambda and mu lengths differ");
    for (std::size_t i = 0; i < lambda_values.size(); ++i) {
        if (!(lambda_values[i] >= 0.0) || !(mu_values[i] > 0.0))
            throw std::invalid_argument("path schedule: need lambda >= 0 and mu > 0");
        if (i > 0 && !(lambda_values[i] > lambda_values[i - 1]))
            throw std::invalid_argument("path schedule: lambda must increase strictly");
        if (i > 0 && !(mu_values[i] < mu_values[i - 1]))
            throw std::invalid_argument("path schedule: mu must decrease strictly");
    }
}

ClusterSizeStats size_stats(const std::vector<int>& labels) {
    std::map<int, int> counts;
    for (int l : labels) ++counts[l];
    ClusterSizeStats s;
    if (counts.empty()) return s;
    s.min = std::numeric_limits<int>::max();
    double sum = 0.0;
    for (const auto& [label, c] : counts) {
        s.min = std::min(s.min, c);
        s.max = std::max(s.max, c);
        sum += c;
    }
    s.mean = sum / static_cast<double>(counts.size());
    double var = 0.0;
    for (const auto& [label, c] : counts) var += (c - s.mean) * (c - s.mean);
    s.std = std::sqrt(var / static_cast<double>(counts.size()));
    return s;
}

int PathResult::failures() const {
    return static_cast<int>(std::count_if(records.begin(), records.end(), [](const auto& r) { return r.failed; }));
}

namespace {

void fill_from_fit(const DataSet& data, const LdcaResult& fit, PathRecord& rec) {
    rec.k_eff = fit.k_eff;
    rec.sizes = size_stats(fit.labels);
    if (data.labels) rec.ari = ari(*data.labels, fit.labels);
    rec.center_spread = center_spread(fit.x);
    rec.converged = fit.converged;
}

// Stats for a step whose solve failed, evaluated at the prototypes carried over.
LdcaResult carry_over(const DataSet& data, const Prototypes& x, const Gauge& gauge, double dedup_tol) {
    LdcaResult fit;
    fit.x = x;
    fit.assignment = assign(data, x, gauge);
    const auto eff = effective_clusters(data, x, gauge, dedup_tol);
    fit.k_eff = std::max(eff.count, 1);
    std::vector<int> rep(static_cast<std::size_t>(x.rows()));
    for (const auto& group : eff.groups)
        for (int l : group) rep[static_cast<std::size_t>(l)] = group.front();
    for (int p : fit.assignment.primary) fit.labels.push_back(rep[static_cast<std::size_t>(p)]);
    fit.converged = false;
    return fit;
}

}  // namespace

PathResult run_path(const DataSet& data, const PathSchedule& schedule, const Gauge& gauge,
                    const PathOptions& opts) {
    schedule.validate();
    PathResult out;
    Prototypes x = kmeanspp_init(data, opts.k0, gauge, opts.seed);
    for (int t = 0; t < schedule.size(); ++t) {
        PathRecord rec;
        rec.step = t;
        rec.lambda = schedule.lambda_values[static_cast<std::size_t>(t)];
        rec.mu = schedule.mu_values[static_cast<std::size_t>(t)];
        out.inits.push_back(x);
        LdcaResult fit;
        try {
            fit = ldca_from(data, x, ModelParams{rec.lambda, rec.mu}, gauge, opts.ldca);
        } catch (const std::exception& e) {
            rec.failed = true;
            rec.error = e.what();
            fit = carry_over(data, x, gauge, opts.ldca.dedup_tol);
        }
        fill_from_fit(data, fit, rec);
        if (!rec.failed) x = merge_duplicates(fit.x, opts.ldca.dedup_tol);
        out.survivors.push_back(x);
        out.labels.push_back(std::move(fit.labels));
        out.records.push_back(std::move(rec));
    }
    return out;
}

int worker_threads() {
    if (const char* env = std::getenv("GAUGE_CLUSTER_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 1024L));
    }
    return static_cast<int>(std::max(1U, std::thread::hardware_concurrency()));
}

std::vector<GridCell> run_grid(const DataSet& data, const std::vector<double>& lambda_values,
                               const std::vector<double>& mu_values, const Gauge& gauge,
                               const PathOptions& opts, int threads) {
    if (lambda_values.empty() || mu_values.empty()) throw std::invalid_argument("run_grid: empty axis");
    const Prototypes x0 = kmeanspp_init(data, opts.k0, gauge, opts.seed);
    const std::size_t cells = lambda_values.size() * mu_values.size();
    std::vector<GridCell> out(cells);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t c = next++; c < cells; c = next++) {
            GridCell& cell = out[c];
            cell.lambda_index = static_cast<int>(c / mu_values.size());
            cell.mu_index = static_cast<int>(c % mu_values.size());
            cell.lambda = lambda_values[static_cast<std::size_t>(cell.lambda_index)];
            cell.mu = mu_values[static_cast<std::size_t>(cell.mu_index)];
            try {
                const auto fit = ldca_from(data, x0, ModelParams{cell.lambda, cell.mu}, gauge, opts.ldca);
                cell.k_eff = fit.k_eff;
                if (data.labels) cell.ari = ari(*data.labels, fit.labels);
                cell.center_spread = center_spread(fit.x);
                cell.converged = fit.converged;
            } catch (const std::exception& e) {
                cell.failed = true;
                cell.error = e.what();
            }
        }
    };

    if (threads <= 0) threads = worker_threads();
    threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(threads), cells));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

std::pair<int, int> longest_constant_run(const std::vector<int>& ks, std::size_t first) {
    std::pair<int, int> best{0, 0};
    int len = 0;
    for (std::size_t i = first; i < ks.size(); ++i) {
        len = (i > first && ks[i] == ks[i - 1]) ? len + 1 : 1;
        if (len > best.second) best = {ks[i], len};
    }
    return best;
}

int modal_value(const std::vector<int>& ks) {
    if (ks.empty()) throw std::invalid_argument("modal_value: empty input");
    std::map<int, int> counts;
    for (int k : ks) ++counts[k];
    int best = counts.begin()->first;
    for (const auto& [k, c] : counts)
        if (c > counts[best]) best = k;
    return best;
}

}  // namespace gaugeclust
