#include "cli.hpp"

#include "gaugeclust/data.hpp"
#include "gaugeclust/io.hpp"
#include "gaugeclust/ldca.hpp"
#include "gaugeclust/rng.hpp"
#include "gaugeclust/verify.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gaugeclust::cli {

namespace {

// Input/setup problems map to exit code 2, solver/verification problems to 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Gauge parse_gauge(const std::string& spec, int dim) {
    if (spec == "l1") return Gauge::l1(dim);
    if (spec == "l2") return Gauge::l2(dim);
    if (spec == "linf") return Gauge::linf(dim);
    if (spec.rfind("wl2:", 0) == 0) {
        std::vector<double> w;
        std::stringstream ss(spec.substr(4));
        std::string item;
        while (std::getline(ss, item, ',')) {
            try {
                std::size_t used = 0;
                w.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw UsageError("bad weight '" + item + "' in gauge spec");
            }
        }
        Vector v(static_cast<Eigen::Index>(w.size()));
        for (std::size_t i = 0; i < w.size(); ++i) v(static_cast<Eigen::Index>(i)) = w[i];
        require_dim(v.size(), dim, "gauge weights");
        return Gauge::weighted_l2(v);
    }
    if (spec.rfind("poly:", 0) == 0) {
        auto g = Gauge::polytope_from_csv(spec.substr(5));
        require_dim(g.dim(), dim, "polytope vertices");
        return g;
    }
    throw UsageError("unknown gauge '" + spec + "' (expected l1, l2, linf, wl2:w1,w2,... or poly:<file>)");
}

ConcaveOracle parse_oracle(const std::string& s) {
    if (s == "smoothed") return ConcaveOracle::Smoothed;
    if (s == "exact") return ConcaveOracle::ExactSubgradient;
    throw UsageError("unknown oracle '" + s + "' (expected smoothed or exact)");
}


// Options shared by fit, path and grid.
struct Common {
    std::string input;
    bool labels = false;
    bool standardize = false;
    std::string gauge = "l2";
    int k0 = 10;
    std::string algo = "dca";
    std::string oracle = "exact";
    double tol = 1e-6;
    int max_iter = 500;
    std::uint64_t seed = 0;
    std::string output = "-";
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("-i,--input", c.input, "Data CSV")->required();
    cmd->add_flag("--labels", c.labels, "Last CSV column holds integer labels");
    cmd->add_flag("--standardize", c.standardize, "Standardize columns before fitting");
    cmd->add_option("--gauge", c.gauge, "l1 | l2 | linf | wl2:w1,w2,... | poly:<vertices.csv>");
    cmd->add_option("--k0", c.k0, "Initial prototype count")->check(CLI::PositiveNumber);
    cmd->add_option("--algo", c.algo, "Inner solver: dca | bdca | midca");
    cmd->add_option("--oracle", c.oracle, "Concave-part linearization: exact | smoothed");
    cmd->add_option("--tol", c.tol, "Inner stopping tolerance on the step norm")->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", c.max_iter, "Inner iteration cap")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Seed for initialization");
    cmd->add_option("-o,--output", c.output, "Output path, - for stdout");
}

struct Loaded {
    DataSet data;
    Gauge gauge;
    LdcaConfig ldca;
};

Loaded load(const Common& c) {
    DataSet data;
    try {
        data = load_csv(c.input, c.labels);
        if (c.standardize) data = standardize(data);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    Gauge gauge = [&] {
        try {
            return parse_gauge(c.gauge, static_cast<int>(data.d()));
        } catch (const UsageError&) {
            throw;
        } catch (const std::exception& e) {
            throw UsageError(e.what());
        }
    }();
    LdcaConfig cfg;
    try {
        cfg.inner = parse_algorithm(c.algo);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    cfg.solver.oracle = parse_oracle(c.oracle);
    cfg.solver.tol = c.tol;
    cfg.solver.max_iter = c.max_iter;
    return {std::move(data), std::move(gauge), cfg};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        return;
    }
    try {
        write_text(path, text);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
}

Prototypes uniform_init(const DataSet& data, int k, std::uint64_t seed) {
    const Vector lo = data.points.colwise().minCoeff();
    const Vector hi = data.points.colwise().maxCoeff();
    auto rng = SplitMix64::stream(seed, 0x1217, 0);
    Prototypes x(k, data.d());
    for (int l = 0; l < k; ++l)
        for (Eigen::Index j = 0; j < data.d(); ++j) x(l, j) = lo(j) + rng.uniform() * (hi(j) - lo(j));
    return x;
}

// ---- gen -------------------------------------------------------------------

int cmd_gen(const std::string& name, std::uint64_t seed, const std::string& output, std::ostream& out) {
    DataSet data;
    try {
        data = generate(name, seed);
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    std::ostringstream ss;
    write_csv(ss, data);
    emit(output, ss.str(), out);
    return kOk;
}

// ---- fit -------------------------------------------------------------------

struct FitOpts {
    double lambda = 0.3;
    double mu = 0.05;
    int restarts = 1;
    bool no_delete = false;
    bool no_trace = false;
    std::string init = "kmeans++";
};

Json fit_json(const Common& c, const FitOpts& f, const Loaded& in, const LdcaResult& fit, int best_restart,
              double best_value) {
    Json j;
    j["command"] = "fit";
    j["gauge"] = c.gauge;
    j["lambda"] = f.lambda;
    j["mu"] = f.mu;
    j["k0"] = c.k0;
    j["algo"] = c.algo;
    j["oracle"] = c.oracle;
    j["seed"] = c.seed;
    j["restarts"] = f.restarts;
    j["best_restart"] = best_restart;
    j["n"] = in.data.n();
    j["d"] = in.data.d();
    j["k_eff"] = fit.k_eff;
    j["objective"] = best_value;
    j["smoothed_objective"] = smoothed_objective(in.data, fit.x, ModelParams{f.lambda, f.mu}, in.gauge);
    j["center_spread"] = center_spread(fit.x);
    const auto sizes = size_stats(fit.labels);
    j["sizes"] = {{"min", sizes.min}, {"max", sizes.max}, {"mean", sizes.mean}, {"std", sizes.std}};
    if (in.data.labels) j["ari"] = ari(*in.data.labels, fit.labels);
    j["converged"] = fit.converged;
    j["rounds"] = fit.rounds;
    j["k_history"] = fit.k_history;
    j["prototypes"] = to_json(fit.x);
    j["labels"] = fit.labels;

    bool pass = true;
    bool any = false;
    double worst = 0.0;
    Json rounds = Json::array();
    for (const auto& t : fit.traces) {
        const auto a = descent_audit(t, in.data.n(), f.mu);
        pass = pass && a.pass;
        if (a.worst_index >= 0) {
            worst = any ? std::min(worst, a.worst_slack) : a.worst_slack;
            any = true;
        }
        rounds.push_back(to_json(a));
    }
    // The inequality is a theorem only for the smoothed oracle.
    j["descent_audit"] = {{"pass", pass},
                          {"guaranteed", c.oracle == "smoothed"},
                          {"worst_slack", worst},
                          {"rounds", rounds}};
    if (!f.no_trace) {
        Json traces = Json::array();
        for (const auto& t : fit.traces) traces.push_back(to_json(t));
        j["traces"] = traces;
    }
    return j;
}

int cmd_fit(const Common& c, const FitOpts& f, std::ostream& out) {
    const auto in = load(c);
    if (f.restarts < 1) throw UsageError("--restarts must be at least 1");
    if (f.init != "kmeans++" && f.init != "uniform") throw UsageError("--init must be kmeans++ or uniform");
    try {
        ModelParams{f.lambda, f.mu}.validate();
        in.ldca.solver.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (f.init == "kmeans++" && c.k0 > in.data.n())
        throw UsageError("--k0 exceeds the number of points (use --init uniform)");

    LdcaConfig cfg = in.ldca;
    cfg.allow_deletion = !f.no_delete;
    const ModelParams params{f.lambda, f.mu};

    LdcaResult best;
    double best_value = 0.0;
    int best_restart = -1;
    try {
        for (int r = 0; r < f.restarts; ++r) {
            const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(r);
            const Prototypes x0 = f.init == "uniform" ? uniform_init(in.data, c.k0, seed)
                                                      : kmeanspp_init(in.data, c.k0, in.gauge, seed);
            auto fit = ldca_from(in.data, x0, params, in.gauge, cfg);
            const double value = objective(in.data, fit.x, f.lambda, in.gauge);
            if (best_restart < 0 || value < best_value) {
                best = std::move(fit);
                best_value = value;
                best_restart = r;
            }
        }
    } catch (const std::exception& e) {
        Json diag{{"command", "fit"}, {"error", e.what()}};
        emit(c.output, diag.dump(2) + "\n", out);
        return kFailure;
    }
    emit(c.output, fit_json(c, f, in, best, best_restart, best_value).dump(2) + "\n", out);
    return kOk;
}

// ---- path ------------------------------------------------------------------

struct PathOpts {
    int steps = 100;
    double lambda_start = 1e-2;
    double lambda_end = 2.0;
    double mu_start = 2.0;
    double mu_end = 1e-4;
    std::string json;
    std::string plot;
};

std::string default_plot_path(const std::string& output) {
    if (output.empty() || output == "-") return "";
    const auto dot = output.rfind('.');
    const auto slash = output.rfind('/');
    const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
    return (has_ext ? output.substr(0, dot) : output) + "_plot.csv";
}

int cmd_path(const Common& c, const PathOpts& p, std::ostream& out, std::ostream& err) {
    const auto in = load(c);
    PathSchedule schedule;
    try {
        schedule = PathSchedule::geometric(p.steps, p.lambda_start, p.lambda_end, p.mu_start, p.mu_end);
        in.ldca.solver.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (c.k0 > in.data.n()) throw UsageError("--k0 exceeds the number of points");
    PathOptions opts;
    opts.k0 = c.k0;
    opts.ldca = in.ldca;
    opts.seed = c.seed;
    const auto res = run_path(in.data, schedule, in.gauge, opts);

    std::ostringstream csv;
    write_path_csv(csv, res.records);
    emit(c.output, csv.str(), out);
    if (!p.json.empty()) emit(p.json, path_to_json(res.records).dump(2) + "\n", out);
    const std::string plot = p.plot.empty() ? default_plot_path(c.output) : p.plot;
    if (!plot.empty()) {
        std::ostringstream ss;
        ss << "step,lambda,mu,k_eff\n";
        for (const auto& r : res.records)
            ss << r.step << ',' << format_double(r.lambda) << ',' << format_double(r.mu) << ',' << r.k_eff << '\n';
        emit(plot, ss.str(), out);
    }
    const int failed = res.failures();
    for (const auto& r : res.records)
        if (r.failed) err << "step " << r.step << " failed: " << r.error << '\n';
    return failed * 10 <= static_cast<int>(res.records.size()) ? kOk : kFailure;
}

// ---- grid ------------------------------------------------------------------

struct GridOpts {
    int n_lambda = 20;
    int n_mu = 20;
    double lambda_start = 1e-2;
    double lambda_end = 2.0;
    double mu_start = 2.0;
    double mu_end = 1e-4;
    int threads = 0;
    std::string summary;
};

int cmd_grid(const Common& c, const GridOpts& g, std::ostream& out) {
    const auto in = load(c);
    std::vector<double> lambdas;
    std::vector<double> mus;
    try {
        lambdas = geomspace(g.lambda_start, g.lambda_end, g.n_lambda);
        mus = geomspace(g.mu_start, g.mu_end, g.n_mu);
        in.ldca.solver.validate();
    } catch (const std::exception& e) {
        throw UsageError(e.what());
    }
    if (c.k0 > in.data.n()) throw UsageError("--k0 exceeds the number of points");
    PathOptions opts;
    opts.k0 = c.k0;
    opts.ldca = in.ldca;
    opts.seed = c.seed;
    const auto cells = run_grid(in.data, lambdas, mus, in.gauge, opts, g.threads);

    std::ostringstream csv;
    write_grid_csv(csv, cells);
    emit(c.output, csv.str(), out);
    if (!g.summary.empty()) {
        std::map<int, int> counts;
        int failed = 0;
        for (const auto& cell : cells) {
            if (cell.failed) ++failed;
            else ++counts[cell.k_eff];
        }
        Json frac = Json::object();
        for (const auto& [k, n] : counts) frac[std::to_string(k)] = static_cast<double>(n) / static_cast<double>(cells.size());
        Json s{{"cells", cells.size()}, {"failed", failed}, {"k_eff_fraction", frac}};
        emit(g.summary, s.dump(2) + "\n", out);
    }
    return kOk;
}

// ---- verify ----------------------------------------------------------------

DataSet line_data(std::initializer_list<double> values) {
    DataSet d;
    d.points.resize(static_cast<Eigen::Index>(values.size()), 1);
    Eigen::Index i = 0;
    for (double v : values) d.points(i++, 0) = v;
    return d;
}

Json suite_three_centers(bool& pass) {
    const auto g = Gauge::l2(1);
    const auto res = brute_force_global(line_data({0.0, 1.0}), 3, 1.0, g);
    bool ok = std::abs(res.value - 5.0 / 6.0) <= 1e-4;
    for (Eigen::Index l = 1; l < 3; ++l) ok = ok && std::abs(res.x(l, 0) - res.x(l - 1, 0) - 1.0 / 6.0) <= 1e-3;
    pass = pass && ok;
    return {{"name", "three centers on two points"}, {"expected_value", 5.0 / 6.0}, {"pass", ok}, {"oracle", to_json(res)}};
}

Json suite_nonoptimal(bool& pass) {
    const auto g = Gauge::l2(1);
    Prototypes xbar(2, 1);
    xbar << 0.0, 2.0;
    const auto rep = check_center_optimality(line_data({0.0, 2.0}), xbar, 0.5, g);
    bool ok = rep.applicable && !rep.centers[0].pass && !rep.centers[1].pass &&
              std::abs(rep.centers[0].minimizer(0) - 1.0) <= 1e-4;
    pass = pass && ok;
    return {{"name", "non-optimal centers"},
            {"expected", "both centers fail, argmin phi_1 = 1"},
            {"pass", ok},
            {"report", to_json(rep)}};
}

Json suite_crossover(bool& pass) {
    const auto g = Gauge::l2(1);
    const auto data = line_data({0.0, 3.0, 4.0});
    Json rows = Json::array();
    bool ok = true;
    for (double lam : {0.05, 0.1, 0.15, 0.2, 0.25}) {
        Prototypes far(2, 1);
        far << 3.0, 4.0;
        Prototypes near(2, 1);
        near << 0.0, 3.0;
        const double f_far = objective(data, far, lam, g);
        const double f_near = objective(data, near, lam, g);
        const bool row_ok = std::abs(f_far - (3.0 + 1.5 * lam)) <= 1e-12 && std::abs(f_near - (1.0 + 13.5 * lam)) <= 1e-12 &&
                            ((f_near < f_far) == (lam < 1.0 / 6.0));
        ok = ok && row_ok;
        rows.push_back({{"lambda", lam}, {"f_34", f_far}, {"f_03", f_near}, {"pass", row_ok}});
    }
    Prototypes xbar(2, 1);
    xbar << 3.0, 4.0;
    const auto rep = check_center_optimality(data, xbar, 0.1, g);
    ok = ok && rep.all_pass;
    const auto bf = brute_force_global(data, 2, 0.1, g);
    ok = ok && bf.value <= 2.35 + bf.resolution_slack;
    pass = pass && ok;
    return {{"name", "fusion crossover"},
            {"pass", ok},
            {"evaluations", rows},
            {"center_check", to_json(rep)},
            {"oracle", to_json(bf)}};
}

Json suite_stability(int probes, std::uint64_t seed, bool& pass) {
    const auto g = Gauge::l2(1);
    SplitMix64 rng(seed);
    int passed = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int p = 0; p < probes; ++p) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(5));
        const int k = 1 + static_cast<int>(rng.below(2));
        const double lambda = rng.uniform();
        DataSet a;
        a.points.resize(n, 1);
        DataSet b;
        b.points.resize(n, 1);
        for (Eigen::Index i = 0; i < n; ++i) {
            a.points(i, 0) = 4.0 * rng.uniform() - 2.0;
            b.points(i, 0) = a.points(i, 0) + 0.5 * (2.0 * rng.uniform() - 1.0);
        }
        const auto probe = value_stability_probe(a, b, k, lambda, g);
        if (probe.pass) ++passed;
        worst = std::min(worst, probe.rhs + 2.0 * probe.slack - probe.lhs);
    }
    const bool ok = passed == probes;
    pass = pass && ok;
    return {{"name", "value stability"}, {"probes", probes}, {"passed", passed}, {"worst_margin", probes ? worst : 0.0}, {"pass", ok}};
}

Json audit_trace_file(const std::string& path, Eigen::Index n_flag, double mu_flag, bool& pass) {
    Json j;
    try {
        j = Json::parse(read_file(path));
    } catch (const std::exception& e) {
        throw UsageError("cannot read trace '" + path + "': " + e.what());
    }
    std::vector<SolverTrace> traces;
    Eigen::Index n = n_flag;
    double mu = mu_flag;
    try {
        if (j.is_object()) {
            if (n <= 0) n = j.at("n").get<Eigen::Index>();
            if (!(mu > 0.0)) mu = j.at("mu").get<double>();
            if (j.contains("traces")) {
                for (const auto& t : j.at("traces")) traces.push_back(trace_from_json(t));
            } else {
                traces.push_back(trace_from_json(j.at("trace")));
            }
        } else {
            traces.push_back(trace_from_json(j));
        }
    } catch (const std::exception& e) {
        throw UsageError("malformed trace '" + path + "': " + e.what());
    }
    if (n <= 0 || !(mu > 0.0)) throw UsageError("trace audit needs --n and --mu");
    Json rounds = Json::array();
    bool ok = true;
    for (const auto& t : traces) {
        const auto a = descent_audit(t, n, mu);
        ok = ok && a.pass;
        rounds.push_back(to_json(a));
    }
    pass = pass && ok;
    return {{"name", "descent audit"}, {"trace", path}, {"pass", ok}, {"rounds", rounds}};
}

struct VerifyOpts {
    std::string suite = "all";
    std::string trace;
    Eigen::Index n = 0;
    double mu = 0.0;
    int probes = 100;
    std::uint64_t seed = 0;
    std::string output = "-";
};

int cmd_verify(const VerifyOpts& v, std::ostream& out, std::ostream& err) {
    static const std::vector<std::string> known{"all", "three-centers", "nonoptimal", "crossover", "stability", "none"};
    if (std::find(known.begin(), known.end(), v.suite) == known.end())
        throw UsageError("unknown suite '" + v.suite + "'");
    bool pass = true;
    Json checks = Json::array();
    const bool all = v.suite == "all";
    if (all || v.suite == "three-centers") checks.push_back(suite_three_centers(pass));
    if (all || v.suite == "nonoptimal") checks.push_back(suite_nonoptimal(pass));
    if (all || v.suite == "crossover") checks.push_back(suite_crossover(pass));
    if (all || v.suite == "stability") checks.push_back(suite_stability(v.probes, v.seed, pass));
    if (!v.trace.empty()) checks.push_back(audit_trace_file(v.trace, v.n, v.mu, pass));
    Json report{{"command", "verify"}, {"pass", pass}, {"checks", checks}};
    emit(v.output, report.dump(2) + "\n", out);
    if (!pass) {
        for (const auto& c : checks)
            if (!c.at("pass").get<bool>()) err << "failed: " << c.at("name").get<std::string>() << '\n';
    }
    return pass ? kOk : kFailure;
}

// ---- eval ------------------------------------------------------------------

inline constexpr double kSpreadEdges[] = {0.01, 1.0, 2.0, 5.0, 10.0, 25.0};

std::string spread_bin(double s) {
    if (s < kSpreadEdges[0]) return "< 0.01";
    for (std::size_t b = 1; b < std::size(kSpreadEdges); ++b)
        if (s < kSpreadEdges[b]) return "[" + format_double(kSpreadEdges[b - 1]) + ", " + format_double(kSpreadEdges[b]) + ")";
    return ">= 25";
}

int spread_bin_index(double s) {
    int b = 0;
    while (b < static_cast<int>(std::size(kSpreadEdges)) && s >= kSpreadEdges[b]) ++b;
    return b;
}

struct EvalOpts {
    std::vector<std::string> fits;
    std::string input;
    bool standardize = false;
    std::string output = "-";
};

int cmd_eval(const EvalOpts& e, std::ostream& out) {
    DataSet data;
    try {
        data = load_csv(e.input, true);
        if (e.standardize) data = standardize(data);
    } catch (const std::exception& ex) {
        throw UsageError(ex.what());
    }
    Json rows = Json::array();
    struct Acc {
        std::vector<double> k;
        std::vector<double> a;
    };
    std::map<int, Acc> bins;
    for (const auto& path : e.fits) {
        Json fit;
        std::vector<int> labels;
        Matrix x;
        try {
            fit = Json::parse(read_file(path));
            labels = fit.at("labels").get<std::vector<int>>();
            x = matrix_from_json(fit.at("prototypes"));
        } catch (const std::exception& ex) {
            throw UsageError("cannot read fit '" + path + "': " + ex.what());
        }
        if (static_cast<Eigen::Index>(labels.size()) != data.n())
            throw UsageError("fit '" + path + "' has " + std::to_string(labels.size()) + " labels, data has " +
                             std::to_string(data.n()) + " points");
        if (x.cols() != data.d()) throw UsageError("fit '" + path + "' prototypes have the wrong dimension");
        const double score = ari(*data.labels, labels);
        const double spread = center_spread(x);
        std::vector<int> distinct = labels;
        std::sort(distinct.begin(), distinct.end());
        const int k_eff = static_cast<int>(std::unique(distinct.begin(), distinct.end()) - distinct.begin());
        const auto sizes = size_stats(labels);
        rows.push_back({{"fit", path},
                        {"ari", score},
                        {"k_eff", k_eff},
                        {"center_spread", spread},
                        {"spread_bin", spread_bin(spread)},
                        {"sizes", {{"min", sizes.min}, {"max", sizes.max}, {"mean", sizes.mean}, {"std", sizes.std}}}});
        auto& acc = bins[spread_bin_index(spread)];
        acc.k.push_back(k_eff);
        acc.a.push_back(score);
    }
    auto mean_std = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0.0;
        for (double x : v) s += (x - m) * (x - m);
        return std::pair{m, std::sqrt(s / static_cast<double>(v.size()))};
    };
    Json table = Json::array();
    for (const auto& [b, acc] : bins) {
        const auto [km, ks] = mean_std(acc.k);
        const auto [am, as] = mean_std(acc.a);
        const double rep = b == 0 ? 0.0 : kSpreadEdges[b - 1];
        table.push_back({{"center_distance", spread_bin(rep)},
                         {"mean_k_eff", km},
                         {"std_k_eff", ks},
                         {"mean_ari", am},
                         {"std_ari", as},
                         {"count", acc.k.size()}});
    }
    Json report{{"command", "eval"}, {"results", rows}, {"table", table}};
    emit(e.output, report.dump(2) + "\n", out);
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Gauge-based multifacility clustering with Laplacian fusion"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    std::string gen_name;
    std::uint64_t gen_seed = 0;
    std::string gen_out = "-";
    auto* gen = app.add_subcommand("gen", "Write a synthetic dataset as CSV");
    gen->add_option("name", gen_name, "laplace3 | laplace4 | gauss4")->required();
    gen->add_option("--seed", gen_seed, "Generator seed");
    gen->add_option("-o,--output", gen_out, "Output CSV, - for stdout");

    Common fit_c;
    FitOpts fit_o;
    auto* fit = app.add_subcommand("fit", "LDCA-K fit at one (lambda, mu)");
    add_common(fit, fit_c);
    fit->add_option("--lambda", fit_o.lambda, "Fusion weight")->check(CLI::NonNegativeNumber);
    fit->add_option("--mu", fit_o.mu, "Smoothing parameter")->check(CLI::PositiveNumber);
    fit->add_option("--restarts", fit_o.restarts, "Independent starts; the best exact objective is kept");
    fit->add_flag("--no-delete", fit_o.no_delete, "Keep all k0 prototypes");
    fit->add_flag("--no-trace", fit_o.no_trace, "Omit per-iteration traces (the audit is still included)");
    fit->add_option("--init", fit_o.init, "kmeans++ | uniform");

    Common path_c;
    PathOpts path_o;
    auto* path = app.add_subcommand("path", "Warm-started regularization path");
    add_common(path, path_c);
    path->add_option("--steps", path_o.steps, "Number of path steps")->check(CLI::PositiveNumber);
    path->add_option("--lambda-start", path_o.lambda_start)->check(CLI::PositiveNumber);
    path->add_option("--lambda-end", path_o.lambda_end)->check(CLI::PositiveNumber);
    path->add_option("--mu-start", path_o.mu_start)->check(CLI::PositiveNumber);
    path->add_option("--mu-end", path_o.mu_end)->check(CLI::PositiveNumber);
    path->add_option("--json", path_o.json, "Also write the records as JSON");
    path->add_option("--plot-data", path_o.plot, "Step vs k_eff CSV (default: <output>_plot.csv)");

    Common grid_c;
    GridOpts grid_o;
    auto* grid = app.add_subcommand("grid", "Cold-started fits over a (lambda, mu) grid");
    add_common(grid, grid_c);
    grid->add_option("--n-lambda", grid_o.n_lambda)->check(CLI::PositiveNumber);
    grid->add_option("--n-mu", grid_o.n_mu)->check(CLI::PositiveNumber);
    grid->add_option("--lambda-start", grid_o.lambda_start)->check(CLI::PositiveNumber);
    grid->add_option("--lambda-end", grid_o.lambda_end)->check(CLI::PositiveNumber);
    grid->add_option("--mu-start", grid_o.mu_start)->check(CLI::PositiveNumber);
    grid->add_option("--mu-end", grid_o.mu_end)->check(CLI::PositiveNumber);
    grid->add_option("--threads", grid_o.threads, "Worker count (default GAUGE_CLUSTER_THREADS or all cores)");
    grid->add_option("--summary", grid_o.summary, "Write k_eff fractions as JSON");

    VerifyOpts ver_o;
    auto* ver = app.add_subcommand("verify", "Run correctness checks");
    ver->add_option("--suite", ver_o.suite, "all | three-centers | nonoptimal | crossover | stability | none");
    ver->add_option("--trace", ver_o.trace, "Audit a trace file (fit output or trace array)");
    ver->add_option("--n", ver_o.n, "Point count for a bare trace array");
    ver->add_option("--mu", ver_o.mu, "Smoothing parameter for a bare trace array");
    ver->add_option("--probes", ver_o.probes, "Stability probes")->check(CLI::NonNegativeNumber);
    ver->add_option("--seed", ver_o.seed, "Seed for stability probes");
    ver->add_option("-o,--output", ver_o.output, "Output JSON, - for stdout");

    EvalOpts ev_o;
    auto* ev = app.add_subcommand("eval", "Score stored fits against labels");
    ev->add_option("--fit", ev_o.fits, "Fit JSON (repeatable)")->required();
    ev->add_option("-i,--input", ev_o.input, "Labeled data CSV")->required();
    ev->add_flag("--standardize", ev_o.standardize, "Standardize as the fit did");
    ev->add_option("-o,--output", ev_o.output, "Output JSON, - for stdout");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }

    try {
        if (*gen) return cmd_gen(gen_name, gen_seed, gen_out, out);
        if (*fit) return cmd_fit(fit_c, fit_o, out);
        if (*path) return cmd_path(path_c, path_o, out, err);
        if (*grid) return cmd_grid(grid_c, grid_o, out);
        if (*ver) return cmd_verify(ver_o, out, err);
        if (*ev) return cmd_eval(ev_o, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kFailure;
    }
    return kUsage;
}

}  // namespace gaugeclust::cli
