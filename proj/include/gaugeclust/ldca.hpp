#pragma once

#include "gaugeclust/gauge.hpp"
#include "gaugeclust/model.hpp"
#include "gaugeclust/solvers.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaugeclust {

/// An inner solve failed inside an outer loop. what() carries the context.
class SolveFailure : public std::runtime_error {
public:
    SolveFailure(const std::string& what, int round) : std::runtime_error(what), round_(round) {}
    int round() const noexcept { return round_; }

private:
    int round_;
};

/// k0 data rows: the first uniform, the rest drawn with probability
/// proportional to min_ℓ ρ(x_ℓ − a_i)². Falls back to a uniform pick among
/// unchosen rows once every weight is zero.
Prototypes kmeanspp_init(const DataSet& data, int k0, const Gauge& gauge, std::uint64_t seed);

struct LdcaConfig {
    Algorithm inner = Algorithm::DCA;
    /// Inner solver settings; the max-of-sums part uses exact gauge
    /// subgradients here, unlike the bare solvers.
    SolverConfig solver = [] {
        SolverConfig c;
        c.oracle = ConcaveOracle::ExactSubgradient;
        return c;
    }();
    int max_rounds = 50;
    bool allow_deletion = true;
    double dedup_tol = kDefaultDedupTol;
};

struct LdcaResult {
    Prototypes x;              ///< surviving prototypes
    int k_eff = 0;             ///< distinct surviving locations that own points
    Assignment assignment;     ///< nearest structure at x
    std::vector<int> labels;   ///< per point: index of its cluster's representative prototype
    std::vector<int> k_history;  ///< prototype count entering each round
    std::vector<SolverTrace> traces;  ///< one per round
    int rounds = 0;
    bool converged = true;     ///< every inner solve met its tolerance
};

/// Alternates inner solves with deletion of prototypes whose primary member
/// set is empty, until nothing is deleted or max_rounds is hit.
LdcaResult ldca_from(const DataSet& data, const Prototypes& x0, const ModelParams& params,
                     const Gauge& gauge, const LdcaConfig& cfg = {});

/// ldca_from started at kmeanspp_init(data, k0, gauge, seed).
LdcaResult ldca_k(const DataSet& data, int k0, const ModelParams& params, const Gauge& gauge,
                  const LdcaConfig& cfg = {}, std::uint64_t seed = 0);

/// Keeps the first prototype of each class lying within tol of the class's
/// first member.
Prototypes merge_duplicates(const Prototypes& x, double tol);

/// N values from a to b with constant ratio; endpoints exact.
std::vector<double> geomspace(double a, double b, int count);

struct PathSchedule {
    std::vector<double> lambda_values;
    std::vector<double> mu_values;

    static PathSchedule geometric(int count = 100, double lambda_start = 1e-2, double lambda_end = 2.0,
                                  double mu_start = 2.0, double mu_end = 1e-4);
    int size() const noexcept { return static_cast<int>(lambda_values.size()); }
    void validate() const;
};

struct ClusterSizeStats {
    int min = 0;
    int max = 0;
    double mean = 0.0;
    double std = 0.0;  ///< population convention
};

/// Sizes of the point sets in labels (one count per distinct label value).
ClusterSizeStats size_stats(const std::vector<int>& labels);

struct PathRecord {
    int step = 0;
    double lambda = 0.0;
    double mu = 0.0;
    int k_eff = 0;
    ClusterSizeStats sizes;
    std::optional<double> ari;
    double center_spread = 0.0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

struct PathOptions {
    int k0 = 10;
    LdcaConfig ldca;
    std::uint64_t seed = 0;
};

struct PathResult {
    std::vector<PathRecord> records;
    std::vector<Prototypes> inits;      ///< initialization used at each step
    std::vector<Prototypes> survivors;  ///< merged survivors handed to the next step
    std::vector<std::vector<int>> labels;

    int failures() const;
};

/// Sequential warm-started traversal of the schedule. A failed step is
/// flagged and the next step restarts from the previous step's survivors.
PathResult run_path(const DataSet& data, const PathSchedule& schedule, const Gauge& gauge,
                    const PathOptions& opts = {});

struct GridCell {
    int lambda_index = 0;
    int mu_index = 0;
    double lambda = 0.0;
    double mu = 0.0;
    int k_eff = 0;
    std::optional<double> ari;
    double center_spread = 0.0;
    bool converged = false;
    bool failed = false;
    std::string error;
};

/// Independent cold-started fits over lambda_values × mu_values, row-major in
/// lambda. Cells run on a worker pool capped by GAUGE_CLUSTER_THREADS; the
/// result does not depend on the thread count.
std::vector<GridCell> run_grid(const DataSet& data, const std::vector<double>& lambda_values,
                               const std::vector<double>& mu_values, const Gauge& gauge,
                               const PathOptions& opts = {}, int threads = 0);

/// Worker count from GAUGE_CLUSTER_THREADS, else the hardware concurrency.
int worker_threads();

/// Longest run of equal consecutive values in ks[first..]: (value, length).
std::pair<int, int> longest_constant_run(const std::vector<int>& ks, std::size_t first = 0);

/// Most frequent value; ties go to the smaller value.
int modal_value(const std::vector<int>& ks);

}  // namespace gaugeclust
