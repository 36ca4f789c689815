#pragma once

#include "gaugeclust/ldca.hpp"
#include "gaugeclust/solvers.hpp"
#include "gaugeclust/verify.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace gaugeclust {

using Json = nlohmann::ordered_json;

/// Shortest decimal form that reads back to the same double.
std::string format_double(double v);

Json to_json(const Matrix& m);
Json to_json(const SolverTrace& trace);
Json to_json(const PathRecord& rec);
Json to_json(const GridCell& cell);
Json to_json(const BruteForceResult& res);
Json to_json(const OptimalityReport& rep);
Json to_json(const StabilityProbe& probe);
Json to_json(const DescentAudit& audit);

Matrix matrix_from_json(const Json& j);
SolverTrace trace_from_json(const Json& j);

inline constexpr const char* kPathColumns =
    "step,lambda,mu,k_eff,size_min,size_max,size_mean,size_std,ari,center_spread,converged";

/// One row per record under kPathColumns; a missing ARI is an empty field.
void write_path_csv(std::ostream& out, const std::vector<PathRecord>& records);
Json path_to_json(const std::vector<PathRecord>& records);

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells);

/// Reads a whole file; throws std::runtime_error naming the path on failure.
std::string read_file(const std::string& path);
/// Writes text to path, or to stdout when path is "-" or empty.
void write_text(const std::string& path, const std::string& text);

}  // namespace gaugeclust
