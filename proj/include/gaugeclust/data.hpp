#pragma once

#include "gaugeclust/model.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace gaugeclust {

/// Three Laplace(0, 0.25) clusters of 150 points around (−3,0), (3,0), (0,√27).
DataSet gen_laplace3(std::uint64_t seed);

/// Four Laplace(0, 0.25) clusters of 100 points around (0,0), (2,0), (0,2), (2,2).
DataSet gen_laplace4(std::uint64_t seed);

/// Four isotropic Gaussian clusters (σ = 0.7) of 200 points: a triangle
/// (0,0), (4,0), (2,3.464) plus a fourth cluster at the triangle's centroid.
DataSet gen_gauss4(std::uint64_t seed);

/// Centers used by the generators, one row per cluster.
Matrix generator_centers(const std::string& name);

/// Dispatch by name: "laplace3", "laplace4" or "gauss4".
DataSet generate(const std::string& name, std::uint64_t seed);

/// Reads comma-separated rows. A non-numeric first row is taken as a header.
/// With labels_in_last_column the final column must hold integers.
DataSet load_csv(const std::string& path, bool labels_in_last_column = false);

/// Writes a header row (x0, x1, ..., [label]) and full-precision values.
void write_csv(std::ostream& out, const DataSet& data);
void save_csv(const std::string& path, const DataSet& data);

/// Column-wise zero mean and unit population (1/n) standard deviation;
/// zero-variance columns become all zeros. Requires n ≥ 2.
DataSet standardize(const DataSet& data);

/// Adjusted Rand Index from the pair-counting contingency table.
double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b);

}  // namespace gaugeclust
