#include "gaugeclust/data.hpp"

#include "csv_reader.hpp"
#include "gaugeclust/rng.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace gaugeclust {

namespace {

constexpr double kLaplaceScale = 0.25;
constexpr double kGaussSigma = 0.7;

double laplace(SplitMix64& rng, double scale) {
    const double u = rng.uniform_open() - 0.5;
    const double sign = u < 0.0 ? -1.0 : 1.0;
    return -scale * sign * std::log1p(-2.0 * std::abs(u));
}

// Box–Muller, one draw per call (the second variate is discarded so each
// coordinate stream stays position-independent).
double gaussian(SplitMix64& rng) {
    const double u1 = rng.uniform_open();
    const double u2 = rng.uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

template <class Noise>
DataSet sample_clusters(const Matrix& centers, Eigen::Index per_cluster, std::uint64_t seed, Noise noise) {
    const auto c = centers.rows();
    const auto d = centers.cols();
    DataSet data;
    data.points.resize(c * per_cluster, d);
    data.labels = std::vector<int>(static_cast<std::size_t>(c * per_cluster));
    for (Eigen::Index k = 0; k < c; ++k) {
        for (Eigen::Index j = 0; j < d; ++j) {
            auto rng = SplitMix64::stream(seed, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(j));
            for (Eigen::Index p = 0; p < per_cluster; ++p)
                data.points(k * per_cluster + p, j) = centers(k, j) + noise(rng);
        }
        for (Eigen::Index p = 0; p < per_cluster; ++p)
            (*data.labels)[static_cast<std::size_t>(k * per_cluster + p)] = static_cast<int>(k);
    }
    return data;
}

double choose2(double m) { return 0.5 * m * (m - 1.0); }

}  // namespace

Matrix generator_centers(const std::string& name) {
    Matrix c;
    if (name == "laplace3") {
        c.resize(3, 2);
        c << -3.0, 0.0, 3.0, 0.0, 0.0, std::sqrt(27.0);
    } else if (name == "laplace4") {
        c.resize(4, 2);
        c << 0.0, 0.0, 2.0, 0.0, 0.0, 2.0, 2.0, 2.0;
    } else if (name == "gauss4") {
        c.resize(4, 2);
        c << 0.0, 0.0, 4.0, 0.0, 2.0, 3.464, 0.0, 0.0;
        c.row(3) = c.topRows(3).colwise().mean();
    } else {
        throw std::invalid_argument("unknown generator '" + name + "' (expected laplace3, laplace4 or gauss4)");
    }
    return c;
}

DataSet gen_laplace3(std::uint64_t seed) {
    return sample_clusters(generator_centers("laplace3"), 150, seed,
                           [](SplitMix64& rng) { return laplace(rng, kLaplaceScale); });
}

DataSet gen_laplace4(std::uint64_t seed) {
    return sample_clusters(generator_centers("laplace4"), 100, seed,
                           [](SplitMix64& rng) { return laplace(rng, kLaplaceScale); });
}

DataSet gen_gauss4(std::uint64_t seed) {
    return sample_clusters(generator_centers("gauss4"), 200, seed,
                           [](SplitMix64& rng) { return kGaussSigma * gaussian(rng); });
}

DataSet generate(const std::string& name, std::uint64_t seed) {
    if (name == "laplace3") return gen_laplace3(seed);
    if (name == "laplace4") return gen_laplace4(seed);
    if (name == "gauss4") return gen_gauss4(seed);
    throw std::invalid_argument("unknown generator '" + name + "' (expected laplace3, laplace4 or gauss4)");
}

DataSet load_csv(const std::string& path, bool labels_in_last_column) {
    const auto table = detail::read_numeric_csv(path);
    const auto width = static_cast<Eigen::Index>(table.rows.front().size());
    const Eigen::Index d = labels_in_last_column ? width - 1 : width;
    if (d < 1) throw std::runtime_error(path + ": no feature columns");
    DataSet data;
    data.points.resize(static_cast<Eigen::Index>(table.rows.size()), d);
    if (labels_in_last_column) data.labels = std::vector<int>(table.rows.size());
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        for (Eigen::Index j = 0; j < d; ++j) data.points(static_cast<Eigen::Index>(i), j) = row[static_cast<std::size_t>(j)];
        if (labels_in_last_column) {
            const double lab = row.back();
            if (lab != std::floor(lab) || std::abs(lab) > 1e9)
                throw std::runtime_error(path + ":" + std::to_string(table.line_numbers[i]) +
                                         ": label is not an integer");
            (*data.labels)[i] = static_cast<int>(lab);
        }
    }
    return data;
}

void write_csv(std::ostream& out, const DataSet& data) {
    for (Eigen::Index j = 0; j < data.d(); ++j) out << (j ? "," : "") << 'x' << j;
    if (data.labels) out << ",label";
    out << '\n';
    out << std::setprecision(17);
    for (Eigen::Index i = 0; i < data.n(); ++i) {
        for (Eigen::Index j = 0; j < data.d(); ++j) out << (j ? "," : "") << data.points(i, j);
        if (data.labels) out << ',' << (*data.labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
}

void save_csv(const std::string& path, const DataSet& data) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, data);
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

DataSet standardize(const DataSet& data) {
    if (data.n() < 2) throw std::invalid_argument("standardize needs at least two points");
    DataSet out = data;
    const Vector mean = data.points.colwise().mean();
    out.points.rowwise() -= mean;
    for (Eigen::Index j = 0; j < out.d(); ++j) {
        const double sd = std::sqrt(out.points.col(j).squaredNorm() / static_cast<double>(data.n()));
        if (sd > 0.0) out.points.col(j) /= sd;
        else out.points.col(j).setZero();
    }
    return out;
}

double ari(const std::vector<int>& labels_a, const std::vector<int>& labels_b) {
    if (labels_a.size() != labels_b.size()) throw std::invalid_argument("ari: label vectors differ in length");
    if (labels_a.size() < 2) throw std::invalid_argument("ari: need at least two labels");
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> rows;
    std::map<int, double> cols;
    for (std::size_t i = 0; i < labels_a.size(); ++i) {
        joint[{labels_a[i], labels_b[i]}] += 1.0;
        rows[labels_a[i]] += 1.0;
        cols[labels_b[i]] += 1.0;
    }
    double index = 0.0;
    for (const auto& [key, count] : joint) index += choose2(count);
    double sum_a = 0.0;
    for (const auto& [key, count] : rows) sum_a += choose2(count);
    double sum_b = 0.0;
    for (const auto& [key, count] : cols) sum_b += choose2(count);
    const double pairs = choose2(static_cast<double>(labels_a.size()));
    const double expected = sum_a * sum_b / pairs;
    const double maximum = 0.5 * (sum_a + sum_b);
    // Both partitions trivial in the same way: perfect agreement.
    if (maximum == expected) return 1.0;
    return (index - expected) / (maximum - expected);
}

}  // namespace gaugeclust
