#include "gaugeclust/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace gaugeclust {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

namespace {

Json number(double v) {
    if (std::isfinite(v)) return v;
    return nullptr;
}

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

}  // namespace

Json to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(number(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json to_json(const SolverTrace& trace) {
    Json out = Json::array();
    for (const auto& r : trace.records) {
        out.push_back({{"iter", r.iter},
                       {"f_mu", number(r.f_mu)},
                       {"step_norm", number(r.step_norm)},
                       {"descent_slack", number(r.descent_slack)},
                       {"gamma_ls", number(r.gamma_ls)}});
    }
    return out;
}

Json to_json(const PathRecord& rec) {
    Json j{{"step", rec.step},
           {"lambda", rec.lambda},
           {"mu", rec.mu},
           {"k_eff", rec.k_eff},
           {"size_min", rec.sizes.min},
           {"size_max", rec.sizes.max},
           {"size_mean", rec.sizes.mean},
           {"size_std", rec.sizes.std},
           {"ari", optional_number(rec.ari)},
           {"center_spread", number(rec.center_spread)},
           {"converged", rec.converged}};
    if (rec.failed) j["error"] = rec.error;
    return j;
}

Json to_json(const GridCell& cell) {
    Json j{{"lambda_index", cell.lambda_index},
           {"mu_index", cell.mu_index},
           {"lambda", cell.lambda},
           {"mu", cell.mu},
           {"k_eff", cell.k_eff},
           {"ari", optional_number(cell.ari)},
           {"center_spread", number(cell.center_spread)},
           {"converged", cell.converged}};
    if (cell.failed) j["error"] = cell.error;
    return j;
}

Json to_json(const BruteForceResult& res) {
    Json centers = Json::array();
    for (Eigen::Index l = 0; l < res.x.rows(); ++l) centers.push_back(res.x(l, 0));
    return {{"value", res.value},
            {"centers", centers},
            {"resolution_slack", res.resolution_slack},
            {"rounds", res.rounds}};
}

Json to_json(const OptimalityReport& rep) {
    Json centers = Json::array();
    for (const auto& c : rep.centers) {
        Json m = Json::array();
        for (Eigen::Index j = 0; j < c.minimizer.size(); ++j) m.push_back(c.minimizer(j));
        centers.push_back({{"index", c.index},
                           {"minimizer", m},
                           {"phi_center", c.phi_center},
                           {"phi_min", c.phi_min},
                           {"gap", c.gap},
                           {"pass", c.pass},
                           {"kink_certified", c.kink_certified}});
    }
    Json singleton = Json::array();
    for (bool s : rep.singleton) singleton.push_back(s);
    return {{"verdict", rep.verdict()},
            {"applicable", rep.applicable},
            {"all_pass", rep.all_pass},
            {"note", "passing certifies only a necessary condition for global optimality"},
            {"centers", centers},
            {"singleton", singleton}};
}

Json to_json(const StabilityProbe& p) {
    return {{"value_a", p.value_a}, {"value_b", p.value_b}, {"lhs", p.lhs},
            {"rhs", p.rhs},         {"slack", p.slack},     {"pass", p.pass}};
}

Json to_json(const DescentAudit& a) {
    return {{"pass", a.pass},
            {"worst_slack", number(a.worst_slack)},
            {"worst_index", a.worst_index},
            {"first_failure", a.first_failure}};
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array() || j.empty()) throw std::runtime_error("expected a nonempty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = static_cast<Eigen::Index>(j.front().size());
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const auto& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw std::runtime_error("ragged matrix row " + std::to_string(i));
        for (Eigen::Index c = 0; c < cols; ++c) m(i, c) = row[static_cast<std::size_t>(c)].get<double>();
    }
    return m;
}

SolverTrace trace_from_json(const Json& j) {
    if (!j.is_array()) throw std::runtime_error("trace must be an array of records");
    SolverTrace t;
    for (const auto& r : j) {
        TraceRecord rec;
        rec.iter = r.at("iter").get<int>();
        rec.f_mu = r.at("f_mu").get<double>();
        rec.step_norm = r.at("step_norm").get<double>();
        rec.descent_slack = r.value("descent_slack", 0.0);
        rec.gamma_ls = r.value("gamma_ls", 0.0);
        t.records.push_back(rec);
    }
    return t;
}

void write_path_csv(std::ostream& out, const std::vector<PathRecord>& records) {
    out << kPathColumns << '\n';
    for (const auto& r : records) {
        out << r.step << ',' << format_double(r.lambda) << ',' << format_double(r.mu) << ',' << r.k_eff << ','
            << r.sizes.min << ',' << r.sizes.max << ',' << format_double(r.sizes.mean) << ','
            << format_double(r.sizes.std) << ',' << (r.ari ? format_double(*r.ari) : "") << ','
            << format_double(r.center_spread) << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

Json path_to_json(const std::vector<PathRecord>& records) {
    Json out = Json::array();
    for (const auto& r : records) out.push_back(to_json(r));
    return out;
}

void write_grid_csv(std::ostream& out, const std::vector<GridCell>& cells) {
    out << "lambda_index,mu_index,lambda,mu,k_eff,ari,center_spread,converged,failed\n";
    for (const auto& c : cells) {
        out << c.lambda_index << ',' << c.mu_index << ',' << format_double(c.lambda) << ','
            << format_double(c.mu) << ',' << c.k_eff << ',' << (c.ari ? format_double(*c.ari) : "") << ','
            << format_double(c.center_spread) << ',' << (c.converged ? 1 : 0) << ',' << (c.failed ? 1 : 0)
            << '\n';
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << text;
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace gaugeclust
