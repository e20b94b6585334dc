#include "whittlekit/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace whittlekit {

using nlohmann::json;

namespace {

Matrix matrix_from_json(const json& j, int n, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw DimensionMismatch(std::string(name) + ": expected " + std::to_string(n) +
                                " rows");
    Matrix m(n, n);
    for (int s = 0; s < n; ++s) {
        const auto& row = j[s];
        if (!row.is_array() || static_cast<int>(row.size()) != n)
            throw DimensionMismatch(std::string(name) + ": row " + std::to_string(s) +
                                    " has wrong length");
        for (int c = 0; c < n; ++c) m(s, c) = row[c].get<double>();
    }
    return m;
}

Vector vector_from_json(const json& j, int n, const char* name) {
    if (!j.is_array() || static_cast<int>(j.size()) != n)
        throw DimensionMismatch(std::string(name) + ": expected length " +
                                std::to_string(n));
    Vector v(n);
    for (int s = 0; s < n; ++s) v[s] = j[s].get<double>();
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int s = 0; s < m.rows(); ++s) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(s, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json out = json::array();
    for (int s = 0; s < v.size(); ++s) out.push_back(v[s]);
    return out;
}

}  // namespace

Arm arm_from_json_text(const std::string& text) {
    json j = json::parse(text);
    const int n = j.at("num_states").get<int>();
    if (n < 1) throw DimensionMismatch("num_states must be positive");
    Matrix p0 = matrix_from_json(j.at("p_passive"), n, "p_passive");
    Matrix p1 = matrix_from_json(j.at("p_active"), n, "p_active");
    Vector r0 = vector_from_json(j.at("r_passive"), n, "r_passive");
    Vector r1 = vector_from_json(j.at("r_active"), n, "r_active");
    std::optional<double> beta;
    if (j.contains("discount") && !j["discount"].is_null())
        beta = j["discount"].get<double>();
    return Arm(std::move(p0), std::move(p1), std::move(r0), std::move(r1), beta);
}

std::string arm_to_json_text(const Arm& arm, int indent) {
    json j;
    j["num_states"] = arm.num_states();
    j["p_passive"] = matrix_to_json(arm.p_passive);
    j["p_active"] = matrix_to_json(arm.p_active);
    j["r_passive"] = vector_to_json(arm.r_passive);
    j["r_active"] = vector_to_json(arm.r_active);
    if (arm.discount) j["discount"] = *arm.discount;
    return j.dump(indent) + "\n";
}

Arm load_arm(const std::string& path) { return arm_from_json_text(read_text_file(path)); }

void save_arm(const Arm& arm, const std::string& path) {
    write_text_file(path, arm_to_json_text(arm));
}

namespace {

json computation_json(const IndexComputation& c, bool indexable) {
    json j;
    j["indexable"] = indexable;
    j["indices"] = vector_to_json(c.indices);
    j["thresholds"] = c.thresholds;
    json pols = json::array();
    for (const auto& p : c.policies) pols.push_back(p.active_states());
    j["policies"] = std::move(pols);
    json cross = json::object();
    for (std::size_t s = 0; s < c.crossings.size(); ++s)
        cross[std::to_string(s)] = c.crossings[s];
    j["crossings"] = std::move(cross);
    return j;
}

}  // namespace

std::string index_computation_to_json_text(const IndexComputation& c, bool indexable,
                                           int indent) {
    return computation_json(c, indexable).dump(indent) + "\n";
}

std::string verdict_to_json_text(const IndexabilityVerdict& v, int indent) {
    return computation_json(v.computation, v.indexable).dump(indent) + "\n";
}

std::string lambda_scan_to_json_text(const LambdaScan& scan, int indent) {
    json j;
    j["grid"] = scan.grid;
    j["adv_star"] = matrix_to_json(scan.adv_star);
    json zeros = json::object();
    for (std::size_t s = 0; s < scan.zeros.size(); ++s)
        zeros[std::to_string(s)] = scan.zeros[s];
    j["zeros"] = std::move(zeros);
    j["indices"] = vector_to_json(scan.indices);
    j["breakpoints"] = scan.breakpoints;
    return j.dump(indent) + "\n";
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string trace_to_csv(const LearningTrace& trace, const Vector* truth) {
    std::ostringstream out;
    out << "t,state,estimate,truth,abs_error,indexable,ewisc_ms\n";
    for (const auto& e : trace.entries) {
        const int n = static_cast<int>(e.indices.size());
        if (!e.ok) {
            out << e.t << ",,,,," << 0 << "," << format_double(e.solver_ms) << "\n";
            continue;
        }
        for (int s = 0; s < n; ++s) {
            out << e.t << ',' << s << ',' << format_double(e.indices[s]) << ',';
            if (truth) out << format_double((*truth)[s]);
            out << ',';
            if (e.abs_error.size() == n) out << format_double(e.abs_error[s]);
            out << ',' << (e.indexable ? 1 : 0) << ','
                << format_double(e.solver_ms) << "\n";
        }
    }
    return out.str();
}

std::string metrics_to_csv(const std::vector<ErrorMetricsRow>& rows) {
    std::ostringstream out;
    out << "t,min_err,median_err,max_err\n";
    for (const auto& r : rows)
        out << r.t << ',' << format_double(r.min_err) << ','
            << format_double(r.median_err) << ',' << format_double(r.max_err) << "\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    f << text;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace whittlekit
