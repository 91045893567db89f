#include "lgeo/io.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <sstream>

namespace lgeo {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string format_point(const Vec& p) {
    std::string out;
    for (int i = 0; i < p.size(); ++i) {
        if (i) out += ",";
        out += format_double(p[i]);
    }
    return out;
}

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (const char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

} // namespace

DistanceRecord make_record(const std::string& scenario, const Vec& p, const Vec& q,
                           const DistanceResult& result) {
    DistanceRecord rec;
    rec.scenario = scenario;
    rec.kind = to_string(result.kind);
    rec.p = format_point(p);
    rec.q = format_point(q);
    rec.spacing = result.spacing.size() ? result.spacing[0] : 0.0;
    rec.stencil = result.stencil;
    rec.value = result.value;
    rec.tau_p = result.tau_p;
    rec.tau_q = result.tau_q;
    rec.path_len_nodes = result.path_len_nodes;
    return rec;
}

std::string distance_csv(const std::vector<DistanceRecord>& records) {
    std::ostringstream out;
    out << "scenario,kind,p,q,spacing,stencil,value,tau_p,tau_q,path_len_nodes\n";
    for (const auto& r : records) {
        out << csv_escape(r.scenario) << ',' << r.kind << ',' << csv_escape(r.p) << ','
            << csv_escape(r.q) << ',' << format_double(r.spacing) << ',' << r.stencil << ','
            << format_double(r.value) << ',' << format_double(r.tau_p) << ','
            << format_double(r.tau_q) << ',' << r.path_len_nodes << '\n';
    }
    return out.str();
}

std::string distance_json(const std::vector<DistanceRecord>& records) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : records) {
        ordered_json j;
        j["scenario"] = r.scenario;
        j["kind"] = r.kind;
        j["p"] = r.p;
        j["q"] = r.q;
        j["spacing"] = r.spacing;
        j["stencil"] = r.stencil;
        j["value"] = r.value;
        j["tau_p"] = r.tau_p;
        j["tau_q"] = r.tau_q;
        j["path_len_nodes"] = r.path_len_nodes;
        arr.push_back(j);
    }
    return arr.dump(2) + "\n";
}

std::string convergence_csv(const ConvergenceReport& report) {
    std::ostringstream out;
    out << "index,box_id,k,norm,lambda,anchor_residual,verdict\n";
    for (const auto& r : report.rows) {
        out << r.index << ',' << r.box_id << ',' << r.k << ',' << format_double(r.norm) << ',';
        if (r.lambda) out << format_double(*r.lambda);
        out << ',';
        if (r.anchor_residual) out << format_double(*r.anchor_residual);
        out << ',' << csv_escape(r.verdict) << '\n';
    }
    return out.str();
}

std::string convergence_json(const ConvergenceReport& report) {
    ordered_json arr = ordered_json::array();
    for (const auto& r : report.rows) {
        ordered_json j;
        j["index"] = r.index;
        j["box_id"] = r.box_id;
        j["k"] = r.k;
        j["norm"] = r.norm;
        j["lambda"] = r.lambda ? ordered_json(*r.lambda) : ordered_json(nullptr);
        j["anchor_residual"] =
            r.anchor_residual ? ordered_json(*r.anchor_residual) : ordered_json(nullptr);
        j["verdict"] = r.verdict;
        arr.push_back(j);
    }
    ordered_json root;
    root["overall"] = report.overall;
    root["rows"] = arr;
    return root.dump(2) + "\n";
}

} // namespace lgeo
