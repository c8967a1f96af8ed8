#pragma once

// JSON bindings: channel specifications, discrete-input distribution files,
// certificates, solve results and condition reports. All floating-point
// values are rounded through 12 significant digits before serialization so
// identical runs produce byte-identical documents.

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include <json.hpp>

#include "capax/channel.hpp"
#include "capax/conditions.hpp"
#include "capax/discrete_input.hpp"
#include "capax/errors.hpp"
#include "capax/solver.hpp"

namespace capax {

using json = nlohmann::json;

inline double round_sig12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return std::strtod(buf, nullptr);
}

namespace json_detail {

inline double require_number(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_number())
        throw ConfigError("missing numeric field '" + key + "'");
    return j.at(key).get<double>();
}

// Piecewise-linear interpolant over tabulated (y, value) pairs; zero
// outside the table range.
struct Table {
    std::vector<double> ys;
    std::vector<double> vs;

    double operator()(double y) const {
        if (ys.empty() || y < ys.front() || y > ys.back()) return 0.0;
        auto it = std::upper_bound(ys.begin(), ys.end(), y);
        if (it == ys.begin()) return vs.front();
        if (it == ys.end()) return vs.back();
        const std::size_t hi = it - ys.begin();
        const std::size_t lo = hi - 1;
        const double t = (y - ys[lo]) / (ys[hi] - ys[lo]);
        return vs[lo] + t * (vs[hi] - vs[lo]);
    }
};

inline Table parse_table(const json& j, const std::string& key) {
    if (!j.contains(key) || !j.at(key).is_array())
        throw ConfigError("missing table field '" + key + "'");
    Table t;
    for (const auto& row : j.at(key)) {
        if (!row.is_array() || row.size() != 2)
            throw ConfigError("table '" + key + "' rows must be [y, value] pairs");
        t.ys.push_back(row[0].get<double>());
        t.vs.push_back(row[1].get<double>());
    }
    if (t.ys.size() < 2) throw ConfigError("table '" + key + "' needs at least two rows");
    for (std::size_t i = 1; i < t.ys.size(); ++i)
        if (!(t.ys[i] > t.ys[i - 1]))
            throw ConfigError("table '" + key + "' ordinates must be strictly increasing");
    return t;
}

}  // namespace json_detail

// Channel document: {"kind": "gaussian"|"additive"|"rayleigh", ...}.
inline ChannelModel channel_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError("channel: expected object with string field 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    const double peak = json_detail::require_number(j, "peak");
    if (!(peak > 0)) throw ConfigError("channel: peak must be positive");

    if (kind == "gaussian") {
        GaussianAdditiveSpec spec;
        spec.sigma = json_detail::require_number(j, "sigma");
        return gaussian_channel(spec, peak);
    }
    if (kind == "rayleigh") {
        RayleighSpec spec;
        spec.peak = peak;
        spec.c = j.value("c", 3.0);
        spec.gamma = j.value("gamma", 0.0);
        return rayleigh_channel(spec);
    }
    if (kind == "additive") {
        auto noise = json_detail::parse_table(j, "noise_table");
        auto q = json_detail::parse_table(j, "envelope_q_table");
        auto bigq = json_detail::parse_table(j, "envelope_Q_table");
        GenericAdditiveSpec spec;
        spec.noise_domain = Interval{noise.ys.front(), noise.ys.back()};
        spec.noise_density = noise;
        spec.envelope_q = q;
        spec.envelope_Q = bigq;
        spec.envelope_K = json_detail::require_number(j, "envelope_K");
        spec.analytic_extension = j.value("analytic", false);
        return additive_channel(spec, peak);
    }
    throw ConfigError("channel: unknown kind '" + kind + "'");
}

// Distribution document: {"peak": A, "points": [{"x":..., "p":...}, ...]}.
inline DiscreteInput distribution_from_json(const json& j) {
    if (!j.is_object() || !j.contains("points") || !j.at("points").is_array())
        throw ConfigError("distribution: expected object with 'peak' and 'points'");
    const double peak = json_detail::require_number(j, "peak");
    std::vector<MassPoint> pts;
    for (const auto& row : j.at("points")) {
        MassPoint pt{json_detail::require_number(row, "x"),
                     json_detail::require_number(row, "p")};
        if (std::fabs(pt.x) > peak * (1.0 + 1e-12))
            throw ConfigError("distribution: location " + std::to_string(pt.x) +
                              " outside [-peak, peak]");
        pts.push_back(pt);
    }
    try {
        return DiscreteInput::consolidated(std::move(pts), peak, 0.0, 1e-9);
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("distribution: ") + e.what());
    }
}

inline json distribution_to_json(const DiscreteInput& f) {
    json points = json::array();
    for (const auto& pt : f.points())
        points.push_back({{"x", round_sig12(pt.x)}, {"p", round_sig12(pt.p)}});
    return json{{"peak", round_sig12(f.peak())}, {"points", points}};
}

inline json certificate_to_json(const KTCertificate& cert) {
    json support = json::array();
    for (double r : cert.support_residuals) support.push_back(round_sig12(r));
    return json{{"max_violation", round_sig12(cert.max_violation)},
                {"passed", cert.passed},
                {"kt_tol", round_sig12(cert.kt_tol)},
                {"grid_size", cert.grid.size()},
                {"info_bits", round_sig12(cert.info_bits)},
                {"support_residuals", support}};
}

inline json solve_result_to_json(const SolveResult& result) {
    json trace = json::array();
    for (const auto& t : result.trace)
        trace.push_back({{"N", t.n},
                         {"I_bits", round_sig12(t.best_info)},
                         {"max_violation", round_sig12(t.max_violation)}});
    json doc = distribution_to_json(result.input);
    doc["capacity_bits"] = round_sig12(result.capacity_bits);
    doc["certificate"] = certificate_to_json(result.certificate);
    doc["certified"] = result.certified;
    doc["trace"] = trace;
    return doc;
}

inline json report_to_json(const EnvelopeReport& report) {
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"check_name", c.name},
                          {"passed", c.passed},
                          {"witness", {{"x", round_sig12(c.witness_x)},
                                       {"y", round_sig12(c.witness_y)}}},
                          {"margin", round_sig12(c.margin)}});
    return json{{"checks", checks}, {"overall", report.overall}};
}

}  // namespace capax
