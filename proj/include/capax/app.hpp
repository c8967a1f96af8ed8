#pragma once

// Command implementations behind the capax CLI: solve, certify, sweep and
// check-conditions. Each command reads a JSON config document, writes a JSON
// (or CSV, for sweep) document to the requested sink and returns the process
// exit code: 0 success, 1 configuration/validation error, 2 domain failure
// (uncertified solve, failed condition check, failed sweep row).

#include <chrono>
#include <cstdint>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "capax/json_io.hpp"
#include "capax/solver.hpp"

namespace capax {

struct AppOptions {
    std::string config_path;
    std::optional<std::string> out_path;
    std::string format = "json";  // "csv" is valid for sweep only
    std::optional<std::uint64_t> seed;
};

namespace app_detail {

inline std::string timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

inline SolveOptions solve_options_from(const json& config,
                                       const std::optional<std::uint64_t>& seed_override) {
    SolveOptions opts;
    if (config.contains("solve_options")) {
        const json& o = config.at("solve_options");
        if (!o.is_object()) throw ConfigError("solve_options must be an object");
        opts.kt_tol = o.value("kt_tol", opts.kt_tol);
        opts.grid_size = o.value("grid_size", opts.grid_size);
        opts.n_max = o.value("n_max", opts.n_max);
        opts.merge_eps = o.value("merge_eps", opts.merge_eps);
        opts.inner_iters = o.value("inner_iters", opts.inner_iters);
        opts.inner_tol = o.value("inner_tol", opts.inner_tol);
        opts.restarts = o.value("restarts", opts.restarts);
        opts.seed = o.value("seed", opts.seed);
    }
    if (config.contains("seed")) opts.seed = config.at("seed").get<std::uint64_t>();
    if (seed_override) opts.seed = *seed_override;
    try {
        opts.validate();
    } catch (const InvalidParameter& e) {
        throw ConfigError(std::string("solve_options: ") + e.what());
    }
    return opts;
}

inline const json& channel_section(const json& config) {
    if (!config.is_object() || !config.contains("channel"))
        throw ConfigError("config: missing 'channel' section");
    return config.at("channel");
}

inline void emit(const std::string& text, const AppOptions& app, std::ostream& out) {
    if (app.out_path) {
        std::ofstream f(*app.out_path);
        if (!f) throw ConfigError("cannot write output file: " + *app.out_path);
        f << text;
    } else {
        out << text;
    }
}

inline std::string dump(json doc) {
    doc["generated_at"] = timestamp();
    return doc.dump(2) + "\n";
}

}  // namespace app_detail

inline int cmd_solve(const json& config, const AppOptions& app, std::ostream& out) {
    ChannelModel ch = channel_from_json(app_detail::channel_section(config));
    SolveOptions opts = app_detail::solve_options_from(config, app.seed);
    SolveResult result = solve_capacity(ch, opts);

    json doc = solve_result_to_json(result);
    doc["command"] = "solve";
    doc["channel"] = app_detail::channel_section(config);
    doc["seed"] = opts.seed;
    app_detail::emit(app_detail::dump(doc), app, out);
    return result.certified ? 0 : 2;
}

inline int cmd_certify(const json& config, const AppOptions& app, std::ostream& out) {
    ChannelModel ch = channel_from_json(app_detail::channel_section(config));
    SolveOptions opts = app_detail::solve_options_from(config, app.seed);

    if (!config.contains("distribution"))
        throw ConfigError("certify: missing 'distribution' (inline object or file path)");
    json dist_doc = config.at("distribution");
    if (dist_doc.is_string())
        dist_doc = app_detail::load_json_file(dist_doc.get<std::string>());
    DiscreteInput input = distribution_from_json(dist_doc);
    if (std::fabs(input.peak() - ch.peak) > 1e-12)
        throw ConfigError("certify: distribution peak differs from channel peak");

    KTCertificate cert = kt_check(ch, input, opts);
    json doc;
    doc["command"] = "certify";
    doc["channel"] = app_detail::channel_section(config);
    doc["distribution"] = distribution_to_json(input);
    doc["certificate"] = certificate_to_json(cert);
    app_detail::emit(app_detail::dump(doc), app, out);
    return cert.passed ? 0 : 2;
}

inline int cmd_sweep(const json& config, const AppOptions& app, std::ostream& out) {
    if (!config.contains("peaks") || !config.at("peaks").is_array() ||
        config.at("peaks").empty())
        throw ConfigError("sweep: missing nonempty 'peaks' array");
    std::vector<double> peaks = config.at("peaks").get<std::vector<double>>();
    for (std::size_t i = 1; i < peaks.size(); ++i)
        if (!(peaks[i] > peaks[i - 1]))
            throw ConfigError("sweep: peaks must be strictly increasing");

    const json& base_channel = app_detail::channel_section(config);
    SolveOptions opts = app_detail::solve_options_from(config, app.seed);

    struct Row {
        double peak = 0.0;
        double capacity = 0.0;
        int n = 0;
        double max_violation = 0.0;
        std::string status;
    };
    std::vector<Row> rows;
    bool any_failed = false;
    for (double a : peaks) {
        Row row;
        row.peak = a;
        try {
            json ch_doc = base_channel;
            ch_doc["peak"] = a;
            ChannelModel ch = channel_from_json(ch_doc);
            SolveResult result = solve_capacity(ch, opts);
            row.capacity = result.capacity_bits;
            row.n = static_cast<int>(result.input.size());
            row.max_violation = result.certificate.max_violation;
            row.status = result.certified ? "ok" : "uncertified";
            if (!result.certified) any_failed = true;
        } catch (const Error& e) {
            row.status = std::string("error: ") + e.what();
            any_failed = true;
        }
        rows.push_back(row);
    }

    if (app.format == "csv") {
        std::ostringstream csv;
        csv << "A,capacity_bits,N,max_violation,status\n";
        for (const auto& row : rows) {
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d,%.12g,", row.peak,
                          row.capacity, row.n, row.max_violation);
            csv << buf << row.status << "\n";
        }
        app_detail::emit(csv.str(), app, out);
    } else {
        json arr = json::array();
        for (const auto& row : rows)
            arr.push_back({{"A", round_sig12(row.peak)},
                           {"capacity_bits", round_sig12(row.capacity)},
                           {"N", row.n},
                           {"max_violation", round_sig12(row.max_violation)},
                           {"status", row.status}});
        json doc{{"command", "sweep"}, {"rows", arr}};
        app_detail::emit(app_detail::dump(doc), app, out);
    }
    return any_failed ? 2 : 0;
}

inline int cmd_check_conditions(const json& config, const AppOptions& app,
                                std::ostream& out) {
    ChannelModel ch = channel_from_json(app_detail::channel_section(config));
    int x_grid = 100, y_grid = 10000;
    if (config.contains("grids")) {
        x_grid = config.at("grids").value("x", x_grid);
        y_grid = config.at("grids").value("y", y_grid);
    }
    EnvelopeReport report = check_conditions(ch, x_grid, y_grid);
    json doc = report_to_json(report);
    doc["command"] = "check-conditions";
    doc["channel"] = app_detail::channel_section(config);
    app_detail::emit(app_detail::dump(doc), app, out);
    return report.overall ? 0 : 2;
}

// Dispatch used by both the CLI binary and the test suite.
inline int run_command(const std::string& command, const AppOptions& app, std::ostream& out,
                       std::ostream& err) {
    try {
        json config = app_detail::load_json_file(app.config_path);
        if (app.format != "json" && app.format != "csv")
            throw ConfigError("format must be 'json' or 'csv'");
        if (app.format == "csv" && command != "sweep")
            throw ConfigError("csv output is only available for sweep");

        if (command == "solve") return cmd_solve(config, app, out);
        if (command == "certify") return cmd_certify(config, app, out);
        if (command == "sweep") return cmd_sweep(config, app, out);
        if (command == "check-conditions") return cmd_check_conditions(config, app, out);
        throw ConfigError("unknown command: " + command);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const InvalidParameter& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const NormalizationFailure& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace capax
