#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>
#include <string>

#include "capax/app.hpp"

using namespace capax;
namespace fs = std::filesystem;

namespace {

fs::path write_temp(const std::string& stem, const std::string& content) {
    static int counter = 0;
    fs::path p = fs::temp_directory_path() /
                 ("capax_test_" + stem + "_" + std::to_string(counter++) + ".json");
    std::ofstream out(p);
    out << content;
    return p;
}

struct RunOutcome {
    int exit_code = 0;
    std::string out;
    std::string err;
};

RunOutcome run(const std::string& command, const json& config,
               const std::string& format = "json",
               std::optional<std::uint64_t> seed = std::nullopt) {
    AppOptions opts;
    opts.config_path = write_temp(command, config.dump()).string();
    opts.format = format;
    opts.seed = seed;
    std::ostringstream out, err;
    RunOutcome r;
    r.exit_code = run_command(command, opts, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

json gaussian_config() {
    return json{{"channel", {{"kind", "gaussian"}, {"sigma", 1.0}, {"peak", 1.0}}},
                {"seed", 7}};
}

std::string scrub_timestamp(std::string text) {
    return std::regex_replace(text, std::regex("\"generated_at\": \"[^\"]*\""),
                              "\"generated_at\": \"-\"");
}

}  // namespace

TEST_CASE("solve command emits a certified document") {
    auto r = run("solve", gaussian_config());
    REQUIRE(r.exit_code == 0);

    json doc = json::parse(r.out);
    CHECK(doc.at("command") == "solve");
    CHECK(doc.at("certified") == true);
    CHECK(doc.at("certificate").at("passed") == true);
    CHECK(doc.at("certificate").at("max_violation").get<double>() <= 1e-5);

    const auto& points = doc.at("points");
    REQUIRE(points.size() == 2);
    CHECK(points[0].at("x").get<double>() == Approx(-1.0).margin(1e-3));
    CHECK(points[1].at("x").get<double>() == Approx(1.0).margin(1e-3));
    CHECK(points[0].at("p").get<double>() == Approx(0.5).margin(1e-3));
    CHECK(doc.at("trace").is_array());
    CHECK(doc.at("capacity_bits").get<double>() > 0.4);
}

TEST_CASE("solve output is deterministic for a fixed seed") {
    auto first = run("solve", gaussian_config());
    auto second = run("solve", gaussian_config());
    REQUIRE(first.exit_code == 0);
    CHECK(scrub_timestamp(first.out) == scrub_timestamp(second.out));
}

TEST_CASE("certify round-trips the solve output") {
    auto solved = run("solve", gaussian_config());
    REQUIRE(solved.exit_code == 0);
    json doc = json::parse(solved.out);

    json config = gaussian_config();
    config["distribution"] = {{"peak", doc.at("peak")}, {"points", doc.at("points")}};
    auto certified = run("certify", config);
    CHECK(certified.exit_code == 0);
    json cert_doc = json::parse(certified.out);
    CHECK(cert_doc.at("certificate").at("passed") == true);
}

TEST_CASE("certify rejects the origin point mass with the known violation") {
    json config = gaussian_config();
    config["distribution"] = {{"peak", 1.0}, {"points", {{{"x", 0.0}, {"p", 1.0}}}}};
    auto r = run("certify", config);
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.out);
    CHECK(doc.at("certificate").at("max_violation").get<double>() ==
          Approx(0.7213475204444817).margin(1e-5));
}

TEST_CASE("certify validates the distribution document") {
    json config = gaussian_config();
    config["distribution"] = {
        {"peak", 1.0},
        {"points", {{{"x", -0.5}, {"p", 0.45}}, {{"x", 0.5}, {"p", 0.45}}}}};
    auto r = run("certify", config);
    CHECK(r.exit_code == 1);
    CHECK(r.err.find("distribution") != std::string::npos);

    json outside = gaussian_config();
    outside["distribution"] = {{"peak", 1.0}, {"points", {{{"x", 1.5}, {"p", 1.0}}}}};
    CHECK(run("certify", outside).exit_code == 1);
}

TEST_CASE("sweep emits the documented CSV schema with monotone capacity") {
    json config = gaussian_config();
    config["peaks"] = {0.5, 1.0};
    auto r = run("sweep", config, "csv");
    REQUIRE(r.exit_code == 0);

    std::istringstream lines(r.out);
    std::string header;
    std::getline(lines, header);
    CHECK(header == "A,capacity_bits,N,max_violation,status");

    double prev_capacity = -1.0;
    int rows = 0;
    std::string line;
    while (std::getline(lines, line)) {
        if (line.empty()) continue;
        ++rows;
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');  // A
        std::getline(cells, cell, ',');  // capacity
        const double capacity = std::stod(cell);
        CHECK(capacity >= prev_capacity - 1e-6);
        prev_capacity = capacity;
        std::getline(cells, cell, ',');  // N
        std::getline(cells, cell, ',');  // max_violation
        std::getline(cells, cell);       // status
        CHECK(cell == "ok");
    }
    CHECK(rows == 2);
}

TEST_CASE("uncertified solves exit with code 2") {
    json config = gaussian_config();
    config["solve_options"] = {{"n_max", 1}};  // capacity needs two points
    auto r = run("solve", config);
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.out);
    CHECK(doc.at("certified") == false);
    CHECK(doc.at("certificate").at("passed") == false);

    json sweep_config = gaussian_config();
    sweep_config["solve_options"] = {{"n_max", 1}};
    sweep_config["peaks"] = {1.0};
    auto s = run("sweep", sweep_config, "csv");
    CHECK(s.exit_code == 2);
    CHECK(s.out.find("uncertified") != std::string::npos);
}

TEST_CASE("sweep validates its peak list and handles single entries") {
    json single = gaussian_config();
    single["peaks"] = {0.75};
    auto r = run("sweep", single);
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    REQUIRE(doc.at("rows").size() == 1);
    CHECK(doc.at("rows")[0].at("status") == "ok");

    json bad = gaussian_config();
    bad["peaks"] = {1.0, 0.5};
    CHECK(run("sweep", bad).exit_code == 1);
}

TEST_CASE("check-conditions passes for built-in channels") {
    json config{{"channel", {{"kind", "rayleigh"}, {"peak", 1.0}}},
                {"grids", {{"x", 100}, {"y", 2000}}}};
    auto r = run("check-conditions", config);
    CHECK(r.exit_code == 0);
    json doc = json::parse(r.out);
    CHECK(doc.at("overall") == true);
    CHECK(doc.at("checks").is_array());
}

TEST_CASE("check-conditions flags a violated envelope") {
    json config{
        {"channel",
         {{"kind", "additive"},
          {"peak", 1.0},
          {"noise_table", {{-0.5, 1.0}, {0.5, 1.0}}},
          {"envelope_q_table", {{-1.5, 0.0}, {1.5, 0.0}}},
          {"envelope_Q_table", {{-1.5, 0.05}, {1.5, 0.05}}},  // below the density
          {"envelope_K", 1.0}}},
        {"grids", {{"x", 100}, {"y", 500}}}};
    auto r = run("check-conditions", config);
    CHECK(r.exit_code == 2);
    json doc = json::parse(r.out);
    CHECK(doc.at("overall") == false);
}

TEST_CASE("configuration errors exit with code 1") {
    auto malformed = write_temp("malformed", "{ not json");
    AppOptions opts;
    opts.config_path = malformed.string();
    std::ostringstream out, err;
    CHECK(run_command("solve", opts, out, err) == 1);
    CHECK(err.str().find("malformed") != std::string::npos);

    json missing_env{{"channel",
                      {{"kind", "additive"},
                       {"peak", 1.0},
                       {"noise_table", {{-0.5, 1.0}, {0.5, 1.0}}}}}};
    CHECK(run("check-conditions", missing_env).exit_code == 1);

    CHECK(run("solve", gaussian_config(), "csv").exit_code == 1);

    json unknown{{"channel", {{"kind", "cauchy"}, {"peak", 1.0}}}};
    CHECK(run("solve", unknown).exit_code == 1);
}
