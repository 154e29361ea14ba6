#include "doctest.h"

#include "fracsmooth/cli.hpp"
#include "fracsmooth/error.hpp"

#include "json.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;
using namespace fracsmooth;

namespace {

struct Run {
    int code;
    std::string out;
    std::string err;
};

class Workspace {
public:
    explicit Workspace(const std::string& name) : dir_(fs::temp_directory_path() / ("fracsmooth_cli_" + name)) {
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    ~Workspace() { fs::remove_all(dir_); }

    [[nodiscard]] fs::path path(const std::string& leaf) const { return dir_ / leaf; }

    std::string config(const std::string& body) const {
        const fs::path p = dir_ / "problem.yaml";
        std::ofstream(p) << body << "output: " << (dir_ / "out").string() << "\n";
        return p.string();
    }

    Run run(std::vector<std::string> args) const {
        std::vector<const char*> argv{"fracsmooth"};
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
        return {code, out.str(), err.str()};
    }

    [[nodiscard]] std::string read(const std::string& leaf) const {
        std::ifstream is(dir_ / "out" / leaf, std::ios::binary);
        std::stringstream ss;
        ss << is.rdbuf();
        return ss.str();
    }

private:
    fs::path dir_;
};

// last row of a CSV as fields
std::vector<std::string> last_row(const std::string& csv) {
    std::istringstream is(csv);
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty()) last = line;
    std::vector<std::string> fields;
    std::string field;
    std::istringstream ls(last);
    while (std::getline(ls, field, ',')) fields.push_back(field);
    if (!last.empty() && last.back() == ',') fields.emplace_back();
    return fields;
}

}  // namespace

TEST_CASE("config parsing") {
    const cli::ProblemConfig c = cli::parse_config(
        "f: \"x^2*y\"\nalpha: 0.4\nc0: 2\na: 1\nb: 3\nn: 4\nsolver:\n  steps: 10\n  mode: both\n  t_end: 0.3\n"
        "tolerances:\n  route_agreement: 1e-9\n");
    CHECK(c.alpha == Alpha(2, 5));
    CHECK(c.c0 == 2.0);
    CHECK(c.b == 3.0);
    CHECK(c.n == 4);
    CHECK(c.solver.steps == 10);
    CHECK(c.solver.modes.size() == 2);
    CHECK(c.tolerances.route_agreement == 1e-9);
    CHECK_THROWS_AS(cli::parse_config("alpha: 1/2\n"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config("f: y\nalpha: 1/2\nb: -1\n"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config("f: y\nalpha: 1/2\nsolver:\n  mode: fast\n"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config("f: y +\nalpha: 1/2\n"), ParseError);
    CHECK_THROWS_AS(cli::parse_config("f: y\nalpha: 1/2\nn: [1]\n"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config("- just\n- a list\n"), ConfigError);
}

TEST_CASE("format_number uses 15 significant digits") {
    CHECK(cli::format_number(M_PI) == "3.14159265358979");
    CHECK(cli::format_number(INFINITY) == "inf");
    CHECK(cli::format_number(0.5) == "0.5");
}

TEST_CASE("expand writes both routes and Q") {
    Workspace w("expand");
    const std::string cfg = w.config("f: \"1\"\nalpha: \"1/2\"\nn: 5\n");
    const Run r = w.run({"expand", "--config", cfg});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("1.12837916709551") != std::string::npos);
    const auto doc = nlohmann::json::parse(w.read("expansion.json"));
    CHECK(doc["m"] == 2);
    CHECK(doc["J"] == 3);
    CHECK(doc["alpha"]["p"] == 1);
    CHECK(doc["alpha"]["q"] == 2);
    CHECK(doc["terms"][0]["coefficient"].get<double>() == doctest::Approx(1.128379167095513).epsilon(1e-14));
    CHECK(doc["terms"][0]["singular"] == true);
    CHECK(doc["terms"][1]["coefficient"].get<double>() == 0.0);
    CHECK(doc["terms"][1]["singular"] == false);
    CHECK(doc["terms"][2]["coefficient"].get<double>() == 0.0);
    CHECK(doc["routes"]["max_discrepancy"].get<double>() <= 1e-10);
    CHECK(doc["Q"]["terms"].size() == 1);
}

TEST_CASE("expand for f = y lists the Mittag-Leffler coefficients") {
    Workspace w("expand_y");
    const Run r = w.run({"expand", "--config", w.config("f: y\nalpha: \"1/2\"\nc0: 1\nn: 5\n")});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(w.read("expansion.json"));
    CHECK(doc["terms"][0]["coefficient"].get<double>() == doctest::Approx(1.128379167095513).epsilon(1e-14));
    CHECK(doc["terms"][1]["coefficient"].get<double>() == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(doc["terms"][2]["coefficient"].get<double>() == doctest::Approx(0.752252778063675).epsilon(1e-14));
}

TEST_CASE("exit codes partition the error classes") {
    Workspace w("codes");
    Run r = w.run({"expand", "--config", w.config("f: y\nalpha: \"3/2\"\nn: 5\n")});
    CHECK(r.code == cli::kConfigError);
    CHECK(r.err.find("alpha must lie in (0,1)") != std::string::npos);

    r = w.run({"expand", "--config", w.path("missing.yaml").string()});
    CHECK(r.code == cli::kConfigError);

    r = w.run({"expand"});
    CHECK(r.code == cli::kConfigError);

    r = w.run({"check", "--config", w.config("f: \"log(y)\"\nalpha: \"1/2\"\nn: 5\nc0: 0\n")});
    CHECK(r.code == cli::kDomainError);

    r = w.run({"solve", "--config", w.config("f: y\nalpha: \"1/2\"\nn: 5\nc0: 1\nb: 1\nsolver:\n  t_end: 0.5\n"),
               "--steps", "40"});
    CHECK(r.code == cli::kDomainError);
    CHECK(r.err.find("step") != std::string::npos);
}

TEST_CASE("check reports the verdict") {
    Workspace w("check");
    Run r = w.run({"check", "--config", w.config("f: x\nalpha: \"1/2\"\nn: 5\n")});
    REQUIRE(r.code == 0);
    auto doc = nlohmann::json::parse(w.read("smoothness.json"));
    CHECK(doc["condition_holds"] == false);
    CHECK(doc["first_violating_i"] == 1);
    REQUIRE(doc["singular_coeffs"].size() == 1);
    CHECK(doc["singular_coeffs"][0]["coefficient"].get<double>() ==
          doctest::Approx(0.752252778063675).epsilon(1e-14));

    r = w.run({"check", "--config", w.config("f: \"(y - 0.5)*x\"\nalpha: \"1/2\"\nn: 5\nc0: 0.5\n")});
    REQUIRE(r.code == 0);
    doc = nlohmann::json::parse(w.read("smoothness.json"));
    CHECK(doc["condition_holds"] == true);
    CHECK(doc["all_coeffs_zero"] == true);

    r = w.run({"check", "--config", w.config("f: \"1\"\nalpha: \"1/2\"\nn: 5\n")});
    doc = nlohmann::json::parse(w.read("smoothness.json"));
    CHECK(doc["first_violating_i"] == 0);
}

TEST_CASE("hstar prints M and h*") {
    Workspace w("hstar");
    const Run r = w.run({"hstar", "--config", w.config("f: \"1\"\nalpha: \"1/2\"\na: 1\nb: 1\nn: 2\n")});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("= 1\n") != std::string::npos);
    CHECK(r.out.find("h* = 0.785398163397448") != std::string::npos);

    const Run b = w.run({"hstar", "--config",
                         w.config("f: \"y + x\"\nalpha: \"1/2\"\nc0: 1\nn: 5\nb: 2\nbudget:\n  K: 2\n")});
    REQUIRE(b.code == 0);
    CHECK(b.out.find("largest h with the budget satisfied") != std::string::npos);
}

TEST_CASE("order of an exact method is reported as inf") {
    Workspace w("order");
    const Run r = w.run({"order", "--config",
                         w.config("f: \"1\"\nalpha: \"1/2\"\nn: 5\nb: 10\nsolver:\n  t_end: 1\n  steps: 16\n"
                                  "  reference:\n    expr: \"x^0.5/0.886226925452758\"\n")});
    REQUIRE(r.code == 0);
    const std::string csv = w.read("order.csv");
    CHECK(csv.rfind("mode,steps,error,order\n", 0) == 0);
    CHECK(last_row(csv).back() == "inf");
}

TEST_CASE("solve f = y regularized") {
    Workspace w("solve");
    const Run r = w.run({"solve", "--config",
                         w.config("f: y\nalpha: \"1/2\"\nc0: 1\nn: 5\nb: 5\nsolver:\n  t_end: 0.5\n"
                                  "  reference:\n    mittag_leffler: 1\n"),
                         "--mode", "regularized", "--steps", "160"});
    REQUIRE(r.code == 0);
    const std::string csv = w.read("solve_regularized.csv");
    CHECK(csv.rfind("step_index,x,y,z,S_of_x,abs_err_vs_reference\n", 0) == 0);
    const auto row = last_row(csv);
    REQUIRE(row.size() == 6);
    CHECK(row[0] == "160");
    CHECK(std::stod(row[1]) == 0.5);
    CHECK(std::stod(row[5]) <= 1e-4);

    const Run d = w.run({"solve", "--config", w.path("problem.yaml").string(), "--mode", "direct"});
    REQUIRE(d.code == 0);
    const auto drow = last_row(w.read("solve_direct.csv"));
    CHECK(drow[3].empty());
}

TEST_CASE("reruns produce byte-identical files") {
    Workspace w("determinism");
    const std::string cfg = w.config(
        "f: \"sin(x) + y^2 - x*y\"\nalpha: \"2/5\"\nc0: 0.5\nn: 6\nb: 5\nsolver:\n  t_end: 0.3\n  steps: 40\n"
        "  mode: both\n");
    std::map<std::string, std::string> first;
    for (int pass = 0; pass < 2; ++pass) {
        for (const char* cmd : {"expand", "check", "solve", "order"}) REQUIRE(w.run({cmd, "--config", cfg}).code == 0);
        for (const char* f : {"expansion.json", "smoothness.json", "solve_direct.csv", "solve_regularized.csv",
                              "order.csv"}) {
            const std::string body = w.read(f);
            CHECK_FALSE(body.empty());
            if (pass == 0) first[f] = body;
            else CHECK(first[f] == body);
        }
    }
}
