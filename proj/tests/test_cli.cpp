#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "levygs/commands.hpp"
#include "levygs/run_config.hpp"

using namespace levygs;

namespace {
RunConfig small_cfg() {
    RunConfig c;
    c.n_paths = 5000;
    c.horizon = 2000;
    c.query_x = {0.0};
    c.query_q = {0.05};
    c.query_b = {4.0};
    c.rel_tol = 1e-7;
    return c;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}
}

TEST_CASE("config round-trips through its canonical text") {
    RunConfig c = small_cfg();
    const std::string once = c.to_string();
    const std::string twice = RunConfig::parse(once).to_string();
    CHECK(once == twice);
    // And the round-tripped config produces bit-identical results.
    const auto r1 = cmd_compute(c);
    const auto r2 = cmd_compute(RunConfig::parse(once));
    CHECK(r1.table == r2.table);
}

TEST_CASE("config parser rejects unknown keys and bad values") {
    CHECK_THROWS_AS(RunConfig::parse("[model]\nbogus = 1\n"), ValidationError);
    CHECK_THROWS_AS(RunConfig::parse("[model]\ndrift = abc\n"), ValidationError);
    CHECK_THROWS_AS(RunConfig::parse("no_equals_sign"), ValidationError);
}

TEST_CASE("compute emits a lexicographically sorted grid with a fixed header") {
    RunConfig c = small_cfg();
    c.query_x = {1.0, 0.0, 2.0};
    c.query_q = {0.05, 0.0};
    c.query_b = {5.0, 3.0};
    const auto res = cmd_compute(c);
    const auto ls = lines_of(res.table);
    CHECK(ls.size() == 1 + 3 * 2 * 2);
    CHECK(ls[0] ==
          "x,q,b,value,numerator,denominator,quad_error,A,B,C,D,E,F,J,U,sigma_block,I,"
          "x_jump,x_creep_gap,x_recovery_weight");
    // First column grid is sorted: x-major then q then b.
    std::vector<double> xs;
    for (std::size_t i = 1; i < ls.size(); ++i)
        xs.push_back(std::strtod(ls[i].c_str(), nullptr));
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) CHECK(xs[i] <= xs[i + 1]);
    CHECK(res.exit_code == 0);
}

TEST_CASE("zero-mark compute column equals the classical value") {
    RunConfig c = small_cfg();
    c.severity_value = 0.0;
    c.query_q = {0.0};
    c.query_b = {5.0};
    c.query_x = {0.0};
    const auto res = cmd_compute(c);
    const auto ls = lines_of(res.table);
    const double value = [&] {
        std::stringstream ss(ls[1]);
        std::string cell;
        for (int i = 0; i < 4; ++i) std::getline(ss, cell, ',');
        return std::strtod(cell.c_str(), nullptr);
    }();
    GsOptions opt = c.gs_options();
    auto W = build_scale(c.build_model(), 0.0);
    CHECK(value == doctest::Approx(classical_gs(W, 0.0, 5.0, c.build_penalty(), opt))
                       .epsilon(1e-9));
}

TEST_CASE("simulate output is deterministic across reruns and worker counts") {
    RunConfig c = small_cfg();
    const auto a = cmd_simulate(c);
    const auto b = cmd_simulate(c);
    CHECK(a.table == b.table);
    RunConfig c1 = c;
    c1.threads = 1;
    RunConfig c2 = c;
    c2.threads = 3;
    CHECK(cmd_simulate(c1).table == cmd_simulate(c2).table);
    CHECK(a.table.find("mean_half_dt") != std::string::npos);
}

TEST_CASE("compare passes on a matched configuration") {
    RunConfig c = small_cfg();
    c.n_paths = 40000;
    const auto res = cmd_compare(c);
    CHECK(res.exit_code == 0);
}

TEST_CASE("compare trips its z gate when the tolerance is absurd") {
    RunConfig c = small_cfg();
    c.n_paths = 40000;
    c.z_max = 1e-4;
    const auto res = cmd_compare(c);
    CHECK(res.exit_code == 3);
}

TEST_CASE("mismatched barrier between formula and simulation is caught") {
    // Negative control for the z statistic itself.
    RunConfig c = small_cfg();
    c.n_paths = 40000;
    GsOptions opt = c.gs_options();
    const auto f = c.build_penalty();
    const auto Y = c.build_severity();
    const auto r = phi_x(c.build_model(), 0.0, 0.05, 5.0, f, Y, c.build_clock(), opt);
    const auto e = simulate_bv(c.build_model(), 0.0, 0.05, 3.0, f, Y, c.sim_config());
    const double z = (r.value - e.mean) / e.std_error;
    CHECK(std::fabs(z) > 4.0);
}

TEST_CASE("sweep shapes follow the selected axis") {
    RunConfig c = small_cfg();
    c.query_x = {0.0, 1.0, 2.0};
    c.query_q = {0.0, 0.05};
    c.query_b = {3.0, 4.0, 5.0, 6.0};
    c.query_y_scale = {0.5, 1.0, 2.0};
    CHECK(lines_of(cmd_sweep(c, "x").table).size() == 4);
    CHECK(lines_of(cmd_sweep(c, "q").table).size() == 3);
    CHECK(lines_of(cmd_sweep(c, "b").table).size() == 5);
    CHECK(lines_of(cmd_sweep(c, "y_scale").table).size() == 4);
    CHECK_THROWS_AS(cmd_sweep(c, "sigma"), ValidationError);

    // Larger marks cannot make bankruptcy before the barrier more likely.
    const auto ys = lines_of(cmd_sweep(c, "y_scale").table);
    std::vector<double> vals;
    for (std::size_t i = 1; i < ys.size(); ++i) {
        const auto pos = ys[i].rfind(',');
        vals.push_back(std::strtod(ys[i].substr(pos + 1).c_str(), nullptr));
    }
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) CHECK(vals[i + 1] <= vals[i] + 1e-8);
}

TEST_CASE("json mode emits one parseable object per row") {
    RunConfig c = small_cfg();
    const auto res = cmd_compute(c, true);
    const auto ls = lines_of(res.table);
    CHECK(ls.size() == 1);
    const auto obj = nlohmann::json::parse(ls[0]);
    CHECK(obj.contains("value"));
    CHECK(obj.contains("denominator"));
    CHECK(obj["x"].get<double>() == 0.0);
}
