#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <json.hpp>

#include "levygs/gerber_shiu.hpp"
#include "levygs/run_config.hpp"
#include "levygs/simulator.hpp"

namespace levygs {

struct CommandResult {
    std::string table;
    int exit_code = 0;
};

namespace cmddetail {

using cfgdetail::fmt_double;

struct Row {
    std::vector<std::pair<std::string, std::string>> cells;
    void add(const std::string& k, double v) { cells.emplace_back(k, fmt_double(v)); }
    void add(const std::string& k, std::int64_t v) { cells.emplace_back(k, std::to_string(v)); }
    void add_raw(const std::string& k, const std::string& v) { cells.emplace_back(k, v); }
};

inline std::string render(const std::vector<Row>& rows, bool json) {
    std::string out;
    if (rows.empty()) return out;
    if (json) {
        for (const auto& r : rows) {
            nlohmann::ordered_json o;
            for (const auto& [k, v] : r.cells) {
                if (v.empty()) {
                    o[k] = nullptr;
                } else {
                    char* end = nullptr;
                    const double d = std::strtod(v.c_str(), &end);
                    if (end && *end == '\0') o[k] = d;
                    else o[k] = v;
                }
            }
            out += o.dump();
            out += "\n";
        }
        return out;
    }
    for (std::size_t i = 0; i < rows.front().cells.size(); ++i) {
        if (i) out += ",";
        out += rows.front().cells[i].first;
    }
    out += "\n";
    for (const auto& r : rows) {
        for (std::size_t i = 0; i < r.cells.size(); ++i) {
            if (i) out += ",";
            out += r.cells[i].second;
        }
        out += "\n";
    }
    return out;
}

inline std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

inline double term_or_zero(const GerberShiuResult& r, const std::string& k) {
    const auto it = r.terms.find(k);
    return it == r.terms.end() ? 0.0 : it->second;
}

inline Row compute_row(double x, double q, double b, const GerberShiuResult& r) {
    Row row;
    row.add("x", x);
    row.add("q", q);
    row.add("b", b);
    row.add("value", r.value);
    row.add("numerator", r.numerator);
    row.add("denominator", r.denominator);
    row.add("quad_error", r.quad_error);
    for (const char* k : {"A", "B", "C", "D", "E", "F", "J", "U", "sigma_block", "I",
                          "x_jump", "x_creep_gap", "x_recovery_weight"})
        row.add(k, term_or_zero(r, k));
    return row;
}

inline Row simulate_row(double x, double q, double b, const SimEstimate& e) {
    Row row;
    row.add("x", x);
    row.add("q", q);
    row.add("b", b);
    row.add("mean", e.mean);
    row.add("std_error", e.std_error);
    row.add("n_paths", e.n_paths);
    row.add("n_bankrupt", e.n_bankrupt);
    row.add("n_upcrossed", e.n_upcrossed);
    row.add("n_censored", e.n_censored);
    row.add("censor_bound", e.censor_bound);
    if (e.has_refinement) {
        row.add("dt", e.dt);
        row.add("mean_half_dt", e.mean_half_dt);
        row.add("se_half_dt", e.se_half_dt);
    } else {
        row.add_raw("dt", "");
        row.add_raw("mean_half_dt", "");
        row.add_raw("se_half_dt", "");
    }
    return row;
}

inline SimEstimate run_sim(const RunConfig& cfg, double x, double q, double b) {
    const LevyModel model = cfg.build_model();
    const auto f = cfg.build_penalty();
    const auto Y = cfg.build_severity();
    const SimConfig sim = cfg.sim_config();
    if (model.variation_class() == VariationClass::Bounded)
        return simulate_bv(model, x, q, b, f, Y, sim);
    return simulate_ubv(model, x, q, b, f, Y, cfg.build_clock(), sim);
}

} // namespace cmddetail

// One row per (x, q, b) grid point, lexicographic order, with the term
// breakdown of the assembled penalty value.
inline CommandResult cmd_compute(const RunConfig& cfg, bool json = false) {
    cfg.validate_query();
    const LevyModel model = cfg.build_model();
    const auto f = cfg.build_penalty();
    const auto Y = cfg.build_severity();
    const auto clock = cfg.build_clock();
    const auto opt = cfg.gs_options();
    std::vector<cmddetail::Row> rows;
    for (double x : cmddetail::sorted(cfg.query_x))
        for (double q : cmddetail::sorted(cfg.query_q))
            for (double b : cmddetail::sorted(cfg.query_b)) {
                const auto r = phi_x(model, x, q, b, f, Y, clock, opt);
                rows.push_back(cmddetail::compute_row(x, q, b, r));
            }
    return {cmddetail::render(rows, json), 0};
}

inline CommandResult cmd_simulate(const RunConfig& cfg, bool json = false) {
    cfg.validate_query();
    std::vector<cmddetail::Row> rows;
    for (double x : cmddetail::sorted(cfg.query_x))
        for (double q : cmddetail::sorted(cfg.query_q))
            for (double b : cmddetail::sorted(cfg.query_b)) {
                const auto e = cmddetail::run_sim(cfg, x, q, b);
                rows.push_back(cmddetail::simulate_row(x, q, b, e));
            }
    return {cmddetail::render(rows, json), 0};
}

// Formula vs Monte Carlo per grid point; nonzero exit when any |z| exceeds
// z_max.
inline CommandResult cmd_compare(const RunConfig& cfg, bool json = false) {
    cfg.validate_query();
    const LevyModel model = cfg.build_model();
    const auto f = cfg.build_penalty();
    const auto Y = cfg.build_severity();
    const auto clock = cfg.build_clock();
    const auto opt = cfg.gs_options();
    std::vector<cmddetail::Row> rows;
    bool fail = false;
    for (double x : cmddetail::sorted(cfg.query_x))
        for (double q : cmddetail::sorted(cfg.query_q))
            for (double b : cmddetail::sorted(cfg.query_b)) {
                const auto r = phi_x(model, x, q, b, f, Y, clock, opt);
                const auto e = cmddetail::run_sim(cfg, x, q, b);
                const double z = (r.value - e.mean) / std::max(e.std_error, 1e-300);
                if (std::fabs(z) > cfg.z_max) fail = true;
                cmddetail::Row row;
                row.add("x", x);
                row.add("q", q);
                row.add("b", b);
                row.add("phi_formula", r.value);
                row.add("phi_mc", e.mean);
                row.add("mc_stderr", e.std_error);
                row.add("z", z);
                rows.push_back(row);
            }
    return {cmddetail::render(rows, json), fail ? 3 : 0};
}

// Long-format table varying one axis; the other query coordinates are pinned
// to their first (smallest) value.
inline CommandResult cmd_sweep(const RunConfig& cfg, const std::string& axis,
                               bool json = false) {
    cfg.validate_query();
    const LevyModel model = cfg.build_model();
    const auto f = cfg.build_penalty();
    const auto clock = cfg.build_clock();
    const auto opt = cfg.gs_options();
    const double x0 = cmddetail::sorted(cfg.query_x).front();
    const double q0 = cmddetail::sorted(cfg.query_q).front();
    const double b0 = cmddetail::sorted(cfg.query_b).front();

    std::vector<double> grid;
    if (axis == "x") grid = cmddetail::sorted(cfg.query_x);
    else if (axis == "q") grid = cmddetail::sorted(cfg.query_q);
    else if (axis == "b") grid = cmddetail::sorted(cfg.query_b);
    else if (axis == "y_scale") grid = cmddetail::sorted(cfg.query_y_scale);
    else throw ValidationError("sweep axis must be one of x, q, b, y_scale");

    std::vector<cmddetail::Row> rows;
    for (double v : grid) {
        const double x = axis == "x" ? v : x0;
        const double q = axis == "q" ? v : q0;
        const double b = axis == "b" ? v : b0;
        const auto Y = cfg.build_severity(axis == "y_scale" ? v : 1.0);
        const auto r = phi_x(model, x, q, b, f, Y, clock, opt);
        cmddetail::Row row;
        row.add_raw("axis", axis);
        row.add("axis_value", v);
        row.add("x", x);
        row.add("q", q);
        row.add("b", b);
        row.add("value", r.value);
        rows.push_back(row);
    }
    return {cmddetail::render(rows, json), 0};
}

} // namespace levygs
