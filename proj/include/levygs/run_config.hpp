#pragma once

#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "levygs/errors.hpp"
#include "levygs/gerber_shiu.hpp"
#include "levygs/levy_model.hpp"
#include "levygs/penalty.hpp"
#include "levygs/severity.hpp"
#include "levygs/simulator.hpp"

namespace levygs {

namespace cfgdetail {

inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string fmt_list(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(xs[i]);
    }
    return s;
}

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& s, const std::string& key) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || trim(end) != "")
        throw ValidationError("config: bad number for " + key + ": '" + s + "'");
    return v;
}

inline std::vector<double> parse_list(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(s);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, key));
    }
    return out;
}

inline bool parse_bool(const std::string& s, const std::string& key) {
    if (s == "true" || s == "1") return true;
    if (s == "false" || s == "0") return false;
    throw ValidationError("config: bad bool for " + key + ": '" + s + "'");
}

} // namespace cfgdetail

// Flat sectioned key-value run configuration. Every field has an explicit
// default; serializing always materializes all of them, so a printed config
// re-read through parse() reproduces identical runs.
struct RunConfig {
    // [model]
    std::string model_kind = "cramer_lundberg";
    double drift = 1.5;
    double sigma = 0.0;
    double jump_rate = 1.0;
    std::vector<double> claim_weights = {1.0};
    std::vector<double> claim_rates = {1.0};
    // [severity]
    std::string severity_kind = "point_mass";
    double severity_value = 1.0;
    double severity_rate = 1.0;
    std::vector<double> severity_weights = {};
    std::vector<double> severity_values = {};
    // [penalty]
    std::string penalty_kind = "one";
    double theta1 = 0.0;
    double theta2 = 0.0;
    double indicator_depth = 1.0;
    // [clock]
    double lambda = 1.0;
    // [numerics]
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    std::int64_t max_subdivisions = 2000;
    double tail_cut_mass = 1e-12;
    bool j_kernel_at_q = false;
    // [sim]
    std::int64_t n_paths = 100000;
    std::uint64_t seed = 1;
    double horizon = 10000.0;
    double euler_dt = 1e-3;
    double excursion_floor = 1e-4;
    bool antithetic = false;
    bool bridge_sampling = true;
    std::int64_t threads = 0;
    // [compare]
    double z_max = 4.0;
    // [query]
    std::vector<double> query_x = {0.0};
    std::vector<double> query_q = {0.0};
    std::vector<double> query_b = {5.0};
    std::vector<double> query_y_scale = {1.0};

    static RunConfig parse(const std::string& text) {
        RunConfig c;
        std::string section;
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = cfgdetail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') throw ValidationError("config: bad section: " + line);
                section = line.substr(1, line.size() - 2);
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos)
                throw ValidationError("config: expected key = value: " + line);
            const std::string key = cfgdetail::trim(line.substr(0, eq));
            const std::string val = cfgdetail::trim(line.substr(eq + 1));
            c.set(section, key, val);
        }
        return c;
    }

    void set(const std::string& section, const std::string& key, const std::string& val) {
        using namespace cfgdetail;
        const std::string k = section + "." + key;
        if (k == "model.kind") model_kind = val;
        else if (k == "model.drift") drift = parse_double(val, k);
        else if (k == "model.sigma") sigma = parse_double(val, k);
        else if (k == "model.jump_rate") jump_rate = parse_double(val, k);
        else if (k == "model.claim_weights") claim_weights = parse_list(val, k);
        else if (k == "model.claim_rates") claim_rates = parse_list(val, k);
        else if (k == "severity.kind") severity_kind = val;
        else if (k == "severity.value") severity_value = parse_double(val, k);
        else if (k == "severity.rate") severity_rate = parse_double(val, k);
        else if (k == "severity.weights") severity_weights = parse_list(val, k);
        else if (k == "severity.values") severity_values = parse_list(val, k);
        else if (k == "penalty.kind") penalty_kind = val;
        else if (k == "penalty.theta1") theta1 = parse_double(val, k);
        else if (k == "penalty.theta2") theta2 = parse_double(val, k);
        else if (k == "penalty.depth") indicator_depth = parse_double(val, k);
        else if (k == "clock.lambda") lambda = parse_double(val, k);
        else if (k == "numerics.rel_tol") rel_tol = parse_double(val, k);
        else if (k == "numerics.abs_tol") abs_tol = parse_double(val, k);
        else if (k == "numerics.max_subdivisions")
            max_subdivisions = static_cast<std::int64_t>(parse_double(val, k));
        else if (k == "numerics.tail_cut_mass") tail_cut_mass = parse_double(val, k);
        else if (k == "numerics.j_kernel_at_q") j_kernel_at_q = parse_bool(val, k);
        else if (k == "sim.n_paths") n_paths = static_cast<std::int64_t>(parse_double(val, k));
        else if (k == "sim.seed") seed = static_cast<std::uint64_t>(parse_double(val, k));
        else if (k == "sim.horizon") horizon = parse_double(val, k);
        else if (k == "sim.euler_dt") euler_dt = parse_double(val, k);
        else if (k == "sim.excursion_floor") excursion_floor = parse_double(val, k);
        else if (k == "sim.antithetic") antithetic = parse_bool(val, k);
        else if (k == "sim.bridge_sampling") bridge_sampling = parse_bool(val, k);
        else if (k == "sim.threads") threads = static_cast<std::int64_t>(parse_double(val, k));
        else if (k == "compare.z_max") z_max = parse_double(val, k);
        else if (k == "query.x") query_x = parse_list(val, k);
        else if (k == "query.q") query_q = parse_list(val, k);
        else if (k == "query.b") query_b = parse_list(val, k);
        else if (k == "query.y_scale") query_y_scale = parse_list(val, k);
        else throw ValidationError("config: unknown key '" + key + "' in [" + section + "]");
    }

    std::string to_string() const {
        using namespace cfgdetail;
        std::string s;
        s += "[model]\n";
        s += "kind = " + model_kind + "\n";
        s += "drift = " + fmt_double(drift) + "\n";
        s += "sigma = " + fmt_double(sigma) + "\n";
        s += "jump_rate = " + fmt_double(jump_rate) + "\n";
        s += "claim_weights = " + fmt_list(claim_weights) + "\n";
        s += "claim_rates = " + fmt_list(claim_rates) + "\n";
        s += "\n[severity]\n";
        s += "kind = " + severity_kind + "\n";
        s += "value = " + fmt_double(severity_value) + "\n";
        s += "rate = " + fmt_double(severity_rate) + "\n";
        s += "weights = " + fmt_list(severity_weights) + "\n";
        s += "values = " + fmt_list(severity_values) + "\n";
        s += "\n[penalty]\n";
        s += "kind = " + penalty_kind + "\n";
        s += "theta1 = " + fmt_double(theta1) + "\n";
        s += "theta2 = " + fmt_double(theta2) + "\n";
        s += "depth = " + fmt_double(indicator_depth) + "\n";
        s += "\n[clock]\n";
        s += "lambda = " + fmt_double(lambda) + "\n";
        s += "\n[numerics]\n";
        s += "rel_tol = " + fmt_double(rel_tol) + "\n";
        s += "abs_tol = " + fmt_double(abs_tol) + "\n";
        s += "max_subdivisions = " + std::to_string(max_subdivisions) + "\n";
        s += "tail_cut_mass = " + fmt_double(tail_cut_mass) + "\n";
        s += std::string("j_kernel_at_q = ") + (j_kernel_at_q ? "true" : "false") + "\n";
        s += "\n[sim]\n";
        s += "n_paths = " + std::to_string(n_paths) + "\n";
        s += "seed = " + std::to_string(seed) + "\n";
        s += "horizon = " + fmt_double(horizon) + "\n";
        s += "euler_dt = " + fmt_double(euler_dt) + "\n";
        s += "excursion_floor = " + fmt_double(excursion_floor) + "\n";
        s += std::string("antithetic = ") + (antithetic ? "true" : "false") + "\n";
        s += std::string("bridge_sampling = ") + (bridge_sampling ? "true" : "false") + "\n";
        s += "threads = " + std::to_string(threads) + "\n";
        s += "\n[compare]\n";
        s += "z_max = " + fmt_double(z_max) + "\n";
        s += "\n[query]\n";
        s += "x = " + fmt_list(query_x) + "\n";
        s += "q = " + fmt_list(query_q) + "\n";
        s += "b = " + fmt_list(query_b) + "\n";
        s += "y_scale = " + fmt_list(query_y_scale) + "\n";
        return s;
    }

    LevyModel build_model() const {
        std::vector<ClaimComponent> claims;
        if (claim_weights.size() != claim_rates.size())
            throw ValidationError("config: claim_weights and claim_rates differ in length");
        for (std::size_t i = 0; i < claim_weights.size(); ++i)
            claims.push_back({claim_weights[i], claim_rates[i]});
        if (model_kind == "cramer_lundberg")
            return LevyModel::cramer_lundberg(drift, jump_rate, std::move(claims));
        if (model_kind == "brownian_drift") return LevyModel::brownian_drift(drift, sigma);
        if (model_kind == "jump_diffusion")
            return LevyModel::jump_diffusion(drift, sigma, jump_rate, std::move(claims));
        throw ValidationError("config: unknown model kind '" + model_kind + "'");
    }

    SeverityDistribution build_severity(double y_scale = 1.0) const {
        if (!(y_scale > 0.0)) throw ValidationError("config: y_scale must be > 0");
        if (severity_kind == "point_mass")
            return SeverityDistribution::point_mass(severity_value * y_scale);
        if (severity_kind == "exponential")
            return SeverityDistribution::exponential(severity_rate / y_scale);
        if (severity_kind == "mixture") {
            if (severity_weights.size() != severity_values.size() || severity_weights.empty())
                throw ValidationError("config: severity mixture needs matching weights/values");
            std::vector<SeverityAtom> atoms;
            for (std::size_t i = 0; i < severity_weights.size(); ++i)
                atoms.push_back({severity_weights[i], severity_values[i] * y_scale});
            return SeverityDistribution::mixture(std::move(atoms));
        }
        throw ValidationError("config: unknown severity kind '" + severity_kind + "'");
    }

    PenaltySpec build_penalty() const {
        if (penalty_kind == "one") return PenaltySpec::one();
        if (penalty_kind == "exp_deficit") return PenaltySpec::exp_deficit(theta2);
        if (penalty_kind == "exp_both") return PenaltySpec::exp_both(theta1, theta2);
        if (penalty_kind == "deficit_indicator")
            return PenaltySpec::deficit_indicator(indicator_depth);
        throw ValidationError("config: unknown penalty kind '" + penalty_kind + "'");
    }

    CreepClock build_clock() const { return CreepClock::with_rate(lambda); }

    GsOptions gs_options() const {
        GsOptions o;
        o.quad.rel_tol = rel_tol;
        o.quad.abs_tol = abs_tol;
        o.quad.max_subdivisions = static_cast<int>(max_subdivisions);
        o.quad.tail_cut_mass = tail_cut_mass;
        o.quad.validate();
        o.j_kernel_at_q = j_kernel_at_q;
        return o;
    }

    SimConfig sim_config() const {
        SimConfig s;
        s.n_paths = n_paths;
        s.seed = seed;
        s.horizon = horizon;
        s.euler_dt = euler_dt;
        s.excursion_floor = excursion_floor;
        s.antithetic = antithetic;
        s.bridge_sampling = bridge_sampling;
        s.threads = static_cast<int>(threads);
        s.validate();
        return s;
    }

    void validate_query() const {
        if (query_x.empty() || query_q.empty() || query_b.empty() || query_y_scale.empty())
            throw ValidationError("config: query lists must be nonempty");
    }
};

} // namespace levygs
