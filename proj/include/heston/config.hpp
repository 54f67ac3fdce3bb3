#pragma once

#include <cctype>
#include <cstdint>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "heston/model.hpp"

// Flat key = value run configuration. Unknown keys, duplicate keys, type
// errors and domain violations are rejected with line-numbered messages;
// every run writes its resolved configuration next to its outputs.

namespace heston {

struct RunConfig {
    std::string experiment;

    DriftParams theta;
    FixedCoeffs fixed;

    double T = 100.0;
    std::vector<double> T_list;
    std::int64_t n_steps = 0;      // 0 = grid chosen from T
    std::int64_t limit_steps = 0;  // 0 = default limit-draw grid
    std::int64_t M = 1000;
    std::uint64_t master_seed = 12345;
    std::string out_dir;

    // experiment-specific knobs
    std::int64_t n_configs = 200;  // quadcheck sweep size
    std::int64_t n_h = 5;          // laq: number of random h directions
    double level = 0.05;           // power: test level
    int coord = 3;                 // power: tested coordinate, 1..4
    Vec4 h{0.0, 0.0, 1.0, 0.0};    // power: local alternative
    double mu = 0.5;               // oracle: Laplace argument
    double marginal_T = 50.0;      // ergodic: marginal horizon
    std::int64_t marginal_M = 10000;

    // acceptance thresholds (CLI exit code 2 when violated)
    double tol_quad_rel = 1e-8;
    double tol_ks = 0.05;
    double tol_avg_rel = 0.05;
    double tol_gamma_ks = 0.03;
    double tol_info_gap = 0.1;
    double tol_power_abs = 0.05;
    double tol_cov_rel = 0.15;
    double se_mult = 3.0;

    Regime regime() const { return classify_regime(theta.b); }
};

namespace detail {

struct RawEntry {
    std::string value;
    int line = 0;
    bool used = false;
};

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

[[noreturn]] inline void fail(int line, const std::string& msg) {
    throw std::invalid_argument("config line " + std::to_string(line) + ": " + msg);
}

inline double parse_double(const std::string& v, int line, const std::string& key) {
    double x = 0.0;
    std::size_t pos = 0;
    try {
        x = std::stod(v, &pos);
    } catch (const std::invalid_argument&) {
        fail(line, key + ": expected a number, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, key + ": number out of range: '" + v + "'");
    }
    if (pos != v.size()) fail(line, key + ": trailing characters in '" + v + "'");
    return x;
}

inline std::int64_t parse_int(const std::string& v, int line, const std::string& key) {
    long long x = 0;
    std::size_t pos = 0;
    try {
        x = std::stoll(v, &pos);
    } catch (const std::invalid_argument&) {
        fail(line, key + ": expected an integer, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, key + ": integer out of range: '" + v + "'");
    }
    if (pos != v.size()) fail(line, key + ": trailing characters in '" + v + "'");
    return x;
}

inline std::uint64_t parse_uint(const std::string& v, int line, const std::string& key) {
    unsigned long long x = 0;
    std::size_t pos = 0;
    try {
        x = std::stoull(v, &pos);
    } catch (const std::invalid_argument&) {
        fail(line, key + ": expected an integer, got '" + v + "'");
    } catch (const std::out_of_range&) {
        fail(line, key + ": integer out of range: '" + v + "'");
    }
    if (pos != v.size() || v.find('-') != std::string::npos)
        fail(line, key + ": expected a non-negative integer, got '" + v + "'");
    return x;
}

inline std::vector<double> parse_list(const std::string& v, int line, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) fail(line, key + ": empty list element");
        out.push_back(parse_double(item, line, key));
    }
    if (out.empty()) fail(line, key + ": empty list");
    return out;
}

}  // namespace detail

inline const std::vector<std::string>& known_experiments() {
    static const std::vector<std::string> names{"simulate", "quadcheck", "laq", "converge",
                                                "power", "mle", "ergodic", "oracle"};
    return names;
}

inline RunConfig parse_config(const std::string& text) {
    std::map<std::string, detail::RawEntry> entries;
    {
        std::stringstream ss(text);
        std::string line;
        int lineno = 0;
        while (std::getline(ss, line)) {
            ++lineno;
            const std::size_t hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            if (line.front() == '[' && line.back() == ']') continue;  // optional section header
            const std::size_t eq = line.find('=');
            if (eq == std::string::npos) detail::fail(lineno, "expected 'key = value'");
            const std::string key = detail::trim(line.substr(0, eq));
            const std::string value = detail::trim(line.substr(eq + 1));
            if (key.empty()) detail::fail(lineno, "empty key");
            if (value.empty()) detail::fail(lineno, "empty value for key '" + key + "'");
            const auto it = entries.find(key);
            if (it != entries.end())
                detail::fail(lineno, "duplicate key '" + key + "' (first set on line " +
                                         std::to_string(it->second.line) + ")");
            entries[key] = {value, lineno, false};
        }
    }

    RunConfig cfg;
    auto take = [&entries](const std::string& key) -> detail::RawEntry* {
        const auto it = entries.find(key);
        if (it == entries.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    };
    auto get_double = [&](const std::string& key, double& slot) {
        if (auto* e = take(key)) slot = detail::parse_double(e->value, e->line, key);
    };
    auto get_int = [&](const std::string& key, std::int64_t& slot) {
        if (auto* e = take(key)) slot = detail::parse_int(e->value, e->line, key);
    };

    if (auto* e = take("experiment")) {
        cfg.experiment = e->value;
        bool ok = false;
        for (const auto& name : known_experiments()) ok = ok || name == cfg.experiment;
        if (!ok) detail::fail(e->line, "unknown experiment '" + cfg.experiment + "'");
    } else {
        throw std::invalid_argument("config: missing required key 'experiment'");
    }

    get_double("a", cfg.theta.a);
    get_double("alpha", cfg.theta.alpha);
    get_double("b", cfg.theta.b);
    get_double("beta", cfg.theta.beta);
    get_double("sigma1", cfg.fixed.sigma1);
    get_double("sigma2", cfg.fixed.sigma2);
    get_double("rho", cfg.fixed.rho);
    get_double("y0", cfg.fixed.y0);
    get_double("x0", cfg.fixed.x0);
    get_double("T", cfg.T);
    if (auto* e = take("T_list")) cfg.T_list = detail::parse_list(e->value, e->line, "T_list");
    get_int("n_steps", cfg.n_steps);
    get_int("limit_steps", cfg.limit_steps);
    get_int("M", cfg.M);
    if (auto* e = take("master_seed")) cfg.master_seed = detail::parse_uint(e->value, e->line, "master_seed");
    if (auto* e = take("out_dir")) cfg.out_dir = e->value;
    get_int("n_configs", cfg.n_configs);
    get_int("n_h", cfg.n_h);
    get_double("level", cfg.level);
    if (auto* e = take("coord")) cfg.coord = static_cast<int>(detail::parse_int(e->value, e->line, "coord"));
    get_double("h1", cfg.h[0]);
    get_double("h2", cfg.h[1]);
    get_double("h3", cfg.h[2]);
    get_double("h4", cfg.h[3]);
    get_double("mu", cfg.mu);
    get_double("marginal_T", cfg.marginal_T);
    get_int("marginal_M", cfg.marginal_M);
    get_double("tol_quad_rel", cfg.tol_quad_rel);
    get_double("tol_ks", cfg.tol_ks);
    get_double("tol_avg_rel", cfg.tol_avg_rel);
    get_double("tol_gamma_ks", cfg.tol_gamma_ks);
    get_double("tol_info_gap", cfg.tol_info_gap);
    get_double("tol_power_abs", cfg.tol_power_abs);
    get_double("tol_cov_rel", cfg.tol_cov_rel);
    get_double("se_mult", cfg.se_mult);

    for (const auto& [key, entry] : entries)
        if (!entry.used) detail::fail(entry.line, "unknown key '" + key + "'");

    // cross-field validation, with the offending line when attributable
    auto line_of = [&entries](const std::string& key) {
        const auto it = entries.find(key);
        return it == entries.end() ? 0 : it->second.line;
    };
    try {
        cfg.theta.validate();
        cfg.fixed.validate();
    } catch (const std::invalid_argument& ex) {
        throw std::invalid_argument("config: " + std::string(ex.what()));
    }
    if (parameter_domain_check(cfg.theta.a, cfg.fixed.sigma1) == DomainStatus::Invalid)
        detail::fail(line_of("a"), "domain violation: a = " + std::to_string(cfg.theta.a) +
                                       " is below sigma1^2/2 = " +
                                       std::to_string(0.5 * cfg.fixed.sigma1 * cfg.fixed.sigma1));
    if (!(cfg.T > 0.0)) detail::fail(line_of("T"), "T must be > 0");
    for (double t : cfg.T_list)
        if (!(t > 0.0)) detail::fail(line_of("T_list"), "T_list entries must be > 0");
    if (cfg.M < 1) detail::fail(line_of("M"), "M must be >= 1");
    if (cfg.n_steps < 0) detail::fail(line_of("n_steps"), "n_steps must be >= 0");
    if (!(cfg.level > 0.0 && cfg.level < 1.0)) detail::fail(line_of("level"), "level must be in (0,1)");
    if (cfg.coord < 1 || cfg.coord > 4) detail::fail(line_of("coord"), "coord must be in 1..4");
    return cfg;
}

// canonical resolved form, suitable for re-parsing
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "experiment = " << cfg.experiment << '\n';
    os << "a = " << cfg.theta.a << '\n';
    os << "alpha = " << cfg.theta.alpha << '\n';
    os << "b = " << cfg.theta.b << '\n';
    os << "beta = " << cfg.theta.beta << '\n';
    os << "sigma1 = " << cfg.fixed.sigma1 << '\n';
    os << "sigma2 = " << cfg.fixed.sigma2 << '\n';
    os << "rho = " << cfg.fixed.rho << '\n';
    os << "y0 = " << cfg.fixed.y0 << '\n';
    os << "x0 = " << cfg.fixed.x0 << '\n';
    os << "T = " << cfg.T << '\n';
    if (!cfg.T_list.empty()) {
        os << "T_list = ";
        for (std::size_t i = 0; i < cfg.T_list.size(); ++i)
            os << (i ? ", " : "") << cfg.T_list[i];
        os << '\n';
    }
    os << "n_steps = " << cfg.n_steps << '\n';
    os << "limit_steps = " << cfg.limit_steps << '\n';
    os << "M = " << cfg.M << '\n';
    os << "master_seed = " << cfg.master_seed << '\n';
    if (!cfg.out_dir.empty()) os << "out_dir = " << cfg.out_dir << '\n';
    os << "n_configs = " << cfg.n_configs << '\n';
    os << "n_h = " << cfg.n_h << '\n';
    os << "level = " << cfg.level << '\n';
    os << "coord = " << cfg.coord << '\n';
    os << "h1 = " << cfg.h[0] << '\n';
    os << "h2 = " << cfg.h[1] << '\n';
    os << "h3 = " << cfg.h[2] << '\n';
    os << "h4 = " << cfg.h[3] << '\n';
    os << "mu = " << cfg.mu << '\n';
    os << "marginal_T = " << cfg.marginal_T << '\n';
    os << "marginal_M = " << cfg.marginal_M << '\n';
    os << "tol_quad_rel = " << cfg.tol_quad_rel << '\n';
    os << "tol_ks = " << cfg.tol_ks << '\n';
    os << "tol_avg_rel = " << cfg.tol_avg_rel << '\n';
    os << "tol_gamma_ks = " << cfg.tol_gamma_ks << '\n';
    os << "tol_info_gap = " << cfg.tol_info_gap << '\n';
    os << "tol_power_abs = " << cfg.tol_power_abs << '\n';
    os << "tol_cov_rel = " << cfg.tol_cov_rel << '\n';
    os << "se_mult = " << cfg.se_mult << '\n';
    return os.str();
}

}  // namespace heston
