#pragma once

#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "heston/config.hpp"
#include "heston/mc.hpp"

// File emission for CLI runs: a JSON summary, a schema-tagged replicate
// CSV and the resolved configuration, all under one output directory.

namespace heston {

using Json = nlohmann::ordered_json;

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << text;
}

inline Json params_json(const RunConfig& cfg) {
    return Json{{"a", cfg.theta.a},       {"alpha", cfg.theta.alpha},
                {"b", cfg.theta.b},       {"beta", cfg.theta.beta},
                {"sigma1", cfg.fixed.sigma1}, {"sigma2", cfg.fixed.sigma2},
                {"rho", cfg.fixed.rho},   {"y0", cfg.fixed.y0},
                {"x0", cfg.fixed.x0},     {"regime", to_string(cfg.regime())}};
}

inline Json summary_skeleton(const RunConfig& cfg) {
    Json j;
    j["schema"] = 1;
    j["job"] = cfg.experiment;
    j["params"] = params_json(cfg);
    j["T"] = cfg.T;
    j["M"] = cfg.M;
    j["statistics"] = Json::object();
    j["flags"] = Json::object();
    j["seed"] = cfg.master_seed;
    return j;
}

inline void write_replicates_csv(const std::filesystem::path& path,
                                 const std::vector<std::string>& columns,
                                 const std::vector<std::vector<double>>& rows,
                                 const std::vector<std::int64_t>& flags) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    os << "# schema: 1\n";
    os << "replicate";
    for (const auto& c : columns) os << ',' << c;
    os << ",flags\n";
    os.precision(17);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << i;
        for (double v : rows[i]) os << ',' << v;
        os << ',' << (i < flags.size() ? flags[i] : 0) << '\n';
    }
}

struct OutputDir {
    std::filesystem::path dir;

    explicit OutputDir(const RunConfig& cfg) {
        dir = cfg.out_dir.empty() ? std::filesystem::path("out-" + cfg.experiment)
                                  : std::filesystem::path(cfg.out_dir);
        std::filesystem::create_directories(dir);
        write_text_file(dir / "config.resolved", serialize_config(cfg));
    }

    void summary(const Json& j) const { write_text_file(dir / "summary.json", j.dump(2) + "\n"); }
};

}  // namespace heston
