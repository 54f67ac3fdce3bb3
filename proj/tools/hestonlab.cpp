#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "heston/cli.hpp"
#include "heston/config.hpp"

namespace {

void print_usage(std::ostream& os) {
    os << "usage: hestonlab <subcommand> [--config FILE] [--seed N] [--out DIR]\n"
          "\n"
          "subcommands:\n"
          "  simulate   one sample path, dumped as CSV\n"
          "  quadcheck  exact quadratic identity sweep over random configurations\n"
          "  laq        empirical local-asymptotic-quadraticity conditions\n"
          "  converge   finite-horizon statistics against limit-law draws\n"
          "  power      size and power of the optimal score tests\n"
          "  mle        drift MLE: scaled errors or the minimax bound\n"
          "  ergodic    long-run averages and the stationary Gamma marginal\n"
          "  oracle     Laplace-transform closed form against exact-scheme MC\n"
          "\n"
          "The config file is flat 'key = value' text; the subcommand must match\n"
          "its 'experiment' key when both are given. --seed overrides master_seed.\n"
          "Outputs (summary.json, config.resolved, CSV files) go to --out, default\n"
          "./out-<subcommand>. Exit codes: 0 ok, 1 usage/config error, 2 finished\n"
          "but an acceptance threshold was violated. LAQ_THREADS caps parallelism.\n";
}

}  // namespace

int main(int argc, char** argv) {
    using heston::RunConfig;

    if (argc < 2) {
        print_usage(std::cerr);
        return 1;
    }
    const std::string sub = argv[1];
    if (sub == "-h" || sub == "--help" || sub == "help") {
        print_usage(std::cout);
        return 0;
    }
    bool known = false;
    for (const auto& name : heston::known_experiments()) known = known || name == sub;
    if (!known) {
        std::cerr << "hestonlab: unknown subcommand '" << sub << "'\n\n";
        print_usage(std::cerr);
        return 1;
    }

    std::string config_file, out_dir, seed_str;
    for (int i = 2; i < argc; ++i) {
        const std::string arg = argv[i];
        auto need_value = [&](const char* flag) -> std::string {
            if (i + 1 >= argc) {
                throw std::invalid_argument(std::string(flag) + " requires a value");
            }
            return argv[++i];
        };
        try {
            if (arg == "--config")
                config_file = need_value("--config");
            else if (arg == "--seed")
                seed_str = need_value("--seed");
            else if (arg == "--out")
                out_dir = need_value("--out");
            else
                throw std::invalid_argument("unknown option '" + arg + "'");
        } catch (const std::invalid_argument& ex) {
            std::cerr << "hestonlab: " << ex.what() << "\n";
            return 1;
        }
    }

    try {
        RunConfig cfg;
        if (!config_file.empty()) {
            std::ifstream is(config_file);
            if (!is) {
                std::cerr << "hestonlab: cannot read config file '" << config_file << "'\n";
                return 1;
            }
            std::stringstream buf;
            buf << is.rdbuf();
            std::string text = buf.str();
            if (text.find("experiment") == std::string::npos)
                text = "experiment = " + sub + "\n" + text;
            cfg = heston::parse_config(text);
            if (cfg.experiment != sub) {
                std::cerr << "hestonlab: config experiment '" << cfg.experiment
                          << "' does not match subcommand '" << sub << "'\n";
                return 1;
            }
        } else {
            cfg = heston::parse_config("experiment = " + sub + "\n");
        }
        if (!seed_str.empty()) cfg.master_seed = std::stoull(seed_str);
        if (!out_dir.empty()) cfg.out_dir = out_dir;
        return heston::dispatch(cfg);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "hestonlab: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "hestonlab: error: " << ex.what() << "\n";
        return 1;
    }
}
