#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "heston/config.hpp"

using namespace heston;

namespace {
std::string error_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const std::invalid_argument& ex) {
        return ex.what();
    }
    return "";
}
}  // namespace

TEST_CASE("minimal config picks up defaults") {
    const RunConfig cfg = parse_config("experiment = laq\nmaster_seed = 99\n");
    CHECK(cfg.experiment == "laq");
    CHECK(cfg.master_seed == 99);
    CHECK(cfg.theta.a == 1.0);
    CHECK(cfg.theta.b == 1.0);
    CHECK(cfg.fixed.sigma1 == 1.0);
    CHECK(cfg.M == 1000);
    CHECK(cfg.regime() == Regime::Subcritical);
}

TEST_CASE("domain violation is rejected with the offending line") {
    const std::string err = error_of("experiment = simulate\na = 0.3\nsigma1 = 1\n");
    CHECK(err.find("line 2") != std::string::npos);
    CHECK(err.find("domain") != std::string::npos);
}

TEST_CASE("duplicate keys name both lines") {
    const std::string err = error_of("experiment = simulate\nT = 5\n\nT = 7\n");
    CHECK(err.find("duplicate key 'T'") != std::string::npos);
    CHECK(err.find("line 4") != std::string::npos);
    CHECK(err.find("line 2") != std::string::npos);
}

TEST_CASE("unknown key, missing experiment, type errors") {
    CHECK(error_of("experiment = simulate\nbogus = 1\n").find("unknown key 'bogus'") !=
          std::string::npos);
    CHECK(error_of("a = 1\n").find("experiment") != std::string::npos);
    CHECK(error_of("experiment = simulate\nT = fast\n").find("expected a number") !=
          std::string::npos);
    CHECK(error_of("experiment = simulate\nM = 1.5\n").find("trailing") != std::string::npos);
    CHECK(error_of("experiment = warp\n").find("unknown experiment") != std::string::npos);
    CHECK(error_of("experiment = simulate\nlevel = 1.5\n").find("level") != std::string::npos);
}

TEST_CASE("lists, comments and sections") {
    const RunConfig cfg = parse_config(
        "# run ladder\n"
        "[run]\n"
        "experiment = converge\n"
        "b = 0  # critical\n"
        "T_list = 100, 1000, 10000\n");
    REQUIRE(cfg.T_list.size() == 3);
    CHECK(cfg.T_list[2] == 10000.0);
    CHECK(cfg.regime() == Regime::Critical);
}

TEST_CASE("serialized config reparses to the same values") {
    RunConfig cfg = parse_config("experiment = power\nh3 = 0.5\ncoord = 3\nM = 250\nrho = -0.4\n");
    const RunConfig back = parse_config(serialize_config(cfg));
    CHECK(back.experiment == cfg.experiment);
    CHECK(back.h[2] == cfg.h[2]);
    CHECK(back.coord == cfg.coord);
    CHECK(back.M == cfg.M);
    CHECK(back.fixed.rho == cfg.fixed.rho);
    CHECK(back.master_seed == cfg.master_seed);
}
