#include <doctest.h>

#include <cmath>
#include <fstream>
#include <set>
#include <ios>
#include <string>

#include <hegsim_app/config.hpp>

using namespace hegsim::app;

namespace {

const char* kMinimal = R"([cavity]
g_mhz = 5
gamma_mhz = 0.25
kappa_in_mhz = 0.25
)";

std::string error_of(const std::string& text) {
    try {
        parse_config(text, "run.toml");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_CASE("value parsing") {
    const ConfigValue i = parse_value("200");
    CHECK(std::get<double>(i.data) == 200.0);
    CHECK(i.integer);
    CHECK_FALSE(parse_value("2e2").integer);
    CHECK_FALSE(parse_value("200.0").integer);
    CHECK(std::get<double>(parse_value("-1.5e-3").data) == -1.5e-3);
    CHECK(std::get<std::string>(parse_value("\"x y\"").data) == "x y");
    CHECK(std::get<bool>(parse_value("true").data));
    const auto list = std::get<std::vector<double>>(parse_value("[1, 2.5, 3e1]").data);
    CHECK(list == std::vector<double>{1, 2.5, 30});
    CHECK(std::get<std::vector<double>>(parse_value("[]").data).empty());
    CHECK_THROWS_AS(parse_value("abc"), ConfigError);
    CHECK(std::get<std::string>(parse_value("abc", true).data) == "abc");
    CHECK_THROWS_AS(parse_value("\"open"), ConfigError);
    CHECK_THROWS_AS(parse_value("[1, 2"), ConfigError);
    CHECK_THROWS_AS(parse_value("[1,,2]"), ConfigError);
    CHECK_THROWS_AS(parse_value(""), ConfigError);
    CHECK_THROWS_AS(parse_value("1.2.3"), ConfigError);
}

TEST_CASE("minimal file config") {
    const RunConfig cfg = parse_config(kMinimal, "run.toml");
    CHECK(cfg.cavity.g_mhz == 5.0);
    const auto c = cfg.cavity_params();
    CHECK(c.g == doctest::Approx(2 * M_PI * 5e6));
    CHECK(c.kappa_ex == 0.0);
    CHECK_FALSE(cfg.mux.p_trial.has_value());
    CHECK(cfg.mux.n_atoms == 200);
}

TEST_CASE("full config with comments and every section") {
    const RunConfig cfg = parse_config(R"(# header
[cavity]
g_mhz = 10      # comment
gamma_mhz = 0.5
kappa_in_mhz = 1

[pulse]
xi_trunc = 6
grid_points = 2048

[mux]
n_atoms = 100
p_trial = 0.3
zones = 2
t_move_us = 1000

[waveguide]
L_mm = [2, 4]
loss_db_per_m = [0]

[sim]
seed = 42
policy = "blocking"
m = 3
t_herald_us = 10

[heg]
tau_points = 16

[budget]
n = [9, 16]
)",
                                        "run.toml");
    CHECK(cfg.pulse.grid_points == 2048);
    CHECK(*cfg.mux.p_trial == 0.3);
    CHECK(cfg.waveguide.L_mm == std::vector<double>{2, 4});
    CHECK(cfg.sim.seed == 42);
    CHECK(cfg.budget.n == std::vector<double>{9, 16});
    const auto mux = cfg.mux_scenario(0.3);
    CHECK(mux.zones == 2);
    CHECK(mux.t_move == doctest::Approx(1e-3));
    const auto sim = cfg.sim_config(*cfg.mux.p_trial, 1);
    CHECK(sim.policy == hegsim::HeraldPolicy::blocking);
    CHECK(sim.fixed_m == 3);
    CHECK(sim.t_herald == doctest::Approx(10e-6));
    CHECK(sim.seed == 42);
    CHECK(cfg.pulse_spec(1e-7).trunc_xi == 6.0);
}

TEST_CASE("missing g_mhz names the key and section") {
    const std::string err = error_of("[cavity]\ngamma_mhz = 0.25\nkappa_in_mhz = 0.25\n");
    CHECK(err.find("g_mhz") != std::string::npos);
    CHECK(err.find("[cavity]") != std::string::npos);
    CHECK(err.find("run.toml") != std::string::npos);
}

TEST_CASE("a preset supplies g and gamma but not kappa_in") {
    CHECK(error_of("[cavity]\npreset = \"nonexistent\"\nkappa_in_mhz = 1\n") != "");
    CHECK(error_of("[cavity]\npreset = \"yb_1480\"\n").find("kappa_in_mhz") != std::string::npos);
    const RunConfig cfg = parse_config("[cavity]\npreset = \"yb_1480\"\nkappa_in_mhz = 1\n", "run.toml");
    CHECK(cfg.cavity.g_mhz == doctest::Approx(5.0));
    CHECK(cfg.cavity.gamma_mhz == doctest::Approx(0.25));
    CHECK(cfg.waveguide.wavelength_nm == doctest::Approx(1480.0));
    const RunConfig over = parse_config("[cavity]\npreset = \"yb_1480\"\nkappa_in_mhz = 1\ng_mhz = 8\n", "run.toml");
    CHECK(over.cavity.g_mhz == 8.0);
}

TEST_CASE("errors carry line numbers") {
    std::string text = kMinimal;
    CHECK(error_of(text + "[mux]\nn_atoms = -5\n").rfind("run.toml:6:", 0) == 0);
    CHECK(error_of(text + "[mux]\nbogus = 1\n").find("run.toml:6: unknown key 'bogus' in section [mux]") == 0);
    CHECK(error_of(text + "[nope]\n").rfind("run.toml:5:", 0) == 0);
    CHECK(error_of(text + "[cavity]\n").find("duplicate section") != std::string::npos);
    CHECK(error_of("[cavity]\ng_mhz = 5\ng_mhz = 6\n").rfind("run.toml:3:", 0) == 0);
    CHECK(error_of("g_mhz = 5\n").rfind("run.toml:1:", 0) == 0);
    CHECK(error_of("[cavity\n").rfind("run.toml:1:", 0) == 0);
    CHECK(error_of("[cavity]\ng_mhz 5\n").rfind("run.toml:2:", 0) == 0);
    CHECK(error_of("[cavity]\ng_mhz = \"five\"\n").rfind("run.toml:2:", 0) == 0);
}

TEST_CASE("range and type checks") {
    const std::string base = kMinimal;
    for (const char* bad : {"[mux]\nzones = 3\n", "[mux]\np_trial = 0\n", "[mux]\np_trial = 1.5\n",
                            "[mux]\nn_atoms = 2.5\n", "[pulse]\ngrid_points = 100\n", "[pulse]\nxi_trunc = 1\n",
                            "[waveguide]\nn_eff = 0.5\n", "[sim]\nreplications = 1\n", "[sim]\npolicy = \"eager\"\n",
                            "[sim]\nm = 0\n", "[waveguide]\nL_mm = \"3\"\n", "[cavity]\n"}) {
        CHECK_MESSAGE(!error_of(base + bad).empty(), std::string(bad));
    }
    CHECK(error_of(base + "[mux]\np_trial = 1\n").empty());
    // A scalar stands for a one-element list, which is what a sweep point assigns.
    CHECK(parse_config(base + "[waveguide]\nL_mm = 3\n", "run.toml").waveguide.L_mm == std::vector<double>{3});
}

TEST_CASE("dump lists every key in canonical order") {
    const RunConfig cfg = parse_config(kMinimal, "run.toml");
    const auto dump = cfg.dump();
    REQUIRE(dump.size() > 40);
    CHECK(dump.front().first == "cavity.preset");
    CHECK(dump[1] == std::pair<std::string, std::string>{"cavity.g_mhz", "5"});
    for (const auto& [key, value] : dump) {
        CHECK(is_known_key(key));
        CHECK(value.find('\n') == std::string::npos);
    }
    std::set<std::string> unique;
    for (const auto& kv : dump) unique.insert(kv.first);
    CHECK(unique.size() == dump.size());
    CHECK_FALSE(is_known_key("cavity.nope"));
}

TEST_CASE("derived photon efficiency from the trial probability") {
    RunConfig cfg = RunConfig::defaults();
    const auto sim = cfg.sim_config(0.2, 1);
    CHECK(sim.effective_p_trial() == doctest::Approx(0.2));
    CHECK(sim.p_e == doctest::Approx(std::sqrt(0.4)));
    const auto certain = cfg.sim_config(1.0, 1);
    CHECK(certain.effective_p_trial() == doctest::Approx(1.0));
}

TEST_CASE("unreadable files are io failures") {
    CHECK_THROWS_AS(load_config("/nonexistent/run.toml"), std::ios_base::failure);
}
