#include <catch_amalgamated.hpp>

#include "aerocov/presets.hpp"
#include "aerocov/sweep.hpp"

using namespace aerocov;

namespace {

nlohmann::json minimal_config() {
    nlohmann::json j;
    j["threshold_db"] = 10.0;
    return j;
}

nlohmann::json tiny_sweep_config() {
    nlohmann::json j = minimal_config();
    j["sweep"]["axes"] = nlohmann::json::array(
        {{{"parameter", "density_per_km2"}, {"values", {1.0, 5.0}}},
         {{"parameter", "uav_height_m"}, {"values", {60.0, 120.0, 240.0}}}});
    j["sweep"]["engines"] = {"analytic", "monte-carlo"};
    j["sweep"]["deployments"] = {"gs"};
    j["mc"]["trials"] = 200;
    j["mc"]["seed"] = 1;
    return j;
}

}  // namespace

TEST_CASE("fig2 preset carries the urban baseline parameters", "[sweep]") {
    const auto spec = load_config_json(preset("fig2"));
    CHECK(spec.preset_name == "fig2");
    CHECK(spec.scenario_base.antenna.kind == UavAntennaKind::Omni);
    CHECK(spec.scenario_base.threshold == Catch::Approx(db_to_linear(10.0)));
    CHECK(spec.scenario_base.net.station_height_m == 30.0);
    CHECK(spec.scenario_base.env.beta_per_km2 == 300.0);
    CHECK(spec.scenario_base.env.delta == 0.5);
    CHECK(spec.scenario_base.env.kappa_m == 20.0);
    CHECK(spec.scenario_base.net.alpha_los == 2.1);
    CHECK(spec.scenario_base.net.alpha_nlos == 4.0);
    CHECK(spec.scenario_base.net.tx_power_w == 40.0);
    CHECK(spec.scenario_base.net.sector.horizontal_gain ==
          Catch::Approx(db_to_linear(-5.0)));
    CHECK(spec.auto_uptilt);
    CHECK(spec.terrestrial.density_per_m2 == Catch::Approx(5e-6));
}

TEST_CASE("fig3 and fig4 presets select the directional antennas", "[sweep]") {
    const auto fig3 = load_config_json(preset("fig3"));
    CHECK(fig3.scenario_base.antenna.kind == UavAntennaKind::FixedDirectional);
    CHECK(fig3.scenario_base.antenna.beamwidth_rad == Catch::Approx(deg_to_rad(165.0)));
    const auto fig4 = load_config_json(preset("fig4"));
    CHECK(fig4.scenario_base.antenna.kind == UavAntennaKind::SteerableDirectional);
    CHECK(fig4.scenario_base.antenna.beamwidth_rad == Catch::Approx(deg_to_rad(60.0)));
    CHECK_THROWS_AS(preset("fig9"), std::invalid_argument);
}

TEST_CASE("missing threshold_db is a named schema error", "[sweep]") {
    nlohmann::json j = nlohmann::json::object();
    try {
        load_config_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("threshold_db") != std::string::npos);
    }
}

TEST_CASE("out-of-range delta cites the violated invariant", "[sweep]") {
    nlohmann::json j = minimal_config();
    j["environment"]["delta"] = 1.5;
    try {
        load_config_json(j);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("delta") != std::string::npos);
        CHECK(msg.find("0 < delta < 1") != std::string::npos);
    }
}

TEST_CASE("config validation catches bad values", "[sweep]") {
    auto bad_density = minimal_config();
    bad_density["network"]["density_per_km2"] = -1.0;
    CHECK_THROWS_AS(load_config_json(bad_density), ConfigError);

    auto bad_engine = minimal_config();
    bad_engine["sweep"]["engines"] = {"quantum"};
    CHECK_THROWS_AS(load_config_json(bad_engine), ConfigError);

    auto bad_axis = minimal_config();
    bad_axis["sweep"]["axes"] = nlohmann::json::array(
        {{{"parameter", "warp_factor"}, {"values", {1.0}}}});
    CHECK_THROWS_AS(load_config_json(bad_axis), ConfigError);

    auto empty_values = minimal_config();
    empty_values["sweep"]["axes"] = nlohmann::json::array(
        {{{"parameter", "uav_height_m"}, {"values", nlohmann::json::array()}}});
    CHECK_THROWS_AS(load_config_json(empty_values), ConfigError);
}

TEST_CASE("analytic-only terrestrial sweep is rejected", "[sweep]") {
    nlohmann::json j = minimal_config();
    j["sweep"]["engines"] = {"analytic"};
    j["sweep"]["deployments"] = {"terrestrial"};
    CHECK_THROWS_AS(load_config_json(j), ConfigError);
}

TEST_CASE("cross product emits one row per point per engine", "[sweep]") {
    auto spec = load_config_json(tiny_sweep_config());
    spec.trials.n_trials = 50;  // keep it quick; values are not asserted
    const auto rows = run_sweep(spec);
    CHECK(rows.size() == 2 * 3 * 2);  // densities x heights x engines
    for (const auto& r : rows)
        CHECK(r.status == "ok");
}

TEST_CASE("terrestrial rows collapse the GS density axis", "[sweep]") {
    auto cfg = tiny_sweep_config();
    cfg["sweep"]["engines"] = {"monte-carlo"};
    cfg["sweep"]["deployments"] = {"gs", "terrestrial"};
    auto spec = load_config_json(cfg);
    spec.trials.n_trials = 50;
    const auto rows = run_sweep(spec);
    // gs: 2 densities x 3 heights; terrestrial: 3 heights at its own density.
    CHECK(rows.size() == 6 + 3);
    for (const auto& r : rows) {
        if (r.deployment == "terrestrial")
            CHECK(r.density_per_km2 == Catch::Approx(5.0));
    }
}

TEST_CASE("sweep output is deterministic for a fixed seed", "[sweep]") {
    auto spec = load_config_json(tiny_sweep_config());
    spec.trials.n_trials = 100;
    const auto a = to_csv(run_sweep(spec));
    const auto b = to_csv(run_sweep(spec));
    CHECK(a == b);
    CHECK(a.substr(0, std::string(kCsvHeader).size()) == kCsvHeader);
}

TEST_CASE("per-point failures land in the status column", "[sweep]") {
    auto cfg = minimal_config();
    cfg["sweep"]["axes"] = nlohmann::json::array(
        {{{"parameter", "uav_height_m"}, {"values", {120.0}}}});
    cfg["sweep"]["engines"] = {"analytic"};
    auto spec = load_config_json(cfg);
    spec.quadrature.abs_tol = 1e-300;  // unreachable tolerance
    spec.quadrature.rel_tol = 1e-300;
    const auto rows = run_sweep(spec);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].status.rfind("error:", 0) == 0);
    CHECK_FALSE(all_ok(rows));
}

TEST_CASE("csv rows are self-describing", "[sweep]") {
    auto spec = load_config_json(tiny_sweep_config());
    spec.trials.n_trials = 50;
    spec.preset_name = "smoke";
    const auto rows = run_sweep(spec);
    const auto csv = to_csv(rows);
    std::size_t lines = 0;
    for (char c : csv)
        if (c == '\n')
            ++lines;
    CHECK(lines == rows.size() + 1);
    CHECK(csv.find("smoke,omni,gs,") != std::string::npos);
}

TEST_CASE("json output mirrors the csv schema", "[sweep]") {
    auto spec = load_config_json(tiny_sweep_config());
    spec.trials.n_trials = 50;
    const auto rows = run_sweep(spec);
    const auto parsed = nlohmann::json::parse(to_json(rows));
    REQUIRE(parsed.is_array());
    REQUIRE(parsed.size() == rows.size());
    for (const char* key : {"preset", "antenna_kind", "deployment", "density_per_km2",
                            "uav_height_m", "threshold_db", "method", "probability",
                            "std_error", "n_trials", "status", "wall_ms"})
        CHECK(parsed.at(0).contains(key));
}
