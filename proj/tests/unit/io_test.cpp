#include "helpers.hpp"

#include "turnon/config_io.hpp"
#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"
#include "turnon/manifest.hpp"
#include "turnon/trace_io.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

using namespace turnon;
using namespace turnon::testing;

namespace {

std::filesystem::path scratch(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "turnon_io_test" / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

nlohmann::json minimal_config() {
    return nlohmann::json::parse(R"({
        "v_dc_V": 400, "gate_on_V": 20, "gate_off_V": -4, "r_g_s1_ohm": 10, "r_g_s2_ohm": 10,
        "scenario": "iZVS_case2", "delta_v_V": 255,
        "load": {"type": "constant_current", "current_A": 10, "direction": "out_of_midpoint"},
        "devices": {"s1": {"synthetic": {}}, "s2": {"synthetic": {}}},
        "t_end_s": 1e-7
    })");
}

}  // namespace

TEST_CASE("config parsing") {
    const RunConfig c = run_config_from_json(minimal_config(), ".");
    CHECK(c.circuit.v_dc == 400);
    CHECK(c.circuit.delta_v == 255);
    CHECK(c.t_end == doctest::Approx(1e-7));

    SUBCASE("unknown keys are named") {
        auto j = minimal_config();
        j["v_dc_volts"] = 400;
        try {
            (void)run_config_from_json(j, ".");
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK(std::string(e.what()).find("v_dc_volts") != std::string::npos);
        }
        auto k = minimal_config();
        k["solver"] = {{"reltol", 1e-6}};
        CHECK_THROWS_WITH_AS((void)run_config_from_json(k, "."), doctest::Contains("reltol"), ConfigError);
    }
    SUBCASE("bad values") {
        auto j = minimal_config();
        j["load"]["direction"] = "sideways";
        CHECK_THROWS_AS((void)run_config_from_json(j, "."), ConfigError);
        auto k = minimal_config();
        k["solver"] = {{"rel_tol", -1}};
        CHECK_THROWS_AS((void)run_config_from_json(k, "."), ConfigError);
    }
    SUBCASE("round trip through JSON keeps the hash") {
        const RunConfig back = run_config_from_json(to_json(c), ".");
        CHECK(config_hash(back.circuit, back.solver, back.t_end) == config_hash(c.circuit, c.solver, c.t_end));
        HalfBridgeConfig other = c.circuit;
        other.v_dc = 401;
        CHECK(config_hash(other, c.solver, c.t_end) != config_hash(c.circuit, c.solver, c.t_end));
    }
}

TEST_CASE("device files round trip") {
    const auto dir = scratch("device");
    const DeviceModel dev = make_synthetic_device(reference_params());
    const auto manifest = write_device_files(dir, "ref", dev);
    const DeviceModel back = load_device_manifest(manifest);
    CHECK(back.v_th == dev.v_th);
    CHECK(back.c_gs == dev.c_gs);
    for (Real v : {0.0, 3.0, 40.0, 400.0, 800.0}) {
        CAPTURE(v);
        CHECK(q_oss(back, v) == doctest::Approx(q_oss(dev, v)).epsilon(1e-9));
        CHECK(e_oss(back, v) == doctest::Approx(e_oss(dev, v)).epsilon(1e-9));
    }
    CHECK(channel_current(back, 12.0, 5.0) == doctest::Approx(channel_current(dev, 12.0, 5.0)).epsilon(1e-9));
    CHECK(device_fingerprint(back) == device_fingerprint(load_device_manifest(manifest)));
    CHECK_THROWS_AS((void)load_device_manifest(dir / "missing.json"), ConfigError);
}

TEST_CASE("trace CSV round trip") {
    const auto dir = scratch("trace");
    const WaveformTrace& tr = reference_trace(Scenario::HS);
    write_trace_csv(dir / "trace.csv", tr, "abc123");
    const WaveformTrace back = read_trace_csv(dir / "trace.csv");
    REQUIRE(back.size() == tr.size());
    for (std::size_t k = 0; k < tr.size(); k += 97) {
        CHECK(back.t[k] == doctest::Approx(tr.t[k]).epsilon(1e-12));
        CHECK(back.states[k].v_ds_s1 == doctest::Approx(tr.states[k].v_ds_s1).epsilon(1e-12));
        CHECK(back.currents[k].i_rs1 == doctest::Approx(tr.currents[k].i_rs1).epsilon(1e-12));
    }
    const auto markers = markers_from_json(markers_to_json(tr.markers));
    REQUIRE(markers.size() == tr.markers.size());
    for (std::size_t k = 0; k < markers.size(); ++k) {
        CHECK(markers[k].name == tr.markers[k].name);
        CHECK(markers[k].t == tr.markers[k].t);
        CHECK(markers[k].direction == tr.markers[k].direction);
    }
}

TEST_CASE("run manifest hash") {
    const auto a = scratch("manifest_a");
    const auto b = scratch("manifest_b");
    for (const auto& d : {a, b}) std::ofstream(d / "cfg.json") << R"({"v_dc_V": 400})";
    RunManifest m1;
    m1.subcommand = "simulate";
    m1.parameters = {{"rel_tol", 1e-7}};
    m1.config_path = a / "cfg.json";
    m1.output_dir = a;
    m1.add_input("config", a / "cfg.json");
    RunManifest m2 = m1;
    m2.config_path = b / "cfg.json";
    m2.output_dir = b;
    m2.add_input("config", b / "cfg.json");
    CHECK(m1.hash() == m2.hash());
    CHECK(m1.hash().size() == 16);
    m2.parameters["rel_tol"] = 1e-6;
    CHECK(m1.hash() != m2.hash());
    CHECK(to_json(m1)["manifest_hash"] == m1.hash());
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}
