#include "helpers.hpp"

#include "turnon/errors.hpp"
#include "turnon/validation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace turnon;
using namespace turnon::testing;

namespace {

std::filesystem::path table_file() { return std::filesystem::path(TURNON_SOURCE_DIR) / "data" / "table1.csv"; }

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("embedded table is the data file") {
    CHECK(table1_csv_text() == slurp(table_file()));
    const auto from_file = read_table1_csv(table_file());
    REQUIRE(from_file.size() == 30);
    REQUIRE(table1().size() == 30);
    for (std::size_t k = 0; k < 30; ++k) {
        CHECK(from_file[k].measured == table1()[k].measured);
        CHECK(from_file[k].reduction == table1()[k].reduction);
    }
    const auto it = std::find_if(table1().begin(), table1().end(), [](const Table1Row& r) {
        return r.r_ds_class == 25 && r.v_dc == 400 && r.delta_v == 255;
    });
    REQUIRE(it != table1().end());
    CHECK(it->measured == 85.42);
    CHECK(it->conv_pred == 41.79);
    CHECK(it->prop_pred == 84.67);
    CHECK(it->err_conv == -51.08);
    CHECK(it->err_prop == -0.88);
}

TEST_CASE("malformed tables are rejected") {
    std::istringstream bad_header("a,b,c\n1,2,3\n");
    CHECK_THROWS_AS((void)parse_table1_csv(bad_header, "bad"), ConfigError);
    std::istringstream short_row(
        "r_ds_mohm,v_dc_V,delta_v_V,measured_uJ,conv_uJ,err_conv_pct,prop_uJ,err_prop_pct,reduction\n25,200\n");
    CHECK_THROWS_AS((void)parse_table1_csv(short_row, "short"), ConfigError);
}

TEST_CASE("table arithmetic") {
    const Table1ArithmeticReport r = verify_table1_arithmetic();
    CHECK(r.ok());
    CHECK(r.rows.size() == 30);

    // Independent recomputation of the ranges and both averaging conventions.
    Real conv_lo = 1e9, conv_hi = -1e9, prop_lo = 1e9, prop_hi = -1e9, ratios = 0, sum_c = 0, sum_p = 0;
    int naive = 0;
    for (const Table1Row& row : table1()) {
        conv_lo = std::min(conv_lo, row.err_conv);
        conv_hi = std::max(conv_hi, row.err_conv);
        prop_lo = std::min(prop_lo, row.err_prop);
        prop_hi = std::max(prop_hi, row.err_prop);
        ratios += row.reduction;
        sum_c += std::abs(row.err_conv);
        sum_p += std::abs(row.err_prop);
        const Real c = 100 * (row.conv_pred - row.measured) / row.measured;
        const Real p = 100 * (row.prop_pred - row.measured) / row.measured;
        if (std::abs(c - row.err_conv) > 0.1 || std::abs(p - row.err_prop) > 0.1) ++naive;
    }
    CHECK(r.conv_err_min == conv_lo);
    CHECK(r.conv_err_max == conv_hi);
    CHECK(conv_lo == -80.05);
    CHECK(conv_hi == -34.41);
    CHECK(prop_lo >= -11.60);
    CHECK(prop_hi <= 6.70);
    CHECK(r.mean_of_ratios == doctest::Approx(ratios / 30));
    CHECK(r.ratio_of_mean_errors == doctest::Approx(sum_c / sum_p));
    CHECK(r.naive_misses == naive);
}

TEST_CASE("a corrupted percentage is caught") {
    std::vector<Table1Row> rows = table1();
    rows[3].err_conv += 0.5;
    const Table1ArithmeticReport r = verify_table1_arithmetic(rows);
    CHECK_FALSE(r.rows[3].conv_ok);
    CHECK_FALSE(r.rows_ok);
}

TEST_CASE("missing curves evaluate nothing") {
    const auto dir = std::filesystem::temp_directory_path() / "turnon_empty_curves";
    std::filesystem::create_directories(dir);
    const Table1Devices d = load_table1_devices(dir);
    CHECK_FALSE(d.notices.empty());
    CHECK(run_table1_predictions(d).evaluated == 0);
    const Table1PredictionReport r = run_table1_predictions(dir / "does_not_exist");
    CHECK(r.evaluated == 0);
    CHECK_FALSE(r.notices.empty());
}

TEST_CASE("prediction columns from constant-capacitance devices") {
    const Real c_gd = 0.2e-9, c_ds = 0.6e-9, c_gs = 3e-9, co = c_gd + c_ds;
    Table1Devices d;
    d.dev_25 = d.dev_80 = std::make_shared<const DeviceModel>(constant_c_device(c_gd, c_ds, c_gs));
    d.i_load = 20;
    d.mode.gate_on = 20;
    d.mode.r_g = 10;
    d.mode.v_gp = 8;
    const Table1PredictionReport r = run_table1_predictions(d);
    REQUIRE(r.evaluated == 30);
    const Real t_cc = d.mode.r_g * (c_gs + c_gd) * std::log((20 - d.dev_25->v_th) / (20 - 8.0));
    for (const Table1PredictionRow& row : r.rows) {
        const Real dv = row.published.delta_v;
        const Real t_vf = c_gd * dv * d.mode.r_g / (20 - 8.0);
        CHECK(row.conv == doctest::Approx(1e6 * co * dv * dv).epsilon(1e-9));
        CHECK(row.prop == doctest::Approx(1e6 * (co * dv * dv + 20 * dv * (t_cc + t_vf / 2))).epsilon(1e-9));
        CHECK(row.dev_conv == doctest::Approx(100 * (row.conv - row.published.conv_pred) / row.published.conv_pred));
    }
    CHECK(to_json(r)["rows"].size() == 30);
}

TEST_CASE("stand-in fits reproduce the conventional column") {
    for (int cls : {25, 80}) {
        CAPTURE(cls);
        const StandInFit f = fit_stand_in_device(cls);
        CHECK(f.rows.size() == static_cast<std::size_t>(std::count_if(
                                    table1().begin(), table1().end(),
                                    [&](const Table1Row& r) { return r.r_ds_class == cls; })));
        CHECK(f.excluded.size() <= 1);
        CHECK(f.max_abs_residual < 0.10);
        const DeviceModel dev = make_synthetic_device(f.params);
        for (std::size_t k = 0; k < f.rows.size(); ++k) {
            const Table1Row& row = f.rows[k];
            const Real conv = 1e6 * predict_conventional(dev, dev, row.v_dc, row.delta_v);
            CHECK(f.residuals[k] == doctest::Approx((conv - row.conv_pred) / row.conv_pred).epsilon(1e-6));
        }
    }
}
