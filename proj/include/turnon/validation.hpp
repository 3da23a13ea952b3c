#pragma once

// The published turn-on energy comparison (two 1.2 kV SiC MOSFETs, 30 operating
// points) as a dataset: its arithmetic re-derived, and its prediction columns
// re-evaluated from device curves when those are available.

#include "turnon/energy.hpp"
#include "turnon/synthetic_device.hpp"

#include <json.hpp>

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

namespace turnon {

struct Table1Row {
    int r_ds_class = 0;  // mΩ
    Real v_dc = 0.0;
    Real delta_v = 0.0;
    Real measured = 0.0;   // µJ
    Real conv_pred = 0.0;  // µJ
    Real prop_pred = 0.0;  // µJ
    Real err_conv = 0.0;   // %
    Real err_prop = 0.0;   // %
    Real reduction = 0.0;
    // Printed decimals of the three energies; half a unit in the last place bounds the rounding.
    int measured_decimals = 2;
    int conv_decimals = 2;
    int prop_decimals = 2;
};

/// All 30 rows, parsed from the embedded copy of data/table1.csv.
[[nodiscard]] const std::vector<Table1Row>& table1();

[[nodiscard]] std::vector<Table1Row> parse_table1_csv(std::istream& in, const std::string& source);
[[nodiscard]] std::vector<Table1Row> read_table1_csv(const std::filesystem::path& path);
/// CSV text identical in content to data/table1.csv.
[[nodiscard]] std::string table1_csv_text();

struct Table1RowCheck {
    Table1Row row;
    Real naive_err_conv = 0.0;  // % from the printed energies
    Real naive_err_prop = 0.0;
    Real err_conv_lo = 0.0, err_conv_hi = 0.0;  // % reachable within the printed rounding
    Real err_prop_lo = 0.0, err_prop_hi = 0.0;
    Real ratio_from_percentages = 0.0;  // |err_conv| / |err_prop| from the printed percentages
    Real ratio_from_values = 0.0;       // same, from the naive recomputation
    bool conv_ok = false;
    bool prop_ok = false;
    bool ratio_ok = false;

    [[nodiscard]] bool ok() const { return conv_ok && prop_ok && ratio_ok; }
};

struct Table1ArithmeticReport {
    std::vector<Table1RowCheck> rows;
    Real conv_err_min = 0.0, conv_err_max = 0.0;  // %
    Real prop_err_min = 0.0, prop_err_max = 0.0;
    Real prop_abs_min = 0.0, prop_abs_max = 0.0;
    Real mean_of_ratios = 0.0;           // mean of the per-row reduction column
    Real ratio_of_mean_errors = 0.0;     // mean |err_conv| / mean |err_prop|
    int naive_misses = 0;                // rows whose naive recomputation is off by > 0.1 pp
    bool rows_ok = false;
    bool ranges_ok = false;
    bool mean_ok = false;

    [[nodiscard]] bool ok() const { return rows_ok && ranges_ok && mean_ok; }
};

struct Table1Tolerances {
    Real error_pp = 0.1;         // percentage points
    Real ratio_rel = 0.02;
    Real mean_ratio = 17.0;
    Real mean_ratio_band = 1.0;
    Real conv_range_lo = -80.05, conv_range_hi = -34.41;
    Real prop_abs_lo = 0.88, prop_abs_hi = 11.60;
    Real prop_range_lo = -11.60, prop_range_hi = 6.70;
};

[[nodiscard]] Table1ArithmeticReport verify_table1_arithmetic(const std::vector<Table1Row>& rows = table1(),
                                                              const Table1Tolerances& tol = {});

/// Device pair and operating assumptions used to re-evaluate the prediction columns.
struct Table1Devices {
    std::shared_ptr<const DeviceModel> dev_25;  // 25 mΩ class
    std::shared_ptr<const DeviceModel> dev_80;  // 80 mΩ class
    Real i_load = 20.0;  // A, drawn out of the midpoint
    ModeAssumptions mode;
    std::string source;
    std::vector<std::string> notices;
};

/// Reads `C2M0025120D.json` and `C2M0080120D.json` device manifests from curve_dir and the
/// optional `operating_point.json` {i_load_A, r_g_ohm, gate_on_V, v_ds_transfer_V}.
/// Missing files leave the corresponding device empty and add a notice.
[[nodiscard]] Table1Devices load_table1_devices(const std::filesystem::path& curve_dir);

struct Table1PredictionRow {
    Table1Row published;
    bool evaluated = false;
    Real conv = 0.0;  // µJ
    Real prop = 0.0;  // µJ
    ProposedPrediction detail;
    Real dev_conv = 0.0;  // % deviation from the published prediction column
    Real dev_prop = 0.0;
    ErrorMetrics vs_measured;
};

struct Table1PredictionReport {
    std::string source;
    std::vector<std::string> notices;
    std::vector<Table1PredictionRow> rows;
    int evaluated = 0;
    Real mean_abs_dev_conv = 0.0;  // %
    Real max_abs_dev_conv = 0.0;
    Real mean_abs_dev_prop = 0.0;
    Real max_abs_dev_prop = 0.0;
    Real mean_abs_err_prop = 0.0;  // % against the measured column
    Real mean_abs_err_conv = 0.0;
};

[[nodiscard]] Table1PredictionReport run_table1_predictions(const Table1Devices& devices,
                                                            const std::vector<Table1Row>& rows = table1());
[[nodiscard]] Table1PredictionReport run_table1_predictions(const std::filesystem::path& curve_dir);

/// Stand-in capacitance model for one device class: C_ds fitted by least squares so that
/// the conventional model reproduces that class's published conventional column; the other
/// parameters follow the synthetic defaults scaled by die area (∝ 1 / R_ds,on).
struct StandInFit {
    int r_ds_class = 0;
    SyntheticDeviceParams params;
    std::vector<Real> residuals;      // relative, per row of the class
    std::vector<Table1Row> rows;      // rows of the class, in table order
    std::vector<Table1Row> excluded;  // outliers dropped before the final fit
    Real max_abs_residual = 0.0;      // over the rows kept
};

[[nodiscard]] StandInFit fit_stand_in_device(int r_ds_class, const std::vector<Table1Row>& rows = table1(),
                                             Real outlier_threshold = 0.10);

[[nodiscard]] nlohmann::json to_json(const Table1ArithmeticReport& r);
[[nodiscard]] nlohmann::json to_json(const Table1PredictionReport& r);
[[nodiscard]] std::string to_csv(const Table1ArithmeticReport& r);
[[nodiscard]] std::string to_csv(const Table1PredictionReport& r);

}  // namespace turnon
