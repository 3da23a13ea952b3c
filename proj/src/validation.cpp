#include "turnon/validation.hpp"

#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"
#include "json_fields.hpp"

#include <unsupported/Eigen/NonLinearOptimization>
#include <unsupported/Eigen/NumericalDiff>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

namespace turnon {

namespace fs = std::filesystem;

namespace {

// Same content as data/table1.csv.
constexpr const char* kTable1Csv = R"(
r_ds_mohm,v_dc_V,delta_v_V,measured_uJ,conv_uJ,err_conv_pct,prop_uJ,err_prop_pct,reduction
25,200,44,4.65,2.74,-41.11,4.49,-3.57,11.50
25,200,100,16.17,7.91,-51.12,15.45,-4.50,11.35
25,200,134,25.53,13.91,-45.52,25.14,-1.53,29.67
25,200,167,36.25,21.88,-39.64,34.65,-4.41,8.98
25,200,192,48.25,30.31,-37.19,45.57,-5.57,6.68
25,400,27,3.52,0.70,-80.05,3.33,-5.26,15.21
25,400,54,8.25,2.39,-71.02,7.87,-4.58,15.49
25,400,88,17.36,5.75,-66.91,17.88,2.95,22.66
25,400,137,33.21,12.91,-61.11,34.14,2.82,21.67
25,400,193,54.94,24.46,-55.48,55.46,0.94,58.75
25,400,255,85.42,41.79,-51.08,84.67,-0.88,57.75
25,400,312,115.68,62.76,-45.75,110.10,-4.82,9.49
25,400,382,163.86,99.24,-39.44,157.42,-3.93,10.02
80,200,38,1.59,0.709,-55.36,1.40,-11.60,4.77
80,200,73,4.24,2.38,-43.78,4.50,6.10,7.17
80,200,94,6.40,3.85,-39.77,6.74,5.40,7.37
80,200,116,9.47,5.78,-38.91,9.96,5.18,7.51
80,200,139,13.14,8.26,-37.13,14.02,6.70,5.54
80,200,163,17.88,11.42,-36.11,18.87,5.56,6.49
80,200,186,23.68,15.23,-35.69,24.79,4.69,7.61
80,400,40,2.17,0.748,-65.60,2.05,-5.79,11.33
80,400,65,3.89,1.82,-53.14,4.06,4.50,11.81
80,400,98,8.03,3.92,-51.21,8.20,2.12,24.13
80,400,131,13.50,6.77,-49.82,13.66,1.25,39.99
80,400,170,20.77,11.13,-46.40,21.54,3.73,12.45
80,400,212,30.73,17.05,-44.53,31.65,2.98,14.93
80,400,254,41.71,24.28,-41.79,42.34,1.51,27.70
80,400,302,55.54,34.10,-38.61,57.40,3.34,11.54
80,400,350,72.14,46.67,-35.31,73.67,2.11,16.70
80,400,387,89.57,58.75,-34.41,87.35,-2.49,13.85
)";

int decimals_of(const std::string& cell) {
    const auto dot = cell.find('.');
    return dot == std::string::npos ? 0 : static_cast<int>(cell.size() - dot - 1);
}

Real half_ulp(int decimals) { return 0.5 * std::pow(10.0, -decimals); }

}  // namespace

std::vector<Table1Row> parse_table1_csv(std::istream& in, const std::string& source) {
    static const std::vector<std::string> kHeader{"r_ds_mohm", "v_dc_V",  "delta_v_V",
                                                  "measured_uJ", "conv_uJ", "err_conv_pct",
                                                  "prop_uJ",   "err_prop_pct", "reduction"};
    std::vector<Table1Row> rows;
    std::string line;
    int line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
        const std::string where = source + ":" + std::to_string(line_no);
        if (!header_seen) {
            if (cells != kHeader) {
                throw ConfigError(where + ": unexpected header for the comparison table");
            }
            header_seen = true;
            continue;
        }
        if (cells.size() != kHeader.size()) {
            throw ConfigError(where + ": expected " + std::to_string(kHeader.size()) + " columns");
        }
        std::vector<Real> v;
        for (const auto& c : cells) {
            char* end = nullptr;
            v.push_back(std::strtod(c.c_str(), &end));
            if (end == c.c_str() || *end != '\0') {
                throw ConfigError(where + ": bad number '" + c + "'");
            }
        }
        Table1Row r;
        r.r_ds_class = static_cast<int>(v[0]);
        r.v_dc = v[1];
        r.delta_v = v[2];
        r.measured = v[3];
        r.conv_pred = v[4];
        r.err_conv = v[5];
        r.prop_pred = v[6];
        r.err_prop = v[7];
        r.reduction = v[8];
        r.measured_decimals = decimals_of(cells[3]);
        r.conv_decimals = decimals_of(cells[4]);
        r.prop_decimals = decimals_of(cells[6]);
        rows.push_back(r);
    }
    if (!header_seen) {
        throw ConfigError(source + ": no header");
    }
    return rows;
}

std::vector<Table1Row> read_table1_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open");
    }
    return parse_table1_csv(in, path.string());
}

std::string table1_csv_text() { return std::string(kTable1Csv).substr(1); }

const std::vector<Table1Row>& table1() {
    static const std::vector<Table1Row> rows = [] {
        std::istringstream in(table1_csv_text());
        return parse_table1_csv(in, "embedded table");
    }();
    return rows;
}

Table1ArithmeticReport verify_table1_arithmetic(const std::vector<Table1Row>& rows, const Table1Tolerances& tol) {
    Table1ArithmeticReport rep;
    rep.rows_ok = !rows.empty();
    Real sum_ratio = 0, sum_conv = 0, sum_prop = 0;
    rep.conv_err_min = rep.prop_err_min = rep.prop_abs_min = std::numeric_limits<Real>::infinity();
    rep.conv_err_max = rep.prop_err_max = rep.prop_abs_max = -std::numeric_limits<Real>::infinity();
    for (const Table1Row& r : rows) {
        Table1RowCheck c;
        c.row = r;
        c.naive_err_conv = 100 * (r.conv_pred - r.measured) / r.measured;
        c.naive_err_prop = 100 * (r.prop_pred - r.measured) / r.measured;
        // Error is increasing in the prediction and decreasing in the measurement.
        const Real m_lo = r.measured - half_ulp(r.measured_decimals);
        const Real m_hi = r.measured + half_ulp(r.measured_decimals);
        auto range = [&](Real p, int dec, Real& lo, Real& hi) {
            lo = 100 * (p - half_ulp(dec) - m_hi) / m_hi;
            hi = 100 * (p + half_ulp(dec) - m_lo) / m_lo;
        };
        range(r.conv_pred, r.conv_decimals, c.err_conv_lo, c.err_conv_hi);
        range(r.prop_pred, r.prop_decimals, c.err_prop_lo, c.err_prop_hi);
        c.conv_ok = r.err_conv >= c.err_conv_lo - tol.error_pp && r.err_conv <= c.err_conv_hi + tol.error_pp;
        c.prop_ok = r.err_prop >= c.err_prop_lo - tol.error_pp && r.err_prop <= c.err_prop_hi + tol.error_pp;
        c.ratio_from_percentages = std::abs(r.err_conv) / std::abs(r.err_prop);
        c.ratio_from_values = std::abs(c.naive_err_conv) / std::abs(c.naive_err_prop);
        c.ratio_ok = std::abs(c.ratio_from_percentages - r.reduction) <= tol.ratio_rel * std::abs(r.reduction);
        if (std::abs(c.naive_err_conv - r.err_conv) > tol.error_pp ||
            std::abs(c.naive_err_prop - r.err_prop) > tol.error_pp) {
            ++rep.naive_misses;
        }
        rep.rows_ok = rep.rows_ok && c.ok();
        rep.conv_err_min = std::min(rep.conv_err_min, r.err_conv);
        rep.conv_err_max = std::max(rep.conv_err_max, r.err_conv);
        rep.prop_err_min = std::min(rep.prop_err_min, r.err_prop);
        rep.prop_err_max = std::max(rep.prop_err_max, r.err_prop);
        rep.prop_abs_min = std::min(rep.prop_abs_min, std::abs(r.err_prop));
        rep.prop_abs_max = std::max(rep.prop_abs_max, std::abs(r.err_prop));
        sum_ratio += r.reduction;
        sum_conv += std::abs(r.err_conv);
        sum_prop += std::abs(r.err_prop);
        rep.rows.push_back(c);
    }
    if (!rows.empty()) {
        const auto n = static_cast<Real>(rows.size());
        rep.mean_of_ratios = sum_ratio / n;
        rep.ratio_of_mean_errors = sum_conv / sum_prop;
    }
    auto near = [](Real a, Real b) { return std::abs(a - b) <= 0.005; };
    rep.ranges_ok = near(rep.conv_err_min, tol.conv_range_lo) && near(rep.conv_err_max, tol.conv_range_hi) &&
                    near(rep.prop_abs_min, tol.prop_abs_lo) && near(rep.prop_abs_max, tol.prop_abs_hi) &&
                    rep.prop_err_min >= tol.prop_range_lo - 0.005 && rep.prop_err_max <= tol.prop_range_hi + 0.005;
    rep.mean_ok = std::abs(rep.mean_of_ratios - tol.mean_ratio) <= tol.mean_ratio_band;
    return rep;
}

Table1Devices load_table1_devices(const fs::path& curve_dir) {
    Table1Devices d;
    d.source = curve_dir.string();
    auto load = [&](const char* file) -> std::shared_ptr<const DeviceModel> {
        const fs::path p = curve_dir / file;
        if (!fs::exists(p)) {
            d.notices.push_back(std::string(file) + " not found in " + curve_dir.string() + "; rows skipped");
            return nullptr;
        }
        return std::make_shared<const DeviceModel>(load_device_manifest(p));
    };
    d.dev_25 = load("C2M0025120D.json");
    d.dev_80 = load("C2M0080120D.json");
    const fs::path op = curve_dir / "operating_point.json";
    if (fs::exists(op)) {
        std::ifstream in(op);
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(op.string() + ": " + e.what());
        }
        detail::Fields f(j, op.string(), {"i_load_A", "r_g_ohm", "gate_on_V", "v_ds_transfer_V", "note"});
        d.i_load = f.number("i_load_A", d.i_load);
        d.mode.r_g = f.number("r_g_ohm", d.mode.r_g);
        d.mode.gate_on = f.number("gate_on_V", d.mode.gate_on);
        d.mode.v_ds_transfer = f.number("v_ds_transfer_V", d.mode.v_ds_transfer);
    } else {
        d.notices.push_back("operating_point.json not found; default i_load, r_g and gate_on used");
    }
    return d;
}

Table1PredictionReport run_table1_predictions(const Table1Devices& devices, const std::vector<Table1Row>& rows) {
    Table1PredictionReport rep;
    rep.source = devices.source;
    rep.notices = devices.notices;
    Real sc = 0, sp = 0, ec = 0, ep = 0;
    for (const Table1Row& r : rows) {
        Table1PredictionRow out;
        out.published = r;
        const auto& dev = r.r_ds_class == 25 ? devices.dev_25 : (r.r_ds_class == 80 ? devices.dev_80 : nullptr);
        if (dev) {
            out.evaluated = true;
            out.conv = 1e6 * predict_conventional(*dev, *dev, r.v_dc, r.delta_v);
            out.detail = predict_proposed_analytic(*dev, *dev, dev->c_par(), dev->c_par(), r.v_dc, r.delta_v,
                                                   devices.i_load, devices.mode);
            out.prop = 1e6 * out.detail.e_on;
            out.dev_conv = 100 * (out.conv - r.conv_pred) / r.conv_pred;
            out.dev_prop = 100 * (out.prop - r.prop_pred) / r.prop_pred;
            out.vs_measured = error_metrics(r.measured, out.conv, out.prop);
            ++rep.evaluated;
            sc += std::abs(out.dev_conv);
            sp += std::abs(out.dev_prop);
            ec += std::abs(out.vs_measured.error_conventional);
            ep += std::abs(out.vs_measured.error_proposed);
            rep.max_abs_dev_conv = std::max(rep.max_abs_dev_conv, std::abs(out.dev_conv));
            rep.max_abs_dev_prop = std::max(rep.max_abs_dev_prop, std::abs(out.dev_prop));
        }
        rep.rows.push_back(out);
    }
    if (rep.evaluated > 0) {
        const auto n = static_cast<Real>(rep.evaluated);
        rep.mean_abs_dev_conv = sc / n;
        rep.mean_abs_dev_prop = sp / n;
        rep.mean_abs_err_conv = 100 * ec / n;
        rep.mean_abs_err_prop = 100 * ep / n;
    }
    return rep;
}

Table1PredictionReport run_table1_predictions(const fs::path& curve_dir) {
    if (!fs::is_directory(curve_dir)) {
        Table1PredictionReport rep = run_table1_predictions(Table1Devices{});
        rep.source = curve_dir.string();
        rep.notices.push_back(curve_dir.string() + " is not a directory; no rows evaluated");
        return rep;
    }
    return run_table1_predictions(load_table1_devices(curve_dir));
}

namespace {

SyntheticDeviceParams stand_in_base(int r_ds_class) {
    SyntheticDeviceParams p;
    const Real area = 25.0 / static_cast<Real>(r_ds_class);
    p.name = r_ds_class == 25 ? "C2M0025120D stand-in" : "C2M0080120D stand-in";
    p.transconductance *= area;
    p.r_drift /= area;
    p.body_resistance /= area;
    p.c_gs *= area;
    p.c_gd0 *= area;
    p.c_gd_min *= area;
    return p;
}

// x = [log c_ds0, log(corner − 0.5 V), exponent, log c_ds_min]
SyntheticDeviceParams apply(SyntheticDeviceParams p, const Eigen::VectorXd& x) {
    p.c_ds0 = std::exp(x[0]);
    p.c_ds_corner = 0.5 + std::exp(x[1]);
    p.c_ds_exponent = x[2];
    p.c_ds_min = std::exp(x[3]);
    return p;
}

struct ConvResidual {
    using Scalar = double;
    using InputType = Eigen::VectorXd;
    using ValueType = Eigen::VectorXd;
    using JacobianType = Eigen::MatrixXd;
    enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };

    const SyntheticDeviceParams* base;
    const std::vector<Table1Row>* rows;

    [[nodiscard]] int inputs() const { return 4; }
    [[nodiscard]] int values() const { return static_cast<int>(rows->size()); }

    int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
        if (!(x[2] > 0.05 && x[2] < 5.0)) {
            r.setConstant(1e3);
            return 0;
        }
        const DeviceModel d = make_synthetic_device(apply(*base, x));
        for (std::size_t i = 0; i < rows->size(); ++i) {
            const Table1Row& row = (*rows)[i];
            r[static_cast<Eigen::Index>(i)] =
                1e6 * predict_conventional(d, d, row.v_dc, row.delta_v) / row.conv_pred - 1.0;
        }
        return 0;
    }
};

Eigen::VectorXd least_squares(const SyntheticDeviceParams& base, const std::vector<Table1Row>& rows) {
    ConvResidual f{&base, &rows};
    Eigen::VectorXd best;
    Real best_norm = std::numeric_limits<Real>::infinity();
    for (const Real corner : {2.0, 20.0}) {
        for (const Real m : {0.5, 1.0}) {
            Eigen::VectorXd x(4);
            x << std::log(3e-9), std::log(corner), m, std::log(150e-12);
            Eigen::NumericalDiff<ConvResidual> nd(f);
            Eigen::LevenbergMarquardt<Eigen::NumericalDiff<ConvResidual>> lm(nd);
            lm.minimize(x);
            Eigen::VectorXd r(f.values());
            f(x, r);
            if (r.allFinite() && r.norm() < best_norm) {
                best_norm = r.norm();
                best = x;
            }
        }
    }
    if (best.size() == 0) {
        throw InputError("fit_stand_in_device: least squares did not converge");
    }
    return best;
}

}  // namespace

StandInFit fit_stand_in_device(int r_ds_class, const std::vector<Table1Row>& rows, Real outlier_threshold) {
    StandInFit fit;
    fit.r_ds_class = r_ds_class;
    for (const Table1Row& r : rows) {
        if (r.r_ds_class == r_ds_class) fit.rows.push_back(r);
    }
    if (fit.rows.size() < 5) {
        throw InputError("fit_stand_in_device: fewer than 5 rows for the " + std::to_string(r_ds_class) +
                         " mΩ class");
    }
    const SyntheticDeviceParams base = stand_in_base(r_ds_class);
    Eigen::VectorXd x = least_squares(base, fit.rows);

    // One refit without the rows the first pass cannot explain.
    ConvResidual all{&base, &fit.rows};
    Eigen::VectorXd r(all.values());
    all(x, r);
    std::vector<Table1Row> kept;
    for (std::size_t i = 0; i < fit.rows.size(); ++i) {
        if (std::abs(r[static_cast<Eigen::Index>(i)]) > outlier_threshold) {
            fit.excluded.push_back(fit.rows[i]);
        } else {
            kept.push_back(fit.rows[i]);
        }
    }
    if (!fit.excluded.empty() && kept.size() >= 5) {
        x = least_squares(base, kept);
        all(x, r);
    } else {
        fit.excluded.clear();
    }
    fit.params = apply(base, x);
    fit.residuals.assign(r.data(), r.data() + r.size());
    for (std::size_t i = 0; i < fit.rows.size(); ++i) {
        const bool dropped = std::any_of(fit.excluded.begin(), fit.excluded.end(), [&](const Table1Row& e) {
            return e.v_dc == fit.rows[i].v_dc && e.delta_v == fit.rows[i].delta_v;
        });
        if (!dropped) fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(fit.residuals[i]));
    }
    return fit;
}

namespace {

nlohmann::json row_key(const Table1Row& r) {
    return {{"r_ds_mohm", r.r_ds_class}, {"v_dc_V", r.v_dc}, {"delta_v_V", r.delta_v}};
}

std::string fmt(const char* f, Real v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

}  // namespace

nlohmann::json to_json(const Table1ArithmeticReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : r.rows) {
        nlohmann::json j = row_key(c.row);
        j["naive_err_conv_pct"] = c.naive_err_conv;
        j["naive_err_prop_pct"] = c.naive_err_prop;
        j["printed_err_conv_pct"] = c.row.err_conv;
        j["printed_err_prop_pct"] = c.row.err_prop;
        j["err_conv_interval_pct"] = {c.err_conv_lo, c.err_conv_hi};
        j["err_prop_interval_pct"] = {c.err_prop_lo, c.err_prop_hi};
        j["ratio_from_percentages"] = c.ratio_from_percentages;
        j["ratio_from_values"] = c.ratio_from_values;
        j["printed_reduction"] = c.row.reduction;
        j["ok"] = c.ok();
        rows.push_back(j);
    }
    return {{"rows", rows},
            {"conv_err_range_pct", {r.conv_err_min, r.conv_err_max}},
            {"prop_err_range_pct", {r.prop_err_min, r.prop_err_max}},
            {"prop_abs_err_range_pct", {r.prop_abs_min, r.prop_abs_max}},
            {"mean_of_ratios", r.mean_of_ratios},
            {"ratio_of_mean_errors", r.ratio_of_mean_errors},
            {"naive_misses", r.naive_misses},
            {"rows_ok", r.rows_ok},
            {"ranges_ok", r.ranges_ok},
            {"mean_ok", r.mean_ok}};
}

nlohmann::json to_json(const Table1PredictionReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& p : r.rows) {
        nlohmann::json j = row_key(p.published);
        j["evaluated"] = p.evaluated;
        j["published_conv_uJ"] = p.published.conv_pred;
        j["published_prop_uJ"] = p.published.prop_pred;
        j["measured_uJ"] = p.published.measured;
        if (p.evaluated) {
            j["conv_uJ"] = p.conv;
            j["prop_uJ"] = p.prop;
            j["dev_conv_pct"] = p.dev_conv;
            j["dev_prop_pct"] = p.dev_prop;
            j["err_conv_vs_measured_pct"] = 100 * p.vs_measured.error_conventional;
            j["err_prop_vs_measured_pct"] = 100 * p.vs_measured.error_proposed;
            j["terms"] = to_json(p.detail.terms);
            j["v_gp_V"] = p.detail.v_gp;
            j["t_cc_s"] = p.detail.t_cc;
            j["t_vf_s"] = p.detail.t_vf;
        }
        rows.push_back(j);
    }
    return {{"source", r.source},
            {"notices", r.notices},
            {"evaluated_rows", r.evaluated},
            {"mean_abs_dev_conv_pct", r.mean_abs_dev_conv},
            {"max_abs_dev_conv_pct", r.max_abs_dev_conv},
            {"mean_abs_dev_prop_pct", r.mean_abs_dev_prop},
            {"max_abs_dev_prop_pct", r.max_abs_dev_prop},
            {"mean_abs_err_conv_vs_measured_pct", r.mean_abs_err_conv},
            {"mean_abs_err_prop_vs_measured_pct", r.mean_abs_err_prop},
            {"rows", rows}};
}

std::string to_csv(const Table1ArithmeticReport& r) {
    std::ostringstream out;
    out << "r_ds_mohm,v_dc_V,delta_v_V,measured_uJ,conv_uJ,err_conv_pct,naive_err_conv_pct,prop_uJ,"
           "err_prop_pct,naive_err_prop_pct,reduction,ratio_from_percentages,ok\n";
    for (const auto& c : r.rows) {
        const Table1Row& w = c.row;
        out << w.r_ds_class << ',' << w.v_dc << ',' << w.delta_v << ',' << w.measured << ',' << w.conv_pred << ','
            << w.err_conv << ',' << fmt("%.2f", c.naive_err_conv) << ',' << w.prop_pred << ',' << w.err_prop << ','
            << fmt("%.2f", c.naive_err_prop) << ',' << w.reduction << ',' << fmt("%.2f", c.ratio_from_percentages)
            << ',' << (c.ok() ? "yes" : "no") << '\n';
    }
    return out.str();
}

std::string to_csv(const Table1PredictionReport& r) {
    std::ostringstream out;
    out << "r_ds_mohm,v_dc_V,delta_v_V,measured_uJ,published_conv_uJ,conv_uJ,dev_conv_pct,published_prop_uJ,"
           "prop_uJ,dev_prop_pct,dc_source_uJ,load_charge_uJ,ac_link_uJ,s2_oss_stored_uJ,s2_shoot_through_uJ,"
           "s2_par_stored_uJ,s1_oss_discharge_uJ,s1_par_discharge_uJ\n";
    for (const auto& p : r.rows) {
        const Table1Row& w = p.published;
        out << w.r_ds_class << ',' << w.v_dc << ',' << w.delta_v << ',' << w.measured << ',' << w.conv_pred << ',';
        if (!p.evaluated) {
            out << ",," << w.prop_pred << ",,,,,,,,,\n";
            continue;
        }
        const LedgerTerms& t = p.detail.terms;
        out << fmt("%.4g", p.conv) << ',' << fmt("%.2f", p.dev_conv) << ',' << w.prop_pred << ','
            << fmt("%.4g", p.prop) << ',' << fmt("%.2f", p.dev_prop);
        for (Real v : {t.dc_source, t.load_charge, t.ac_link, t.s2_oss_stored, t.s2_shoot_through, t.s2_par_stored,
                       t.s1_oss_discharge, t.s1_par_discharge}) {
            out << ',' << fmt("%.6g", 1e6 * v);
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace turnon
