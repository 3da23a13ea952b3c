// turnon: simulate half-bridge turn-on events, segment them, account for the
// turn-on energy and check the published comparison table.

#include "cli_support.hpp"

#include "turnon/device_io.hpp"
#include "turnon/errors.hpp"
#include "turnon/phases.hpp"
#include "turnon/plot.hpp"
#include "turnon/trace_io.hpp"
#include "turnon/validation.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

using namespace turnon;
using namespace turnon::cli;
using nlohmann::json;

namespace {

struct SolverFlags {
    std::optional<Real> rel_tol, abs_tol, max_step, t_end;
};

void add_solver_flags(CLI::App* app, SolverFlags& f) {
    app->add_option("--rel-tol", f.rel_tol, "Relative tolerance");
    app->add_option("--abs-tol", f.abs_tol, "Absolute tolerance (state units)");
    app->add_option("--max-step", f.max_step, "Largest step, s");
    app->add_option("--t-end", f.t_end, "End of the run, s");
}

std::vector<std::string> solver_overrides(const SolverFlags& f) {
    std::vector<std::string> o;
    if (f.rel_tol) o.push_back("solver.rel_tol=" + cell(*f.rel_tol));
    if (f.abs_tol) o.push_back("solver.abs_tol=" + cell(*f.abs_tol));
    if (f.max_step) o.push_back("solver.max_step_s=" + cell(*f.max_step));
    if (f.t_end) o.push_back("t_end_s=" + cell(*f.t_end));
    return o;
}

std::string join_row(const std::vector<std::string>& cells) {
    std::string s;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
    }
    return s + '\n';
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    fs::path config;
    fs::path out;
    std::vector<std::string> set;
    SolverFlags solver;
    bool no_plot = false;
};

int cmd_simulate(const SimulateArgs& a) {
    RunManifest m;
    m.subcommand = "simulate";
    m.output_dir = a.out;
    std::vector<std::string> overrides = a.set;
    for (auto& o : solver_overrides(a.solver)) overrides.push_back(o);
    m.parameters = {{"overrides", overrides}};
    const RunConfig rc = load_config_with_overrides(a.config, overrides, m);

    const WaveformTrace trace = simulate(rc.circuit, rc.solver, rc.t_end);
    const PhaseTimeline tl = segment(trace, rc.circuit.scenario);
    const EnergyReport report = energy_report(trace, tl);

    fs::create_directories(a.out);
    write_trace_csv(a.out / "trace.csv", trace, m.hash());
    write_json(a.out / "trace.markers.json", json{{"markers", markers_to_json(trace.markers)}}, m);
    write_json(a.out / "timeline.json", to_json(tl), m);
    json er = to_json(report);
    er["config"] = to_json(rc);
    er["steps"] = {{"accepted", trace.accepted_steps}, {"rejected", trace.rejected_steps}};
    write_json(a.out / "energy.json", er, m);
    if (!a.no_plot) {
        PlotOptions po;
        po.title = std::string(to_string(tl.scenario)) + ", " + a.config.filename().string();
        po.manifest_hash = m.hash();
        write_text(a.out / "plot.svg", render_svg(trace, tl, po));
    }
    write_manifest(a.out, m);

    std::printf("scenario        %s\n", std::string(to_string(tl.scenario)).c_str());
    std::printf("samples         %zu (%ld accepted, %ld rejected)\n", trace.size(), trace.accepted_steps,
                trace.rejected_steps);
    std::printf("miller platform %s\n", tl.miller_platform() ? "yes" : "no");
    std::printf("E_on direct     %.4f uJ (window %.2f ns)\n", 1e6 * report.e_on_direct, 1e9 * report.t_diss);
    std::printf("E_on full trace %.4f uJ\n", 1e6 * report.e_on_direct_full);
    if (report.ledger_applicable) {
        std::printf("charge ledger   %.4f uJ (rel. diff %.3g)\n", 1e6 * report.e_on_charge_ledger,
                    report.direct_vs_charge_ledger.relative);
        std::printf("energy ledger   %.4f uJ\n", 1e6 * report.e_on_energy_ledger);
        std::printf("proposed        %.4f uJ\n", 1e6 * report.e_on_proposed_analytic);
        std::printf("conventional    %.4f uJ\n", 1e6 * report.e_on_conventional);
    }
    std::printf("balance resid.  %.3g of E_initial\n", report.balance.residual.relative);
    for (const auto& w : tl.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf("manifest        %s\n", m.hash().c_str());
    return 0;
}

// --- predict ----------------------------------------------------------------

struct PredictArgs {
    fs::path s1, s2;
    Real v_dc = 400;
    std::vector<Real> delta_v;
    Real i_load = 20;
    ModeAssumptions mode;
    std::optional<Real> c_par_s1, c_par_s2;
    fs::path out;
};

int cmd_predict(const PredictArgs& a) {
    RunManifest m;
    m.subcommand = "predict";
    m.output_dir = a.out;
    m.device_paths["s1"] = a.s1;
    m.add_input("device_s1", a.s1);
    const auto s1 = load_device_arg(a.s1);
    auto s2 = s1;
    if (!a.s2.empty()) {
        m.device_paths["s2"] = a.s2;
        m.add_input("device_s2", a.s2);
        s2 = load_device_arg(a.s2);
    }
    const Real cp1 = a.c_par_s1.value_or(s1->c_par());
    const Real cp2 = a.c_par_s2.value_or(s2->c_par());
    m.parameters = {{"v_dc_V", a.v_dc},     {"delta_v_V", a.delta_v},     {"i_load_A", a.i_load},
                    {"gate_on_V", a.mode.gate_on}, {"r_g_ohm", a.mode.r_g}, {"v_ds_transfer_V", a.mode.v_ds_transfer},
                    {"v_gp_V", a.mode.v_gp}, {"c_par_s1_F", cp1},         {"c_par_s2_F", cp2}};

    std::string csv = join_row(prediction_columns());
    json rows = json::array();
    std::printf("%8s %8s %8s %12s %12s\n", "V_DC/V", "dV/V", "I_L/A", "conv/uJ", "prop/uJ");
    for (Real dv : a.delta_v) {
        const PredictionPoint p = predict_point(*s1, *s2, cp1, cp2, a.v_dc, dv, a.i_load, a.mode);
        csv += join_row(prediction_cells(p));
        rows.push_back(to_json(p));
        std::printf("%8.1f %8.1f %8.2f %12.4f %12.4f\n", a.v_dc, dv, a.i_load, 1e6 * p.conventional,
                    1e6 * p.proposed.e_on);
    }
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_csv(a.out / "predictions.csv", csv, m);
        write_json(a.out / "predictions.json", json{{"rows", rows}}, m);
        write_manifest(a.out, m);
    }
    return 0;
}

// --- sweep ------------------------------------------------------------------

struct SweepArgs {
    fs::path config;
    std::vector<std::string> grid;
    std::vector<std::string> set;
    std::string mode = "simulate";
    fs::path out;
    unsigned jobs = 0;
};

struct GridAxis {
    std::string key;
    std::vector<std::string> values;
};

GridAxis parse_axis(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == spec.size()) {
        throw ConfigError("--grid " + spec + ": expected key=v1,v2,... or key=start:stop:count");
    }
    GridAxis ax{spec.substr(0, eq), {}};
    const std::string rest = spec.substr(eq + 1);
    if (std::count(rest.begin(), rest.end(), ':') == 2) {
        Real lo = 0, hi = 0;
        int n = 0;
        if (std::sscanf(rest.c_str(), "%lf:%lf:%d", &lo, &hi, &n) != 3 || n < 1) {
            throw ConfigError("--grid " + spec + ": bad range");
        }
        for (int i = 0; i < n; ++i) ax.values.push_back(cell(n == 1 ? lo : lo + (hi - lo) * i / (n - 1)));
    } else {
        std::stringstream ss(rest);
        for (std::string v; std::getline(ss, v, ',');) ax.values.push_back(v);
    }
    return ax;
}

int cmd_sweep(const SweepArgs& a) {
    if (a.mode != "simulate" && a.mode != "predict") {
        throw ConfigError("--mode: expected simulate or predict");
    }
    RunManifest m;
    m.subcommand = "sweep";
    m.output_dir = a.out;
    m.parameters = {{"grid", a.grid}, {"overrides", a.set}, {"mode", a.mode}};
    const json base = read_json_file(a.config);
    m.config_path = a.config;
    m.add_input("config", a.config);

    std::vector<GridAxis> axes;
    for (const auto& g : a.grid) axes.push_back(parse_axis(g));
    std::vector<std::vector<std::string>> points{{}};
    for (const auto& ax : axes) {
        std::vector<std::vector<std::string>> next;
        for (const auto& p : points) {
            for (const auto& v : ax.values) {
                auto q = p;
                q.push_back(v);
                next.push_back(q);
            }
        }
        points = std::move(next);
    }

    // Every point is validated before any work starts, so a bad key fails fast.
    std::vector<RunConfig> configs;
    for (const auto& p : points) {
        json j = base;
        for (const auto& o : a.set) apply_override(j, o);
        for (std::size_t k = 0; k < axes.size(); ++k) apply_override(j, axes[k].key + "=" + p[k]);
        configs.push_back(run_config_from_json(j, a.config.parent_path()));
        if (j.contains("devices") && j["devices"].is_object()) {
            for (const auto& [role, spec] : j["devices"].items()) {
                if (spec.is_string()) {
                    const fs::path dp = a.config.parent_path() / spec.get<std::string>();
                    m.device_paths[role] = dp;
                    m.add_input("device_" + role, dp);
                }
            }
        }
    }

    std::vector<std::string> results;
    if (a.mode == "predict") {
        results = prediction_columns();
    } else {
        results = {"scenario", "e_on_direct_uJ", "e_on_direct_full_uJ", "e_on_charge_ledger_uJ",
                   "e_on_energy_ledger_uJ", "e_on_proposed_uJ", "e_on_conventional_uJ",
                   "direct_vs_charge_ledger_rel", "balance_residual_rel", "t_diss_ns", "delta_v_onset_V",
                   "accepted_steps"};
    }
    std::vector<std::string> header;
    for (const auto& ax : axes) {
        const bool clash = std::find(results.begin(), results.end(), ax.key) != results.end();
        header.push_back(clash ? "grid." + ax.key : ax.key);
    }
    header.insert(header.end(), results.begin(), results.end());
    header.push_back("error");

    std::vector<std::vector<std::string>> rows(points.size());
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    auto work = [&] {
        for (std::size_t i = next++; i < points.size(); i = next++) {
            std::vector<std::string> row = points[i];
            const RunConfig& rc = configs[i];
            const std::size_t width = header.size() - axes.size() - 1;
            try {
                if (a.mode == "predict") {
                    const HalfBridgeConfig& c = rc.circuit;
                    ModeAssumptions mode;
                    mode.gate_on = c.gate_on;
                    mode.r_g = c.r_g_s1;
                    const PredictionPoint p =
                        predict_point(*c.dev_s1, *c.dev_s2, c.dev_s1->c_par(), c.dev_s2->c_par(), c.v_dc, c.delta_v,
                                      std::abs(signed_load_current(c.load)), mode);
                    for (auto& v : prediction_cells(p)) row.push_back(v);
                } else {
                    const WaveformTrace tr = simulate(rc.circuit, rc.solver, rc.t_end);
                    const PhaseTimeline tl = segment(tr, rc.circuit.scenario);
                    const EnergyReport r = energy_report(tr, tl);
                    const bool l = r.ledger_applicable;
                    const Real nan = std::numeric_limits<Real>::quiet_NaN();
                    for (auto& v : std::vector<std::string>{
                             std::string(to_string(tl.scenario)), cell(1e6 * r.e_on_direct),
                             cell(1e6 * r.e_on_direct_full), cell(l ? 1e6 * r.e_on_charge_ledger : nan),
                             cell(l ? 1e6 * r.e_on_energy_ledger : nan), cell(l ? 1e6 * r.e_on_proposed_analytic : nan),
                             cell(l ? 1e6 * r.e_on_conventional : nan),
                             cell(l ? r.direct_vs_charge_ledger.relative : nan), cell(r.balance.residual.relative),
                             cell(1e9 * r.t_diss), cell(r.delta_v), std::to_string(tr.accepted_steps)}) {
                        row.push_back(v);
                    }
                }
                row.push_back("");
            } catch (const std::exception& e) {
                ++failures;
                row.resize(axes.size() + width);
                std::string msg = e.what();
                std::replace(msg.begin(), msg.end(), ',', ';');
                std::replace(msg.begin(), msg.end(), '\n', ' ');
                row.push_back(msg);
            }
            rows[i] = std::move(row);
        }
    };
    const unsigned jobs = a.jobs ? a.jobs : std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::thread> pool;
    for (unsigned k = 0; k < std::min<std::size_t>(jobs, points.size()); ++k) pool.emplace_back(work);
    for (auto& t : pool) t.join();

    std::string csv = join_row(header);
    for (const auto& r : rows) csv += join_row(r);
    fs::create_directories(a.out);
    write_csv(a.out / "sweep.csv", csv, m);
    write_manifest(a.out, m);
    std::printf("%zu points, %d failed -> %s\n", points.size(), failures.load(), (a.out / "sweep.csv").c_str());
    return failures > 0 ? 1 : 0;
}

// --- validate ---------------------------------------------------------------

struct ValidateArgs {
    fs::path curves;
    fs::path out;
    fs::path write_stand_in;
};

void write_stand_in_devices(const fs::path& dir) {
    fs::create_directories(dir);
    json fits = json::array();
    for (int cls : {25, 80}) {
        const StandInFit fit = fit_stand_in_device(cls);
        const std::string stem = cls == 25 ? "C2M0025120D" : "C2M0080120D";
        write_device_files(dir, stem, make_synthetic_device(fit.params));
        json excluded = json::array();
        for (const auto& r : fit.excluded) excluded.push_back({{"v_dc_V", r.v_dc}, {"delta_v_V", r.delta_v}});
        fits.push_back({{"r_ds_mohm", cls},
                        {"params", to_json(fit.params)},
                        {"relative_residuals", fit.residuals},
                        {"excluded_rows", excluded},
                        {"max_abs_residual_kept", fit.max_abs_residual}});
        std::printf("stand-in %s: max |residual| %.3g over kept rows, %zu excluded\n", stem.c_str(),
                    fit.max_abs_residual, fit.excluded.size());
    }
    const Table1Devices defaults;
    write_text(dir / "operating_point.json",
               json{{"i_load_A", defaults.i_load},
                    {"r_g_ohm", defaults.mode.r_g},
                    {"gate_on_V", defaults.mode.gate_on},
                    {"v_ds_transfer_V", defaults.mode.v_ds_transfer},
                    {"note", "assumed; the comparison table does not state the load current or gate resistance"}}
                       .dump(2) +
                   "\n");
    write_text(dir / "stand_in_fit.json",
               json{{"note", "C_ds law fitted so that the conventional model reproduces the published conventional "
                             "column; not digitized datasheet curves"},
                    {"fits", fits}}
                       .dump(2) +
                   "\n");
}

int cmd_validate(const ValidateArgs& a) {
    if (!a.write_stand_in.empty()) {
        write_stand_in_devices(a.write_stand_in);
        if (a.out.empty()) return 0;
    }
    RunManifest m;
    m.subcommand = "validate";
    m.output_dir = a.out;
    m.parameters = {{"curves", a.curves.string()}};
    m.input_hashes["table1"] = fnv1a_hex(table1_csv_text());
    if (!a.curves.empty()) {
        for (const char* f : {"C2M0025120D.json", "C2M0080120D.json", "operating_point.json"}) {
            if (fs::exists(a.curves / f)) m.add_input(f, a.curves / f);
        }
    }

    const Table1ArithmeticReport arith = verify_table1_arithmetic();
    std::printf("table arithmetic: rows %s, ranges %s, mean %s\n", arith.rows_ok ? "ok" : "FAIL",
                arith.ranges_ok ? "ok" : "FAIL", arith.mean_ok ? "ok" : "FAIL");
    std::printf("  conventional error %.2f%% .. %.2f%%, proposed %.2f%% .. %.2f%%\n", arith.conv_err_min,
                arith.conv_err_max, arith.prop_err_min, arith.prop_err_max);
    std::printf("  mean of per-row ratios %.2f, ratio of mean errors %.2f\n", arith.mean_of_ratios,
                arith.ratio_of_mean_errors);

    std::optional<Table1PredictionReport> pred;
    if (!a.curves.empty()) {
        pred = run_table1_predictions(a.curves);
        for (const auto& n : pred->notices) std::printf("notice: %s\n", n.c_str());
        std::printf("predictions: %d rows evaluated\n", pred->evaluated);
        if (pred->evaluated > 0) {
            std::printf("  vs published conventional: mean |dev| %.2f%%, max %.2f%%\n", pred->mean_abs_dev_conv,
                        pred->max_abs_dev_conv);
            std::printf("  vs published proposed:     mean |dev| %.2f%%, max %.2f%%\n", pred->mean_abs_dev_prop,
                        pred->max_abs_dev_prop);
            std::printf("  vs measured: mean |err| conventional %.2f%%, proposed %.2f%%\n", pred->mean_abs_err_conv,
                        pred->mean_abs_err_prop);
        }
    }

    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_json(a.out / "table1_arithmetic.json", to_json(arith), m);
        write_csv(a.out / "table1_arithmetic.csv", to_csv(arith), m);
        if (pred) {
            write_json(a.out / "table1_predictions.json", to_json(*pred), m);
            write_csv(a.out / "table1_predictions.csv", to_csv(*pred), m);
        }
        write_manifest(a.out, m);
    }
    return arith.ok() ? 0 : 3;
}

// --- phases -----------------------------------------------------------------

struct PhasesArgs {
    fs::path trace;
    fs::path markers;
    fs::path config;
    fs::path s1, s2;
    std::string scenario;
    fs::path out;
    bool plot = false;
};

int cmd_phases(const PhasesArgs& a) {
    RunManifest m;
    m.subcommand = "phases";
    m.output_dir = a.out;
    m.parameters = {{"scenario", a.scenario}};
    m.add_input("trace", a.trace);
    WaveformTrace trace = read_trace_csv(a.trace);
    fs::path markers = a.markers;
    if (markers.empty()) {
        fs::path guess = a.trace;
        guess.replace_extension(".markers.json");
        if (fs::exists(guess)) markers = guess;
    }
    if (!markers.empty()) {
        m.add_input("markers", markers);
        const json j = read_json_file(markers);
        trace.markers = markers_from_json(j.contains("markers") ? j["markers"] : j);
    }

    PhaseTimeline tl;
    std::optional<EnergyReport> report;
    if (!a.config.empty()) {
        const RunConfig rc = load_config_with_overrides(a.config, {}, m);
        const Scenario sc = a.scenario.empty() ? rc.circuit.scenario : scenario_from_string(a.scenario);
        trace.system = std::make_shared<const CircuitSystem>(assemble(rc.circuit));
        tl = segment(trace, sc);
        report = energy_report(trace, tl);
    } else {
        if (a.s1.empty() || a.scenario.empty()) {
            throw ConfigError("phases: give --config, or --s1 and --scenario");
        }
        m.device_paths["s1"] = a.s1;
        m.add_input("device_s1", a.s1);
        const auto s1 = load_device_arg(a.s1);
        auto s2 = s1;
        if (!a.s2.empty()) {
            m.device_paths["s2"] = a.s2;
            m.add_input("device_s2", a.s2);
            s2 = load_device_arg(a.s2);
        }
        tl = segment(trace, scenario_from_string(a.scenario), *s1, *s2);
    }

    for (const auto& e : tl.events) {
        std::printf("%10.3f ns  %-16s %s\n", 1e9 * e.t, std::string(to_string(e.kind)).c_str(), e.note.c_str());
    }
    for (const auto& w : tl.warnings) std::printf("warning: %s\n", w.c_str());
    if (!a.out.empty()) {
        fs::create_directories(a.out);
        write_json(a.out / "timeline.json", to_json(tl), m);
        if (report) write_json(a.out / "energy.json", to_json(*report), m);
        if (a.plot) {
            PlotOptions po;
            po.manifest_hash = m.hash();
            write_text(a.out / "plot.svg", render_svg(trace, tl, po));
        }
        write_manifest(a.out, m);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Half-bridge turn-on simulation and turn-on energy accounting"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Run one turn-on event: trace, phases, energy report, plot");
    s->add_option("-c,--config", sim.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    s->add_option("-o,--out", sim.out, "Output directory")->required();
    s->add_option("--set", sim.set, "Override a config key, e.g. --set load.current_A=15");
    s->add_flag("--no-plot", sim.no_plot, "Skip the SVG");
    add_solver_flags(s, sim.solver);

    PredictArgs pr;
    auto* p = app.add_subcommand("predict", "Datasheet-only turn-on energy predictions");
    p->add_option("--s1", pr.s1, "Device of the switch under study (manifest or synthetic JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    p->add_option("--s2", pr.s2, "Complementary device (default: same as --s1)")->check(CLI::ExistingFile);
    p->add_option("--v-dc", pr.v_dc, "DC-link voltage, V")->capture_default_str();
    p->add_option("--delta-v", pr.delta_v, "Residual voltage(s) at turn-on, V")->required()->delimiter(',');
    p->add_option("--i-load", pr.i_load, "Load current magnitude, A")->capture_default_str();
    p->add_option("--gate-on", pr.mode.gate_on, "Gate drive high level, V")->capture_default_str();
    p->add_option("--r-g", pr.mode.r_g, "Gate resistance, ohm")->capture_default_str();
    p->add_option("--v-ds-transfer", pr.mode.v_ds_transfer, "Drain bias for the plateau voltage, V")
        ->capture_default_str();
    p->add_option("--v-gp", pr.mode.v_gp, "Plateau voltage override, V (<= 0: derived)")->capture_default_str();
    p->add_option("--c-par-s1", pr.c_par_s1, "Parallel capacitance of S1, F (default: from the device)");
    p->add_option("--c-par-s2", pr.c_par_s2, "Parallel capacitance of S2, F (default: from the device)");
    p->add_option("-o,--out", pr.out, "Output directory for CSV/JSON");

    SweepArgs sw;
    auto* g = app.add_subcommand("sweep", "Run a config template over a parameter grid");
    g->add_option("-c,--config", sw.config, "Template run configuration")->required()->check(CLI::ExistingFile);
    g->add_option("--grid", sw.grid, "key=v1,v2,... or key=start:stop:count (repeat for a product grid)")
        ->required();
    g->add_option("--set", sw.set, "Override a config key for every point");
    g->add_option("--mode", sw.mode, "simulate or predict")->capture_default_str();
    g->add_option("-o,--out", sw.out, "Output directory")->required();
    g->add_option("-j,--jobs", sw.jobs, "Worker threads (0: all cores)");

    ValidateArgs va;
    auto* v = app.add_subcommand("validate", "Check the published comparison table and re-evaluate its predictions");
    v->add_option("--curves", va.curves, "Directory with C2M0025120D.json, C2M0080120D.json, operating_point.json");
    v->add_option("-o,--out", va.out, "Output directory");
    v->add_option("--write-stand-in", va.write_stand_in, "Fit stand-in device files into this directory");

    PhasesArgs ph;
    auto* f = app.add_subcommand("phases", "Segment an existing trace CSV");
    f->add_option("-t,--trace", ph.trace, "Trace CSV")->required()->check(CLI::ExistingFile);
    f->add_option("--markers", ph.markers, "Marker sidecar (default: <trace>.markers.json if present)");
    f->add_option("-c,--config", ph.config, "Run configuration that produced the trace")->check(CLI::ExistingFile);
    f->add_option("--s1", ph.s1, "Device of S1 when no config is given");
    f->add_option("--s2", ph.s2, "Device of S2 (default: same as --s1)");
    f->add_option("--scenario", ph.scenario, "ZVS, HS, iZVS_case1 or iZVS_case2");
    f->add_option("-o,--out", ph.out, "Output directory");
    f->add_flag("--plot", ph.plot, "Also write plot.svg");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*s) return cmd_simulate(sim);
        if (*p) return cmd_predict(pr);
        if (*g) return cmd_sweep(sw);
        if (*v) return cmd_validate(va);
        if (*f) return cmd_phases(ph);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
