#include "turnon/energy.hpp"

#include "turnon/errors.hpp"
#include "turnon/numerics.hpp"
#include "turnon/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace turnon {

namespace {

struct Sample {
    Real t = 0.0;
    CircuitState s;
    BranchCurrents b;
};

Sample sample_at(const WaveformTrace& tr, Real t) {
    if (tr.system) {
        return {t, tr.system->state(t, tr.state_at(t)), tr.currents_at(t)};
    }
    auto [s, b] = interpolate_sample(tr, t);
    return {t, s, b};
}

void check_window(const WaveformTrace& tr, Window w, const char* op) {
    if (tr.empty()) {
        throw InputError(std::string(op) + ": empty trace");
    }
    const Real slack = 1e-12 * std::max(std::abs(tr.t.front()), std::abs(tr.t.back()));
    if (!(w.end >= w.start) || w.start < tr.t.front() - slack || w.end > tr.t.back() + slack) {
        throw InputError(std::string(op) + ": window outside the trace");
    }
}

/// Window endpoints interpolated, every trace sample strictly inside kept as is.
std::vector<Sample> window_samples(const WaveformTrace& tr, Window w) {
    std::vector<Sample> out;
    out.push_back(sample_at(tr, w.start));
    const auto first = std::upper_bound(tr.t.begin(), tr.t.end(), w.start);
    for (auto it = first; it != tr.t.end() && *it < w.end; ++it) {
        const auto k = static_cast<std::size_t>(it - tr.t.begin());
        out.push_back({tr.t[k], tr.states[k], tr.currents[k]});
    }
    if (w.end > w.start) {
        out.push_back(sample_at(tr, w.end));
    }
    return out;
}

template <typename F>
Real trapezoid(const std::vector<Sample>& s, F&& f) {
    Real sum = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        sum += 0.5 * (s[k].t - s[k - 1].t) * (f(s[k - 1]) + f(s[k]));
    }
    return sum;
}

Real relative(Real diff, Real ref) {
    return ref != 0.0 ? std::abs(diff) / std::abs(ref) : std::abs(diff);
}

void require_range(Real v_dc, Real delta_v, const char* op) {
    if (!std::isfinite(v_dc) || !std::isfinite(delta_v) || v_dc <= 0 || delta_v < 0 || delta_v > v_dc) {
        throw InputError(std::string(op) + ": need 0 <= delta_v <= v_dc and v_dc > 0");
    }
}

}  // namespace

void PredictionInputs::validate() const {
    require_range(v_dc, delta_v, "prediction inputs");
    if (!dev_s1 || !dev_s2) {
        throw InputError("prediction inputs: both devices are required");
    }
    if (!(window.end > window.start)) {
        throw InputError("prediction inputs: window must be nonempty");
    }
    for (Real v : {integrals.i_rs2, integrals.v_ds2_i_rs2, integrals.i_l, integrals.v_ds2_i_l, c_par_s1,
                   c_par_s2}) {
        if (!std::isfinite(v)) {
            throw InputError("prediction inputs: integrals and parallel capacitances must be finite");
        }
    }
}

Real LedgerTerms::total() const {
    return dc_source + load_charge + ac_link + s2_oss_stored + s2_shoot_through + s2_par_stored +
           s1_oss_discharge + s1_par_discharge;
}

Real e_on_direct(const WaveformTrace& trace, Window window) {
    check_window(trace, window, "e_on_direct");
    return trapezoid(window_samples(trace, window),
                     [](const Sample& p) { return p.s.v_ds_s1 * p.b.i_rs1; });
}

WindowIntegrals window_integrals(const WaveformTrace& trace, Window window) {
    check_window(trace, window, "window_integrals");
    const auto s = window_samples(trace, window);
    WindowIntegrals w;
    w.i_rs2 = trapezoid(s, [](const Sample& p) { return p.b.i_rs2; });
    w.v_ds2_i_rs2 = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s2 * p.b.i_rs2; });
    w.i_l = trapezoid(s, [](const Sample& p) { return p.b.i_l; });
    w.v_ds2_i_l = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s2 * p.b.i_l; });
    return w;
}

std::pair<Real, Real> delta_q_s2(const DeviceModel& dev_s2, Real c_par_s2, Real v_dc, Real delta_v) {
    require_range(v_dc, delta_v, "delta_q_s2");
    return {q_oss(dev_s2, v_dc) - q_oss(dev_s2, v_dc - delta_v), c_par_s2 * delta_v};
}

Real s2_absorbed_energy(const DeviceModel& dev_s2, Real c_par_s2, Real v_dc, Real delta_v,
                        Real shoot_through) {
    require_range(v_dc, delta_v, "s2_absorbed_energy");
    const Real v_lo = v_dc - delta_v;
    return (e_oss(dev_s2, v_dc) - e_oss(dev_s2, v_lo)) + 0.5 * c_par_s2 * (v_dc * v_dc - v_lo * v_lo) +
           shoot_through;
}

ChargeLedger charge_ledger_e_on(const PredictionInputs& in) {
    in.validate();
    const Real v_dc = in.v_dc;
    const Real dv = in.delta_v;
    const Real v_lo = v_dc - dv;
    const auto [dq, dq_par] = delta_q_s2(*in.dev_s2, in.c_par_s2, v_dc, dv);

    ChargeLedger l;
    l.delta_q_s2 = dq;
    l.delta_q_par_s2 = dq_par;
    LedgerTerms& t = l.terms;
    t.dc_source = v_dc * (in.integrals.i_rs2 + dq + dq_par);
    t.load_charge = -v_dc * in.integrals.i_l;
    t.ac_link = in.integrals.v_ds2_i_l;
    t.s2_oss_stored = -(e_oss(*in.dev_s2, v_dc) - e_oss(*in.dev_s2, v_lo));
    t.s2_shoot_through = -in.integrals.v_ds2_i_rs2;
    t.s2_par_stored = -0.5 * in.c_par_s2 * (v_dc * v_dc - v_lo * v_lo);
    t.s1_oss_discharge = e_oss(*in.dev_s1, dv);
    t.s1_par_discharge = 0.5 * in.c_par_s1 * dv * dv;
    l.e_on = t.total();
    return l;
}

EnergyLedger energy_ledger_e_on(const PredictionInputs& in) {
    in.validate();
    const Real v_dc = in.v_dc;
    const Real dv = in.delta_v;
    const Real v_lo = v_dc - dv;
    const auto [dq, dq_par] = delta_q_s2(*in.dev_s2, in.c_par_s2, v_dc, dv);

    EnergyLedger l;
    l.e_initial = e_oss(*in.dev_s1, dv) + 0.5 * in.c_par_s1 * dv * dv + e_oss(*in.dev_s2, v_lo) +
                  0.5 * in.c_par_s2 * v_lo * v_lo;
    l.e_final = e_oss(*in.dev_s2, v_dc) + 0.5 * in.c_par_s2 * v_dc * v_dc;
    l.delta_q_dc = dq + dq_par + in.integrals.i_rs2 - in.integrals.i_l;
    l.w_dc = v_dc * l.delta_q_dc;
    l.w_l = in.integrals.v_ds2_i_l;
    l.e_dissipated_s2 = in.integrals.v_ds2_i_rs2;
    l.e_on = l.e_initial - l.e_final + l.w_dc + l.w_l - l.e_dissipated_s2;
    l.e_on_closed_form = charge_ledger_e_on(in).e_on;
    return l;
}

PredictionInputs prediction_inputs(const WaveformTrace& trace, const PhaseTimeline& timeline) {
    if (!trace.system) {
        throw InputError("prediction_inputs: trace has no attached circuit");
    }
    const HalfBridgeConfig& cfg = trace.system->config();
    PredictionInputs in;
    in.v_dc = cfg.v_dc;
    in.window = timeline.ledger_window();
    in.delta_v = std::clamp(sample_at(trace, timeline.onset).s.v_ds_s1, 0.0, cfg.v_dc);
    in.integrals = window_integrals(trace, in.window);
    in.dev_s1 = cfg.dev_s1;
    in.dev_s2 = cfg.dev_s2;
    in.c_par_s1 = cfg.dev_s1->c_par();
    in.c_par_s2 = cfg.dev_s2->c_par();
    const auto s = window_samples(trace, in.window);
    const Real len = in.window.length();
    in.v_gp = len > 0 ? trapezoid(s, [](const Sample& p) { return p.s.v_gs_s1; }) / len : s.front().s.v_gs_s1;
    return in;
}

namespace {

Real stored_energy(const CircuitSystem& sys, const CircuitState& s) {
    const DeviceModel& d1 = sys.s1();
    const DeviceModel& d2 = sys.s2();
    const Real v_dg1 = s.v_ds_s1 - s.v_gs_s1;
    const Real v_dg2 = s.v_ds_s2 - s.v_gs_s2;
    return 0.5 * d1.c_gs * s.v_gs_s1 * s.v_gs_s1 + d1.c_gd.energy(v_dg1) + d1.c_ds.energy(s.v_ds_s1) +
           0.5 * d1.c_par_gd * v_dg1 * v_dg1 + 0.5 * d1.c_par_ds * s.v_ds_s1 * s.v_ds_s1 +
           0.5 * d2.c_gs * s.v_gs_s2 * s.v_gs_s2 + d2.c_gd.energy(v_dg2) + d2.c_ds.energy(s.v_ds_s2) +
           0.5 * d2.c_par_gd * v_dg2 * v_dg2 + 0.5 * d2.c_par_ds * s.v_ds_s2 * s.v_ds_s2;
}

}  // namespace

SimulationBalance simulation_balance(const WaveformTrace& trace, Window window) {
    if (!trace.system) {
        throw InputError("simulation_balance: trace has no attached circuit");
    }
    check_window(trace, window, "simulation_balance");
    const CircuitSystem& sys = *trace.system;
    const HalfBridgeConfig& cfg = sys.config();
    const auto s = window_samples(trace, window);

    SimulationBalance b;
    b.e_initial = stored_energy(sys, s.front().s);
    b.e_final = stored_energy(sys, s.back().s);
    b.e_rs1 = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s1 * p.b.i_rs1; });
    b.e_rs2 = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s2 * p.b.i_rs2; });
    b.e_gate_resistors = trapezoid(s, [&](const Sample& p) {
        return p.b.i_g_s1 * p.b.i_g_s1 * cfg.r_g_s1 + p.b.i_g_s2 * p.b.i_g_s2 * cfg.r_g_s2;
    });
    // Extracted recovery charge leaves the network; its energy is lost in S2.
    b.e_recovery = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s2 * p.b.i_crr_s2; });
    b.e_dissipated = b.e_rs1 + b.e_rs2 + b.e_gate_resistors + b.e_recovery;
    b.w_dc = trapezoid(s, [&](const Sample& p) { return cfg.v_dc * p.b.i_dc; });
    b.w_l = trapezoid(s, [](const Sample& p) { return p.s.v_ds_s2 * p.b.i_l; });
    b.w_gate = trapezoid(s, [&](const Sample& p) {
        return sys.drive_s1(p.t) * p.b.i_g_s1 + sys.drive_s2(p.t) * p.b.i_g_s2;
    });
    b.e_delivered = -(b.w_dc + b.w_l + b.w_gate);
    b.residual.absolute = b.e_initial - b.e_dissipated - b.e_delivered - b.e_final;
    b.residual.relative = relative(b.residual.absolute, b.e_initial);
    return b;
}

std::vector<ChargeCheck> charge_bookkeeping(const WaveformTrace& trace, Window window) {
    if (!trace.system) {
        throw InputError("charge_bookkeeping: trace has no attached circuit");
    }
    check_window(trace, window, "charge_bookkeeping");
    const CircuitSystem& sys = *trace.system;
    const DeviceModel& d1 = sys.s1();
    const DeviceModel& d2 = sys.s2();
    const auto s = window_samples(trace, window);
    const CircuitState& a = s.front().s;
    const CircuitState& z = s.back().s;
    auto dg1 = [](const CircuitState& c) { return c.v_ds_s1 - c.v_gs_s1; };
    auto dg2 = [](const CircuitState& c) { return c.v_ds_s2 - c.v_gs_s2; };

    std::vector<ChargeCheck> out;
    auto check = [&](std::string name, Real BranchCurrents::*i, Real dq) {
        ChargeCheck c;
        c.element = std::move(name);
        c.integral = trapezoid(s, [i](const Sample& p) { return p.b.*i; });
        const Real magnitude = trapezoid(s, [i](const Sample& p) { return std::abs(p.b.*i); });
        c.delta_q = dq;
        const Real ref = std::max(std::abs(dq), magnitude);
        c.relative_error = ref > 0 ? std::abs(c.integral - dq) / ref : 0.0;
        out.push_back(std::move(c));
    };
    check("C_gs,S1", &BranchCurrents::i_cgs_s1, d1.c_gs * (z.v_gs_s1 - a.v_gs_s1));
    check("C_gd,S1", &BranchCurrents::i_cgd_s1, d1.c_gd.charge(dg1(z)) - d1.c_gd.charge(dg1(a)));
    check("C_ds,S1", &BranchCurrents::i_cds_s1, d1.c_ds.charge(z.v_ds_s1) - d1.c_ds.charge(a.v_ds_s1));
    check("C_par,gd,S1", &BranchCurrents::i_cpar_gd_s1, d1.c_par_gd * (dg1(z) - dg1(a)));
    check("C_par,ds,S1", &BranchCurrents::i_cpar_ds_s1, d1.c_par_ds * (z.v_ds_s1 - a.v_ds_s1));
    check("C_gs,S2", &BranchCurrents::i_cgs_s2, d2.c_gs * (z.v_gs_s2 - a.v_gs_s2));
    check("C_gd,S2", &BranchCurrents::i_cgd_s2, d2.c_gd.charge(dg2(z)) - d2.c_gd.charge(dg2(a)));
    check("C_ds,S2", &BranchCurrents::i_cds_s2, d2.c_ds.charge(z.v_ds_s2) - d2.c_ds.charge(a.v_ds_s2));
    check("C_par,gd,S2", &BranchCurrents::i_cpar_gd_s2, d2.c_par_gd * (dg2(z) - dg2(a)));
    check("C_par,ds,S2", &BranchCurrents::i_cpar_ds_s2, d2.c_par_ds * (z.v_ds_s2 - a.v_ds_s2));
    if (sys.recovery_active()) {
        check("C_rr,S2", &BranchCurrents::i_crr_s2, z.q_rr_removed - a.q_rr_removed);
    }
    return out;
}

Real predict_conventional(const DeviceModel& dev_s1, const DeviceModel& dev_s2, Real v_dc, Real delta_v) {
    require_range(v_dc, delta_v, "predict_conventional");
    const Real v_lo = v_dc - delta_v;
    const Real dq = q_oss(dev_s2, v_dc) - q_oss(dev_s2, v_lo);
    const Real de = e_oss(dev_s2, v_dc) - e_oss(dev_s2, v_lo);
    return v_dc * dq - de + e_oss(dev_s1, delta_v);
}

ProposedPrediction predict_proposed_analytic(const DeviceModel& dev_s1, const DeviceModel& dev_s2,
                                             Real c_par_s1, Real c_par_s2, Real v_dc, Real delta_v,
                                             Real i_load, const ModeAssumptions& mode) {
    require_range(v_dc, delta_v, "predict_proposed_analytic");
    if (!(i_load >= 0) || !std::isfinite(i_load)) {
        throw InputError("predict_proposed_analytic: i_load must be a finite magnitude >= 0");
    }
    if (!(mode.r_g > 0) || !(mode.gate_on > dev_s1.v_th)) {
        throw InputError("predict_proposed_analytic: need r_g > 0 and gate_on above v_th");
    }
    ProposedPrediction p;

    // Plateau voltage: the gate voltage at which the channel carries the load current.
    if (mode.v_gp > 0) {
        p.v_gp = mode.v_gp;
    } else if (i_load == 0) {
        p.v_gp = dev_s1.v_th;
    } else {
        auto f = [&](Real v_gs) { return channel_current(dev_s1, v_gs, mode.v_ds_transfer) - i_load; };
        const Real lo = std::min(dev_s1.v_th, dev_s1.iv.gate_voltages().front());
        if (f(mode.gate_on) < 0) {
            throw InputError("predict_proposed_analytic: load current exceeds the channel capability at gate_on");
        }
        p.v_gp = f(lo) >= 0 ? lo : numerics::bisect(f, lo, mode.gate_on, 1e-9);
    }
    if (!(p.v_gp < mode.gate_on)) {
        throw InputError("predict_proposed_analytic: plateau voltage must lie below gate_on");
    }
    p.i_g = (mode.gate_on - p.v_gp) / mode.r_g;

    // Segment 1, commutation: the gate charges from v_th to V_gp with v_ds,S1 held at ΔV.
    const Real c_iss = dev_s1.c_gs + dev_s1.c_gd.capacitance(delta_v) + dev_s1.c_par_gd;
    p.t_cc = p.v_gp > dev_s1.v_th
                 ? mode.r_g * c_iss * std::log((mode.gate_on - dev_s1.v_th) / (mode.gate_on - p.v_gp))
                 : 0.0;

    // Segment 2, voltage fall: the gate current sweeps C_gd,S1 from ΔV down to zero, and the
    // constant channel excess i_net = i_RS1 − i_load moves the node charge over that time.
    const Real v_lo = v_dc - delta_v;
    const Real q_gd1 = dev_s1.c_gd.charge(delta_v) + dev_s1.c_par_gd * delta_v;
    const Real q_node = q_oss(dev_s1, delta_v) + c_par_s1 * delta_v +
                        (q_oss(dev_s2, v_dc) - q_oss(dev_s2, v_lo)) + c_par_s2 * delta_v;
    // ∫ v_ds,S1 C_node dv_ds,S1 over [0, ΔV], with the S2 part substituted to its own voltage.
    const Real vq_node = e_oss(dev_s1, delta_v) + 0.5 * c_par_s1 * delta_v * delta_v +
                         (v_dc * (q_oss(dev_s2, v_dc) - q_oss(dev_s2, v_lo)) -
                          (e_oss(dev_s2, v_dc) - e_oss(dev_s2, v_lo))) +
                         0.5 * c_par_s2 * delta_v * delta_v;
    p.t_vf = q_gd1 / p.i_g;
    p.i_net = p.t_vf > 0 ? q_node / p.t_vf : 0.0;
    const Real v_ds1_vf = p.i_net > 0 ? vq_node / p.i_net : 0.0;
    p.integral_v_ds1 = delta_v * p.t_cc + v_ds1_vf;

    PredictionInputs in;
    in.v_dc = v_dc;
    in.delta_v = delta_v;
    in.window = {0.0, std::max(p.t_diss(), std::numeric_limits<Real>::min())};
    in.dev_s1 = std::shared_ptr<const DeviceModel>(&dev_s1, [](const DeviceModel*) {});
    in.dev_s2 = std::shared_ptr<const DeviceModel>(&dev_s2, [](const DeviceModel*) {});
    in.c_par_s1 = c_par_s1;
    in.c_par_s2 = c_par_s2;
    in.v_gp = p.v_gp;
    // Load drawn out of the midpoint: signed i_L = −i_load, v_ds,S2 = V_DC − v_ds,S1.
    in.integrals.i_l = -i_load * p.t_diss();
    in.integrals.v_ds2_i_l = -i_load * (v_dc * p.t_diss() - p.integral_v_ds1);
    const ChargeLedger l = charge_ledger_e_on(in);
    p.terms = l.terms;
    p.e_on = l.e_on;
    return p;
}

ErrorMetrics error_metrics(Real measured, Real predicted_conventional, Real predicted_proposed) {
    if (!(measured > 0)) {
        throw InputError("error_metrics: measured energy must be > 0");
    }
    ErrorMetrics m;
    m.error_conventional = (predicted_conventional - measured) / measured;
    m.error_proposed = (predicted_proposed - measured) / measured;
    m.reduction_ratio = m.error_proposed != 0.0 ? std::abs(m.error_conventional) / std::abs(m.error_proposed)
                                                : std::numeric_limits<Real>::infinity();
    return m;
}

EnergyReport energy_report(const WaveformTrace& trace, const PhaseTimeline& timeline) {
    if (!trace.system) {
        throw InputError("energy_report: trace has no attached circuit");
    }
    const HalfBridgeConfig& cfg = trace.system->config();
    const PredictionInputs in = prediction_inputs(trace, timeline);

    EnergyReport r;
    r.scenario = timeline.scenario;
    r.ledger_applicable = timeline.scenario == Scenario::iZVSCase2;
    r.window = in.window;
    r.t_diss = in.window.length();
    r.delta_v = in.delta_v;
    r.v_gp = in.v_gp;
    r.integrals = in.integrals;
    r.e_on_direct = e_on_direct(trace, in.window);
    r.e_on_direct_full = e_on_direct(trace, {timeline.onset, trace.t_end()});
    r.charge = charge_ledger_e_on(in);
    r.energy = energy_ledger_e_on(in);
    r.e_on_charge_ledger = r.charge.e_on;
    r.e_on_energy_ledger = r.energy.e_on;
    r.e_on_conventional = predict_conventional(*cfg.dev_s1, *cfg.dev_s2, cfg.v_dc, in.delta_v);
    ModeAssumptions mode;
    mode.gate_on = cfg.gate_on;
    mode.r_g = cfg.r_g_s1;
    const Real i_load = std::abs(signed_load_current(cfg.load));
    try {
        r.proposed = predict_proposed_analytic(*cfg.dev_s1, *cfg.dev_s2, in.c_par_s1, in.c_par_s2, cfg.v_dc,
                                               in.delta_v, i_load, mode);
        r.e_on_proposed_analytic = r.proposed.e_on;
    } catch (const InputError&) {
        r.e_on_proposed_analytic = std::numeric_limits<Real>::quiet_NaN();
    }
    r.balance = simulation_balance(trace, {trace.t_begin(), trace.t_end()});
    r.charge_checks = charge_bookkeeping(trace, {trace.t_begin(), trace.t_end()});
    r.direct_vs_charge_ledger.absolute = r.e_on_charge_ledger - r.e_on_direct;
    r.direct_vs_charge_ledger.relative = relative(r.direct_vs_charge_ledger.absolute, r.e_on_direct);
    r.energy_vs_charge_ledger.absolute = r.e_on_energy_ledger - r.e_on_charge_ledger;
    r.energy_vs_charge_ledger.relative = relative(r.energy_vs_charge_ledger.absolute, r.e_on_charge_ledger);
    return r;
}

nlohmann::json to_json(const LedgerTerms& t) {
    return {
        {"dc_source_energy_J", t.dc_source},
        {"load_charge_energy_J", t.load_charge},
        {"ac_link_energy_J", t.ac_link},
        {"s2_oss_stored_energy_J", t.s2_oss_stored},
        {"s2_shoot_through_dissipation_J", t.s2_shoot_through},
        {"s2_parallel_stored_energy_J", t.s2_par_stored},
        {"s1_oss_discharge_energy_J", t.s1_oss_discharge},
        {"s1_parallel_discharge_energy_J", t.s1_par_discharge},
        {"total_J", t.total()},
    };
}

namespace {

nlohmann::json residual_json(const Residual& r) {
    return {{"absolute", r.absolute}, {"relative", r.relative}};
}

nlohmann::json finite_or_null(Real v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

nlohmann::json to_json(const EnergyReport& r) {
    nlohmann::json checks = nlohmann::json::array();
    for (const ChargeCheck& c : r.charge_checks) {
        checks.push_back({{"element", c.element},
                          {"integral_C", c.integral},
                          {"delta_q_C", c.delta_q},
                          {"relative_error", c.relative_error}});
    }
    const SimulationBalance& b = r.balance;
    return {
        {"scenario", std::string(to_string(r.scenario))},
        {"ledger_applicable", r.ledger_applicable},
        {"window_s", {r.window.start, r.window.end}},
        {"t_diss_s", r.t_diss},
        {"delta_v_V", r.delta_v},
        {"v_gp_V", r.v_gp},
        {"e_on_direct_J", r.e_on_direct},
        {"e_on_direct_full_trace_J", r.e_on_direct_full},
        {"e_on_charge_ledger_J", r.e_on_charge_ledger},
        {"e_on_energy_ledger_J", r.e_on_energy_ledger},
        {"e_on_energy_ledger_closed_form_J", r.energy.e_on_closed_form},
        {"e_on_proposed_analytic_J", finite_or_null(r.e_on_proposed_analytic)},
        {"e_on_conventional_J", r.e_on_conventional},
        {"integrals",
         {{"i_rs2_C", r.integrals.i_rs2},
          {"v_ds2_i_rs2_J", r.integrals.v_ds2_i_rs2},
          {"i_l_C", r.integrals.i_l},
          {"v_ds2_i_l_J", r.integrals.v_ds2_i_l}}},
        {"charge_ledger",
         {{"delta_q_s2_C", r.charge.delta_q_s2},
          {"delta_q_par_s2_C", r.charge.delta_q_par_s2},
          {"terms", to_json(r.charge.terms)}}},
        {"energy_ledger",
         {{"e_initial_J", r.energy.e_initial},
          {"e_final_J", r.energy.e_final},
          {"delta_q_dc_C", r.energy.delta_q_dc},
          {"w_dc_J", r.energy.w_dc},
          {"w_l_J", r.energy.w_l},
          {"e_dissipated_s2_J", r.energy.e_dissipated_s2}}},
        {"proposed_analytic",
         {{"terms", to_json(r.proposed.terms)},
          {"v_gp_V", r.proposed.v_gp},
          {"i_g_A", r.proposed.i_g},
          {"t_cc_s", r.proposed.t_cc},
          {"t_vf_s", r.proposed.t_vf},
          {"i_net_A", r.proposed.i_net}}},
        {"simulation_balance",
         {{"e_initial_J", b.e_initial},
          {"e_final_J", b.e_final},
          {"e_dissipated_J", b.e_dissipated},
          {"e_rs1_J", b.e_rs1},
          {"e_rs2_J", b.e_rs2},
          {"e_gate_resistors_J", b.e_gate_resistors},
          {"e_recovery_J", b.e_recovery},
          {"e_delivered_J", b.e_delivered},
          {"w_dc_J", b.w_dc},
          {"w_l_J", b.w_l},
          {"w_gate_J", b.w_gate},
          {"residual", residual_json(b.residual)}}},
        {"charge_bookkeeping", checks},
        {"residuals",
         {{"direct_vs_charge_ledger", residual_json(r.direct_vs_charge_ledger)},
          {"energy_vs_charge_ledger", residual_json(r.energy_vs_charge_ledger)}}},
    };
}

}  // namespace turnon
