#pragma once

// Turn-on energy by three routes: the direct R_S1 dissipation integral, the
// charge-conservation ledger and the energy-conservation ledger. Also the
// datasheet-only proposed and conventional predictions.

#include "turnon/device_model.hpp"
#include "turnon/phases.hpp"
#include "turnon/solver.hpp"

#include <json.hpp>

#include <memory>
#include <string>
#include <vector>

namespace turnon {

/// Waveform integrals over the ledger window. i_L is signed, positive into the midpoint.
struct WindowIntegrals {
    Real i_rs2 = 0.0;          // C
    Real v_ds2_i_rs2 = 0.0;    // J
    Real i_l = 0.0;            // C
    Real v_ds2_i_l = 0.0;      // J
};

struct PredictionInputs {
    Real v_dc = 0.0;
    Real delta_v = 0.0;  // residual v_ds,S1 at onset
    Window window;
    WindowIntegrals integrals;
    std::shared_ptr<const DeviceModel> dev_s1;
    std::shared_ptr<const DeviceModel> dev_s2;
    Real c_par_s1 = 0.0;
    Real c_par_s2 = 0.0;
    Real v_gp = 0.0;  // reported only

    void validate() const;
};

/// Every labelled term of the closed-form ledger. total() adds them in declaration order.
struct LedgerTerms {
    Real dc_source = 0.0;          // V_DC·[∫i_RS2 dt + ΔQ_S2 + C_par,S2·ΔV]
    Real load_charge = 0.0;        // −V_DC·∫i_L dt
    Real ac_link = 0.0;            // ∫v_ds,S2·i_L dt
    Real s2_oss_stored = 0.0;      // −[E_oss,S2(V_DC) − E_oss,S2(V_DC − ΔV)]
    Real s2_shoot_through = 0.0;   // −∫v_ds,S2·i_RS2 dt
    Real s2_par_stored = 0.0;      // −½C_par,S2·[V_DC² − (V_DC − ΔV)²]
    Real s1_oss_discharge = 0.0;   // E_oss,S1(ΔV)
    Real s1_par_discharge = 0.0;   // ½C_par,S1·ΔV²

    [[nodiscard]] Real total() const;
};

struct ChargeLedger {
    Real e_on = 0.0;
    Real delta_q_s2 = 0.0;
    Real delta_q_par_s2 = 0.0;
    LedgerTerms terms;
};

struct EnergyLedger {
    Real e_on = 0.0;           // E_initial − E_final + W_DC + W_L − E_dissipated,S2
    Real e_on_closed_form = 0.0;
    Real e_initial = 0.0;
    Real e_final = 0.0;
    Real delta_q_dc = 0.0;
    Real w_dc = 0.0;
    Real w_l = 0.0;
    Real e_dissipated_s2 = 0.0;
};

struct Residual {
    Real absolute = 0.0;
    Real relative = 0.0;
};

/// Simulation-level conservation over a window: everything the circuit model stores,
/// dissipates and exchanges with its sources.
struct SimulationBalance {
    Real e_initial = 0.0;
    Real e_final = 0.0;
    Real e_dissipated = 0.0;
    Real e_rs1 = 0.0;
    Real e_rs2 = 0.0;
    Real e_gate_resistors = 0.0;
    Real e_recovery = 0.0;
    Real e_delivered = 0.0;  // −(W_DC + W_L + W_gate)
    Real w_dc = 0.0;
    Real w_l = 0.0;
    Real w_gate = 0.0;
    Residual residual;  // relative to E_initial
};

struct ChargeCheck {
    std::string element;
    Real integral = 0.0;  // ∫i dt
    Real delta_q = 0.0;   // Q(v_end) − Q(v_start)
    Real relative_error = 0.0;
};

/// Datasheet-level closure used by the proposed prediction.
struct ModeAssumptions {
    Real gate_on = 20.0;       // V
    Real r_g = 10.0;           // ohm
    Real v_ds_transfer = 20.0; // V, drain bias of the transfer characteristic used for V_gp
    Real v_gp = 0.0;           // V, plateau voltage; <= 0 derives it from the transfer characteristic
};

struct ProposedPrediction {
    Real e_on = 0.0;
    LedgerTerms terms;
    Real v_gp = 0.0;
    Real i_g = 0.0;
    Real t_cc = 0.0;
    Real t_vf = 0.0;
    Real i_net = 0.0;
    Real integral_v_ds1 = 0.0;  // ∫v_ds,S1 dt over both segments, V·s

    [[nodiscard]] Real t_diss() const { return t_cc + t_vf; }
};

struct ErrorMetrics {
    Real error_conventional = 0.0;  // fraction
    Real error_proposed = 0.0;
    Real reduction_ratio = 0.0;
};

struct EnergyReport {
    Scenario scenario = Scenario::ZVS;
    bool ledger_applicable = false;  // the closed-form ledger is derived for case-2 iZVS
    Window window;
    Real t_diss = 0.0;
    Real delta_v = 0.0;
    Real v_gp = 0.0;
    Real e_on_direct = 0.0;
    Real e_on_direct_full = 0.0;
    Real e_on_charge_ledger = 0.0;
    Real e_on_energy_ledger = 0.0;
    Real e_on_proposed_analytic = 0.0;
    Real e_on_conventional = 0.0;
    WindowIntegrals integrals;
    ChargeLedger charge;
    EnergyLedger energy;
    ProposedPrediction proposed;
    SimulationBalance balance;
    std::vector<ChargeCheck> charge_checks;
    Residual direct_vs_charge_ledger;
    Residual energy_vs_charge_ledger;
};

/// ∫v_ds,S1·i_RS1 dt over the window by trapezoid on the trace samples.
[[nodiscard]] Real e_on_direct(const WaveformTrace& trace, Window window);

[[nodiscard]] WindowIntegrals window_integrals(const WaveformTrace& trace, Window window);

/// (ΔQ_S2, ΔQ_par) for the complementary switch charging from V_DC − ΔV to V_DC.
[[nodiscard]] std::pair<Real, Real> delta_q_s2(const DeviceModel& dev_s2, Real c_par_s2, Real v_dc,
                                               Real delta_v);

[[nodiscard]] Real s2_absorbed_energy(const DeviceModel& dev_s2, Real c_par_s2, Real v_dc, Real delta_v,
                                      Real shoot_through);

[[nodiscard]] ChargeLedger charge_ledger_e_on(const PredictionInputs& in);
[[nodiscard]] EnergyLedger energy_ledger_e_on(const PredictionInputs& in);

/// Inputs for the ledgers measured from a simulated trace.
[[nodiscard]] PredictionInputs prediction_inputs(const WaveformTrace& trace, const PhaseTimeline& timeline);

[[nodiscard]] SimulationBalance simulation_balance(const WaveformTrace& trace, Window window);
[[nodiscard]] std::vector<ChargeCheck> charge_bookkeeping(const WaveformTrace& trace, Window window);

/// Kasper-style energy-conservation model: source charge drawn by C_oss,S2 plus the
/// S1 output-capacitance discharge, without load-current terms.
[[nodiscard]] Real predict_conventional(const DeviceModel& dev_s1, const DeviceModel& dev_s2, Real v_dc,
                                        Real delta_v);

/// Closed-form ledger without shoot-through, the load current held at i_load (magnitude,
/// drawn out of the midpoint) and the waveform integrals closed by a two-segment channel
/// current: i_RS1 = i_load during commutation, then a constant plateau current during the
/// voltage fall.
[[nodiscard]] ProposedPrediction predict_proposed_analytic(const DeviceModel& dev_s1,
                                                           const DeviceModel& dev_s2, Real c_par_s1,
                                                           Real c_par_s2, Real v_dc, Real delta_v,
                                                           Real i_load, const ModeAssumptions& mode = {});

[[nodiscard]] ErrorMetrics error_metrics(Real measured, Real predicted_conventional,
                                         Real predicted_proposed);

/// Full report for a simulated trace; the ledger window comes from the timeline.
[[nodiscard]] EnergyReport energy_report(const WaveformTrace& trace, const PhaseTimeline& timeline);

[[nodiscard]] nlohmann::json to_json(const LedgerTerms& t);
[[nodiscard]] nlohmann::json to_json(const EnergyReport& r);

}  // namespace turnon
