#pragma once

// Scenario classification and phase segmentation of turn-on traces:
// current commutation (CC), voltage fall (VF), reverse recovery (RR),
// i_DC reversals and the Miller platform with its sub-phases.

#include "turnon/circuit.hpp"
#include "turnon/solver.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace turnon {

enum class EventKind {
    Onset,
    CCComplete,
    VFStart,
    VFEnd,
    RRStart,
    RRPeak,
    IDCReversal,
    MillerStart,
    MillerSub2Start,
    MillerSub3Start,
    MillerSub4Start,
    MillerEnd,
    SettleStart,
};

[[nodiscard]] std::string_view to_string(EventKind k);
[[nodiscard]] EventKind event_kind_from_string(std::string_view s);

struct PhaseEvent {
    Real t = 0.0;
    EventKind kind = EventKind::Onset;
    std::string note;
};

struct SegmentOptions {
    /// Platform slope threshold relative to the pre-platform peak |dv_gs,S1/dt|.
    Real plateau_eps = 0.1;
    /// Platform needs this share of its span below threshold ...
    Real platform_min_low_fraction = 0.5;
    /// ... and a length of at least this share of the voltage fall.
    Real platform_min_duration_fraction = 0.1;
    /// The platform search runs this share of the VF past VFEnd.
    Real platform_tail_fraction = 0.25;
    /// A VF phase exists when v_ds,S1 at CC completion exceeds this share of V_DC.
    Real vf_significant_fraction = 0.05;
    /// VF ends once v_ds,S1 falls to this share of its VF-start value.
    Real vf_end_fraction = 0.02;
    /// ZVS commutation completes when v_ds,S1 is within this share of its travel from the final value.
    Real zvs_settle_fraction = 0.1;
    /// Onset needs finite R_S1 sustained this long after the threshold crossing.
    Real min_sustain = 0.5e-9;  // s
    /// Drain-source probe voltage for the finiteness test of R_S1.
    Real r_s_probe_voltage = 1.0;  // V
    /// i_DC hysteresis band relative to max |i_DC| after onset.
    Real idc_hysteresis = 0.02;
    /// RR starts when i_Crr,S2 first reaches this share of its peak.
    Real rr_start_fraction = 0.01;
};

struct PhaseTimeline {
    Scenario scenario = Scenario::ZVS;
    Real onset = 0.0;
    std::vector<PhaseEvent> events;  // sorted by time
    std::vector<std::string> warnings;

    [[nodiscard]] bool has(EventKind k) const;
    [[nodiscard]] std::optional<Real> time_of(EventKind k) const;
    [[nodiscard]] int count(EventKind k) const;
    [[nodiscard]] bool miller_platform() const { return has(EventKind::MillerStart); }
    /// Consecutive sub-phase windows between MillerStart and MillerEnd.
    [[nodiscard]] std::vector<Window> miller_subphases() const;
    /// Onset to VFEnd, or onset to CCComplete when there is no voltage fall.
    [[nodiscard]] Window ledger_window() const;
};

/// Label from load direction, initial v_ds,S1 and the pre-onset conducting element.
[[nodiscard]] Scenario classify_scenario(const HalfBridgeConfig& config, const CircuitState& initial);

/// Earliest upward v_th crossing of v_gs,S1 after which R_S1 stays finite for
/// min_sustain (or to the end of the trace).
[[nodiscard]] Real detect_onset(const WaveformTrace& trace, const DeviceModel& dev_s1,
                                const SegmentOptions& opt = {});

[[nodiscard]] PhaseTimeline segment(const WaveformTrace& trace, Scenario scenario,
                                    const DeviceModel& dev_s1, const DeviceModel& dev_s2,
                                    const SegmentOptions& opt = {});
/// Uses the devices of the circuit attached to the trace.
[[nodiscard]] PhaseTimeline segment(const WaveformTrace& trace, Scenario scenario,
                                    const SegmentOptions& opt = {});

/// Voltage at which C_oss has fallen to half its zero-bias value.
[[nodiscard]] Real c_oss_transition_voltage(const DeviceModel& dev);

[[nodiscard]] nlohmann::json to_json(const PhaseTimeline& tl);

}  // namespace turnon
