#include "turnon/phases.hpp"

#include "turnon/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

namespace turnon {

namespace {

constexpr std::array<std::pair<EventKind, std::string_view>, 13> kKindNames{{
    {EventKind::Onset, "Onset"},
    {EventKind::CCComplete, "CCComplete"},
    {EventKind::VFStart, "VFStart"},
    {EventKind::VFEnd, "VFEnd"},
    {EventKind::RRStart, "RRStart"},
    {EventKind::RRPeak, "RRPeak"},
    {EventKind::IDCReversal, "IDCReversal"},
    {EventKind::MillerStart, "MillerStart"},
    {EventKind::MillerSub2Start, "MillerSub2Start"},
    {EventKind::MillerSub3Start, "MillerSub3Start"},
    {EventKind::MillerSub4Start, "MillerSub4Start"},
    {EventKind::MillerEnd, "MillerEnd"},
    {EventKind::SettleStart, "SettleStart"},
}};

std::size_t first_index_at_or_after(const std::vector<Real>& t, Real time) {
    return static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), time) - t.begin());
}

/// First time at or after `from` where g crosses zero in the given direction
/// (+1 upward, -1 downward), linearly interpolated between samples.
template <class G>
std::optional<Real> find_crossing(const WaveformTrace& tr, Real from, int direction, G&& g) {
    std::size_t i = first_index_at_or_after(tr.t, from);
    if (i >= tr.size()) {
        return std::nullopt;
    }
    Real prev = g(i);
    for (std::size_t k = i + 1; k < tr.size(); ++k) {
        const Real cur = g(k);
        const bool up = prev < 0 && cur >= 0;
        const bool down = prev > 0 && cur <= 0;
        if ((direction > 0 && up) || (direction < 0 && down)) {
            const Real w = prev / (prev - cur);
            return tr.t[k - 1] + w * (tr.t[k] - tr.t[k - 1]);
        }
        prev = cur;
    }
    return std::nullopt;
}

/// Marker with the given name and direction at or after `from`.
std::optional<Real> find_marker(const WaveformTrace& tr, const std::string& name, int direction,
                                Real from) {
    for (const Marker& m : tr.markers) {
        if (m.name == name && m.direction == direction && m.t >= from) {
            return m.t;
        }
    }
    return std::nullopt;
}

Real value_at(const WaveformTrace& tr, Real time, const std::vector<Real>& y) {
    if (time <= tr.t.front()) return y.front();
    if (time >= tr.t.back()) return y.back();
    const std::size_t k = first_index_at_or_after(tr.t, time);
    const Real w = (time - tr.t[k - 1]) / (tr.t[k] - tr.t[k - 1]);
    return (1 - w) * y[k - 1] + w * y[k];
}

Real median(std::vector<Real> v) {
    if (v.empty()) return 0.0;
    const std::size_t n = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<long>(n), v.end());
    return v[n];
}

bool is_conducting(Real i, Real scale) { return std::abs(i) > std::max(1e-6, 1e-3 * scale); }

}  // namespace

std::string_view to_string(EventKind k) {
    for (const auto& [kind, name] : kKindNames) {
        if (kind == k) return name;
    }
    return "?";
}

EventKind event_kind_from_string(std::string_view s) {
    for (const auto& [kind, name] : kKindNames) {
        if (name == s) return kind;
    }
    throw ConfigError("unknown phase event kind '" + std::string(s) + "'");
}

bool PhaseTimeline::has(EventKind k) const { return time_of(k).has_value(); }

std::optional<Real> PhaseTimeline::time_of(EventKind k) const {
    for (const PhaseEvent& e : events) {
        if (e.kind == k) return e.t;
    }
    return std::nullopt;
}

int PhaseTimeline::count(EventKind k) const {
    return static_cast<int>(std::count_if(events.begin(), events.end(),
                                          [k](const PhaseEvent& e) { return e.kind == k; }));
}

std::vector<Window> PhaseTimeline::miller_subphases() const {
    std::vector<Window> out;
    const auto start = time_of(EventKind::MillerStart);
    const auto end = time_of(EventKind::MillerEnd);
    if (!start || !end) return out;
    std::vector<Real> cuts{*start};
    for (EventKind k : {EventKind::MillerSub2Start, EventKind::MillerSub3Start, EventKind::MillerSub4Start}) {
        if (const auto t = time_of(k)) cuts.push_back(*t);
    }
    cuts.push_back(*end);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        out.push_back(Window{cuts[i], cuts[i + 1]});
    }
    return out;
}

Window PhaseTimeline::ledger_window() const {
    if (const auto vf_end = time_of(EventKind::VFEnd)) return Window{onset, *vf_end};
    if (const auto cc = time_of(EventKind::CCComplete)) return Window{onset, *cc};
    throw InputError("ledger_window: timeline has neither VFEnd nor CCComplete");
}

Scenario classify_scenario(const HalfBridgeConfig& config, const CircuitState& initial) {
    const Real i_l = initial.i_l;
    const Real i_rs1 = channel_current(*config.dev_s1, initial.v_gs_s1, initial.v_ds_s1);
    const Real i_rs2 = channel_current(*config.dev_s2, initial.v_gs_s2, initial.v_ds_s2);
    const bool s1_reverse = i_rs1 < 0 && is_conducting(i_rs1, std::abs(i_l));
    const bool s2_reverse = i_rs2 < 0 && is_conducting(i_rs2, std::abs(i_l));
    const bool partial = initial.v_ds_s1 > 0 && initial.v_ds_s1 < config.v_dc;

    auto describe = [&]() {
        return "i_L = " + std::to_string(i_l) + " A (positive into midpoint), v_ds,S1 = " +
               std::to_string(initial.v_ds_s1) + " V, S1 reverse-conducting: " +
               (s1_reverse ? "yes" : "no") + ", S2 reverse-conducting: " + (s2_reverse ? "yes" : "no");
    };

    if (i_l == 0.0) {
        throw ClassificationError("classify_scenario: zero load current gives no commutation direction; " +
                                  describe());
    }
    if (i_l > 0) {
        if (s1_reverse && !s2_reverse) return Scenario::ZVS;
        if (!s1_reverse && !s2_reverse && partial) return Scenario::iZVSCase1;
    } else {
        if (s2_reverse && !s1_reverse) return Scenario::HS;
        if (!s1_reverse && !s2_reverse && partial) return Scenario::iZVSCase2;
    }
    throw ClassificationError("classify_scenario: state matches no scenario; " + describe());
}

Real detect_onset(const WaveformTrace& tr, const DeviceModel& dev_s1, const SegmentOptions& opt) {
    if (tr.size() < 2) {
        throw NotSwitchedError("detect_onset: trace too short");
    }
    const Real v_th = dev_s1.v_th;
    auto vgs = [&](std::size_t k) { return tr.states[k].v_gs_s1 - v_th; };

    // Candidate crossings from the sample grid, refined by solver markers when present.
    std::vector<Real> candidates;
    for (std::size_t k = 1; k < tr.size(); ++k) {
        const Real a = vgs(k - 1);
        const Real b = vgs(k);
        if (a < 0 && b >= 0) {
            Real tc = tr.t[k - 1] + a / (a - b) * (tr.t[k] - tr.t[k - 1]);
            for (const Marker& m : tr.markers) {
                if (m.name == "onset" && m.direction > 0 && m.t >= tr.t[k - 1] && m.t <= tr.t[k]) {
                    tc = m.t;
                }
            }
            candidates.push_back(tc);
        }
    }
    for (const Real tc : candidates) {
        const Real until = std::min(tc + opt.min_sustain, tr.t.back());
        bool sustained = true;
        for (std::size_t k = first_index_at_or_after(tr.t, tc); k < tr.size(); ++k) {
            // A fall back below v_th between samples ends the candidate too.
            if (k > 0 && vgs(k) < 0 && vgs(k - 1) >= 0) {
                const Real a = vgs(k - 1);
                const Real b = vgs(k);
                if (tr.t[k - 1] + a / (a - b) * (tr.t[k] - tr.t[k - 1]) < until) {
                    sustained = false;
                    break;
                }
            }
            if (tr.t[k] > until) {
                break;
            }
            if (std::isinf(r_s(dev_s1, tr.states[k].v_gs_s1, opt.r_s_probe_voltage))) {
                sustained = false;
                break;
            }
        }
        if (sustained) {
            return tc;
        }
    }
    throw NotSwitchedError("detect_onset: v_gs,S1 never crosses v_th = " + std::to_string(v_th) +
                           " V with a sustained finite R_S1");
}

Real c_oss_transition_voltage(const DeviceModel& dev) {
    std::vector<Real> v = dev.c_ds.voltages();
    v.insert(v.end(), dev.c_gd.voltages().begin(), dev.c_gd.voltages().end());
    v.push_back(0.0);
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    v.erase(v.begin(), std::lower_bound(v.begin(), v.end(), 0.0));
    const Real threshold = 0.5 * c_oss(dev, 0.0);
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (c_oss(dev, v[k]) <= threshold) {
            return numerics::bisect([&](Real u) { return c_oss(dev, u) - threshold; }, v[k - 1], v[k],
                                    1e-9 * (1.0 + std::abs(v[k])));
        }
    }
    return v.back();
}

PhaseTimeline segment(const WaveformTrace& tr, Scenario scenario, const SegmentOptions& opt) {
    if (!tr.system) {
        throw InputError("segment: trace has no attached circuit; pass the devices explicitly");
    }
    return segment(tr, scenario, tr.system->s1(), tr.system->s2(), opt);
}

PhaseTimeline segment(const WaveformTrace& tr, Scenario scenario, const DeviceModel& dev_s1,
                      const DeviceModel& dev_s2, const SegmentOptions& opt) {
    PhaseTimeline tl;
    tl.scenario = scenario;
    tl.onset = detect_onset(tr, dev_s1, opt);
    const Real onset = tl.onset;
    auto add = [&](Real t, EventKind k, std::string note = {}) {
        tl.events.push_back(PhaseEvent{t, k, std::move(note)});
    };
    add(onset, EventKind::Onset);

    const std::size_t n = tr.size();
    std::vector<Real> v_ds1(n), v_gs1(n), dvgs1(n), i_rs1(n), i_dc(n), i_crr(n), i_d_s2(n), v_m(n), v_dg1(n);
    for (std::size_t k = 0; k < n; ++k) {
        v_ds1[k] = tr.states[k].v_ds_s1;
        v_gs1[k] = tr.states[k].v_gs_s1;
        v_m[k] = tr.states[k].v_m;
        v_dg1[k] = v_ds1[k] - v_gs1[k];
        dvgs1[k] = tr.dxdt[k][CircuitSystem::kVgsS1];
        i_rs1[k] = tr.currents[k].i_rs1;
        i_dc[k] = tr.currents[k].i_dc;
        i_crr[k] = tr.currents[k].i_crr_s2;
        i_d_s2[k] = tr.currents[k].i_d_s2;
    }
    const Real v_dc = v_ds1.front() + v_m.front();
    const std::size_t i_on = std::min(first_index_at_or_after(tr.t, onset), n - 1);

    // --- current commutation ---------------------------------------------
    std::optional<Real> cc;
    switch (scenario) {
        case Scenario::HS:
        case Scenario::iZVSCase2:
            cc = find_marker(tr, "i_rs1_eq_i_out", +1, onset);
            if (!cc) {
                cc = find_crossing(tr, onset, +1, [&](std::size_t k) { return i_rs1[k] + tr.states[k].i_l; });
            }
            break;
        case Scenario::iZVSCase1:
            cc = find_marker(tr, "i_dc", +1, onset);
            if (!cc) {
                cc = find_crossing(tr, onset, +1, [&](std::size_t k) { return i_dc[k]; });
            }
            break;
        case Scenario::ZVS: {
            const Real v_final = v_ds1.back();
            const Real band = opt.zvs_settle_fraction * std::abs(v_ds1[i_on] - v_final);
            cc = find_crossing(tr, onset, -1, [&](std::size_t k) {
                return std::abs(v_ds1[k] - v_final) - band;
            });
            break;
        }
    }
    if (cc) {
        add(*cc, EventKind::CCComplete);
    } else {
        tl.warnings.push_back("no current-commutation completion found");
    }

    // --- voltage fall ------------------------------------------------------
    std::optional<Real> vf_start, vf_end;
    if (cc) {
        const Real v0 = value_at(tr, *cc, v_ds1);
        if (v0 > opt.vf_significant_fraction * v_dc) {
            vf_start = *cc;
            const Real level = opt.vf_end_fraction * v0;
            vf_end = find_crossing(tr, *cc, -1, [&](std::size_t k) { return v_ds1[k] - level; });
            add(*vf_start, EventKind::VFStart);
            if (vf_end) {
                add(*vf_end, EventKind::VFEnd);
            } else {
                tl.warnings.push_back("voltage fall does not complete within the trace");
            }
        }
    }
    if (!vf_start && scenario != Scenario::ZVS) {
        tl.warnings.push_back("no voltage-fall phase: v_ds,S1 already low at commutation completion");
    }

    // --- reverse recovery --------------------------------------------------
    const auto crr_peak = std::max_element(i_crr.begin(), i_crr.end());
    if (*crr_peak > 0) {
        const std::size_t ip = static_cast<std::size_t>(crr_peak - i_crr.begin());
        const Real level = opt.rr_start_fraction * *crr_peak;
        const auto rr_start = find_crossing(tr, tr.t.front(), +1, [&](std::size_t k) { return i_crr[k] - level; });
        if (rr_start) add(*rr_start, EventKind::RRStart);
        add(tr.t[ip], EventKind::RRPeak);
    } else if (scenario == Scenario::HS) {
        tl.warnings.push_back("no reverse-recovery current (q_rr = 0 for S2)");
    }

    // --- i_DC reversals ----------------------------------------------------
    {
        Real max_abs = 0;
        for (std::size_t k = i_on; k < n; ++k) max_abs = std::max(max_abs, std::abs(i_dc[k]));
        const Real band = opt.idc_hysteresis * max_abs;
        int sign = 0;
        std::optional<Real> last_zero;
        for (std::size_t k = i_on; k < n && max_abs > 0; ++k) {
            if (k > i_on && ((i_dc[k - 1] < 0) != (i_dc[k] < 0))) {
                const Real a = i_dc[k - 1];
                const Real b = i_dc[k];
                last_zero = tr.t[k - 1] + a / (a - b) * (tr.t[k] - tr.t[k - 1]);
            }
            const int s = i_dc[k] > band ? 1 : (i_dc[k] < -band ? -1 : 0);
            if (s == 0) continue;
            if (sign != 0 && s != sign && last_zero) {
                add(*last_zero, EventKind::IDCReversal, s > 0 ? "to positive" : "to negative");
            }
            sign = s;
        }
    }

    // --- Miller platform ---------------------------------------------------
    if (vf_start && vf_end) {
        const Real vf_len = *vf_end - *vf_start;
        Real peak = 0;
        for (std::size_t k = i_on; k < n && tr.t[k] <= *vf_start; ++k) peak = std::max(peak, std::abs(dvgs1[k]));
        const Real eps = opt.plateau_eps * peak;
        const Real search_end = *vf_end + opt.platform_tail_fraction * vf_len;
        std::optional<std::size_t> first, last;
        for (std::size_t k = first_index_at_or_after(tr.t, *vf_start); k < n && tr.t[k] <= search_end; ++k) {
            if (std::abs(dvgs1[k]) < eps) {
                if (!first) first = k;
                last = k;
            }
        }
        bool platform = false;
        if (first && last && *last > *first) {
            Real low_time = 0;
            for (std::size_t k = *first + 1; k <= *last; ++k) {
                if (std::abs(dvgs1[k]) < eps && std::abs(dvgs1[k - 1]) < eps) low_time += tr.t[k] - tr.t[k - 1];
            }
            const Real hull = tr.t[*last] - tr.t[*first];
            platform = low_time >= opt.platform_min_low_fraction * hull &&
                       hull >= opt.platform_min_duration_fraction * vf_len;
        }
        if (platform) {
            const Real m_start = *vf_start;
            const Real m_end = tr.t[*last];
            add(m_start, EventKind::MillerStart);

            // Sub-phase 2: S2's output capacitance starts its high-to-low transition.
            std::optional<Real> b1;
            const Real entry2 = c_oss_transition_voltage(dev_s2);
            if (v_m[first_index_at_or_after(tr.t, m_start)] < entry2) {
                b1 = find_crossing(tr, m_start, +1, [&](std::size_t k) { return v_m[k] - entry2; });
                if (b1 && *b1 >= m_end) b1.reset();
            }
            if (!b1) {
                // Already past the transition: use the turning point of i_d,S2.
                std::size_t best = n;
                for (std::size_t k = first_index_at_or_after(tr.t, m_start); k < n && tr.t[k] < m_end; ++k) {
                    if (best == n || i_d_s2[k] > i_d_s2[best]) best = k;
                }
                if (best < n && tr.t[best] > m_start) b1 = tr.t[best];
            }
            // Sub-phase 3: i_RS1 starts to fall.
            std::optional<Real> b2;
            if (b1) {
                std::size_t best = n;
                for (std::size_t k = first_index_at_or_after(tr.t, *b1); k < n && tr.t[k] < m_end; ++k) {
                    if (best == n || i_rs1[k] > i_rs1[best]) best = k;
                }
                if (best < n && tr.t[best] > *b1) b2 = tr.t[best];
            }
            // Sub-phase 4: C_gd,S1 enters its high-capacitance region.
            const Real knee1 = dev_s1.c_gd.knee_voltage();
            const Real from = b2 ? *b2 : (b1 ? *b1 : m_start);
            const std::optional<Real> b3 = [&]() -> std::optional<Real> {
                const auto c = find_crossing(tr, from, -1, [&](std::size_t k) { return v_dg1[k] - knee1; });
                if (c && *c < m_end) return c;
                return std::nullopt;
            }();

            if (b1) add(*b1, EventKind::MillerSub2Start);
            else tl.warnings.push_back("Miller sub-phase 2 boundary not found");
            if (b2) add(*b2, EventKind::MillerSub3Start);
            else tl.warnings.push_back("Miller sub-phase 3 boundary not found");
            if (b3) add(*b3, EventKind::MillerSub4Start);
            else tl.warnings.push_back("Miller sub-phase 4 boundary not found");
            add(m_end, EventKind::MillerEnd);

            // Negative feedback on the gate shows up as a dip of v_gs,S1 in the last sub-phase.
            if (b3 && scenario == Scenario::iZVSCase2) {
                const Real sub4 = b3.value_or(m_start);
                std::vector<Real> plat;
                Real dip = std::numeric_limits<Real>::infinity();
                for (std::size_t k = first_index_at_or_after(tr.t, m_start); k < n && tr.t[k] <= m_end; ++k) {
                    plat.push_back(v_gs1[k]);
                    if (tr.t[k] >= sub4) dip = std::min(dip, v_gs1[k]);
                }
                if (!(dip < median(plat))) {
                    tl.warnings.push_back("no v_gs,S1 dip in the last Miller sub-phase");
                }
            }
        }
    }

    if (const auto m = tl.time_of(EventKind::MillerEnd)) {
        add(*m, EventKind::SettleStart);
    } else if (vf_end) {
        add(*vf_end, EventKind::SettleStart);
    } else if (cc) {
        add(*cc, EventKind::SettleStart);
    }

    std::stable_sort(tl.events.begin(), tl.events.end(),
                     [](const PhaseEvent& a, const PhaseEvent& b) { return a.t < b.t; });
    return tl;
}

nlohmann::json to_json(const PhaseTimeline& tl) {
    nlohmann::json events = nlohmann::json::array();
    for (const PhaseEvent& e : tl.events) {
        events.push_back({{"t_s", e.t}, {"kind", std::string(to_string(e.kind))}, {"note", e.note}});
    }
    return nlohmann::json{{"scenario", std::string(to_string(tl.scenario))},
                          {"onset_s", tl.onset},
                          {"miller_platform", tl.miller_platform()},
                          {"events", events},
                          {"warnings", tl.warnings}};
}

}  // namespace turnon
