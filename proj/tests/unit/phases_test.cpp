#include "helpers.hpp"

#include "turnon/errors.hpp"
#include "turnon/phases.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace turnon;
using namespace turnon::testing;

namespace {

// Trace without a circuit: only t, v_gs,S1 and a blocking v_ds,S1 are filled in.
WaveformTrace gate_trace(const std::vector<std::pair<Real, Real>>& points) {
    WaveformTrace tr;
    for (const auto& [t, v] : points) {
        CircuitState s;
        s.t = t;
        s.v_gs_s1 = v;
        s.v_ds_s1 = 400;
        s.v_m = 0;
        tr.t.push_back(t);
        tr.states.push_back(s);
        tr.currents.push_back({});
        tr.x.push_back(CircuitSystem::Vector(v, -4, 0, 0));
        tr.dxdt.push_back(CircuitSystem::Vector::Zero());
    }
    return tr;
}

const std::vector<Scenario> kAll{Scenario::ZVS, Scenario::HS, Scenario::iZVSCase1, Scenario::iZVSCase2};

Real median(std::vector<Real> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("onset at a clean gate step") {
    const DeviceModel& dev = *reference_device();
    const WaveformTrace tr = gate_trace({{0, -4}, {1e-9, 0}, {2e-9, 4}, {3e-9, 8}, {10e-9, 15}});
    // v_th is crossed between 1 and 2 ns at the linear interpolation point.
    CHECK(detect_onset(tr, dev) == doctest::Approx(1e-9 + (dev.v_th / 4) * 1e-9));
}

TEST_CASE("onset ignores sub-threshold and short blips") {
    const DeviceModel& dev = *reference_device();
    SUBCASE("sub-threshold crosstalk") {
        const WaveformTrace tr =
            gate_trace({{0, -4}, {1e-9, dev.v_th - 0.3}, {2e-9, -4}, {5e-9, -4}, {6e-9, 8}, {10e-9, 15}});
        CHECK(detect_onset(tr, dev) > 5e-9);
    }
    SUBCASE("gate ring: earliest crossing with sustained conduction") {
        const WaveformTrace tr = gate_trace({{0, -4},
                                             {1e-9, 6},
                                             {1.2e-9, -1},
                                             {2e-9, -1},
                                             {2.3e-9, 6},
                                             {2.5e-9, -1},
                                             {3e-9, -1},
                                             {4e-9, 9},
                                             {10e-9, 15}});
        const Real t = detect_onset(tr, dev);
        CHECK(t == doctest::Approx(3e-9 + (dev.v_th + 1) / 10 * 1e-9));
    }
    SUBCASE("never switched") {
        const WaveformTrace tr = gate_trace({{0, -4}, {5e-9, 1}, {10e-9, -4}});
        CHECK_THROWS_AS((void)detect_onset(tr, dev), NotSwitchedError);
    }
}

TEST_CASE("timeline invariants on the four scenarios") {
    for (Scenario s : kAll) {
        const PhaseTimeline tl = segment(reference_trace(s), s);
        CAPTURE(to_string(s));
        CHECK(tl.scenario == s);
        CHECK(tl.count(EventKind::Onset) == 1);
        CHECK(std::is_sorted(tl.events.begin(), tl.events.end(),
                             [](const PhaseEvent& a, const PhaseEvent& b) { return a.t < b.t; }));
        if (tl.miller_platform()) {
            const Real a = *tl.time_of(EventKind::MillerStart);
            const Real b = *tl.time_of(EventKind::MillerEnd);
            for (EventKind k : {EventKind::MillerSub2Start, EventKind::MillerSub3Start, EventKind::MillerSub4Start}) {
                if (const auto t = tl.time_of(k)) {
                    CHECK(*t >= a);
                    CHECK(*t <= b);
                }
            }
        }
    }
}

TEST_CASE("Miller platform is absent only in ZVS") {
    for (Scenario s : kAll) {
        const PhaseTimeline tl = segment(reference_trace(s), s);
        CAPTURE(to_string(s));
        CHECK(tl.miller_platform() == (s != Scenario::ZVS));
    }
}

TEST_CASE("HS: commutation, then voltage fall and recovery together, four sub-phases") {
    const PhaseTimeline tl = segment(reference_trace(Scenario::HS), Scenario::HS);
    const Real cc = *tl.time_of(EventKind::CCComplete);
    const Real vf0 = *tl.time_of(EventKind::VFStart);
    const Real vf1 = *tl.time_of(EventKind::VFEnd);
    const Real rr0 = *tl.time_of(EventKind::RRStart);
    CHECK(tl.onset < cc);
    CHECK(cc <= vf0);
    CHECK(std::abs(rr0 - vf0) <= 0.05 * (vf1 - vf0));
    CHECK(tl.has(EventKind::RRPeak));
    CHECK(tl.miller_subphases().size() == 4);
}

TEST_CASE("iZVS case 1 shows two i_DC reversals") {
    const PhaseTimeline tl = segment(reference_trace(Scenario::iZVSCase1), Scenario::iZVSCase1);
    CHECK(tl.count(EventKind::IDCReversal) == 2);
}

TEST_CASE("iZVS case 2: gate voltage dips in the last Miller sub-phase") {
    const WaveformTrace& tr = reference_trace(Scenario::iZVSCase2);
    const PhaseTimeline tl = segment(tr, Scenario::iZVSCase2);
    CHECK(*tl.time_of(EventKind::CCComplete) <= *tl.time_of(EventKind::VFStart));
    const auto sub = tl.miller_subphases();
    REQUIRE(sub.size() >= 2);
    const Window platform{sub.front().start, sub.back().end};
    std::vector<Real> all, last;
    for (std::size_t k = 0; k < tr.size(); ++k) {
        if (platform.contains(tr.t[k])) all.push_back(tr.states[k].v_gs_s1);
        if (sub.back().contains(tr.t[k])) last.push_back(tr.states[k].v_gs_s1);
    }
    REQUIRE_FALSE(last.empty());
    CHECK(*std::min_element(last.begin(), last.end()) < median(all));
    CHECK(tl.warnings.empty());
}

TEST_CASE("recovery is absent without stored charge") {
    SyntheticDeviceParams p = reference_params();
    p.q_rr = 0;
    HalfBridgeConfig c = reference_config(Scenario::HS);
    c.dev_s1 = c.dev_s2 = std::make_shared<const DeviceModel>(make_synthetic_device(p));
    const WaveformTrace tr = simulate(c, SolverSettings{}, 60e-9);
    const PhaseTimeline tl = segment(tr, Scenario::HS);
    CHECK_FALSE(tl.has(EventKind::RRPeak));
    CHECK_FALSE(tl.warnings.empty());
}

TEST_CASE("C_oss transition voltage") {
    const DeviceModel& d = *reference_device();
    const Real v = c_oss_transition_voltage(d);
    CHECK(c_oss(d, v) == doctest::Approx(0.5 * c_oss(d, 0.0)).epsilon(1e-6));
}

TEST_CASE("timeline JSON lists every event") {
    const PhaseTimeline tl = segment(reference_trace(Scenario::HS), Scenario::HS);
    const auto j = to_json(tl);
    CHECK(j["scenario"] == "HS");
    CHECK(j["events"].size() == tl.events.size());
    CHECK(event_kind_from_string(to_string(EventKind::MillerSub3Start)) == EventKind::MillerSub3Start);
}
