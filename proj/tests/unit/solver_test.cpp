#include "helpers.hpp"
#include "oracles.hpp"

#include "turnon/energy.hpp"
#include "turnon/phases.hpp"
#include "turnon/solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace turnon;
using namespace turnon::testing;
using namespace turnon::oracles;

TEST_CASE("RC surrogate matches the analytic exponential") {
    const RcSurrogate rc;
    const Real tau = rc.r * rc.c;
    SolverSettings st;
    st.max_step = tau / 20;
    const auto tr = integrate(rc, RcSurrogate::Vector(0.0), 0.0, 5 * tau, st);
    Real worst = 0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        const Real exact = rc.v_src * (1 - std::exp(-tr.t[k] / tau));
        worst = std::max(worst, std::abs(tr.x[k][0] - exact) / rc.v_src);
    }
    CHECK(worst < 10 * st.rel_tol);
    CHECK(tr.x.back()[0] == doctest::Approx(rc.v_src * (1 - std::exp(-5.0))).epsilon(10 * st.rel_tol));
}

TEST_CASE("fixed-step trapezoid converges at second order") {
    const NonlinearSurrogate sys;
    const Real t_end = 30e-9;
    SolverSettings ref;
    ref.rel_tol = 1e-12;
    ref.abs_tol = 1e-12;
    ref.max_step = 0.05e-9;
    const Real x_ref = terminal(sys, t_end, ref);

    SolverSettings fixed;
    fixed.fixed_step = true;
    fixed.newton_tol = 1e-8;
    fixed.max_step = 2e-9;
    const Real e1 = std::abs(terminal(sys, t_end, fixed) - x_ref);
    fixed.max_step = 1e-9;
    const Real e2 = std::abs(terminal(sys, t_end, fixed) - x_ref);
    const Real ratio = e1 / e2;
    CAPTURE(ratio);
    CAPTURE(e1);
    CAPTURE(e2);
    CAPTURE(x_ref);
    CHECK(ratio >= 3.0);
    CHECK(ratio <= 5.0);
}

TEST_CASE("zero drive from equilibrium gives a constant trace") {
    RcSurrogate rc;
    rc.v_src = 0;
    const auto tr = integrate(rc, RcSurrogate::Vector(0.0), 0.0, 100e-9, SolverSettings{});
    for (const auto& x : tr.x) CHECK(x[0] == 0.0);
}

TEST_CASE("identical inputs give bit-identical traces") {
    const HalfBridgeConfig c = reference_config(Scenario::iZVSCase2);
    const WaveformTrace a = simulate(c, SolverSettings{}, 60e-9);
    const WaveformTrace b = simulate(c, SolverSettings{}, 60e-9);
    REQUIRE(a.size() == b.size());
    bool same = true;
    for (std::size_t k = 0; k < a.size(); ++k) same = same && a.t[k] == b.t[k] && a.x[k] == b.x[k];
    CHECK(same);
}

TEST_CASE("event markers are bracketed by sign changes") {
    const WaveformTrace& tr = reference_trace(Scenario::iZVSCase1);
    const auto events = standard_events(*tr.system);
    REQUIRE_FALSE(tr.markers.empty());
    for (const Marker& m : tr.markers) {
        const auto it = std::find_if(events.begin(), events.end(), [&](const auto& e) { return e.name == m.name; });
        REQUIRE(it != events.end());
        const auto k = static_cast<std::size_t>(std::upper_bound(tr.t.begin(), tr.t.end(), m.t) - tr.t.begin());
        REQUIRE(k > 0);
        REQUIRE(k < tr.size());
        const Real g0 = it->fn(tr.t[k - 1], tr.x[k - 1]);
        const Real g1 = it->fn(tr.t[k], tr.x[k]);
        CAPTURE(m.name);
        CHECK(g0 * g1 <= 0);
    }
}

TEST_CASE("integration errors") {
    SolverSettings st;
    st.min_step = 2 * st.max_step;
    CHECK_THROWS_AS(st.validate(), ConfigError);
    CHECK_THROWS_AS((void)integrate(RcSurrogate{}, RcSurrogate::Vector(0.0), 0.0, -1.0, SolverSettings{}),
                    InputError);
}

TEST_CASE("resampling") {
    const WaveformTrace& tr = reference_trace(Scenario::iZVSCase2);

    SUBCASE("constant trace stays constant") {
        WaveformTrace flat;
        for (Real t : {0.0, 1e-9, 3e-9, 4e-9}) {
            CircuitState s;
            s.t = t;
            s.v_gs_s1 = -4;
            s.v_m = 145;
            flat.t.push_back(t);
            flat.states.push_back(s);
            flat.currents.push_back({});
            flat.x.push_back(CircuitSystem::Vector(-4, -4, 145, 0));
            flat.dxdt.push_back(CircuitSystem::Vector::Zero());
        }
        const WaveformTrace r = resample(flat, 0.1e-9);
        CHECK(r.size() == 41);
        for (const auto& x : r.x) CHECK(x == CircuitSystem::Vector(-4, -4, 145, 0));
    }

    SUBCASE("span shorter than dt keeps the two endpoints") {
        const WaveformTrace r = resample(tr, 1.0);
        REQUIRE(r.size() == 2);
        CHECK(r.t.front() == tr.t.front());
        CHECK(r.t.back() == tr.t.back());
    }
    SUBCASE("integral of v_ds,S1 i_RS1 survives uniform resampling") {
        const WaveformTrace r = resample(tr, 5e-12);
        const Window w{tr.t.front(), tr.t.back()};
        const Real a = e_on_direct(tr, w);
        const Real b = e_on_direct(r, w);
        CHECK(std::abs(a - b) / a < 1e-3);
        CHECK(r.markers.size() == tr.markers.size());
    }
}

TEST_CASE("halving the tolerances moves E_on by less than 0.5%") {
    const HalfBridgeConfig c = reference_config(Scenario::iZVSCase2);
    SolverSettings st;
    const WaveformTrace a = simulate(c, st, 150e-9);
    st.rel_tol /= 2;
    st.abs_tol /= 2;
    const WaveformTrace b = simulate(c, st, 150e-9);
    const Real ea = energy_report(a, segment(a, Scenario::iZVSCase2)).e_on_direct;
    const Real eb = energy_report(b, segment(b, Scenario::iZVSCase2)).e_on_direct;
    CHECK(std::abs(ea - eb) / eb < 5e-3);
}
