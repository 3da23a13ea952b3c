#include "helpers.hpp"

#include "turnon/energy.hpp"
#include "turnon/errors.hpp"
#include "turnon/phases.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace turnon;
using namespace turnon::testing;

namespace {

const std::vector<Scenario> kAll{Scenario::ZVS, Scenario::HS, Scenario::iZVSCase1, Scenario::iZVSCase2};

std::shared_ptr<const DeviceModel> one_nf() {
    static const auto d = std::make_shared<const DeviceModel>(constant_c_device(0.5e-9, 0.5e-9));
    return d;
}

PredictionInputs constant_inputs() {
    PredictionInputs in;
    in.v_dc = 400;
    in.delta_v = 100;
    in.window = {0, 10e-9};
    in.dev_s1 = in.dev_s2 = one_nf();
    return in;
}

}  // namespace

TEST_CASE("direct integral of a rectangle") {
    WaveformTrace tr;
    for (Real t : {0.0, 50e-9, 100e-9}) {
        CircuitState s;
        s.t = t;
        s.v_ds_s1 = 10;
        BranchCurrents b;
        b.i_rs1 = 2;
        tr.t.push_back(t);
        tr.states.push_back(s);
        tr.currents.push_back(b);
    }
    CHECK(e_on_direct(tr, {0, 100e-9}) == doctest::Approx(2e-6).epsilon(1e-12));
    CHECK(e_on_direct(tr, {25e-9, 75e-9}) == doctest::Approx(1e-6).epsilon(1e-12));
    CHECK_THROWS_AS((void)e_on_direct(tr, {0, 200e-9}), InputError);
}

TEST_CASE("closed-form pieces with a constant 1 nF output capacitance") {
    const DeviceModel& d = *one_nf();
    const auto [dq, dq_par] = delta_q_s2(d, 0.0, 400, 100);
    CHECK(dq == doctest::Approx(100e-9));
    CHECK(dq_par == 0.0);
    CHECK(delta_q_s2(d, 20e-12, 400, 100).second == doctest::Approx(2e-9));
    // ½·1 nF·(400² − 300²)
    CHECK(s2_absorbed_energy(d, 0.0, 400, 100, 0.0) == doctest::Approx(35e-6));
    CHECK(s2_absorbed_energy(d, 0.0, 400, 100, 1e-6) == doctest::Approx(36e-6));
    // 400·100 nC − 35 µJ + ½·1 nF·100²
    CHECK(predict_conventional(d, d, 400, 100) == doctest::Approx(10e-6));
    CHECK_THROWS_AS((void)predict_conventional(d, d, 400, 500), InputError);
}

TEST_CASE("ledgers without load or shoot-through") {
    const PredictionInputs in = constant_inputs();
    const ChargeLedger c = charge_ledger_e_on(in);
    CHECK(c.terms.dc_source == doctest::Approx(40e-6));
    CHECK(c.terms.s2_oss_stored == doctest::Approx(-35e-6));
    CHECK(c.terms.s1_oss_discharge == doctest::Approx(5e-6));
    CHECK(c.e_on == doctest::Approx(10e-6));
    const EnergyLedger e = energy_ledger_e_on(in);
    CHECK(e.e_initial == doctest::Approx(50e-6));
    CHECK(e.e_final == doctest::Approx(80e-6));
    CHECK(e.w_dc == doctest::Approx(40e-6));
    CHECK(e.e_on == doctest::Approx(10e-6));
}

TEST_CASE("charge and energy ledgers agree for arbitrary integrals") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<Real> u(0.0, 1.0);
    for (int k = 0; k < 50; ++k) {
        PredictionInputs in;
        in.v_dc = 200 + 600 * u(rng);
        in.delta_v = in.v_dc * u(rng);
        in.window = {0, 20e-9};
        in.dev_s1 = in.dev_s2 = reference_device();
        in.c_par_s1 = 50e-12 * u(rng);
        in.c_par_s2 = 50e-12 * u(rng);
        in.integrals = {1e-7 * u(rng), 1e-5 * u(rng), -2e-7 * u(rng), -5e-5 * u(rng)};
        const ChargeLedger c = charge_ledger_e_on(in);
        const EnergyLedger e = energy_ledger_e_on(in);
        CHECK(std::abs(c.e_on - e.e_on) <= 1e-9 * std::abs(c.e_on));
        CHECK(e.e_on_closed_form == c.e_on);
    }
}

TEST_CASE("error metrics") {
    const ErrorMetrics a = error_metrics(85.42, 41.79, 84.67);
    CHECK(a.error_conventional == doctest::Approx(-43.63 / 85.42));
    CHECK(a.error_proposed == doctest::Approx(-0.75 / 85.42));
    CHECK(a.reduction_ratio == doctest::Approx(43.63 / 0.75));
    const ErrorMetrics b = error_metrics(4.65, 2.74, 4.49);
    CHECK(b.error_conventional == doctest::Approx(-1.91 / 4.65));
    CHECK(b.error_proposed == doctest::Approx(-0.16 / 4.65));
    CHECK(b.reduction_ratio == doctest::Approx(1.91 / 0.16));
    CHECK(std::isinf(error_metrics(1.0, 2.0, 1.0).reduction_ratio));
    CHECK_THROWS_AS((void)error_metrics(0.0, 1.0, 1.0), InputError);
}

TEST_CASE("proposed prediction with constant capacitances matches the hand formula") {
    const Real c_gd = 0.3e-9, c_ds = 0.7e-9, c_gs = 2e-9;
    const DeviceModel d = constant_c_device(c_gd, c_ds, c_gs);
    ModeAssumptions m;
    m.gate_on = 20;
    m.r_g = 10;
    m.v_gp = 6;
    const Real v = 400, dv = 150, i = 10, co = c_gd + c_ds;
    const Real t_cc = m.r_g * (c_gs + c_gd) * std::log((m.gate_on - d.v_th) / (m.gate_on - m.v_gp));
    const Real t_vf = c_gd * dv * m.r_g / (m.gate_on - m.v_gp);
    const ProposedPrediction p = predict_proposed_analytic(d, d, 0, 0, v, dv, i, m);
    CHECK(p.t_cc == doctest::Approx(t_cc).epsilon(1e-9));
    CHECK(p.t_vf == doctest::Approx(t_vf).epsilon(1e-9));
    CHECK(p.e_on == doctest::Approx(co * dv * dv + i * dv * (t_cc + t_vf / 2)).epsilon(1e-9));
    CHECK(p.terms.s2_shoot_through == 0.0);
}

TEST_CASE("proposed prediction limits") {
    const DeviceModel& d = *reference_device();
    SUBCASE("no residual voltage, no loss") {
        CHECK(std::abs(predict_proposed_analytic(d, d, 0, 0, 400, 0, 10).e_on) < 1e-15);
    }
    SUBCASE("without load current it reduces to the conventional model") {
        CHECK(predict_proposed_analytic(d, d, 0, 0, 400, 250, 0).e_on ==
              doctest::Approx(predict_conventional(d, d, 400, 250)).epsilon(1e-12));
    }
    SUBCASE("monotone in the residual voltage") {
        Real last = -1;
        for (Real dv = 20; dv <= 400; dv += 20) {
            const Real e = predict_proposed_analytic(d, d, 20e-12, 20e-12, 400, dv, 10).e_on;
            CHECK(e > last);
            last = e;
        }
    }
    SUBCASE("bad inputs") {
        CHECK_THROWS_AS((void)predict_proposed_analytic(d, d, 0, 0, 400, 10, -1), InputError);
        CHECK_THROWS_AS((void)predict_proposed_analytic(d, d, 0, 0, 400, 10, 1e6), InputError);
    }
}

TEST_CASE("conservation on the simulated scenarios") {
    for (Scenario s : kAll) {
        CAPTURE(to_string(s));
        const WaveformTrace& tr = reference_trace(s);
        const EnergyReport r = energy_report(tr, segment(tr, s));
        CHECK(r.balance.residual.relative < 5e-3);
        for (const ChargeCheck& c : r.charge_checks) {
            CAPTURE(c.element);
            CHECK(c.relative_error < 1e-3);
        }
        CHECK(r.e_on_direct > 0);
    }
}

TEST_CASE("case-2 ledgers follow the direct integral") {
    const WaveformTrace& tr = reference_trace(Scenario::iZVSCase2);
    const EnergyReport r = energy_report(tr, segment(tr, Scenario::iZVSCase2));
    REQUIRE(r.ledger_applicable);
    CHECK(r.direct_vs_charge_ledger.relative < 0.03);
    CHECK(r.energy_vs_charge_ledger.relative < 1e-9);
    CHECK(r.delta_v > 0);
    CHECK(r.delta_v < 400);
    const auto j = to_json(r);
    CHECK(j.contains("charge_ledger"));
}
