#include "turnon/circuit.hpp"

#include "turnon/errors.hpp"
#include "turnon/numerics.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <string>

namespace turnon {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_inductor(const Load& load) { return std::holds_alternative<InductorLoad>(load); }

}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::ZVS: return "ZVS";
        case Scenario::HS: return "HS";
        case Scenario::iZVSCase1: return "iZVS_case1";
        case Scenario::iZVSCase2: return "iZVS_case2";
    }
    return "?";
}

Scenario scenario_from_string(std::string_view s) {
    if (s == "ZVS") return Scenario::ZVS;
    if (s == "HS") return Scenario::HS;
    if (s == "iZVS_case1") return Scenario::iZVSCase1;
    if (s == "iZVS_case2") return Scenario::iZVSCase2;
    throw ConfigError("scenario: unknown value '" + std::string(s) +
                      "' (expected ZVS, HS, iZVS_case1 or iZVS_case2)");
}

std::string_view to_string(LoadDirection d) {
    return d == LoadDirection::IntoMidpoint ? "into_midpoint" : "out_of_midpoint";
}

LoadDirection load_direction_from_string(std::string_view s) {
    if (s == "into_midpoint") return LoadDirection::IntoMidpoint;
    if (s == "out_of_midpoint") return LoadDirection::OutOfMidpoint;
    throw ConfigError("load.direction: unknown value '" + std::string(s) +
                      "' (expected into_midpoint or out_of_midpoint)");
}

LoadDirection required_direction(Scenario s) {
    return (s == Scenario::ZVS || s == Scenario::iZVSCase1) ? LoadDirection::IntoMidpoint
                                                             : LoadDirection::OutOfMidpoint;
}

LoadDirection load_direction(const Load& load) {
    return std::visit([](const auto& l) { return l.direction; }, load);
}

Real signed_load_current(const Load& load) {
    const Real magnitude = std::visit(
        Overloaded{[](const ConstantCurrentLoad& l) { return l.current; },
                   [](const InductorLoad& l) { return l.initial_current; }},
        load);
    return load_direction(load) == LoadDirection::IntoMidpoint ? magnitude : -magnitude;
}

void HalfBridgeConfig::validate() const {
    auto positive = [](Real v, const char* key) {
        if (!(std::isfinite(v) && v > 0)) {
            throw ConfigError(std::string(key) + ": must be a positive finite number");
        }
    };
    positive(v_dc, "v_dc_V");
    positive(r_g_s1, "r_g_s1_ohm");
    positive(r_g_s2, "r_g_s2_ohm");
    if (!std::isfinite(gate_on) || !std::isfinite(gate_off) || gate_on <= gate_off) {
        throw ConfigError("gate_on_V: must exceed gate_off_V");
    }
    if (!dev_s1 || !dev_s2) {
        throw ConfigError("devices: both s1 and s2 must be given");
    }
    dev_s1->validate();
    dev_s2->validate();

    std::visit(Overloaded{[](const ConstantCurrentLoad& l) {
                              if (!std::isfinite(l.current) || l.current < 0) {
                                  throw ConfigError("load.current_A: must be a nonnegative magnitude");
                              }
                          },
                          [](const InductorLoad& l) {
                              if (!(std::isfinite(l.inductance) && l.inductance > 0)) {
                                  throw ConfigError("load.inductance_H: must be positive");
                              }
                              if (!std::isfinite(l.initial_current) || l.initial_current < 0) {
                                  throw ConfigError(
                                      "load.initial_current_A: must be a nonnegative magnitude");
                              }
                          }},
               load);

    if (load_direction(load) != required_direction(scenario)) {
        throw ConfigError("load.direction: scenario " + std::string(to_string(scenario)) + " needs " +
                          std::string(to_string(required_direction(scenario))));
    }
    const bool izvs = scenario == Scenario::iZVSCase1 || scenario == Scenario::iZVSCase2;
    if (izvs) {
        if (!(std::isfinite(delta_v) && delta_v > 0 && delta_v < v_dc)) {
            throw ConfigError("delta_v_V: iZVS needs 0 < delta_v_V < v_dc_V");
        }
    } else if (signed_load_current(load) == 0.0) {
        throw ConfigError("load.current_A: " + std::string(to_string(scenario)) +
                          " needs a nonzero load current to commutate");
    }
}

Real KclResiduals::max_relative() const {
    const Real worst = std::max({std::abs(gate_s1), std::abs(gate_s2), std::abs(midpoint)});
    return scale > 0 ? worst / scale : worst;
}

KclResiduals BranchCurrents::kcl_residuals() const {
    KclResiduals r;
    r.gate_s1 = i_g_s1 + i_cgd_s1 + i_cpar_gd_s1 - i_cgs_s1;
    r.gate_s2 = i_g_s2 + i_cgd_s2 + i_cpar_gd_s2 - i_cgs_s2;
    r.midpoint = (i_rs1 + i_cds_s1 + i_cpar_ds_s1 + i_cgs_s1 - i_g_s1 + i_l) -
                 (i_rs2 + i_cds_s2 + i_cpar_ds_s2 + i_cgd_s2 + i_cpar_gd_s2 + i_crr_s2);
    r.scale = std::max({std::abs(i_rs1), std::abs(i_rs2), std::abs(i_cgs_s1), std::abs(i_cgd_s1),
                        std::abs(i_cds_s1), std::abs(i_cpar_gd_s1), std::abs(i_cpar_ds_s1),
                        std::abs(i_cgs_s2), std::abs(i_cgd_s2), std::abs(i_cds_s2),
                        std::abs(i_cpar_gd_s2), std::abs(i_cpar_ds_s2), std::abs(i_crr_s2),
                        std::abs(i_g_s1), std::abs(i_g_s2), std::abs(i_l)});
    return r;
}

CircuitSystem::CircuitSystem(HalfBridgeConfig config) : config_(std::move(config)) {
    config_.validate();
    const Real v_dc = config_.v_dc;
    const Real i_l = signed_load_current(config_.load);

    x0_.setZero();
    x0_[kVgsS1] = config_.gate_off;
    x0_[kVgsS2] = config_.gate_off;
    x0_[kIl] = i_l;

    if (config_.scenario == Scenario::iZVSCase1 || config_.scenario == Scenario::iZVSCase2) {
        x0_[kVm] = v_dc - config_.delta_v;
    } else {
        // Steady pre-switching state: the load current is carried entirely by the
        // reverse-conducting device, so the midpoint node balance is zero.
        auto balance = [&](Real v_m) {
            Vector x = x0_;
            x[kVm] = v_m;
            return i_rs1(x) - i_rs2(x) + i_l;
        };
        const Real lo = -50.0;
        const Real hi = v_dc + 50.0;
        if (balance(lo) * balance(hi) > 0) {
            throw ConfigError("load.current_A: no reverse-conduction operating point within " +
                              std::to_string(lo) + ".." + std::to_string(hi) + " V");
        }
        x0_[kVm] = numerics::bisect(balance, lo, hi, 1e-12, 200);
    }

    // Stored charge is swept out as the midpoint leaves the diode's forward
    // conduction voltage, spread uniformly over the swing to the rail.
    if (config_.scenario == Scenario::HS && s2().q_rr > 0) {
        rr_active_ = true;
        rr_origin_ = x0_[kVm];
        rr_swing_ = v_dc - rr_origin_;
    }
}

Real CircuitSystem::recovery_charge(Real v_m) const {
    if (!rr_active_) {
        return 0.0;
    }
    return rr_charge(s2(), rr_swing_, v_m - rr_origin_);
}

Real CircuitSystem::recovery_capacitance(Real v_m) const {
    if (!rr_active_) {
        return 0.0;
    }
    const Real rise = v_m - rr_origin_;
    return (rise > 0 && rise < rr_swing_) ? s2().q_rr / rr_swing_ : 0.0;
}

Real CircuitSystem::i_rs1(const Vector& x) const {
    return channel_current(s1(), x[kVgsS1], config_.v_dc - x[kVm]);
}

ChannelPoint CircuitSystem::s2_channel(const Vector& x) const {
    ChannelPoint p = channel_point(s2(), x[kVgsS2], x[kVm]);
    if (!config_.shoot_through_enabled && p.current > 0) {
        p = ChannelPoint{};
    }
    return p;
}

Real CircuitSystem::i_rs2(const Vector& x) const { return s2_channel(x).current; }

CircuitSystem::Vector CircuitSystem::charge(const Vector& x) const {
    const DeviceModel& d1 = s1();
    const DeviceModel& d2 = s2();
    const Real v_m = x[kVm];
    const Real v_ds1 = config_.v_dc - v_m;
    const Real v_dg1 = v_ds1 - x[kVgsS1];
    const Real v_dg2 = v_m - x[kVgsS2];

    const Real q_gd1 = d1.c_gd.charge(v_dg1) + d1.c_par_gd * v_dg1;
    const Real q_gd2 = d2.c_gd.charge(v_dg2) + d2.c_par_gd * v_dg2;
    const Real q_ds1 = d1.c_ds.charge(v_ds1) + d1.c_par_ds * v_ds1;
    const Real q_ds2 = d2.c_ds.charge(v_m) + d2.c_par_ds * v_m;

    Vector q;
    q[kVgsS1] = d1.c_gs * x[kVgsS1] - q_gd1;
    q[kVgsS2] = d2.c_gs * x[kVgsS2] - q_gd2;
    q[kVm] = q_ds2 + q_gd2 + recovery_charge(v_m) - q_ds1 - q_gd1;
    if (const auto* ind = std::get_if<InductorLoad>(&config_.load)) {
        q[kIl] = ind->inductance * x[kIl];
    } else {
        q[kIl] = x[kIl];
    }
    return q;
}

CircuitSystem::Matrix CircuitSystem::capacitance(const Vector& x) const {
    const DeviceModel& d1 = s1();
    const DeviceModel& d2 = s2();
    const Real v_m = x[kVm];
    const Real v_ds1 = config_.v_dc - v_m;
    const Real c_gd1 = d1.c_gd.capacitance(v_ds1 - x[kVgsS1]) + d1.c_par_gd;
    const Real c_gd2 = d2.c_gd.capacitance(v_m - x[kVgsS2]) + d2.c_par_gd;
    const Real c_ds1 = d1.c_ds.capacitance(v_ds1) + d1.c_par_ds;
    const Real c_ds2 = d2.c_ds.capacitance(v_m) + d2.c_par_ds;

    Matrix c = Matrix::Zero();
    c(kVgsS1, kVgsS1) = d1.c_gs + c_gd1;
    c(kVgsS1, kVm) = c_gd1;
    c(kVgsS2, kVgsS2) = d2.c_gs + c_gd2;
    c(kVgsS2, kVm) = -c_gd2;
    c(kVm, kVgsS1) = c_gd1;
    c(kVm, kVgsS2) = -c_gd2;
    c(kVm, kVm) = c_ds2 + c_gd2 + recovery_capacitance(v_m) + c_ds1 + c_gd1;
    const auto* ind = std::get_if<InductorLoad>(&config_.load);
    c(kIl, kIl) = ind ? ind->inductance : 1.0;
    return c;
}

CircuitSystem::Vector CircuitSystem::forcing(Real t, const Vector& x) const {
    Vector f;
    f[kVgsS1] = (drive_s1(t) - x[kVgsS1]) / config_.r_g_s1;
    f[kVgsS2] = (drive_s2(t) - x[kVgsS2]) / config_.r_g_s2;
    f[kVm] = i_rs1(x) - i_rs2(x) + x[kIl];
    f[kIl] = is_inductor(config_.load) ? -x[kVm] : 0.0;
    return f;
}

CircuitSystem::Matrix CircuitSystem::conductance(Real /*t*/, const Vector& x) const {
    const ChannelPoint p1 = channel_point(s1(), x[kVgsS1], config_.v_dc - x[kVm]);
    const ChannelPoint p2 = s2_channel(x);
    Matrix g = Matrix::Zero();
    g(kVgsS1, kVgsS1) = -1.0 / config_.r_g_s1;
    g(kVgsS2, kVgsS2) = -1.0 / config_.r_g_s2;
    g(kVm, kVgsS1) = p1.d_dvgs;
    g(kVm, kVgsS2) = -p2.d_dvgs;
    g(kVm, kVm) = -p1.d_dvds - p2.d_dvds;
    g(kVm, kIl) = 1.0;
    if (is_inductor(config_.load)) {
        g(kIl, kVm) = -1.0;
    }
    return g;
}

CircuitState CircuitSystem::state(Real t, const Vector& x) const {
    CircuitState s;
    s.t = t;
    s.v_gs_s1 = x[kVgsS1];
    s.v_gs_s2 = x[kVgsS2];
    s.v_m = x[kVm];
    s.i_l = x[kIl];
    s.q_rr_removed = recovery_charge(x[kVm]);
    s.v_ds_s1 = config_.v_dc - x[kVm];
    s.v_ds_s2 = x[kVm];
    return s;
}

CircuitSystem::Vector CircuitSystem::to_vector(const CircuitState& s) const {
    Vector x;
    x << s.v_gs_s1, s.v_gs_s2, s.v_m, s.i_l;
    return x;
}

CircuitSystem assemble(const HalfBridgeConfig& config) { return CircuitSystem(config); }

CircuitSystem::Vector rhs(const CircuitSystem& sys, Real t, const CircuitSystem::Vector& x) {
    return sys.capacitance(x).partialPivLu().solve(sys.forcing(t, x));
}

BranchCurrents branch_currents(const CircuitSystem& sys, Real t, const CircuitSystem::Vector& x,
                               const CircuitSystem::Vector& dxdt) {
    using I = CircuitSystem::Index;
    const HalfBridgeConfig& cfg = sys.config();
    const DeviceModel& d1 = sys.s1();
    const DeviceModel& d2 = sys.s2();
    const Real v_m = x[I::kVm];
    const Real v_ds1 = cfg.v_dc - v_m;
    const Real v_dg1 = v_ds1 - x[I::kVgsS1];
    const Real v_dg2 = v_m - x[I::kVgsS2];

    const Real dvgs1 = dxdt[I::kVgsS1];
    const Real dvgs2 = dxdt[I::kVgsS2];
    const Real dvm = dxdt[I::kVm];
    const Real dvds1 = -dvm;
    const Real dvdg1 = dvds1 - dvgs1;
    const Real dvdg2 = dvm - dvgs2;

    BranchCurrents b;
    b.i_rs1 = sys.i_rs1(x);
    b.i_rs2 = sys.i_rs2(x);
    b.i_cgs_s1 = d1.c_gs * dvgs1;
    b.i_cgd_s1 = d1.c_gd.capacitance(v_dg1) * dvdg1;
    b.i_cds_s1 = d1.c_ds.capacitance(v_ds1) * dvds1;
    b.i_cpar_gd_s1 = d1.c_par_gd * dvdg1;
    b.i_cpar_ds_s1 = d1.c_par_ds * dvds1;
    b.i_cgs_s2 = d2.c_gs * dvgs2;
    b.i_cgd_s2 = d2.c_gd.capacitance(v_dg2) * dvdg2;
    b.i_cds_s2 = d2.c_ds.capacitance(v_m) * dvm;
    b.i_cpar_gd_s2 = d2.c_par_gd * dvdg2;
    b.i_cpar_ds_s2 = d2.c_par_ds * dvm;
    b.i_crr_s2 = sys.recovery_capacitance(v_m) * dvm;
    b.i_g_s1 = (sys.drive_s1(t) - x[I::kVgsS1]) / cfg.r_g_s1;
    b.i_g_s2 = (sys.drive_s2(t) - x[I::kVgsS2]) / cfg.r_g_s2;
    b.i_c_s1 = b.i_cgd_s1 + b.i_cds_s1 + b.i_cpar_gd_s1 + b.i_cpar_ds_s1;
    b.i_c_s2 = b.i_cgd_s2 + b.i_cds_s2 + b.i_cpar_gd_s2 + b.i_cpar_ds_s2 + b.i_crr_s2;
    b.i_d_s1 = b.i_rs1 + b.i_c_s1;
    b.i_d_s2 = b.i_rs2 + b.i_c_s2;
    b.i_l = x[I::kIl];
    b.i_dc = b.i_d_s2 - b.i_l;
    return b;
}

}  // namespace turnon
