#pragma once

// Half-bridge network: S1 (upper, switching on) and S2 (lower, held off) with
// their nonlinear capacitances, gate-drive resistors and a load at the midpoint,
// written in charge form  d q(x)/dt = f(t, x).
//
// State x = [v_gs,S1, v_gs,S2, v_m, i_L]. The DC link is ideal, so
// v_ds,S1 = V_DC - v_m and v_ds,S2 = v_m hold identically.
//
// Sign conventions: i_L is positive INTO the midpoint; channel currents are
// positive drain-to-source; displacement currents are positive in the
// direction that charges the capacitor (raises its voltage).

#include "turnon/device_model.hpp"
#include "turnon/types.hpp"

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace turnon {

enum class Scenario { ZVS, HS, iZVSCase1, iZVSCase2 };

enum class LoadDirection { IntoMidpoint, OutOfMidpoint };

[[nodiscard]] std::string_view to_string(Scenario s);
[[nodiscard]] Scenario scenario_from_string(std::string_view s);
[[nodiscard]] std::string_view to_string(LoadDirection d);
[[nodiscard]] LoadDirection load_direction_from_string(std::string_view s);

/// Load direction each scenario requires: ZVS and case-1 iZVS push current into
/// the midpoint; HS and case-2 iZVS draw it out.
[[nodiscard]] LoadDirection required_direction(Scenario s);

struct ConstantCurrentLoad {
    Real current = 0.0;  // A, magnitude
    LoadDirection direction = LoadDirection::OutOfMidpoint;
};

/// Inductor connected across S2 (midpoint to the negative rail).
struct InductorLoad {
    Real inductance = 0.0;       // H
    Real initial_current = 0.0;  // A, magnitude
    LoadDirection direction = LoadDirection::OutOfMidpoint;
};

using Load = std::variant<ConstantCurrentLoad, InductorLoad>;

/// Signed initial load current, positive into the midpoint.
[[nodiscard]] Real signed_load_current(const Load& load);
[[nodiscard]] LoadDirection load_direction(const Load& load);

struct HalfBridgeConfig {
    Real v_dc = 400.0;
    Real gate_on = 20.0;
    Real gate_off = -4.0;
    Real r_g_s1 = 10.0;
    Real r_g_s2 = 10.0;
    Load load = ConstantCurrentLoad{};
    std::shared_ptr<const DeviceModel> dev_s1;
    std::shared_ptr<const DeviceModel> dev_s2;
    Scenario scenario = Scenario::iZVSCase2;
    /// iZVS only: v_ds,S1 at the gate step (residual voltage ΔV).
    Real delta_v = 0.0;
    /// When false, S2's channel only conducts in the third quadrant.
    bool shoot_through_enabled = false;

    void validate() const;
};

struct CircuitState {
    Real t = 0.0;
    Real v_gs_s1 = 0.0;
    Real v_gs_s2 = 0.0;
    Real v_m = 0.0;
    Real i_l = 0.0;
    Real q_rr_removed = 0.0;
    Real v_ds_s1 = 0.0;
    Real v_ds_s2 = 0.0;
};

struct KclResiduals {
    Real gate_s1 = 0.0;
    Real gate_s2 = 0.0;
    Real midpoint = 0.0;
    Real scale = 0.0;  // largest branch magnitude entering the balances

    [[nodiscard]] Real max_relative() const;
};

struct BranchCurrents {
    Real i_rs1 = 0.0, i_rs2 = 0.0;
    Real i_cgs_s1 = 0.0, i_cgd_s1 = 0.0, i_cds_s1 = 0.0, i_cpar_gd_s1 = 0.0, i_cpar_ds_s1 = 0.0;
    Real i_cgs_s2 = 0.0, i_cgd_s2 = 0.0, i_cds_s2 = 0.0, i_cpar_gd_s2 = 0.0, i_cpar_ds_s2 = 0.0;
    Real i_crr_s2 = 0.0;
    Real i_g_s1 = 0.0, i_g_s2 = 0.0;
    Real i_c_s1 = 0.0, i_c_s2 = 0.0;  // lumped displacement totals of C_S1, C_S2
    Real i_d_s1 = 0.0, i_d_s2 = 0.0;  // drain-terminal currents
    Real i_l = 0.0;                   // into the midpoint
    Real i_dc = 0.0;                  // delivered by the DC source

    [[nodiscard]] Real i_cpar_s1() const { return i_cpar_gd_s1 + i_cpar_ds_s1; }
    [[nodiscard]] Real i_cpar_s2() const { return i_cpar_gd_s2 + i_cpar_ds_s2; }
    [[nodiscard]] KclResiduals kcl_residuals() const;
};

class CircuitSystem {
public:
    static constexpr int kDim = 4;
    using Scalar = Real;
    using Vector = Vec<Real, kDim>;
    using Matrix = Mat<Real, kDim>;

    enum Index : int { kVgsS1 = 0, kVgsS2 = 1, kVm = 2, kIl = 3 };

    explicit CircuitSystem(HalfBridgeConfig config);

    [[nodiscard]] const HalfBridgeConfig& config() const { return config_; }
    [[nodiscard]] const DeviceModel& s1() const { return *config_.dev_s1; }
    [[nodiscard]] const DeviceModel& s2() const { return *config_.dev_s2; }
    [[nodiscard]] const Vector& initial_state() const { return x0_; }

    /// Ideal gate-drive sources: S1 steps gate_off -> gate_on at t = 0, S2 stays off.
    [[nodiscard]] Real drive_s1(Real t) const { return t < 0 ? config_.gate_off : config_.gate_on; }
    [[nodiscard]] Real drive_s2(Real /*t*/) const { return config_.gate_off; }

    /// Reverse recovery of S2 is modeled only for hard switching with q_rr > 0.
    [[nodiscard]] bool recovery_active() const { return rr_active_; }
    [[nodiscard]] Real recovery_swing() const { return rr_swing_; }
    [[nodiscard]] Real recovery_charge(Real v_m) const;
    [[nodiscard]] Real recovery_capacitance(Real v_m) const;

    // Charge-form pieces consumed by the integrator.
    [[nodiscard]] Vector charge(const Vector& x) const;
    [[nodiscard]] Matrix capacitance(const Vector& x) const;
    [[nodiscard]] Vector forcing(Real t, const Vector& x) const;
    [[nodiscard]] Matrix conductance(Real t, const Vector& x) const;

    [[nodiscard]] Real i_rs1(const Vector& x) const;
    [[nodiscard]] Real i_rs2(const Vector& x) const;

    [[nodiscard]] CircuitState state(Real t, const Vector& x) const;
    [[nodiscard]] Vector to_vector(const CircuitState& s) const;

private:
    [[nodiscard]] ChannelPoint s2_channel(const Vector& x) const;

    HalfBridgeConfig config_;
    Vector x0_;
    bool rr_active_ = false;
    Real rr_origin_ = 0.0;
    Real rr_swing_ = 0.0;
};

[[nodiscard]] CircuitSystem assemble(const HalfBridgeConfig& config);

/// dx/dt from C(x)·dx/dt = f(t, x).
[[nodiscard]] CircuitSystem::Vector rhs(const CircuitSystem& sys, Real t, const CircuitSystem::Vector& x);

[[nodiscard]] BranchCurrents branch_currents(const CircuitSystem& sys, Real t,
                                             const CircuitSystem::Vector& x,
                                             const CircuitSystem::Vector& dxdt);

}  // namespace turnon
