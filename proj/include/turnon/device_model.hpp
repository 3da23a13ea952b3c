#pragma once

// Per-device nonlinear characteristics: the tabulated I-V grid behind the
// equivalent channel resistance and the junction-capacitance curves behind
// C(v), Q(v) and E(v).

#include "turnon/numerics.hpp"
#include "turnon/types.hpp"

#include <string>
#include <vector>

namespace turnon {

/// C(v) table with a monotone cubic interpolant, clamped outside the table.
///
/// charge() and energy() are the exact integrals of that interpolant taken
/// from v = 0, so they are defined for any real v, including negative values.
class CapacitanceCurve {
public:
    CapacitanceCurve() = default;
    CapacitanceCurve(std::vector<Real> voltages, std::vector<Real> capacitances);

    static CapacitanceCurve constant(Real capacitance, Real v_max = 1000.0);

    [[nodiscard]] bool empty() const { return interp_.size() == 0; }
    [[nodiscard]] const std::vector<Real>& voltages() const { return interp_.x(); }
    [[nodiscard]] const std::vector<Real>& capacitances() const { return interp_.y(); }

    [[nodiscard]] Real capacitance(Real v) const { return interp_(v); }
    /// ∫_0^v C(u) du
    [[nodiscard]] Real charge(Real v) const { return charge_antiderivative(v) - charge_at_zero_; }
    /// ∫_0^v u·C(u) du
    [[nodiscard]] Real energy(Real v) const { return energy_antiderivative(v) - energy_at_zero_; }

    /// Capacitance at the last tabulated voltage.
    [[nodiscard]] Real high_voltage_asymptote() const { return interp_.y().back(); }
    /// Largest voltage at which C is still at least twice its high-voltage asymptote,
    /// i.e. the upper edge of the high-capacitance region; 0 if there is none.
    [[nodiscard]] Real knee_voltage() const;

private:
    [[nodiscard]] Real charge_antiderivative(Real v) const;
    [[nodiscard]] Real energy_antiderivative(Real v) const;

    numerics::MonotoneCubic<Real> interp_;
    std::vector<Real> charge_knots_;
    std::vector<Real> energy_knots_;
    Real charge_at_zero_ = 0.0;
    Real energy_at_zero_ = 0.0;
};

/// One output/third-quadrant characteristic: i_d(v_ds) at a fixed v_gs.
struct IVCurve {
    std::vector<Real> v_ds;
    std::vector<Real> i_d;
};

/// Long-format sample as stored in the `vgs,vds,id` files.
struct IVSample {
    Real v_gs;
    Real v_ds;
    Real i_d;
};

/// Channel current and its partial derivatives at one operating point.
struct ChannelPoint {
    Real current = 0.0;
    Real d_dvgs = 0.0;
    Real d_dvds = 0.0;
};

class IVGrid {
public:
    IVGrid() = default;
    IVGrid(std::vector<Real> gate_voltages, std::vector<IVCurve> curves);

    static IVGrid from_samples(const std::vector<IVSample>& samples);

    [[nodiscard]] bool empty() const { return gate_voltages_.empty(); }
    [[nodiscard]] const std::vector<Real>& gate_voltages() const { return gate_voltages_; }
    [[nodiscard]] const std::vector<IVCurve>& curves() const { return curves_; }
    [[nodiscard]] std::vector<IVSample> samples() const;

    /// Interpolates along v_ds on the two bracketing curves, then linearly in v_gs.
    /// v_gs is clamped to the tabulated range; v_ds extrapolates with the end slopes.
    [[nodiscard]] ChannelPoint evaluate(Real v_gs, Real v_ds) const;

private:
    std::vector<Real> gate_voltages_;
    std::vector<IVCurve> curves_;
    std::vector<numerics::MonotoneCubic<Real>> interp_;
};

struct DeviceModel {
    std::string name;
    IVGrid iv;
    Real c_gs = 0.0;           // F, voltage independent
    CapacitanceCurve c_gd;     // F vs drain-gate voltage
    CapacitanceCurve c_ds;     // F vs drain-source voltage
    Real c_par_gd = 0.0;       // F
    Real c_par_ds = 0.0;       // F
    Real v_th = 0.0;           // V
    Real q_rr = 0.0;           // C, 0 disables the recovery capacitance
    Real v_ee_ref = 0.0;       // V, gate-off magnitude used to shift C_gd arguments

    [[nodiscard]] Real c_par() const { return c_par_gd + c_par_ds; }

    /// Throws ConfigError when an invariant of the characterization is violated.
    void validate() const;
};

/// i_RS: all non-displacement current, positive for drain-to-source flow.
[[nodiscard]] Real channel_current(const DeviceModel& dev, Real v_gs, Real v_ds);
[[nodiscard]] ChannelPoint channel_point(const DeviceModel& dev, Real v_gs, Real v_ds);

/// R_S = v_ds / i_RS. Infinite for a blocking channel; the limit slope at v_ds = 0.
[[nodiscard]] Real r_s(const DeviceModel& dev, Real v_gs, Real v_ds);

[[nodiscard]] Real c_oss(const DeviceModel& dev, Real v);
[[nodiscard]] Real q_oss(const DeviceModel& dev, Real v);
[[nodiscard]] Real e_oss(const DeviceModel& dev, Real v);
[[nodiscard]] Real e_gd(const DeviceModel& dev, Real v);
[[nodiscard]] Real e_ds(const DeviceModel& dev, Real v);

/// Lumped reverse-recovery capacitance: a constant q_rr / swing while charge
/// remains to be extracted, zero once q_removed reaches q_rr.
[[nodiscard]] Real c_rr(const DeviceModel& dev, Real swing, Real q_removed);

/// Recovery charge extracted after the capacitor voltage has risen by `rise`
/// over a `swing`-volt event: clamp(q_rr·rise/swing, 0, q_rr).
[[nodiscard]] Real rr_charge(const DeviceModel& dev, Real swing, Real rise);

}  // namespace turnon
