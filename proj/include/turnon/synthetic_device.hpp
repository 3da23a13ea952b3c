#pragma once

// Analytic device family sampled onto the same tabulated representation that
// datasheet-derived curves use. Handy for tests, sweeps and demos when real
// curve files are not at hand.

#include "turnon/device_model.hpp"

#include <string>

namespace turnon {

struct SyntheticDeviceParams {
    std::string name = "synthetic";

    // Channel: i = i_sat·tanh(g·v_ds / i_sat)·(1 + clm·v_ds), i_sat = K/2·(v_gs - v_th)²,
    // g = 1 / (1 / (K·(v_gs - v_th)) + r_drift). Zero for v_gs <= v_th.
    Real v_th = 2.6;
    Real transconductance = 2.0;  // K, A/V²
    Real r_drift = 0.02;          // Ω
    Real clm = 1e-3;              // 1/V

    // Third-quadrant body diode: softplus knee in series with a resistance.
    Real body_knee = 3.0;         // V
    Real body_resistance = 0.05;  // Ω
    Real body_softness = 0.15;    // V

    // C(v) = c0 / (1 + v / corner)^m + c_min
    Real c_gs = 2.0e-9;
    Real c_gd0 = 1.0e-9;
    Real c_gd_min = 10e-12;
    Real c_gd_corner = 5.0;
    Real c_gd_exponent = 1.5;
    Real c_ds0 = 3.0e-9;
    Real c_ds_min = 150e-12;
    Real c_ds_corner = 20.0;
    Real c_ds_exponent = 0.6;

    Real c_par_gd = 0.0;
    Real c_par_ds = 0.0;
    Real q_rr = 0.0;
    Real v_ee_ref = 4.0;

    Real v_gs_min = -8.0;
    Real v_gs_max = 22.0;
    Real v_ds_max = 1200.0;
};

/// Analytic channel current of the synthetic family (the function the grid samples).
[[nodiscard]] Real synthetic_channel_current(const SyntheticDeviceParams& p, Real v_gs, Real v_ds);

/// Analytic capacitance laws of the synthetic family.
[[nodiscard]] Real synthetic_c_gd(const SyntheticDeviceParams& p, Real v);
[[nodiscard]] Real synthetic_c_ds(const SyntheticDeviceParams& p, Real v);

[[nodiscard]] DeviceModel make_synthetic_device(const SyntheticDeviceParams& p);

}  // namespace turnon
