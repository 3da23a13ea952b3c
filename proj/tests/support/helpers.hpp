#pragma once

// Small devices and circuits whose behaviour can be worked out by hand.

#include "turnon/circuit.hpp"
#include "turnon/device_model.hpp"
#include "turnon/solver.hpp"
#include "turnon/synthetic_device.hpp"

#include <map>
#include <memory>
#include <random>

namespace turnon::testing {

/// i_d = g(v_gs)·v_ds with g = 0 at v_gs <= 0 and g = 2 S at v_gs = 10 V.
inline IVGrid linear_grid() {
    const std::vector<Real> vds{-20.0, -10.0, 0.0, 10.0, 20.0};
    IVCurve off{vds, {0, 0, 0, 0, 0}};
    IVCurve on{vds, {-40, -20, 0, 20, 40}};
    return IVGrid({0.0, 10.0}, {off, on});
}

/// Constant capacitances and the linear grid above.
inline DeviceModel constant_c_device(Real c_gd, Real c_ds, Real c_gs = 1e-9, Real v_max = 1000.0) {
    DeviceModel d;
    d.name = "constant";
    d.iv = linear_grid();
    d.c_gs = c_gs;
    d.c_gd = CapacitanceCurve::constant(c_gd, v_max);
    d.c_ds = CapacitanceCurve::constant(c_ds, v_max);
    d.v_th = 2.0;
    d.validate();
    return d;
}

/// Reference SiC-like synthetic device used by the scenario tests.
inline SyntheticDeviceParams reference_params() {
    SyntheticDeviceParams p;
    p.transconductance = 8.0;
    p.c_gs = 1e-9;
    p.c_gd_min = 40e-12;
    p.c_ds_min = 200e-12;
    p.c_ds_corner = 2.0;
    p.c_ds_exponent = 1.0;
    p.q_rr = 50e-9;
    return p;
}

inline std::shared_ptr<const DeviceModel> reference_device() {
    static const auto dev = std::make_shared<const DeviceModel>(make_synthetic_device(reference_params()));
    return dev;
}

inline HalfBridgeConfig reference_config(Scenario s) {
    HalfBridgeConfig c;
    c.dev_s1 = reference_device();
    c.dev_s2 = reference_device();
    c.scenario = s;
    c.v_dc = 400;
    c.r_g_s1 = c.r_g_s2 = 10;
    switch (s) {
        case Scenario::ZVS: c.load = ConstantCurrentLoad{10, LoadDirection::IntoMidpoint}; break;
        case Scenario::HS: c.load = ConstantCurrentLoad{10, LoadDirection::OutOfMidpoint}; break;
        case Scenario::iZVSCase1:
            c.load = ConstantCurrentLoad{3, LoadDirection::IntoMidpoint};
            c.delta_v = 300;
            break;
        case Scenario::iZVSCase2:
            c.load = ConstantCurrentLoad{10, LoadDirection::OutOfMidpoint};
            c.delta_v = 255;
            break;
    }
    return c;
}

/// Runs of the four reference scenarios are shared across test cases.
inline const WaveformTrace& reference_trace(Scenario s) {
    static std::map<Scenario, WaveformTrace> cache;
    auto it = cache.find(s);
    if (it == cache.end()) {
        it = cache.emplace(s, simulate(reference_config(s), SolverSettings{}, 150e-9)).first;
    }
    return it->second;
}

}  // namespace turnon::testing
