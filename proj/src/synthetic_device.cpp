#include "turnon/synthetic_device.hpp"

#include <algorithm>
#include <cmath>

namespace turnon {

namespace {

Real softplus(Real x, Real s) {
    const Real z = x / s;
    return z > 40 ? x : s * std::log1p(std::exp(z));
}

Real body_diode_current(const SyntheticDeviceParams& p, Real v_reverse) {
    // Zero at v_reverse = 0 by construction.
    const Real shifted = softplus(v_reverse - p.body_knee, p.body_softness) -
                         softplus(-p.body_knee, p.body_softness);
    return shifted / p.body_resistance;
}

Real channel_magnitude(const SyntheticDeviceParams& p, Real overdrive, Real v) {
    if (overdrive <= 0 || v == 0) {
        return 0.0;
    }
    const Real i_sat = 0.5 * p.transconductance * overdrive * overdrive;
    const Real g = 1.0 / (1.0 / (p.transconductance * overdrive) + p.r_drift);
    return i_sat * std::tanh(g * v / i_sat);
}

std::vector<Real> gate_grid(const SyntheticDeviceParams& p) {
    std::vector<Real> g;
    for (Real v = std::ceil(p.v_gs_min); v < p.v_th - 1e-9; v += 1.0) {
        g.push_back(v);
    }
    g.push_back(p.v_th);
    for (Real dv = 0.25; p.v_th + dv <= std::min(p.v_th + 3.0, p.v_gs_max); dv += 0.25) {
        g.push_back(p.v_th + dv);
    }
    for (Real v = std::floor(p.v_th + 4.0); v <= p.v_gs_max; v += 1.0) {
        if (v > g.back() + 0.5) {
            g.push_back(v);
        }
    }
    return g;
}

std::vector<Real> drain_grid(const SyntheticDeviceParams& p) {
    std::vector<Real> v{-20, -15, -10, -7, -5, -4, -3.5, -3, -2.5, -2, -1.5, -1, -0.5, -0.25, -0.1, 0,
                        0.1, 0.25, 0.5, 1, 1.5, 2, 3, 4, 5, 7, 10, 15, 20, 30, 40, 50, 70, 100,
                        150, 200, 300, 400, 500, 600, 800, 1000};
    v.erase(std::remove_if(v.begin(), v.end(), [&](Real x) { return x > p.v_ds_max; }), v.end());
    if (v.back() < p.v_ds_max) {
        v.push_back(p.v_ds_max);
    }
    return v;
}

std::vector<Real> capacitance_grid(const SyntheticDeviceParams& p) {
    std::vector<Real> v{0, 0.5, 1, 2, 3, 5, 7, 10, 15, 20, 30, 40, 50, 75, 100, 150, 200, 300, 400,
                        500, 600, 800, 1000};
    v.erase(std::remove_if(v.begin(), v.end(), [&](Real x) { return x > p.v_ds_max; }), v.end());
    if (v.back() < p.v_ds_max) {
        v.push_back(p.v_ds_max);
    }
    return v;
}

}  // namespace

Real synthetic_channel_current(const SyntheticDeviceParams& p, Real v_gs, Real v_ds) {
    const Real overdrive = v_gs - p.v_th;
    if (v_ds >= 0) {
        return channel_magnitude(p, overdrive, v_ds) * (1.0 + p.clm * v_ds);
    }
    return -(channel_magnitude(p, overdrive, -v_ds) + body_diode_current(p, -v_ds));
}

Real synthetic_c_gd(const SyntheticDeviceParams& p, Real v) {
    v = std::max(v, 0.0);
    return p.c_gd0 / std::pow(1.0 + v / p.c_gd_corner, p.c_gd_exponent) + p.c_gd_min;
}

Real synthetic_c_ds(const SyntheticDeviceParams& p, Real v) {
    v = std::max(v, 0.0);
    return p.c_ds0 / std::pow(1.0 + v / p.c_ds_corner, p.c_ds_exponent) + p.c_ds_min;
}

DeviceModel make_synthetic_device(const SyntheticDeviceParams& p) {
    const std::vector<Real> gates = gate_grid(p);
    const std::vector<Real> drains = drain_grid(p);
    std::vector<IVCurve> curves;
    curves.reserve(gates.size());
    for (const Real vgs : gates) {
        IVCurve c;
        c.v_ds = drains;
        c.i_d.reserve(drains.size());
        for (const Real vds : drains) {
            c.i_d.push_back(synthetic_channel_current(p, vgs, vds));
        }
        curves.push_back(std::move(c));
    }

    const std::vector<Real> cv = capacitance_grid(p);
    std::vector<Real> cgd;
    std::vector<Real> cds;
    for (const Real v : cv) {
        cgd.push_back(synthetic_c_gd(p, v));
        cds.push_back(synthetic_c_ds(p, v));
    }

    DeviceModel dev;
    dev.name = p.name;
    dev.iv = IVGrid(gates, std::move(curves));
    dev.c_gs = p.c_gs;
    dev.c_gd = CapacitanceCurve(cv, std::move(cgd));
    dev.c_ds = CapacitanceCurve(cv, std::move(cds));
    dev.c_par_gd = p.c_par_gd;
    dev.c_par_ds = p.c_par_ds;
    dev.v_th = p.v_th;
    dev.q_rr = p.q_rr;
    dev.v_ee_ref = p.v_ee_ref;
    dev.validate();
    return dev;
}

}  // namespace turnon
