#include "turnon/device_model.hpp"

#include "turnon/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace turnon {

namespace {

void require_finite(Real v, const char* what) {
    if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << what << " must be finite";
        throw InputError(msg.str());
    }
}

void require_nonnegative(Real v, const char* op) {
    require_finite(v, op);
    if (v < 0) {
        std::ostringstream msg;
        msg << op << ": voltage must be >= 0 (got " << v << ")";
        throw InputError(msg.str());
    }
}

}  // namespace

// ---------------------------------------------------------------------------
// CapacitanceCurve

CapacitanceCurve::CapacitanceCurve(std::vector<Real> voltages, std::vector<Real> capacitances) {
    if (voltages.empty()) {
        throw ConfigError("capacitance curve has no samples");
    }
    for (const Real c : capacitances) {
        if (!(c > 0) || !std::isfinite(c)) {
            throw ConfigError("capacitance curve values must be finite and > 0");
        }
    }
    if (voltages.size() == 1) {
        voltages.push_back(voltages.front() + 1.0);
        capacitances.push_back(capacitances.front());
    }
    interp_ = numerics::MonotoneCubic<Real>(std::move(voltages), std::move(capacitances),
                                            numerics::Extrapolation::Clamp);

    const auto& x = interp_.x();
    charge_knots_.assign(x.size(), 0.0);
    energy_knots_.assign(x.size(), 0.0);
    for (std::size_t k = 1; k < x.size(); ++k) {
        const auto c = [this](Real u) { return interp_(u); };
        const auto uc = [this](Real u) { return u * interp_(u); };
        charge_knots_[k] = charge_knots_[k - 1] + numerics::gauss_legendre3(c, x[k - 1], x[k]);
        energy_knots_[k] = energy_knots_[k - 1] + numerics::gauss_legendre3(uc, x[k - 1], x[k]);
    }
    charge_at_zero_ = charge_antiderivative(0.0);
    energy_at_zero_ = energy_antiderivative(0.0);
}

CapacitanceCurve CapacitanceCurve::constant(Real capacitance, Real v_max) {
    return CapacitanceCurve({0.0, v_max}, {capacitance, capacitance});
}

Real CapacitanceCurve::charge_antiderivative(Real v) const {
    const auto& x = interp_.x();
    const auto& c = interp_.y();
    if (v <= x.front()) {
        return c.front() * (v - x.front());
    }
    if (v >= x.back()) {
        return charge_knots_.back() + c.back() * (v - x.back());
    }
    const std::size_t k = interp_.interval(v);
    const auto f = [this](Real u) { return interp_(u); };
    return charge_knots_[k] + numerics::gauss_legendre3(f, x[k], v);
}

Real CapacitanceCurve::energy_antiderivative(Real v) const {
    const auto& x = interp_.x();
    const auto& c = interp_.y();
    if (v <= x.front()) {
        return c.front() * (v * v - x.front() * x.front()) / 2;
    }
    if (v >= x.back()) {
        return energy_knots_.back() + c.back() * (v * v - x.back() * x.back()) / 2;
    }
    const std::size_t k = interp_.interval(v);
    const auto f = [this](Real u) { return u * interp_(u); };
    return energy_knots_[k] + numerics::gauss_legendre3(f, x[k], v);
}

Real CapacitanceCurve::knee_voltage() const {
    const Real threshold = 2.0 * high_voltage_asymptote();
    const auto& v = interp_.x();
    const auto& c = interp_.y();
    // Walk down from the top of the table to the first sample above threshold,
    // then locate the crossing on the interpolant.
    for (std::size_t k = v.size(); k-- > 0;) {
        if (c[k] >= threshold) {
            if (k + 1 == v.size()) {
                return v.back();
            }
            return numerics::bisect([&](Real u) { return interp_(u) - threshold; }, v[k], v[k + 1],
                                    1e-9 * (1.0 + std::abs(v[k + 1])));
        }
    }
    return 0.0;
}

// ---------------------------------------------------------------------------
// IVGrid

IVGrid::IVGrid(std::vector<Real> gate_voltages, std::vector<IVCurve> curves)
    : gate_voltages_(std::move(gate_voltages)), curves_(std::move(curves)) {
    if (gate_voltages_.empty()) {
        throw ConfigError("I-V grid has no gate-voltage curves");
    }
    if (gate_voltages_.size() != curves_.size()) {
        throw ConfigError("I-V grid: one curve per gate voltage required");
    }
    for (std::size_t g = 1; g < gate_voltages_.size(); ++g) {
        if (!(gate_voltages_[g] > gate_voltages_[g - 1])) {
            throw ConfigError("I-V grid gate voltages must be strictly increasing");
        }
    }
    interp_.reserve(curves_.size());
    for (std::size_t g = 0; g < curves_.size(); ++g) {
        IVCurve& curve = curves_[g];
        std::ostringstream where;
        where << "I-V curve at v_gs = " << gate_voltages_[g] << " V";
        if (curve.v_ds.size() != curve.i_d.size() || curve.v_ds.size() < 2) {
            throw ConfigError(where.str() + " needs at least two (v_ds, i_d) samples");
        }
        Real max_abs = 0.0;
        for (std::size_t k = 0; k < curve.v_ds.size(); ++k) {
            if (!std::isfinite(curve.v_ds[k]) || !std::isfinite(curve.i_d[k])) {
                throw ConfigError(where.str() + " contains non-finite samples");
            }
            if (k > 0 && !(curve.v_ds[k] > curve.v_ds[k - 1])) {
                throw ConfigError(where.str() + ": v_ds must be strictly increasing");
            }
            if (k > 0 && curve.i_d[k] < curve.i_d[k - 1]) {
                throw ConfigError(where.str() + ": i_d must be nondecreasing in v_ds");
            }
            max_abs = std::max(max_abs, std::abs(curve.i_d[k]));
        }
        const auto zero = std::find(curve.v_ds.begin(), curve.v_ds.end(), 0.0);
        if (zero == curve.v_ds.end()) {
            throw ConfigError(where.str() + " lacks a v_ds = 0 sample");
        }
        const auto iz = static_cast<std::size_t>(std::distance(curve.v_ds.begin(), zero));
        if (std::abs(curve.i_d[iz]) > 1e-9 * max_abs) {
            throw ConfigError(where.str() + ": i_d(v_ds = 0) must be 0");
        }
        curve.i_d[iz] = 0.0;
        interp_.emplace_back(curve.v_ds, curve.i_d, numerics::Extrapolation::Linear);
    }
}

IVGrid IVGrid::from_samples(const std::vector<IVSample>& samples) {
    std::map<Real, IVCurve> by_gate;
    for (const IVSample& s : samples) {
        IVCurve& c = by_gate[s.v_gs];
        c.v_ds.push_back(s.v_ds);
        c.i_d.push_back(s.i_d);
    }
    std::vector<Real> gates;
    std::vector<IVCurve> curves;
    for (auto& [vgs, curve] : by_gate) {
        std::vector<std::size_t> order(curve.v_ds.size());
        for (std::size_t k = 0; k < order.size(); ++k) {
            order[k] = k;
        }
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return curve.v_ds[a] < curve.v_ds[b]; });
        IVCurve sorted;
        for (const std::size_t k : order) {
            sorted.v_ds.push_back(curve.v_ds[k]);
            sorted.i_d.push_back(curve.i_d[k]);
        }
        gates.push_back(vgs);
        curves.push_back(std::move(sorted));
    }
    return IVGrid(std::move(gates), std::move(curves));
}

std::vector<IVSample> IVGrid::samples() const {
    std::vector<IVSample> out;
    for (std::size_t g = 0; g < curves_.size(); ++g) {
        for (std::size_t k = 0; k < curves_[g].v_ds.size(); ++k) {
            out.push_back({gate_voltages_[g], curves_[g].v_ds[k], curves_[g].i_d[k]});
        }
    }
    return out;
}

ChannelPoint IVGrid::evaluate(Real v_gs, Real v_ds) const {
    if (empty()) {
        throw ConfigError("channel current requested from an empty I-V grid");
    }
    if (std::isnan(v_gs) || std::isnan(v_ds)) {
        throw InputError("channel current: NaN operating point");
    }
    const auto& g = gate_voltages_;
    if (g.size() == 1 || v_gs <= g.front()) {
        return {interp_.front()(v_ds), 0.0, interp_.front().derivative(v_ds)};
    }
    if (v_gs >= g.back()) {
        return {interp_.back()(v_ds), 0.0, interp_.back().derivative(v_ds)};
    }
    const auto it = std::upper_bound(g.begin(), g.end(), v_gs);
    const auto hi = static_cast<std::size_t>(std::distance(g.begin(), it));
    const std::size_t lo = hi - 1;
    const Real w = (v_gs - g[lo]) / (g[hi] - g[lo]);
    const Real i_lo = interp_[lo](v_ds);
    const Real i_hi = interp_[hi](v_ds);
    const Real di_lo = interp_[lo].derivative(v_ds);
    const Real di_hi = interp_[hi].derivative(v_ds);
    return {(1 - w) * i_lo + w * i_hi, (i_hi - i_lo) / (g[hi] - g[lo]), (1 - w) * di_lo + w * di_hi};
}

// ---------------------------------------------------------------------------
// DeviceModel

void DeviceModel::validate() const {
    if (iv.empty()) {
        throw ConfigError("device '" + name + "': empty I-V grid");
    }
    if (c_gd.empty() || c_ds.empty()) {
        throw ConfigError("device '" + name + "': missing C_gd or C_ds curve");
    }
    if (!(c_gs > 0)) {
        throw ConfigError("device '" + name + "': c_gs must be > 0");
    }
    if (c_par_gd < 0 || c_par_ds < 0) {
        throw ConfigError("device '" + name + "': parallel capacitances must be >= 0");
    }
    if (q_rr < 0) {
        throw ConfigError("device '" + name + "': q_rr must be >= 0");
    }
    const auto& g = iv.gate_voltages();
    if (v_th < g.front() || v_th > g.back()) {
        throw ConfigError("device '" + name + "': v_th outside the tabulated gate-voltage span");
    }
}

Real channel_current(const DeviceModel& dev, Real v_gs, Real v_ds) {
    return dev.iv.evaluate(v_gs, v_ds).current;
}

ChannelPoint channel_point(const DeviceModel& dev, Real v_gs, Real v_ds) {
    return dev.iv.evaluate(v_gs, v_ds);
}

Real r_s(const DeviceModel& dev, Real v_gs, Real v_ds) {
    const ChannelPoint p = dev.iv.evaluate(v_gs, v_ds);
    if (v_ds == 0.0) {
        return p.d_dvds > 0 ? 1.0 / p.d_dvds : kInfiniteResistance;
    }
    if (p.current == 0.0) {
        return kInfiniteResistance;
    }
    return v_ds / p.current;
}

Real c_oss(const DeviceModel& dev, Real v) {
    return dev.c_gd.capacitance(v) + dev.c_ds.capacitance(v);
}

Real q_oss(const DeviceModel& dev, Real v) {
    require_nonnegative(v, "q_oss");
    return dev.c_gd.charge(v) + dev.c_ds.charge(v);
}

Real e_oss(const DeviceModel& dev, Real v) {
    require_nonnegative(v, "e_oss");
    return dev.c_gd.energy(v) + dev.c_ds.energy(v);
}

Real e_gd(const DeviceModel& dev, Real v) {
    require_nonnegative(v, "e_gd");
    return dev.c_gd.energy(v);
}

Real e_ds(const DeviceModel& dev, Real v) {
    require_nonnegative(v, "e_ds");
    return dev.c_ds.energy(v);
}

Real c_rr(const DeviceModel& dev, Real swing, Real q_removed) {
    require_finite(swing, "c_rr swing");
    require_finite(q_removed, "c_rr q_removed");
    if (q_removed < 0) {
        throw InputError("c_rr: q_removed must be >= 0");
    }
    if (dev.q_rr <= 0 || q_removed >= dev.q_rr) {
        return 0.0;
    }
    if (!(swing > 0)) {
        throw InputError("c_rr: swing must be > 0");
    }
    return dev.q_rr / swing;
}

Real rr_charge(const DeviceModel& dev, Real swing, Real rise) {
    if (dev.q_rr <= 0 || !(swing > 0)) {
        return 0.0;
    }
    return std::clamp(dev.q_rr * rise / swing, 0.0, dev.q_rr);
}

}  // namespace turnon
