#include "turnon/solver.hpp"

#include "turnon/config_io.hpp"
#include "turnon/trace_io.hpp"

namespace turnon {

void SolverSettings::validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0)) {
        throw ConfigError("solver: tolerances must be positive");
    }
    if (!(min_step > 0) || !(min_step < max_step)) {
        throw ConfigError("solver: need 0 < min_step < max_step");
    }
    if (!(initial_step > 0) || !(newton_tol > 0) || newton_max_iters < 1 || !(event_tol > 0)) {
        throw ConfigError("solver: initial_step, newton_tol, newton_max_iters and event_tol must be positive");
    }
}

namespace {

std::size_t interval_index(const std::vector<Real>& t, Real time) {
    if (time <= t.front()) {
        return 0;
    }
    if (time >= t.back()) {
        return t.size() - 2;
    }
    const auto it = std::upper_bound(t.begin(), t.end(), time);
    return static_cast<std::size_t>(it - t.begin()) - 1;
}

}  // namespace

CircuitSystem::Vector WaveformTrace::state_at(Real time) const {
    if (size() == 1) {
        return x.front();
    }
    time = std::clamp(time, t.front(), t.back());
    const std::size_t i = interval_index(t, time);
    return hermite<Real, CircuitSystem::kDim>(t[i], x[i], dxdt[i], t[i + 1], x[i + 1], dxdt[i + 1],
                                              time);
}

CircuitSystem::Vector WaveformTrace::derivative_at(Real time) const {
    if (system) {
        return rhs(*system, time, state_at(time));
    }
    if (size() == 1) {
        return dxdt.front();
    }
    time = std::clamp(time, t.front(), t.back());
    const std::size_t i = interval_index(t, time);
    return hermite_derivative<Real, CircuitSystem::kDim>(t[i], x[i], dxdt[i], t[i + 1], x[i + 1],
                                                         dxdt[i + 1], time);
}

BranchCurrents WaveformTrace::currents_at(Real time) const {
    if (!system) {
        throw InputError("currents_at: trace has no attached circuit");
    }
    return branch_currents(*system, time, state_at(time), derivative_at(time));
}

const Marker* WaveformTrace::find_marker(const std::string& name) const {
    for (const Marker& m : markers) {
        if (m.name == name) {
            return &m;
        }
    }
    return nullptr;
}

std::vector<CircuitEvent> standard_events(const CircuitSystem& sys) {
    using I = CircuitSystem::Index;
    const CircuitSystem* s = &sys;
    const Real v_th = sys.s1().v_th;
    std::vector<CircuitEvent> ev;
    ev.push_back({"onset", [v_th](Real, const CircuitSystem::Vector& x) { return x[I::kVgsS1] - v_th; }});
    // i_RS1 minus the current drawn out of the midpoint.
    ev.push_back({"i_rs1_eq_i_out",
                  [s](Real, const CircuitSystem::Vector& x) { return s->i_rs1(x) + x[I::kIl]; }});
    ev.push_back({"i_dc", [s](Real t, const CircuitSystem::Vector& x) {
                      return branch_currents(*s, t, x, rhs(*s, t, x)).i_dc;
                  }});
    return ev;
}

WaveformTrace make_trace(std::shared_ptr<const CircuitSystem> sys,
                         const Trajectory<Real, CircuitSystem::kDim>& traj,
                         const SolverSettings& settings, std::string config_hash) {
    WaveformTrace tr;
    tr.t = traj.t;
    tr.x = traj.x;
    tr.dxdt = traj.dxdt;
    tr.markers = traj.markers;
    tr.settings = settings;
    tr.config_hash = std::move(config_hash);
    tr.accepted_steps = traj.accepted;
    tr.rejected_steps = traj.rejected;
    tr.states.reserve(tr.size());
    tr.currents.reserve(tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        tr.states.push_back(sys->state(tr.t[i], tr.x[i]));
        tr.currents.push_back(branch_currents(*sys, tr.t[i], tr.x[i], tr.dxdt[i]));
    }
    tr.system = std::move(sys);
    return tr;
}

WaveformTrace simulate(const HalfBridgeConfig& config, const SolverSettings& settings, Real t_end,
                       std::vector<CircuitEvent> extra_events) {
    auto sys = std::make_shared<const CircuitSystem>(config);
    std::vector<CircuitEvent> events = standard_events(*sys);
    for (auto& e : extra_events) {
        events.push_back(std::move(e));
    }
    const auto traj = integrate(*sys, sys->initial_state(), Real(0), t_end, settings, events);
    return make_trace(sys, traj, settings, config_hash(config, settings, t_end));
}

WaveformTrace resample(const WaveformTrace& trace, Real dt) {
    if (!(dt > 0)) {
        throw InputError("resample: dt must be positive");
    }
    if (trace.empty()) {
        return trace;
    }
    const Real t0 = trace.t.front();
    const Real t1 = trace.t.back();
    std::vector<Real> times;
    for (long k = 0;; ++k) {
        const Real tk = t0 + static_cast<Real>(k) * dt;
        if (tk >= t1 - 1e-9 * dt) {
            break;
        }
        times.push_back(tk);
    }
    if (times.empty() || times.back() < t1) {
        times.push_back(t1);
    }

    WaveformTrace out;
    out.markers = trace.markers;
    out.system = trace.system;
    out.config_hash = trace.config_hash;
    out.settings = trace.settings;
    out.accepted_steps = trace.accepted_steps;
    out.rejected_steps = trace.rejected_steps;
    for (const Real tk : times) {
        const CircuitSystem::Vector xk = trace.state_at(tk);
        const CircuitSystem::Vector dk = trace.derivative_at(tk);
        out.t.push_back(tk);
        out.x.push_back(xk);
        out.dxdt.push_back(dk);
        if (trace.system) {
            out.states.push_back(trace.system->state(tk, xk));
            out.currents.push_back(branch_currents(*trace.system, tk, xk, dk));
        } else {
            auto [s, b] = interpolate_sample(trace, tk);
            out.states.push_back(s);
            out.currents.push_back(b);
        }
    }
    return out;
}

}  // namespace turnon
