#pragma once

// Adaptive trapezoidal integration of charge-form systems  d q(x)/dt = f(t, x)
// with cubic-Hermite dense output and event localization, plus the
// WaveformTrace record built from a half-bridge run.

#include "turnon/circuit.hpp"
#include "turnon/errors.hpp"
#include "turnon/types.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace turnon {

struct SolverSettings {
    Real rel_tol = 1e-7;
    Real abs_tol = 1e-9;
    Real max_step = 1e-9;          // s
    Real min_step = 1e-18;         // s
    Real initial_step = 1e-13;     // s
    /// Newton stops when every update is below newton_tol times the error weight.
    Real newton_tol = 1e-3;
    int newton_max_iters = 20;
    Real event_tol = 1e-12;        // s
    long max_steps = 5'000'000;
    /// Constant steps of max_step with no error control (convergence studies).
    bool fixed_step = false;
    /// Scale each step's tolerance by h/(t_end - t_start) so the accumulated
    /// error, not just the local one, stays near rel_tol.
    bool error_per_unit_step = true;

    void validate() const;
};

/// Localized zero crossing of a named event function.
struct Marker {
    std::string name;
    Real t = 0.0;
    int direction = 0;  // +1 rising, -1 falling
};

template <typename S>
concept ChargeSystem = requires(const S& s, const typename S::Vector& x, typename S::Scalar t) {
    { S::kDim } -> std::convertible_to<int>;
    { s.charge(x) } -> std::convertible_to<typename S::Vector>;
    { s.capacitance(x) } -> std::convertible_to<typename S::Matrix>;
    { s.forcing(t, x) } -> std::convertible_to<typename S::Vector>;
    { s.conductance(t, x) } -> std::convertible_to<typename S::Matrix>;
};

template <typename Scalar, int N>
struct EventFn {
    std::string name;
    std::function<Scalar(Scalar, const Vec<Scalar, N>&)> fn;
};

template <typename Scalar, int N>
struct Trajectory {
    std::vector<Scalar> t;
    std::vector<Vec<Scalar, N>> x;
    std::vector<Vec<Scalar, N>> dxdt;
    std::vector<Marker> markers;
    long accepted = 0;
    long rejected = 0;
};

/// Cubic Hermite interpolant between (t0, x0, d0) and (t1, x1, d1).
template <typename Scalar, int N>
Vec<Scalar, N> hermite(Scalar t0, const Vec<Scalar, N>& x0, const Vec<Scalar, N>& d0, Scalar t1,
                       const Vec<Scalar, N>& x1, const Vec<Scalar, N>& d1, Scalar t) {
    const Scalar h = t1 - t0;
    const Scalar s = (t - t0) / h;
    const Scalar s2 = s * s;
    const Scalar s3 = s2 * s;
    const Scalar h00 = 2 * s3 - 3 * s2 + 1;
    const Scalar h10 = s3 - 2 * s2 + s;
    const Scalar h01 = -2 * s3 + 3 * s2;
    const Scalar h11 = s3 - s2;
    return h00 * x0 + h10 * h * d0 + h01 * x1 + h11 * h * d1;
}

/// Time derivative of the dense interpolant.
template <typename Scalar, int N>
Vec<Scalar, N> hermite_derivative(Scalar t0, const Vec<Scalar, N>& x0, const Vec<Scalar, N>& d0,
                                  Scalar t1, const Vec<Scalar, N>& x1, const Vec<Scalar, N>& d1,
                                  Scalar t) {
    const Scalar h = t1 - t0;
    const Scalar s = (t - t0) / h;
    const Scalar s2 = s * s;
    return ((6 * s2 - 6 * s) * x0 + (3 * s2 - 4 * s + 1) * h * d0 + (-6 * s2 + 6 * s) * x1 +
            (3 * s2 - 2 * s) * h * d1) /
           h;
}

namespace detail {

template <typename Scalar, int N>
Scalar weighted_max(const Vec<Scalar, N>& v, const Vec<Scalar, N>& a, const Vec<Scalar, N>& b,
                    Scalar abs_tol, Scalar rel_tol) {
    Scalar m = 0;
    for (int i = 0; i < N; ++i) {
        const Scalar w = abs_tol + rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
        m = std::max(m, std::abs(v[i]) / w);
    }
    return m;
}

template <typename Scalar>
int sign_of(Scalar v) {
    return (v > 0) - (v < 0);
}

}  // namespace detail

/// Trapezoidal rule in charge form, q(x1) - q(x0) = h/2·(f(t0,x0) + f(t1,x1)),
/// which conserves every capacitor charge to Newton accuracy. The local error
/// is estimated against a variable-step AB2 predictor (Milne's device).
template <ChargeSystem S>
Trajectory<typename S::Scalar, S::kDim> integrate(
    const S& sys, const typename S::Vector& x_start, typename S::Scalar t_start,
    typename S::Scalar t_end, const SolverSettings& settings,
    const std::vector<EventFn<typename S::Scalar, S::kDim>>& events = {}) {
    using Scalar = typename S::Scalar;
    using Vector = typename S::Vector;
    using Matrix = typename S::Matrix;
    constexpr int N = S::kDim;

    settings.validate();
    if (!(t_end > t_start)) {
        throw InputError("integrate: t_end must exceed the start time");
    }

    auto derivative = [&](Scalar t, const Vector& x) -> Vector {
        return sys.capacitance(x).partialPivLu().solve(sys.forcing(t, x));
    };
    auto evaluate_event = [&](const EventFn<Scalar, N>& e, Scalar t, const Vector& x) {
        const Scalar g = e.fn(t, x);
        if (std::isnan(g)) {
            throw EventError("event '" + e.name + "' returned NaN at t = " + std::to_string(t));
        }
        return g;
    };

    Trajectory<Scalar, N> out;
    Scalar t0 = t_start;
    Vector x0 = x_start;
    Vector d0 = derivative(t0, x0);
    Vector q0 = sys.charge(x0);
    Vector f0 = sys.forcing(t0, x0);
    out.t.push_back(t0);
    out.x.push_back(x0);
    out.dxdt.push_back(d0);

    std::vector<Scalar> g0(events.size());
    for (std::size_t k = 0; k < events.size(); ++k) {
        g0[k] = evaluate_event(events[k], t0, x0);
    }

    bool have_prev = false;
    Scalar h_prev = 0;
    Vector d_prev = d0;

    const Scalar span = t_end - t_start;
    Scalar h = settings.fixed_step ? Scalar(settings.max_step)
                                   : std::min<Scalar>(settings.initial_step, settings.max_step);

    while (t0 < t_end) {
        if (out.accepted + out.rejected > settings.max_steps) {
            throw IntegrationError("integrate: step budget exhausted", t0);
        }
        bool last = false;
        if (t0 + h >= t_end - 1e-12 * span) {
            h = t_end - t0;
            last = true;
        }
        const Scalar t1 = last ? t_end : t0 + h;

        // Newton on R(x) = q(x) - q0 - h/2·(f0 + f(t1, x)).
        Vector x1 = x0 + h * d0;
        bool converged = false;
        for (int it = 0; it < settings.newton_max_iters; ++it) {
            const Vector r = sys.charge(x1) - q0 - Scalar(0.5) * h * (f0 + sys.forcing(t1, x1));
            const Matrix j = sys.capacitance(x1) - Scalar(0.5) * h * sys.conductance(t1, x1);
            const Vector dx = j.partialPivLu().solve(r);
            if (!dx.allFinite()) {
                break;
            }
            x1 -= dx;
            if (detail::weighted_max<Scalar, N>(dx, x0, x1, settings.abs_tol, settings.rel_tol) <
                settings.newton_tol) {
                converged = true;
                break;
            }
        }

        if (!converged || !x1.allFinite()) {
            ++out.rejected;
            if (settings.fixed_step) {
                throw IntegrationError("integrate: Newton failed at fixed step", t0);
            }
            h *= Scalar(0.5);
            if (h < settings.min_step) {
                throw IntegrationError("integrate: Newton failed above the minimum step", t0);
            }
            continue;
        }

        const Vector d1 = derivative(t1, x1);
        Scalar factor = 2;
        if (!settings.fixed_step) {
            Vector lte;
            if (have_prev) {
                const Scalar r = h / h_prev;
                const Vector x_pred =
                    x0 + h * ((1 + r / 2) * d0 - (r / 2) * d_prev);
                lte = (x1 - x_pred) * (h / (3 * (h + h_prev)));
            } else {
                lte = (x1 - (x0 + h * d0)) / 2;
            }
            Scalar err =
                detail::weighted_max<Scalar, N>(lte, x0, x1, settings.abs_tol, settings.rel_tol);
            // The local error is O(h^3), per unit step O(h^2). The Euler-based
            // start-up estimate stays on the local test.
            Scalar order = 3;
            if (settings.error_per_unit_step && have_prev) {
                // Capped so a kink in the device curves (local error ~h or h^2)
                // cannot collapse the step.
                err *= std::min<Scalar>(span / h, Scalar(1e4));
                order = 2;
            }
            factor = err > 0 ? Scalar(0.9) * std::pow(err, Scalar(-1) / order) : Scalar(2);
            factor = std::clamp<Scalar>(factor, Scalar(0.2), Scalar(2));
            if (err > 1) {
                ++out.rejected;
                h *= factor;
                if (h < settings.min_step) {
                    throw IntegrationError("integrate: error control drove the step below min_step",
                                           t0);
                }
                continue;
            }
        }

        // Accepted: localize events on the dense interpolant.
        for (std::size_t k = 0; k < events.size(); ++k) {
            const Scalar g1 = evaluate_event(events[k], t1, x1);
            const int s0 = detail::sign_of(g0[k]);
            const int s1 = detail::sign_of(g1);
            if (s0 != 0 && s1 != s0) {
                Scalar lo = t0;
                Scalar hi = t1;
                while (hi - lo > settings.event_tol) {
                    const Scalar mid = Scalar(0.5) * (lo + hi);
                    const Vector xm = hermite<Scalar, N>(t0, x0, d0, t1, x1, d1, mid);
                    const int sm = detail::sign_of(evaluate_event(events[k], mid, xm));
                    if (sm == s0) {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                out.markers.push_back(Marker{events[k].name, Scalar(0.5) * (lo + hi), s0 < 0 ? 1 : -1});
            }
            // A sample landing exactly on zero counts as having crossed.
            g0[k] = s1 != 0 ? g1 : -g0[k];
        }

        ++out.accepted;
        have_prev = true;
        h_prev = h;
        d_prev = d0;
        t0 = t1;
        x0 = x1;
        d0 = d1;
        q0 = sys.charge(x1);
        f0 = sys.forcing(t1, x1);
        out.t.push_back(t0);
        out.x.push_back(x0);
        out.dxdt.push_back(d0);

        if (settings.fixed_step) {
            h = settings.max_step;
        } else {
            h = std::min<Scalar>(h * factor, settings.max_step);
            h = std::max<Scalar>(h, settings.min_step);
        }
    }

    std::stable_sort(out.markers.begin(), out.markers.end(),
                     [](const Marker& a, const Marker& b) { return a.t < b.t; });
    return out;
}

// --- Half-bridge traces ----------------------------------------------------

using CircuitEvent = EventFn<Real, CircuitSystem::kDim>;

struct WaveformTrace {
    std::vector<Real> t;
    std::vector<CircuitState> states;
    std::vector<CircuitSystem::Vector> x;
    std::vector<CircuitSystem::Vector> dxdt;
    std::vector<BranchCurrents> currents;
    std::vector<Marker> markers;

    std::shared_ptr<const CircuitSystem> system;
    std::string config_hash;
    SolverSettings settings;
    long accepted_steps = 0;
    long rejected_steps = 0;

    [[nodiscard]] std::size_t size() const { return t.size(); }
    [[nodiscard]] bool empty() const { return t.empty(); }
    [[nodiscard]] Real t_begin() const { return t.front(); }
    [[nodiscard]] Real t_end() const { return t.back(); }

    /// Dense-output state at time t (clamped to the trace span).
    [[nodiscard]] CircuitSystem::Vector state_at(Real time) const;
    [[nodiscard]] CircuitSystem::Vector derivative_at(Real time) const;
    /// Branch currents at time t from the dense output.
    [[nodiscard]] BranchCurrents currents_at(Real time) const;
    /// First marker with the given name, or nullptr.
    [[nodiscard]] const Marker* find_marker(const std::string& name) const;
};

/// Extracts one quantity per sample.
template <typename F>
std::vector<Real> series(const WaveformTrace& trace, F&& f) {
    std::vector<Real> out;
    out.reserve(trace.size());
    for (std::size_t i = 0; i < trace.size(); ++i) {
        out.push_back(f(trace.states[i], trace.currents[i]));
    }
    return out;
}

/// Events registered on every half-bridge run: the v_th crossing of S1's gate and
/// the current equalities the phase segmentation brackets.
[[nodiscard]] std::vector<CircuitEvent> standard_events(const CircuitSystem& sys);

[[nodiscard]] WaveformTrace make_trace(std::shared_ptr<const CircuitSystem> sys,
                                       const Trajectory<Real, CircuitSystem::kDim>& traj,
                                       const SolverSettings& settings, std::string config_hash);

/// Assemble and integrate from the gate step at t = 0 to t_end.
[[nodiscard]] WaveformTrace simulate(const HalfBridgeConfig& config, const SolverSettings& settings,
                                     Real t_end, std::vector<CircuitEvent> extra_events = {});

/// Uniform resampling on the dense output; markers are kept.
[[nodiscard]] WaveformTrace resample(const WaveformTrace& trace, Real dt);

}  // namespace turnon
