#pragma once

// Small numerical kernels shared by the device, energy and solver layers:
// shape-preserving cubic interpolation, quadrature and scalar root bracketing.

#include "turnon/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace turnon::numerics {

enum class Extrapolation { Clamp, Linear };

/// Monotone piecewise-cubic Hermite interpolant (PCHIP slopes).
///
/// Between two samples the interpolant never leaves the range spanned by the
/// two sample values, so monotone or positive data stays monotone or positive.
template <typename Scalar>
class MonotoneCubic {
public:
    MonotoneCubic() = default;

    MonotoneCubic(std::vector<Scalar> x, std::vector<Scalar> y,
                  Extrapolation extrapolation = Extrapolation::Clamp)
        : x_(std::move(x)), y_(std::move(y)), extrapolation_(extrapolation) {
        if (x_.size() != y_.size() || x_.size() < 2) {
            throw ConfigError("monotone cubic needs at least two (x, y) samples");
        }
        for (std::size_t k = 1; k < x_.size(); ++k) {
            if (!(x_[k] > x_[k - 1])) {
                throw ConfigError("monotone cubic abscissae must be strictly increasing");
            }
        }
        compute_slopes();
    }

    [[nodiscard]] std::size_t size() const { return x_.size(); }
    [[nodiscard]] const std::vector<Scalar>& x() const { return x_; }
    [[nodiscard]] const std::vector<Scalar>& y() const { return y_; }
    [[nodiscard]] const std::vector<Scalar>& slopes() const { return d_; }
    [[nodiscard]] Scalar front() const { return x_.front(); }
    [[nodiscard]] Scalar back() const { return x_.back(); }

    [[nodiscard]] Scalar operator()(Scalar v) const {
        if (v <= x_.front()) {
            return extrapolation_ == Extrapolation::Clamp ? y_.front()
                                                          : y_.front() + d_.front() * (v - x_.front());
        }
        if (v >= x_.back()) {
            return extrapolation_ == Extrapolation::Clamp ? y_.back()
                                                          : y_.back() + d_.back() * (v - x_.back());
        }
        const std::size_t k = interval(v);
        const Scalar h = x_[k + 1] - x_[k];
        const Scalar s = (v - x_[k]) / h;
        const Scalar s2 = s * s;
        const Scalar s3 = s2 * s;
        const Scalar h00 = 2 * s3 - 3 * s2 + 1;
        const Scalar h10 = s3 - 2 * s2 + s;
        const Scalar h01 = -2 * s3 + 3 * s2;
        const Scalar h11 = s3 - s2;
        return h00 * y_[k] + h10 * h * d_[k] + h01 * y_[k + 1] + h11 * h * d_[k + 1];
    }

    [[nodiscard]] Scalar derivative(Scalar v) const {
        if (v < x_.front()) {
            return extrapolation_ == Extrapolation::Clamp ? Scalar(0) : d_.front();
        }
        if (v > x_.back()) {
            return extrapolation_ == Extrapolation::Clamp ? Scalar(0) : d_.back();
        }
        const std::size_t k = interval(v);
        const Scalar h = x_[k + 1] - x_[k];
        const Scalar s = (v - x_[k]) / h;
        const Scalar s2 = s * s;
        const Scalar dh00 = (6 * s2 - 6 * s) / h;
        const Scalar dh10 = 3 * s2 - 4 * s + 1;
        const Scalar dh01 = (-6 * s2 + 6 * s) / h;
        const Scalar dh11 = 3 * s2 - 2 * s;
        return dh00 * y_[k] + dh10 * d_[k] + dh01 * y_[k + 1] + dh11 * d_[k + 1];
    }

    /// Index k of the knot interval [x_k, x_{k+1}] containing v (clamped).
    [[nodiscard]] std::size_t interval(Scalar v) const {
        const auto it = std::upper_bound(x_.begin(), x_.end(), v);
        const auto k = static_cast<std::size_t>(std::distance(x_.begin(), it));
        return std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, x_.size() - 2);
    }

private:
    void compute_slopes() {
        const std::size_t n = x_.size();
        d_.assign(n, Scalar(0));
        std::vector<Scalar> h(n - 1);
        std::vector<Scalar> delta(n - 1);
        for (std::size_t k = 0; k + 1 < n; ++k) {
            h[k] = x_[k + 1] - x_[k];
            delta[k] = (y_[k + 1] - y_[k]) / h[k];
        }
        if (n == 2) {
            d_[0] = d_[1] = delta[0];
            return;
        }
        for (std::size_t k = 1; k + 1 < n; ++k) {
            if (delta[k - 1] * delta[k] <= 0) {
                d_[k] = 0;
                continue;
            }
            const Scalar w1 = 2 * h[k] + h[k - 1];
            const Scalar w2 = h[k] + 2 * h[k - 1];
            d_[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
        }
        d_[0] = edge_slope(h[0], h[1], delta[0], delta[1]);
        d_[n - 1] = edge_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    }

    static Scalar edge_slope(Scalar h0, Scalar h1, Scalar m0, Scalar m1) {
        Scalar d = ((2 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
        if (d * m0 <= 0) {
            d = 0;
        } else if (m0 * m1 <= 0 && std::abs(d) > std::abs(3 * m0)) {
            d = 3 * m0;
        }
        return d;
    }

    std::vector<Scalar> x_;
    std::vector<Scalar> y_;
    std::vector<Scalar> d_;
    Extrapolation extrapolation_ = Extrapolation::Clamp;
};

/// Three-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree <= 5.
template <typename Scalar, typename F>
Scalar gauss_legendre3(F&& f, Scalar a, Scalar b) {
    constexpr std::array<double, 3> nodes{-0.7745966692414833770, 0.0, 0.7745966692414833770};
    constexpr std::array<double, 3> weights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    const Scalar mid = (a + b) / 2;
    const Scalar half = (b - a) / 2;
    Scalar sum = 0;
    for (std::size_t k = 0; k < 3; ++k) {
        sum += Scalar(weights[k]) * f(mid + half * Scalar(nodes[k]));
    }
    return sum * half;
}

namespace detail {

template <typename Scalar, typename F>
Scalar simpson_recurse(F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb, Scalar whole,
                       Scalar tol, int depth) {
    const Scalar m = (a + b) / 2;
    const Scalar lm = (a + m) / 2;
    const Scalar rm = (m + b) / 2;
    const Scalar flm = f(lm);
    const Scalar frm = f(rm);
    const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
    const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
    const Scalar delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15 * tol) {
        return left + right + delta / 15;
    }
    return simpson_recurse(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
           simpson_recurse(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
///
/// `rel_tol` is relative to a coarse estimate of the integral of |f|; `abs_floor`
/// stops refinement on integrals that are essentially zero.
template <typename Scalar, typename F>
Scalar adaptive_simpson(F&& f, Scalar a, Scalar b, Scalar rel_tol = Scalar(1e-9),
                        Scalar abs_floor = Scalar(0), int max_depth = 40) {
    if (a == b) {
        return Scalar(0);
    }
    const Scalar fa = f(a);
    const Scalar fm = f((a + b) / 2);
    const Scalar fb = f(b);
    const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
    const Scalar scale = std::abs(b - a) / 6 * (std::abs(fa) + 4 * std::abs(fm) + std::abs(fb));
    const Scalar tol = std::max(rel_tol * scale, abs_floor);
    return detail::simpson_recurse(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

/// Composite adaptive Simpson over consecutive breakpoints (e.g. interpolant knots).
template <typename Scalar, typename F>
Scalar composite_simpson(F&& f, std::span<const Scalar> breakpoints, Scalar rel_tol = Scalar(1e-9)) {
    Scalar total = 0;
    for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
        total += adaptive_simpson(f, breakpoints[k], breakpoints[k + 1], rel_tol);
    }
    return total;
}

/// Bisection root of a function with a sign change on [lo, hi].
template <typename Scalar, typename F>
Scalar bisect(F&& f, Scalar lo, Scalar hi, Scalar x_tol, int max_iter = 200) {
    Scalar flo = f(lo);
    const Scalar fhi = f(hi);
    if (flo == 0) {
        return lo;
    }
    if (fhi == 0) {
        return hi;
    }
    if ((flo < 0) == (fhi < 0)) {
        throw InputError("bisect: no sign change on the bracket");
    }
    for (int it = 0; it < max_iter && (hi - lo) > x_tol; ++it) {
        const Scalar mid = (lo + hi) / 2;
        const Scalar fm = f(mid);
        if (fm == 0) {
            return mid;
        }
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

/// Trapezoid rule over sampled data.
template <typename Scalar>
Scalar trapezoid(std::span<const Scalar> t, std::span<const Scalar> y) {
    Scalar sum = 0;
    for (std::size_t k = 1; k < t.size(); ++k) {
        sum += (t[k] - t[k - 1]) * (y[k] + y[k - 1]) / 2;
    }
    return sum;
}

}  // namespace turnon::numerics
