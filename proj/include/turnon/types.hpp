#pragma once

#include <Eigen/Dense>

#include <limits>

namespace turnon {

using Real = double;

/// Sentinel returned by r_s() for a blocking channel.
inline constexpr Real kInfiniteResistance = std::numeric_limits<Real>::infinity();

template <typename Scalar, int N>
using Vec = Eigen::Matrix<Scalar, N, 1>;

template <typename Scalar, int N>
using Mat = Eigen::Matrix<Scalar, N, N>;

/// Closed time interval [start, end] in seconds.
struct Window {
    Real start = 0.0;
    Real end = 0.0;

    [[nodiscard]] Real length() const { return end - start; }
    [[nodiscard]] bool contains(Real t) const { return t >= start && t <= end; }
};

}  // namespace turnon
