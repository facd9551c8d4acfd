#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracfund/grid.hpp"

namespace testing {

/// c_{n,s} = s 4^s Gamma(n/2 + s) / (pi^{n/2} Gamma(1 - s)).
inline double closed_form_c(int n, double s) {
    return s * std::pow(4.0, s) * std::tgamma(0.5 * n + s) /
           (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
inline double sphere(int n) { return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n); }

inline double norm(const fracfund::Point& x, int n) {
    double r = 0.0;
    for (int d = 0; d < n; ++d) r += x[d] * x[d];
    return std::sqrt(r);
}

inline double max_abs(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace testing
