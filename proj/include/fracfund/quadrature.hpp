#pragma once

#include <functional>
#include <span>
#include <vector>

namespace fracfund::quad {

/// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Cached Gauss-Legendre rule with `order` points, 1 <= order <= 64.
const GaussRule& gauss_legendre(int order);

/// Fixed-order Gauss-Legendre on [a, b].
double gauss(const std::function<double(double)>& f, double a, double b, int order);

struct Estimate {
    double value = 0.0;
    double error = 0.0;
};

/// Recursive bisection with a Gauss-Legendre pair (order, 2 x order on halves).
/// Stops when the local error falls below max(abs_tol, rel_tol * |value|) or
/// `max_depth` is reached; the returned error is the sum of local estimates.
Estimate adaptive(const std::function<double(double)>& f, double a, double b,
                  double rel_tol, double abs_tol = 0.0, int order = 10, int max_depth = 40);

/// Geometric panels [a + (b-a) q^{j+1}, a + (b-a) q^j], j = 0..levels-1, graded
/// toward `a`. Returned as a list of breakpoints from the innermost to `b`.
std::vector<double> graded_toward(double a, double b, int levels, double ratio = 0.5);

/// Tensor-product Gauss-Legendre integral over an axis-aligned box in `dim`
/// dimensions (1..3), split into `splits` equal sub-boxes per axis.
double box_gauss(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> lo, std::span<const double> hi, int order,
                 int splits = 1);

/// Adaptive tensor-product integral over a box: each box is compared with its
/// 2^dim children until the difference drops below the tolerance.
double box_adaptive(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> lo, std::span<const double> hi, double rel_tol,
                    int order = 8, int max_depth = 12);

}  // namespace fracfund::quad
