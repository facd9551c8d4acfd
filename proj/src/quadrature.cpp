#include "fracfund/quadrature.hpp"

#include <array>
#include <cassert>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace fracfund::quad {

namespace {

GaussRule build_rule(int m) {
    GaussRule rule;
    rule.nodes.resize(m);
    rule.weights.resize(m);
    for (int i = 0; i < (m + 1) / 2; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < m; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            dp = m * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < m; ++j) {
            const double p3 = p2;
            p2 = p1;
            p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        dp = m * (z * p1 - p2) / (z * z - 1.0);
        rule.nodes[i] = -z;
        rule.nodes[m - 1 - i] = z;
        rule.weights[i] = rule.weights[m - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return rule;
}

constexpr int kMaxOrder = 64;

Estimate adaptive_rec(const std::function<double(double)>& f, double a, double b, double whole,
                      double rel_tol, double abs_tol, int order, int depth) {
    const double mid = 0.5 * (a + b);
    const double left = gauss(f, a, mid, order);
    const double right = gauss(f, mid, b, order);
    const double refined = left + right;
    const double err = std::abs(refined - whole);
    if (depth <= 0 || err <= std::max(abs_tol, rel_tol * std::abs(refined)) ||
        std::abs(b - a) < 1e-300) {
        return {refined, err};
    }
    const Estimate l = adaptive_rec(f, a, mid, left, rel_tol, abs_tol * 0.5, order, depth - 1);
    const Estimate r = adaptive_rec(f, mid, b, right, rel_tol, abs_tol * 0.5, order, depth - 1);
    return {l.value + r.value, l.error + r.error};
}

double box_rec(const std::function<double(std::span<const double>)>& f,
               std::span<const double> lo, std::span<const double> hi, double whole,
               double rel_tol, int order, int depth) {
    const std::size_t dim = lo.size();
    const int children = 1 << dim;
    std::array<double, 3> clo{}, chi{};
    std::array<double, 8> parts{};
    double refined = 0.0;
    for (int c = 0; c < children; ++c) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double mid = 0.5 * (lo[d] + hi[d]);
            const bool upper = (c >> d) & 1;
            clo[d] = upper ? mid : lo[d];
            chi[d] = upper ? hi[d] : mid;
        }
        parts[c] = box_gauss(f, std::span<const double>(clo.data(), dim),
                             std::span<const double>(chi.data(), dim), order);
        refined += parts[c];
    }
    if (depth <= 0 || std::abs(refined - whole) <= rel_tol * std::abs(refined)) return refined;
    double total = 0.0;
    for (int c = 0; c < children; ++c) {
        for (std::size_t d = 0; d < dim; ++d) {
            const double mid = 0.5 * (lo[d] + hi[d]);
            const bool upper = (c >> d) & 1;
            clo[d] = upper ? mid : lo[d];
            chi[d] = upper ? hi[d] : mid;
        }
        const std::array<double, 3> sub_lo = clo, sub_hi = chi;
        total += box_rec(f, std::span<const double>(sub_lo.data(), dim),
                         std::span<const double>(sub_hi.data(), dim), parts[c], rel_tol, order,
                         depth - 1);
    }
    return total;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
    static const std::vector<GaussRule> rules = [] {
        std::vector<GaussRule> all(kMaxOrder + 1);
        for (int m = 1; m <= kMaxOrder; ++m) all[m] = build_rule(m);
        return all;
    }();
    if (order < 1 || order > kMaxOrder) throw std::out_of_range("gauss_legendre: order out of range");
    return rules[order];
}

double gauss(const std::function<double(double)>& f, double a, double b, int order) {
    const GaussRule& rule = gauss_legendre(order);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
    }
    return sum * half;
}

Estimate adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                  double abs_tol, int order, int max_depth) {
    const double whole = gauss(f, a, b, order);
    // A purely local relative test never settles where f vanishes to all
    // orders; the coarse estimate supplies an absolute floor.
    const double floor = 1e-3 * rel_tol * std::abs(gauss(f, a, b, 2 * order));
    return adaptive_rec(f, a, b, whole, rel_tol, std::max(abs_tol, floor), order, max_depth);
}

std::vector<double> graded_toward(double a, double b, int levels, double ratio) {
    std::vector<double> breaks;
    breaks.reserve(levels + 1);
    double scale = std::pow(ratio, levels);
    for (int j = levels; j >= 0; --j) {
        breaks.push_back(a + (b - a) * scale);
        scale /= ratio;
    }
    breaks.back() = b;
    return breaks;
}

double box_gauss(const std::function<double(std::span<const double>)>& f,
                 std::span<const double> lo, std::span<const double> hi, int order, int splits) {
    const std::size_t dim = lo.size();
    assert(dim >= 1 && dim <= 3 && hi.size() == dim);
    const GaussRule& rule = gauss_legendre(order);
    const int m = order * splits;
    // Flattened 1D abscissae/weights per axis.
    std::array<std::vector<double>, 3> xs, ws;
    for (std::size_t d = 0; d < dim; ++d) {
        xs[d].resize(m);
        ws[d].resize(m);
        const double width = (hi[d] - lo[d]) / splits;
        for (int p = 0; p < splits; ++p) {
            const double a = lo[d] + p * width;
            for (int i = 0; i < order; ++i) {
                xs[d][p * order + i] = a + 0.5 * width * (rule.nodes[i] + 1.0);
                ws[d][p * order + i] = 0.5 * width * rule.weights[i];
            }
        }
    }
    std::array<double, 3> pt{};
    const std::span<const double> view(pt.data(), dim);
    double sum = 0.0;
    if (dim == 1) {
        for (int i = 0; i < m; ++i) {
            pt[0] = xs[0][i];
            sum += ws[0][i] * f(view);
        }
    } else if (dim == 2) {
        for (int i = 0; i < m; ++i) {
            pt[0] = xs[0][i];
            double inner = 0.0;
            for (int j = 0; j < m; ++j) {
                pt[1] = xs[1][j];
                inner += ws[1][j] * f(view);
            }
            sum += ws[0][i] * inner;
        }
    } else {
        for (int i = 0; i < m; ++i) {
            pt[0] = xs[0][i];
            double mid = 0.0;
            for (int j = 0; j < m; ++j) {
                pt[1] = xs[1][j];
                double inner = 0.0;
                for (int k = 0; k < m; ++k) {
                    pt[2] = xs[2][k];
                    inner += ws[2][k] * f(view);
                }
                mid += ws[1][j] * inner;
            }
            sum += ws[0][i] * mid;
        }
    }
    return sum;
}

double box_adaptive(const std::function<double(std::span<const double>)>& f,
                    std::span<const double> lo, std::span<const double> hi, double rel_tol,
                    int order, int max_depth) {
    const double whole = box_gauss(f, lo, hi, order);
    return box_rec(f, lo, hi, whole, rel_tol, order, max_depth);
}

}  // namespace fracfund::quad
