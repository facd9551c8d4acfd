#pragma once

// Per-row bodies shared by the serial and OpenMP kernels.

#include <cmath>
#include <cstddef>
#include <span>

#include "fracfund/kernels.hpp"

namespace fracfund::kernels::detail {

inline double offset_value(const LatticeView& nodes, const OffsetTable& t, std::size_t i,
                           std::size_t j) noexcept {
    const int n = nodes.n;
    const auto* a = nodes.coords.data() + i * n;
    const auto* b = nodes.coords.data() + j * n;
    return t.values[t.flat(b[0] - a[0], b[1] - a[1], n == 3 ? b[2] - a[2] : 0)];
}

inline double matvec_row(std::span<const double> A, std::size_t m, std::span<const double> x,
                         std::size_t i) noexcept {
    const double* row = A.data() + i * m;
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) acc += row[j] * x[j];
    return acc;
}

inline void assemble_row(const LatticeView& nodes, const OffsetTable& G, double scale,
                         std::span<const double> diag, std::span<double> A, std::size_t i) noexcept {
    const std::size_t m = nodes.size();
    double* row = A.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
        row[j] = (i == j) ? diag[i] : -scale * offset_value(nodes, G, i, j);
    }
}

inline double neighbour_row(const LatticeView& nodes, const OffsetTable& G, std::size_t i) noexcept {
    const std::size_t m = nodes.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j != i) acc += offset_value(nodes, G, i, j);
    }
    return acc;
}

// Row i of the symmetric double sum; each unordered pair is visited twice, hence 1/2.
inline double form_row(const LatticeView& nodes, const OffsetTable& G, std::span<const double> ext,
                       std::span<const double> u, std::span<const double> v, std::size_t i) noexcept {
    const std::size_t m = nodes.size();
    double acc = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        acc += (u[i] - u[j]) * (v[i] - v[j]) * offset_value(nodes, G, i, j);
    }
    return 0.5 * acc + u[i] * v[i] * ext[i];
}

inline double power_row(const LatticeView& nodes, const OffsetTable& T, std::span<const double> u,
                        double p, std::size_t i) noexcept {
    const std::size_t m = nodes.size();
    double acc = 0.0;
    if (p == 1.0) {
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) acc += std::abs(u[i] - u[j]) * offset_value(nodes, T, i, j);
        }
    } else if (p == 2.0) {
        for (std::size_t j = 0; j < m; ++j) {
            if (j == i) continue;
            const double d = u[i] - u[j];
            acc += d * d * offset_value(nodes, T, i, j);
        }
    } else {
        for (std::size_t j = 0; j < m; ++j) {
            if (j != i) acc += std::pow(std::abs(u[i] - u[j]), p) * offset_value(nodes, T, i, j);
        }
    }
    return acc;
}

inline double ordered_sum(std::span<const double> partial) noexcept {
    double total = 0.0;
    for (double v : partial) total += v;
    return total;
}

}  // namespace fracfund::kernels::detail
