#include <omp.h>

#include <cstdint>
#include <vector>

#include "fracfund/kernels.hpp"
#include "rows.hpp"

namespace fracfund::kernels::omp {

namespace {
using Index = std::int64_t;
}

void dense_matvec(std::span<const double> A, std::size_t m, std::span<const double> x,
                  std::span<double> y) {
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < static_cast<Index>(m); ++i) {
        y[static_cast<std::size_t>(i)] = detail::matvec_row(A, m, x, static_cast<std::size_t>(i));
    }
}

void assemble_dense(const LatticeView& nodes, const OffsetTable& G, double scale,
                    std::span<const double> diag, std::span<double> A) {
    const Index m = static_cast<Index>(nodes.size());
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < m; ++i) {
        detail::assemble_row(nodes, G, scale, diag, A, static_cast<std::size_t>(i));
    }
}

void neighbour_sums(const LatticeView& nodes, const OffsetTable& G, std::span<double> out) {
    const Index m = static_cast<Index>(nodes.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (Index i = 0; i < m; ++i) {
        out[static_cast<std::size_t>(i)] = detail::neighbour_row(nodes, G, static_cast<std::size_t>(i));
    }
}

double pairwise_form(const LatticeView& nodes, const OffsetTable& G, std::span<const double> ext,
                     std::span<const double> u, std::span<const double> v) {
    const Index m = static_cast<Index>(nodes.size());
    std::vector<double> partial(nodes.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (Index i = 0; i < m; ++i) {
        partial[static_cast<std::size_t>(i)] =
            detail::form_row(nodes, G, ext, u, v, static_cast<std::size_t>(i));
    }
    return detail::ordered_sum(partial);
}

double power_difference_sum(const LatticeView& nodes, const OffsetTable& T,
                            std::span<const double> u, double p) {
    const Index m = static_cast<Index>(nodes.size());
    std::vector<double> partial(nodes.size());
#pragma omp parallel for schedule(dynamic, 64)
    for (Index i = 0; i < m; ++i) {
        partial[static_cast<std::size_t>(i)] =
            detail::power_row(nodes, T, u, p, static_cast<std::size_t>(i));
    }
    return detail::ordered_sum(partial);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fracfund::kernels::omp
