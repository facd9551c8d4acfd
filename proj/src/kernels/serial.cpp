#include <vector>

#include "fracfund/kernels.hpp"
#include "rows.hpp"

namespace fracfund::kernels::serial {

void dense_matvec(std::span<const double> A, std::size_t m, std::span<const double> x,
                  std::span<double> y) {
    for (std::size_t i = 0; i < m; ++i) y[i] = detail::matvec_row(A, m, x, i);
}

void assemble_dense(const LatticeView& nodes, const OffsetTable& G, double scale,
                    std::span<const double> diag, std::span<double> A) {
    for (std::size_t i = 0; i < nodes.size(); ++i) detail::assemble_row(nodes, G, scale, diag, A, i);
}

void neighbour_sums(const LatticeView& nodes, const OffsetTable& G, std::span<double> out) {
    for (std::size_t i = 0; i < nodes.size(); ++i) out[i] = detail::neighbour_row(nodes, G, i);
}

double pairwise_form(const LatticeView& nodes, const OffsetTable& G, std::span<const double> ext,
                     std::span<const double> u, std::span<const double> v) {
    std::vector<double> partial(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) partial[i] = detail::form_row(nodes, G, ext, u, v, i);
    return detail::ordered_sum(partial);
}

double power_difference_sum(const LatticeView& nodes, const OffsetTable& T,
                            std::span<const double> u, double p) {
    std::vector<double> partial(nodes.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) partial[i] = detail::power_row(nodes, T, u, p, i);
    return detail::ordered_sum(partial);
}

}  // namespace fracfund::kernels::serial
