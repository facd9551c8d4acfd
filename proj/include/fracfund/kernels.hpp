#pragma once

// Data-parallel inner loops of the library. Every routine exists twice: a plain
// serial reference and an OpenMP version with the same summation order (per-row
// partials reduced in row order afterwards), so both produce bit-identical
// results. Tests compare the two; bench/ times them.

#include <cstddef>
#include <cstdint>
#include <span>

namespace fracfund::kernels {

/// Integer lattice coordinates of a node set, flattened count x n.
struct LatticeView {
    int n = 2;
    std::span<const std::int32_t> coords;

    std::size_t size() const noexcept { return coords.size() / static_cast<std::size_t>(n); }
};

/// Values indexed by a lattice offset k with |k_i| <= extent (a Toeplitz symbol).
struct OffsetTable {
    int n = 2;
    int extent = 0;
    std::span<const double> values;

    std::size_t flat(int k0, int k1, int k2) const noexcept {
        const std::size_t w = 2 * static_cast<std::size_t>(extent) + 1;
        std::size_t f = static_cast<std::size_t>(k0 + extent) * w + static_cast<std::size_t>(k1 + extent);
        if (n == 3) f = f * w + static_cast<std::size_t>(k2 + extent);
        return f;
    }
};

namespace serial {

/// y = A x for a dense row-major m x m matrix.
void dense_matvec(std::span<const double> A, std::size_t m, std::span<const double> x,
                  std::span<double> y);

/// A_ii = diag_i, A_ij = -scale * G(k_j - k_i).
void assemble_dense(const LatticeView& nodes, const OffsetTable& G, double scale,
                    std::span<const double> diag, std::span<double> A);

/// out_i = sum_{j != i} G(k_j - k_i).
void neighbour_sums(const LatticeView& nodes, const OffsetTable& G, std::span<double> out);

/// 1/2 sum_{i != j} (u_i - u_j)(v_i - v_j) G(k_i - k_j) + sum_i u_i v_i ext_i.
double pairwise_form(const LatticeView& nodes, const OffsetTable& G, std::span<const double> ext,
                     std::span<const double> u, std::span<const double> v);

/// sum_{i != j} |u_i - u_j|^p T(k_i - k_j).
double power_difference_sum(const LatticeView& nodes, const OffsetTable& T,
                            std::span<const double> u, double p);

}  // namespace serial

namespace omp {

void dense_matvec(std::span<const double> A, std::size_t m, std::span<const double> x,
                  std::span<double> y);
void assemble_dense(const LatticeView& nodes, const OffsetTable& G, double scale,
                    std::span<const double> diag, std::span<double> A);
void neighbour_sums(const LatticeView& nodes, const OffsetTable& G, std::span<double> out);
double pairwise_form(const LatticeView& nodes, const OffsetTable& G, std::span<const double> ext,
                     std::span<const double> u, std::span<const double> v);
double power_difference_sum(const LatticeView& nodes, const OffsetTable& T,
                            std::span<const double> u, double p);

/// Threads OpenMP will use for the routines above.
int max_threads();

}  // namespace omp

}  // namespace fracfund::kernels
