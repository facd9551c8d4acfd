#pragma once

#include <array>
#include <vector>

#include "fracfund/grid.hpp"
#include "fracfund/kernel.hpp"
#include "fracfund/kernels.hpp"

namespace fracfund {

/// Integrals of K over the unit lattice cells k + [-1/2, 1/2]^n. Every kernel
/// family here is homogeneous of degree -n-2s, so on a lattice of spacing h the
/// same numbers scale by h^{-2s} (cell masses) and h^{2-2s} (second moments).
struct CellMoments {
    /// Integral of K outside the self cell.
    double outside = 0.0;
    /// Integral of y_j^2 K(y) over the self cell, per axis.
    std::array<double, 3> second{0.0, 0.0, 0.0};
};

/// Self-cell moments, by splitting the cube into pyramids over its faces.
CellMoments self_cell_moments(const Kernel& k);

/// Integral of K over the unit cell centred at lattice offset k != 0.
double cell_mass(const Kernel& k, const LatticeIndex& offset);

/// Coupling table of the pairwise form on the unit lattice:
///   G(k) = cell_mass(k) + [k = +-e_j] * second_j / 2,   G(0) = 0,
/// for |k_i| <= extent. The second-moment term is the self-cell contribution
/// of a first-order Taylor expansion, attached to nearest-neighbour edges.
class KernelStencil {
public:
    KernelStencil(const Kernel& k, int extent);

    int n() const noexcept { return n_; }
    int extent() const noexcept { return extent_; }
    const CellMoments& moments() const noexcept { return moments_; }

    /// Row sum of G over the whole lattice: outside + sum_j second_j.
    double total() const noexcept { return total_; }

    std::span<const double> values() const noexcept { return values_; }
    kernels::OffsetTable table() const noexcept { return {n_, extent_, values_}; }
    double at(const LatticeIndex& k) const noexcept;

private:
    int n_;
    int extent_;
    CellMoments moments_;
    double total_;
    std::vector<double> values_;
};

}  // namespace fracfund
