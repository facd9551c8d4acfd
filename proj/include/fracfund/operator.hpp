#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fracfund/grid.hpp"
#include "fracfund/kernel.hpp"
#include "fracfund/stencil.hpp"

namespace fracfund {

/// y = T * x on the active nodes for a Toeplitz offset table T with T(0)
/// ignored, through a zero-padded FFT convolution over the grid's cube.
class ToeplitzConvolution {
public:
    ToeplitzConvolution(const Grid& grid, const kernels::OffsetTable& table);
    ~ToeplitzConvolution();
    ToeplitzConvolution(const ToeplitzConvolution&) = delete;
    ToeplitzConvolution& operator=(const ToeplitzConvolution&) = delete;

    /// out_i = sum_{j != i} T(k_j - k_i) x_j over active nodes.
    void apply(std::span<const double> x, std::span<double> out) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

enum class Storage { dense, matrix_free };
std::string to_string(Storage storage);

struct AssemblyOptions {
    /// Dense storage at or below this many active nodes, matrix-free above.
    std::size_t dense_limit = 5000;
    /// Use the OpenMP kernels; false selects the serial reference.
    bool parallel = true;
};

/// Discrete form of <u, v>_K + int V u v on the active nodes of a grid:
///   A_ii = h^n (D + V_i),   A_ij = -h^n G(k_j - k_i),
/// with G = h^{-2s} * stencil table and D = h^{-2s} * stencil total. Rows are
/// diagonally dominant with nonpositive off-diagonals. For fields u, v vanishing
/// outside B_R, <Au, v> = (1/2) sum_{i != j} h^n G (u_i - u_j)(v_i - v_j)
///                       + sum_i h^n (E_i + V_i) u_i v_i,
/// where E_i = D - sum_{active j != i} G is the weight of the exterior.
class AssembledOperator {
public:
    AssembledOperator(const Kernel& k, const Potential& V, GridPtr grid,
                      const AssemblyOptions& options = {});
    ~AssembledOperator();
    AssembledOperator(AssembledOperator&&) noexcept;

    const Grid& grid() const noexcept { return *grid_; }
    const GridPtr& grid_ptr() const noexcept { return grid_; }
    const Kernel& kernel() const noexcept { return kernel_; }
    const Potential& potential() const noexcept { return potential_; }
    const KernelStencil& stencil() const noexcept { return *stencil_; }
    Storage storage() const noexcept { return storage_; }
    std::size_t size() const noexcept { return grid_->active_count(); }

    /// Potential samples V_i.
    std::span<const double> potential_samples() const noexcept { return potential_samples_; }
    /// Diagonal h^n (D + V_i).
    std::span<const double> diagonal() const noexcept { return diagonal_; }
    /// Exterior weights h^n E_i.
    std::span<const double> exterior_weights() const noexcept { return exterior_; }
    /// h^{-2s}, the factor between unit-lattice stencil values and G.
    double kernel_scale() const noexcept { return kernel_scale_; }

    void apply(std::span<const double> x, std::span<double> y) const;
    DiscreteField apply(const DiscreteField& u) const;

    /// <Au, v>.
    double form(std::span<const double> u, std::span<const double> v) const;
    /// <u, v>_K, the form without the potential term.
    double kernel_form(std::span<const double> u, std::span<const double> v) const;
    /// int V u v = h^n sum V_i u_i v_i.
    double mass_form(std::span<const double> u, std::span<const double> v) const;

    /// Row-major dense copy (tests and small grids only).
    std::vector<double> to_dense() const;

private:
    Kernel kernel_;
    Potential potential_;
    GridPtr grid_;
    AssemblyOptions options_;
    Storage storage_;
    std::unique_ptr<KernelStencil> stencil_;
    double kernel_scale_;
    std::vector<double> potential_samples_;
    std::vector<double> diagonal_;
    std::vector<double> exterior_;
    std::vector<double> dense_;
    std::unique_ptr<ToeplitzConvolution> convolution_;
};

AssembledOperator assemble(const Kernel& k, const Potential& V, GridPtr grid,
                           const AssemblyOptions& options = {});

/// V at the active nodes. An inverse_power node within h/2 of the origin gets
/// the exact average of V over its cell. Throws ConfigError naming the node if
/// a sample is not finite or negative.
DiscreteField sample_potential(const Potential& V, GridPtr grid);

/// Average of |x - p|^{-beta} over the axis-aligned cube of side `side` centred
/// at `centre`, for beta < n (exact cone decomposition around p).
double cell_average_inverse_power(int n, double beta, std::span<const double> centre,
                                  double side, std::span<const double> p);

/// Collocation route for (L_K u)(x_a), independent of the assembled form: the
/// lattice sum of (u(x) - u(x+y)) K over |y| <= R_cut = 2R (exact cell masses
/// for the 3^n - 1 nearest cells, midpoint K(y) h^n beyond), the analytic
/// tail_mass(R_cut) u(x), and the self cell's second moment times a central
/// second difference. Throws DomainError if `node` is not active.
double apply_LK(const Kernel& k, const DiscreteField& u, std::size_t node);

/// apply_LK at every active node.
DiscreteField apply_LK_all(const Kernel& k, const DiscreteField& u);

}  // namespace fracfund
