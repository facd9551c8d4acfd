#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fracfund/fft.hpp"
#include "fracfund/grid.hpp"

namespace fracfund {

/// Periodic supercube of side M h >= padding * R holding a zero-extended grid
/// field. Transforms use the unitary convention, so for exterior-zero fields
///   hdot_inner(u, v) ~ int |xi|^{2s} u^(xi) conj(v^(xi)) dxi.
class SpectralTorus {
public:
    explicit SpectralTorus(GridPtr grid, double padding = 8.0);

    const Grid& grid() const noexcept { return *grid_; }
    /// Nodes per axis of the supercube.
    int side() const noexcept { return side_; }
    double period() const noexcept { return side_ * grid_->spacing(); }

    /// int |xi|^{2s} Re(u^ conj v^) dxi.
    double hdot_inner(const DiscreteField& u, const DiscreteField& v, double s) const;

    /// Q u = F^{-1}(|xi|^s u^) on the full supercube (row-major side^n values).
    std::vector<double> sqrt_operator(const DiscreteField& u, double s) const;

    /// h^n sum over the supercube of a b.
    double torus_dot(const std::vector<double>& a, const std::vector<double>& b) const;

private:
    void scatter(const DiscreteField& u, fft::Buffer<double>& buf) const;
    /// |xi_k|^2 and the half-spectrum multiplicity of complex index c.
    void visit_spectrum(const std::function<void(std::size_t, double, double)>& f) const;

    GridPtr grid_;
    int side_;
    std::unique_ptr<fft::RealTransform> transform_;
    std::vector<std::size_t> positions_;
};

}  // namespace fracfund
