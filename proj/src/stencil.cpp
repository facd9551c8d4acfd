#include "fracfund/stencil.hpp"

#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "fracfund/errors.hpp"
#include "fracfund/quadrature.hpp"

namespace fracfund {

namespace {

// Cells this close to the origin are integrated adaptively; beyond, a fixed
// tensor Gauss rule is accurate to well below 1e-6 relative.
constexpr int kNearExtent = 2;
constexpr double kNearTol = 1e-11;
constexpr double kFaceTol = 1e-12;

// Integral of g over the 2n faces of [-1/2, 1/2]^n, g evaluated at face points.
template <class G>
double face_integral(int n, G&& g) {
    const std::array<double, 2> lo{-0.5, -0.5};
    const std::array<double, 2> hi{0.5, 0.5};
    const std::span<const double> flo(lo.data(), n - 1), fhi(hi.data(), n - 1);
    double sum = 0.0;
    for (int axis = 0; axis < n; ++axis) {
        for (double side : {-0.5, 0.5}) {
            auto on_face = [&](std::span<const double> t) {
                std::array<double, 3> z{};
                int m = 0;
                for (int d = 0; d < n; ++d) z[d] = (d == axis) ? side : t[m++];
                return g(std::span<const double>(z.data(), n));
            };
            sum += quad::box_adaptive(on_face, flo, fhi, kFaceTol, 10, 8);
        }
    }
    return sum;
}

double far_cell_mass(const Kernel& k, const LatticeIndex& c) {
    const int n = k.n();
    const int span = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2])});
    const quad::GaussRule& rule = quad::gauss_legendre(span <= 4 ? 6 : 4);
    const std::size_t m = rule.nodes.size();
    std::array<double, 3> y{};
    const std::span<const double> view(y.data(), n);
    double sum = 0.0;
    if (n == 2) {
        for (std::size_t i = 0; i < m; ++i) {
            y[0] = c[0] + 0.5 * rule.nodes[i];
            for (std::size_t j = 0; j < m; ++j) {
                y[1] = c[1] + 0.5 * rule.nodes[j];
                sum += rule.weights[i] * rule.weights[j] * k.eval_unchecked(view);
            }
        }
        return 0.25 * sum;
    }
    for (std::size_t i = 0; i < m; ++i) {
        y[0] = c[0] + 0.5 * rule.nodes[i];
        for (std::size_t j = 0; j < m; ++j) {
            y[1] = c[1] + 0.5 * rule.nodes[j];
            const double wij = rule.weights[i] * rule.weights[j];
            for (std::size_t l = 0; l < m; ++l) {
                y[2] = c[2] + 0.5 * rule.nodes[l];
                sum += wij * rule.weights[l] * k.eval_unchecked(view);
            }
        }
    }
    return 0.125 * sum;
}

}  // namespace

CellMoments self_cell_moments(const Kernel& k) {
    // A cone from the origin over a face at distance 1/2 turns the radial part
    // of a degree -n-2s integrand into int t^{-1-2s} (outside) or, with the extra
    // |y|^2, int t^{1-2s} (inside); both are elementary.
    const int n = k.n();
    const double s = k.s();
    CellMoments m;
    m.outside = 0.5 / (2.0 * s) * face_integral(n, [&](std::span<const double> z) {
                    return k.eval_unchecked(z);
                });
    for (int j = 0; j < n; ++j) {
        m.second[j] = 0.5 / (2.0 - 2.0 * s) * face_integral(n, [&](std::span<const double> z) {
                          return z[j] * z[j] * k.eval_unchecked(z);
                      });
    }
    return m;
}

double cell_mass(const Kernel& k, const LatticeIndex& offset) {
    const int n = k.n();
    int span = 0;
    for (int d = 0; d < n; ++d) span = std::max(span, std::abs(offset[d]));
    if (span == 0) throw DomainError("cell_mass: the self cell has infinite mass");
    if (span > kNearExtent) return far_cell_mass(k, offset);
    std::array<double, 3> lo{}, hi{};
    for (int d = 0; d < n; ++d) {
        lo[d] = offset[d] - 0.5;
        hi[d] = offset[d] + 0.5;
    }
    return quad::box_adaptive([&](std::span<const double> y) { return k.eval_unchecked(y); },
                              std::span<const double>(lo.data(), n),
                              std::span<const double>(hi.data(), n), kNearTol, 8, 10);
}

KernelStencil::KernelStencil(const Kernel& k, int extent)
    : n_(k.n()), extent_(extent), moments_(self_cell_moments(k)), total_(0.0) {
    if (extent < 1) throw ConfigError("stencil extent must be >= 1");
    const std::size_t w = 2 * static_cast<std::size_t>(extent) + 1;
    values_.assign(n_ == 3 ? w * w * w : w * w, 0.0);
    total_ = moments_.outside;
    for (int j = 0; j < n_; ++j) total_ += moments_.second[j];

    // Both families are even in every coordinate: fill one orthant and reflect.
    const int e1 = extent + 1;
    const std::int64_t orthant = n_ == 3 ? std::int64_t{e1} * e1 * e1 : std::int64_t{e1} * e1;
    const kernels::OffsetTable t = table();
#pragma omp parallel for schedule(dynamic, 256)
    for (std::int64_t f = 0; f < orthant; ++f) {
        LatticeIndex c{0, 0, 0};
        std::int64_t r = f;
        for (int d = n_ - 1; d >= 0; --d) {
            c[d] = static_cast<int>(r % e1);
            r /= e1;
        }
        if (c[0] == 0 && c[1] == 0 && c[2] == 0) continue;
        double value = cell_mass(k, c);
        for (int j = 0; j < n_; ++j) {
            int norm1 = 0;
            for (int d = 0; d < n_; ++d) norm1 += c[d];
            if (norm1 == 1 && c[j] == 1) value += 0.5 * moments_.second[j];
        }
        for (int sx : {-1, 1}) {
            for (int sy : {-1, 1}) {
                for (int sz : {-1, 1}) {
                    if (n_ == 2 && sz < 0) continue;
                    values_[t.flat(sx * c[0], sy * c[1], sz * c[2])] = value;
                }
            }
        }
    }
}

double KernelStencil::at(const LatticeIndex& k) const noexcept {
    for (int d = 0; d < n_; ++d) {
        if (std::abs(k[d]) > extent_) return 0.0;
    }
    return values_[table().flat(k[0], k[1], n_ == 3 ? k[2] : 0)];
}

}  // namespace fracfund
