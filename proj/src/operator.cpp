#include "fracfund/operator.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "fracfund/errors.hpp"
#include "fracfund/fft.hpp"
#include "fracfund/quadrature.hpp"

namespace fracfund {

// ---------------------------------------------------------------------------
// Toeplitz convolution

struct ToeplitzConvolution::Impl {
    const Grid& grid;
    std::vector<int> shape;
    std::vector<std::size_t> positions;  // padded flat index of each active node
    fft::RealTransform transform;
    fft::Buffer<std::complex<double>> symbol;
    double inv_size;

    Impl(const Grid& g, std::vector<int> s)
        : grid(g), shape(s), transform(s), symbol(transform.make_complex()),
          inv_size(1.0 / static_cast<double>(transform.real_size())) {}

    std::size_t padded_flat(const int* idx) const {
        std::size_t f = 0;
        for (std::size_t d = 0; d < shape.size(); ++d) {
            int i = idx[d];
            if (i < 0) i += shape[d];
            f = f * static_cast<std::size_t>(shape[d]) + static_cast<std::size_t>(i);
        }
        return f;
    }
};

ToeplitzConvolution::ToeplitzConvolution(const Grid& grid, const kernels::OffsetTable& table) {
    const int n = grid.n();
    const int N = grid.n_side();
    const int P = fft::good_size(2 * N - 1);
    impl_ = std::make_unique<Impl>(grid, std::vector<int>(static_cast<std::size_t>(n), P));

    const auto lat = grid.active_lattice();
    impl_->positions.resize(grid.active_count());
    for (std::size_t a = 0; a < grid.active_count(); ++a) {
        impl_->positions[a] = impl_->padded_flat(lat.data() + a * n);
    }

    auto real = impl_->transform.make_real();
    const int reach = std::min(table.extent, N - 1);
    int k[3] = {0, 0, 0};
    for (k[0] = -reach; k[0] <= reach; ++k[0]) {
        for (k[1] = -reach; k[1] <= reach; ++k[1]) {
            const int lo2 = n == 3 ? -reach : 0, hi2 = n == 3 ? reach : 0;
            for (k[2] = lo2; k[2] <= hi2; ++k[2]) {
                if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
                real.data()[impl_->padded_flat(k)] = table.values[table.flat(k[0], k[1], k[2])];
            }
        }
    }
    impl_->transform.forward(real, impl_->symbol);
}

ToeplitzConvolution::~ToeplitzConvolution() = default;

void ToeplitzConvolution::apply(std::span<const double> x, std::span<double> out) const {
    auto real = impl_->transform.make_real();
    auto spec = impl_->transform.make_complex();
    for (std::size_t a = 0; a < x.size(); ++a) real.data()[impl_->positions[a]] = x[a];
    impl_->transform.forward(real, spec);
    const auto* sym = impl_->symbol.data();
    auto* z = spec.data();
    for (std::size_t i = 0; i < spec.size(); ++i) z[i] *= sym[i];
    impl_->transform.backward(spec, real);
    for (std::size_t a = 0; a < out.size(); ++a) {
        out[a] = real.data()[impl_->positions[a]] * impl_->inv_size;
    }
}

// ---------------------------------------------------------------------------
// Potential sampling

double cell_average_inverse_power(int n, double beta, std::span<const double> centre, double side,
                                  std::span<const double> p) {
    // Divergence theorem for (y-p)|y-p|^{-beta}: the integral is the sum over faces of
    // d_F/(n-beta) * int_F |z-p|^{-beta}, d_F the signed distance from p to the face
    // (negative when p lies beyond it).
    const double half = 0.5 * side;
    double total = 0.0;
    for (int axis = 0; axis < n; ++axis) {
        for (double sign : {-1.0, 1.0}) {
            const double plane = centre[axis] + sign * half;
            const double dist = sign * (plane - p[axis]);
            if (dist == 0.0) continue;
            std::array<double, 2> lo{}, hi{};
            int m = 0;
            for (int d = 0; d < n; ++d) {
                if (d == axis) continue;
                lo[m] = centre[d] - half;
                hi[m] = centre[d] + half;
                ++m;
            }
            auto g = [&](std::span<const double> t) {
                double r2 = 0.0;
                int q = 0;
                for (int d = 0; d < n; ++d) {
                    const double z = (d == axis) ? plane : t[q++];
                    r2 += (z - p[d]) * (z - p[d]);
                }
                return std::pow(r2, -0.5 * beta);
            };
            total += dist / (n - beta) *
                     quad::box_adaptive(g, std::span<const double>(lo.data(), n - 1),
                                        std::span<const double>(hi.data(), n - 1), 1e-12, 10, 10);
        }
    }
    return total / std::pow(side, n);
}

DiscreteField sample_potential(const Potential& V, GridPtr grid) {
    const Grid& g = *grid;
    const int n = g.n();
    const double h = g.spacing();
    std::vector<double> values(g.active_count(), 0.0);
    const auto* inv = std::get_if<Potential::InversePower>(&V.spec());
    const std::array<double, 3> origin{0.0, 0.0, 0.0};
    for (std::size_t a = 0; a < values.size(); ++a) {
        const Point x = g.position(a);
        const std::span<const double> xs(x.data(), n);
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
        double v;
        if (inv && r2 < 0.25 * h * h) {
            v = inv->amplitude *
                cell_average_inverse_power(n, inv->beta, xs, h, std::span<const double>(origin.data(), n));
        } else {
            v = V(xs);
        }
        if (!std::isfinite(v) || v < 0.0) {
            std::ostringstream msg;
            msg << "potential sample at active node " << a << " (x = (";
            for (int d = 0; d < n; ++d) msg << (d ? ", " : "") << x[d];
            msg << ")) is " << v << "; samples must be finite and nonnegative";
            throw ConfigError(msg.str());
        }
        values[a] = v;
    }
    return DiscreteField(std::move(grid), std::move(values));
}

// ---------------------------------------------------------------------------
// Assembled operator

std::string to_string(Storage storage) {
    return storage == Storage::dense ? "dense" : "matrix_free";
}

AssembledOperator::AssembledOperator(const Kernel& k, const Potential& V, GridPtr grid,
                                     const AssemblyOptions& options)
    : kernel_(k), potential_(V), grid_(std::move(grid)), options_(options) {
    if (grid_->n() != k.n()) throw ConfigError("assemble: kernel and grid dimensions differ");
    const Grid& g = *grid_;
    const std::size_t m = g.active_count();
    const double h = g.spacing();
    const double hn = g.cell_volume();
    storage_ = m <= options.dense_limit ? Storage::dense : Storage::matrix_free;
    stencil_ = std::make_unique<KernelStencil>(k, g.n_side() - 1);
    kernel_scale_ = std::pow(h, -2.0 * k.s());

    {
        const DiscreteField samples = sample_potential(V, grid_);
        potential_samples_.assign(samples.values().begin(), samples.values().end());
    }
    const double D = kernel_scale_ * stencil_->total();

    const kernels::LatticeView nodes{g.n(), g.active_lattice()};
    const kernels::OffsetTable table = stencil_->table();
    std::vector<double> neighbours(m);
    if (storage_ == Storage::dense) {
        if (options.parallel) {
            kernels::omp::neighbour_sums(nodes, table, neighbours);
        } else {
            kernels::serial::neighbour_sums(nodes, table, neighbours);
        }
    } else {
        convolution_ = std::make_unique<ToeplitzConvolution>(g, table);
        const std::vector<double> ones(m, 1.0);
        convolution_->apply(ones, neighbours);
    }

    diagonal_.resize(m);
    exterior_.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        diagonal_[i] = hn * (D + potential_samples_[i]);
        exterior_[i] = hn * (D - kernel_scale_ * neighbours[i]);
    }

    if (storage_ == Storage::dense) {
        dense_.assign(m * m, 0.0);
        if (options.parallel) {
            kernels::omp::assemble_dense(nodes, table, hn * kernel_scale_, diagonal_, dense_);
        } else {
            kernels::serial::assemble_dense(nodes, table, hn * kernel_scale_, diagonal_, dense_);
        }
    }
}

AssembledOperator::~AssembledOperator() = default;
AssembledOperator::AssembledOperator(AssembledOperator&&) noexcept = default;

void AssembledOperator::apply(std::span<const double> x, std::span<double> y) const {
    const std::size_t m = size();
    if (x.size() != m || y.size() != m) throw DomainError("operator apply: size mismatch");
    if (storage_ == Storage::dense) {
        if (options_.parallel) {
            kernels::omp::dense_matvec(dense_, m, x, y);
        } else {
            kernels::serial::dense_matvec(dense_, m, x, y);
        }
        return;
    }
    convolution_->apply(x, y);
    const double off = grid_->cell_volume() * kernel_scale_;
    for (std::size_t i = 0; i < m; ++i) y[i] = diagonal_[i] * x[i] - off * y[i];
}

DiscreteField AssembledOperator::apply(const DiscreteField& u) const {
    if (u.grid_ptr() != grid_ && !(u.grid() == *grid_)) {
        throw DomainError("operator apply: field lives on a different grid");
    }
    std::vector<double> y(size());
    apply(u.values(), y);
    return DiscreteField(grid_, std::move(y));
}

double AssembledOperator::form(std::span<const double> u, std::span<const double> v) const {
    std::vector<double> au(size());
    apply(u, au);
    double acc = 0.0;
    for (std::size_t i = 0; i < au.size(); ++i) acc += au[i] * v[i];
    return acc;
}

double AssembledOperator::mass_form(std::span<const double> u, std::span<const double> v) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < size(); ++i) acc += potential_samples_[i] * u[i] * v[i];
    return grid_->cell_volume() * acc;
}

double AssembledOperator::kernel_form(std::span<const double> u, std::span<const double> v) const {
    return form(u, v) - mass_form(u, v);
}

std::vector<double> AssembledOperator::to_dense() const {
    if (storage_ == Storage::dense) return dense_;
    const std::size_t m = size();
    std::vector<double> out(m * m), e(m, 0.0), col(m);
    for (std::size_t j = 0; j < m; ++j) {
        e[j] = 1.0;
        apply(e, col);
        e[j] = 0.0;
        for (std::size_t i = 0; i < m; ++i) out[i * m + j] = col[i];
    }
    return out;
}

AssembledOperator assemble(const Kernel& k, const Potential& V, GridPtr grid,
                           const AssemblyOptions& options) {
    return AssembledOperator(k, V, std::move(grid), options);
}

// ---------------------------------------------------------------------------
// Collocation route

namespace {

struct CollocationStencil {
    int n;
    int reach;
    double h;
    double self_term[3];  // h^{-2s} second_j / 2
    double tail;          // tail_mass(R_cut)
    std::vector<double> weights;  // (2 reach + 1)^n box, 0 outside the cut ball

    std::size_t flat(const int* k) const {
        const std::size_t w = 2 * static_cast<std::size_t>(reach) + 1;
        std::size_t f = 0;
        for (int d = 0; d < n; ++d) f = f * w + static_cast<std::size_t>(k[d] + reach);
        return f;
    }
};

CollocationStencil make_collocation(const Kernel& k, const Grid& g) {
    CollocationStencil c;
    c.n = g.n();
    c.h = g.spacing();
    const double r_cut = 2.0 * g.radius();
    c.reach = static_cast<int>(std::floor(r_cut / c.h));
    const double scale = std::pow(c.h, -2.0 * k.s());
    const double hn = g.cell_volume();
    const CellMoments m = self_cell_moments(k);
    for (int j = 0; j < 3; ++j) c.self_term[j] = 0.5 * scale * m.second[j];
    c.tail = tail_mass(k, r_cut);

    const std::size_t w = 2 * static_cast<std::size_t>(c.reach) + 1;
    c.weights.assign(c.n == 3 ? w * w * w : w * w, 0.0);
    int kk[3] = {0, 0, 0};
    const int r = c.reach;
    for (kk[0] = -r; kk[0] <= r; ++kk[0]) {
        for (kk[1] = -r; kk[1] <= r; ++kk[1]) {
            for (kk[2] = (c.n == 3 ? -r : 0); kk[2] <= (c.n == 3 ? r : 0); ++kk[2]) {
                const int span = std::max({std::abs(kk[0]), std::abs(kk[1]), std::abs(kk[2])});
                if (span == 0) continue;
                double y[3];
                double r2 = 0.0;
                for (int d = 0; d < c.n; ++d) {
                    y[d] = kk[d] * c.h;
                    r2 += y[d] * y[d];
                }
                if (std::sqrt(r2) > r_cut) continue;
                c.weights[c.flat(kk)] =
                    span == 1 ? scale * cell_mass(k, {kk[0], kk[1], kk[2]})
                              : hn * k.eval_unchecked(std::span<const double>(y, c.n));
            }
        }
    }
    return c;
}

double collocate(const CollocationStencil& c, const DiscreteField& u, std::size_t node) {
    const Grid& g = u.grid();
    const auto lat = g.active_lattice();
    LatticeIndex base{0, 0, 0};
    for (int d = 0; d < c.n; ++d) base[d] = lat[node * c.n + d];
    const double ux = u[node];

    double acc = 0.0;
    int kk[3] = {0, 0, 0};
    const int r = c.reach;
    for (kk[0] = -r; kk[0] <= r; ++kk[0]) {
        for (kk[1] = -r; kk[1] <= r; ++kk[1]) {
            for (kk[2] = (c.n == 3 ? -r : 0); kk[2] <= (c.n == 3 ? r : 0); ++kk[2]) {
                const double w = c.weights[c.flat(kk)];
                if (w == 0.0) continue;
                const LatticeIndex at{base[0] + kk[0], base[1] + kk[1], base[2] + kk[2]};
                acc += (ux - u.at_lattice(at)) * w;
            }
        }
    }
    acc += ux * c.tail;
    for (int j = 0; j < c.n; ++j) {
        LatticeIndex plus = base, minus = base;
        ++plus[j];
        --minus[j];
        acc += c.self_term[j] * (2.0 * ux - u.at_lattice(plus) - u.at_lattice(minus));
    }
    return acc;
}

}  // namespace

double apply_LK(const Kernel& k, const DiscreteField& u, std::size_t node) {
    if (node >= u.size()) {
        throw DomainError("apply_LK: node " + std::to_string(node) + " is not an active node");
    }
    if (u.grid().n() != k.n()) throw DomainError("apply_LK: kernel and grid dimensions differ");
    return collocate(make_collocation(k, u.grid()), u, node);
}

DiscreteField apply_LK_all(const Kernel& k, const DiscreteField& u) {
    if (u.grid().n() != k.n()) throw DomainError("apply_LK: kernel and grid dimensions differ");
    const CollocationStencil c = make_collocation(k, u.grid());
    std::vector<double> out(u.size());
    const auto m = static_cast<std::int64_t>(out.size());
#pragma omp parallel for schedule(dynamic, 16)
    for (std::int64_t a = 0; a < m; ++a) {
        out[static_cast<std::size_t>(a)] = collocate(c, u, static_cast<std::size_t>(a));
    }
    return DiscreteField(u.grid_ptr(), std::move(out));
}

}  // namespace fracfund
