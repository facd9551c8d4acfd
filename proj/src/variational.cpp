#include "fracfund/variational.hpp"

#include <cmath>
#include <sstream>

#include "fracfund/errors.hpp"
#include "fracfund/kernels.hpp"
#include "fracfund/spectral.hpp"

namespace fracfund {

namespace {

void require_grid(const AssembledOperator& A, const DiscreteField& u, const char* where) {
    if (u.grid_ptr() != A.grid_ptr() && !(u.grid() == A.grid())) {
        throw DomainError(std::string(where) + ": field and operator live on different grids");
    }
}

double plain_dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

double lp_norm(const DiscreteField& u, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    double acc = 0.0;
    for (double v : u.values()) acc += std::pow(std::abs(v), p);
    return std::pow(u.grid().cell_volume() * acc, 1.0 / p);
}

double lp_norm_ball(const DiscreteField& u, double p, std::span<const double> centre, double r) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
    const Grid& g = u.grid();
    double acc = 0.0;
    for (std::size_t a = 0; a < u.size(); ++a) {
        const Point x = g.position(a);
        double d2 = 0.0;
        for (int d = 0; d < g.n(); ++d) d2 += (x[d] - centre[d]) * (x[d] - centre[d]);
        if (d2 < r * r) acc += std::pow(std::abs(u[a]), p);
    }
    return std::pow(g.cell_volume() * acc, 1.0 / p);
}

NormReport compute_norms(const AssembledOperator& A, const DiscreteField& u,
                         const NormOptions& options) {
    require_grid(A, u, "compute_norms");
    NormReport r;
    r.x_s0_norm = std::sqrt(std::max(0.0, A.kernel_form(u.values(), u.values())));
    r.l2_V_norm = std::sqrt(std::max(0.0, A.mass_form(u.values(), u.values())));
    r.l2_norm = lp_norm(u, 2.0);
    r.y_s0_norm = std::sqrt(r.x_s0_norm * r.x_s0_norm + r.l2_V_norm * r.l2_V_norm);
    const FractionalOrder& order = A.kernel().order();
    if (options.gagliardo) {
        r.gagliardo_norm = GagliardoForm(order, A.grid_ptr()).seminorm(u);
    }
    if (options.hdot) {
        const SpectralTorus torus(A.grid_ptr());
        r.hdot_s_norm = std::sqrt(std::max(0.0, torus.hdot_inner(u, u, order.s())));
    }
    r.lp_norms[1.0] = lp_norm(u, 1.0);
    r.lp_norms[2.0] = r.l2_norm;
    r.lp_norms[order.sobolev_exponent()] = lp_norm(u, order.sobolev_exponent());
    return r;
}

GagliardoForm::GagliardoForm(const FractionalOrder& order, GridPtr grid,
                             const AssemblyOptions& options)
    : order_(order),
      pure_(Kernel::pure_fractional(order), Potential::zero(order), std::move(grid), options),
      factor_(2.0 / pure_.kernel().normalization()) {}

double GagliardoForm::inner(const DiscreteField& u, const DiscreteField& v) const {
    require_grid(pure_, u, "xs0_inner");
    require_grid(pure_, v, "xs0_inner");
    if (pure_.storage() == Storage::matrix_free) {
        return factor_ * pure_.kernel_form(u.values(), v.values());
    }
    const Grid& g = pure_.grid();
    const double scale = g.cell_volume() * pure_.kernel_scale();
    std::vector<double> G(pure_.stencil().values().begin(), pure_.stencil().values().end());
    for (double& x : G) x *= scale;
    const kernels::LatticeView nodes{g.n(), g.active_lattice()};
    const kernels::OffsetTable table{g.n(), pure_.stencil().extent(), G};
    return factor_ * kernels::omp::pairwise_form(nodes, table, pure_.exterior_weights(), u.values(),
                                                 v.values());
}

double GagliardoForm::seminorm(const DiscreteField& u) const {
    return std::sqrt(std::max(0.0, inner(u, u)));
}

double xs0_inner(const FractionalOrder& order, const DiscreteField& u, const DiscreteField& v) {
    u.require_same_grid(v, "xs0_inner");
    return GagliardoForm(order, u.grid_ptr()).inner(u, v);
}

double energy(const AssembledOperator& A, const DiscreteField& u, const DiscreteField& f) {
    require_grid(A, u, "energy");
    require_grid(A, f, "energy");
    return A.form(u.values(), u.values()) -
           2.0 * A.grid().cell_volume() * plain_dot(f.values(), u.values());
}

double energy(const Kernel& k, const Potential& V, const DiscreteField& u, const DiscreteField& f) {
    return energy(assemble(k, V, u.grid_ptr()), u, f);
}

double hdot_s_identity_check(const FractionalOrder& order, const DiscreteField& u, double padding) {
    const GagliardoForm form(order, u.grid_ptr());
    const double c = form.pure_operator().kernel().normalization();
    const double pairs = 0.5 * c * form.inner(u, u);
    const SpectralTorus torus(u.grid_ptr(), padding);
    const double spectral = torus.hdot_inner(u, u, order.s());
    if (pairs == 0.0 && spectral == 0.0) return 1.0;
    return spectral / pairs;
}

double wgamma_p_seminorm(const FractionalOrder& order, const DiscreteField& u, double gamma,
                         double p, std::span<const double> centre, double r, bool parallel) {
    const double s = order.s();
    const int n = order.n();
    if (!(gamma > 0.0 && gamma < s)) {
        throw DomainError("wgamma_p_seminorm: gamma must lie in (0, s)");
    }
    if (!(p >= 1.0 && p < n / (n - s))) {
        std::ostringstream msg;
        msg << "wgamma_p_seminorm: p must lie in [1, n/(n-s)) = [1, " << n / (n - s) << ")";
        throw DomainError(msg.str());
    }
    const Grid& g = u.grid();
    const auto lat = g.active_lattice();
    std::vector<std::int32_t> coords;
    std::vector<double> values;
    for (std::size_t a = 0; a < u.size(); ++a) {
        const Point x = g.position(a);
        double d2 = 0.0;
        for (int d = 0; d < n; ++d) d2 += (x[d] - centre[d]) * (x[d] - centre[d]);
        if (d2 >= r * r) continue;
        for (int d = 0; d < n; ++d) coords.push_back(lat[a * n + d]);
        values.push_back(u[a]);
    }
    if (values.empty()) throw DomainError("wgamma_p_seminorm: no active nodes in the ball");

    int extent = 1;
    for (int d = 0; d < n; ++d) {
        int lo = coords[d], hi = coords[d];
        for (std::size_t i = d; i < coords.size(); i += n) {
            lo = std::min(lo, coords[i]);
            hi = std::max(hi, coords[i]);
        }
        extent = std::max(extent, hi - lo);
    }
    const double h = g.spacing();
    const double hn = g.cell_volume();
    const double expo = -0.5 * (n + gamma * p);
    const std::size_t w = 2 * static_cast<std::size_t>(extent) + 1;
    std::vector<double> T(n == 3 ? w * w * w : w * w, 0.0);
    const kernels::OffsetTable table{n, extent, T};
    for (int i = -extent; i <= extent; ++i) {
        for (int j = -extent; j <= extent; ++j) {
            for (int k = (n == 3 ? -extent : 0); k <= (n == 3 ? extent : 0); ++k) {
                const double r2 = (double(i) * i + double(j) * j + double(k) * k) * h * h;
                if (r2 > 0.0) T[table.flat(i, j, k)] = hn * hn * std::pow(r2, expo);
            }
        }
    }
    const kernels::LatticeView nodes{n, coords};
    const double sum = parallel ? kernels::omp::power_difference_sum(nodes, table, values, p)
                                : kernels::serial::power_difference_sum(nodes, table, values, p);
    return std::pow(sum, 1.0 / p);
}

double embedding_ratio(const GagliardoForm& form, const FractionalOrder& order,
                       const DiscreteField& u) {
    order.require_embedding();
    const double c = form.pure_operator().kernel().normalization();
    const double denom = std::sqrt(std::max(0.0, 0.5 * c * form.inner(u, u)));
    if (denom == 0.0) throw DomainError("embedding_ratio: the field is zero");
    return lp_norm(u, order.sobolev_exponent()) / denom;
}

double embedding_ratio(const FractionalOrder& order, const DiscreteField& u) {
    return embedding_ratio(GagliardoForm(order, u.grid_ptr()), order, u);
}

}  // namespace fracfund
