#include "fracfund/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "fracfund/errors.hpp"

namespace fracfund {

SpectralTorus::SpectralTorus(GridPtr grid, double padding) : grid_(std::move(grid)) {
    if (!(padding >= 2.0)) throw ConfigError("spectral padding must be >= 2");
    const Grid& g = *grid_;
    const int need = static_cast<int>(std::ceil(padding * g.radius() / g.spacing() - 1e-9));
    side_ = fft::good_size(std::max(need, 2 * g.n_side()));
    if (side_ % 2) side_ = fft::good_size(side_ + 1);
    transform_ = std::make_unique<fft::RealTransform>(std::vector<int>(g.n(), side_));

    // The ball sits at the start of the supercube; a shift does not change |u^|.
    positions_.resize(g.active_count());
    const auto lat = g.active_lattice();
    for (std::size_t a = 0; a < positions_.size(); ++a) {
        std::size_t f = 0;
        for (int d = 0; d < g.n(); ++d) {
            f = f * static_cast<std::size_t>(side_) + static_cast<std::size_t>(lat[a * g.n() + d]);
        }
        positions_[a] = f;
    }
}

void SpectralTorus::scatter(const DiscreteField& u, fft::Buffer<double>& buf) const {
    if (u.grid_ptr() != grid_ && !(u.grid() == *grid_)) {
        throw DomainError("spectral: field lives on a different grid");
    }
    for (std::size_t a = 0; a < positions_.size(); ++a) buf.data()[positions_[a]] = u[a];
}

void SpectralTorus::visit_spectrum(const std::function<void(std::size_t, double, double)>& f) const {
    const int n = grid_->n();
    const int M = side_;
    const int half = M / 2 + 1;
    const double dxi = 2.0 * std::numbers::pi / period();
    auto freq = [M](int i) { return i <= M / 2 ? i : i - M; };
    std::size_t c = 0;
    if (n == 2) {
        for (int i = 0; i < M; ++i) {
            const double a = freq(i) * dxi;
            for (int j = 0; j < half; ++j, ++c) {
                const double b = j * dxi;
                f(c, a * a + b * b, (j == 0 || j == M / 2) ? 1.0 : 2.0);
            }
        }
        return;
    }
    for (int i = 0; i < M; ++i) {
        const double a = freq(i) * dxi;
        for (int j = 0; j < M; ++j) {
            const double b = freq(j) * dxi;
            for (int k = 0; k < half; ++k, ++c) {
                const double e = k * dxi;
                f(c, a * a + b * b + e * e, (k == 0 || k == M / 2) ? 1.0 : 2.0);
            }
        }
    }
}

double SpectralTorus::hdot_inner(const DiscreteField& u, const DiscreteField& v, double s) const {
    auto ru = transform_->make_real();
    auto rv = transform_->make_real();
    auto cu = transform_->make_complex();
    auto cv = transform_->make_complex();
    scatter(u, ru);
    scatter(v, rv);
    transform_->forward(ru, cu);
    transform_->forward(rv, cv);
    double acc = 0.0;
    visit_spectrum([&](std::size_t c, double xi2, double mult) {
        if (xi2 == 0.0) return;
        acc += mult * std::pow(xi2, s) * (cu.data()[c] * std::conj(cv.data()[c])).real();
    });
    const double hn = grid_->cell_volume();
    return acc * hn / static_cast<double>(transform_->real_size());
}

std::vector<double> SpectralTorus::sqrt_operator(const DiscreteField& u, double s) const {
    auto r = transform_->make_real();
    auto c = transform_->make_complex();
    scatter(u, r);
    transform_->forward(r, c);
    visit_spectrum([&](std::size_t i, double xi2, double) { 
        c.data()[i] *= xi2 == 0.0 ? 0.0 : std::pow(xi2, 0.5 * s);
    });
    transform_->backward(c, r);
    const double inv = 1.0 / static_cast<double>(transform_->real_size());
    std::vector<double> out(r.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = r.data()[i] * inv;
    return out;
}

double SpectralTorus::torus_dot(const std::vector<double>& a, const std::vector<double>& b) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return grid_->cell_volume() * acc;
}

}  // namespace fracfund
