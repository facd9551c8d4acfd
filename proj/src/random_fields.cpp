#include "fracfund/random_fields.hpp"

#include <cmath>

namespace fracfund {

double FieldSampler::uniform(double a, double b) {
    return std::uniform_real_distribution<double>(a, b)(rng_);
}

double FieldSampler::normal() { return std::normal_distribution<double>()(rng_); }

double BumpSum::operator()(const Point& x) const {
    double v = 0.0;
    for (const Bump& b : bumps) {
        double r2 = 0.0;
        for (int d = 0; d < n; ++d) r2 += (x[d] - b.centre[d]) * (x[d] - b.centre[d]);
        v += b.amplitude * std::exp(-0.5 * r2 / (b.width * b.width));
    }
    return v;
}

BumpSum FieldSampler::random_bumps(int n, double R, int count, bool signed_amplitudes) {
    BumpSum sum;
    sum.n = n;
    for (int b = 0; b < count; ++b) {
        BumpSum::Bump bump{{0.0, 0.0, 0.0}, 0.0, 0.0};
        // Rejection sampling of a centre in B_{0.6R}.
        double r2 = 0.0;
        do {
            r2 = 0.0;
            for (int d = 0; d < n; ++d) {
                bump.centre[d] = uniform(-0.6 * R, 0.6 * R);
                r2 += bump.centre[d] * bump.centre[d];
            }
        } while (r2 > 0.36 * R * R);
        bump.width = uniform(0.05 * R, 0.3 * R);
        bump.amplitude = signed_amplitudes ? uniform(-1.0, 1.0) : uniform(0.0, 1.0);
        sum.bumps.push_back(bump);
    }
    return sum;
}

DiscreteField FieldSampler::gaussian_bumps(GridPtr grid, int count, bool signed_amplitudes) {
    const BumpSum sum = random_bumps(grid->n(), grid->radius(), count, signed_amplitudes);
    return DiscreteField::sample(std::move(grid), sum);
}

DiscreteField FieldSampler::compact_bump(GridPtr grid, const Point& centre, double rho) {
    const int n = grid->n();
    return DiscreteField::sample(std::move(grid), [&](const Point& x) {
        double q = 0.0;
        for (int d = 0; d < n; ++d) q += (x[d] - centre[d]) * (x[d] - centre[d]);
        q /= rho * rho;
        return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0;
    });
}

DiscreteField FieldSampler::random_compact_bump(GridPtr grid, double reach) {
    const int n = grid->n();
    const double R = grid->radius();
    const double rho = uniform(0.25 * R, 0.5 * R);
    const double offset = uniform(0.0, std::max(0.0, reach * R - rho));
    Point dir{0.0, 0.0, 0.0};
    double norm = 0.0;
    while (norm < 1e-8) {
        norm = 0.0;
        for (int d = 0; d < n; ++d) {
            dir[d] = normal();
            norm += dir[d] * dir[d];
        }
        norm = std::sqrt(norm);
    }
    Point c{0.0, 0.0, 0.0};
    for (int d = 0; d < n; ++d) c[d] = offset * dir[d] / norm;
    return compact_bump(std::move(grid), c, rho);
}

DiscreteField FieldSampler::white_noise(GridPtr grid) {
    DiscreteField f(std::move(grid));
    for (double& v : f.values()) v = normal();
    return f;
}

}  // namespace fracfund
