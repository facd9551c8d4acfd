#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "fracfund/grid.hpp"

namespace fracfund {

/// Seeded source of smooth test fields on a grid. Every random quantity in the
/// property suites comes from one of these.
/// Sum of Gaussian bumps, a smooth function that can be sampled on any grid.
struct BumpSum {
    struct Bump {
        Point centre;
        double width;
        double amplitude;
    };
    int n = 2;
    std::vector<Bump> bumps;

    double operator()(const Point& x) const;
};

class FieldSampler {
public:
    explicit FieldSampler(std::uint64_t seed) : rng_(seed) {}

    double uniform(double a, double b);
    double normal();

    /// `count` bumps for a ball of radius R with centres in B_{0.6 R}, widths in
    /// [0.05 R, 0.3 R] and amplitudes in [0, 1] (or [-1, 1] when signed).
    BumpSum random_bumps(int n, double R, int count, bool signed_amplitudes = false);
    DiscreteField gaussian_bumps(GridPtr grid, int count, bool signed_amplitudes = false);

    /// exp(-1/(1 - |x-c|^2/rho^2)) on B_rho(c), zero elsewhere.
    static DiscreteField compact_bump(GridPtr grid, const Point& centre, double rho);

    /// Compact bump with random centre and radius such that |c| + rho <= reach * R.
    DiscreteField random_compact_bump(GridPtr grid, double reach = 0.7);

    /// Independent standard normal value at every active node.
    DiscreteField white_noise(GridPtr grid);

    std::mt19937_64& engine() noexcept { return rng_; }

private:
    std::mt19937_64 rng_;
};

}  // namespace fracfund
