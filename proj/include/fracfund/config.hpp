#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracfund/fundamental.hpp"
#include "fracfund/kernel.hpp"
#include "fracfund/solver.hpp"

namespace fracfund {

struct KernelSection {
    KernelFamily family = KernelFamily::pure_fractional;
    double s = 0.5;
    double lambda = 1.0;
    double Lambda = 1.0;
};

struct PotentialSection {
    std::string kind = "zero";  // zero | constant | inverse_power | tabulated
    double value = 0.0;
    double beta = 1.0;
    double amplitude = 1.0;
    std::vector<double> radii;
    std::vector<double> values;
    /// Declared integrability exponent; defaults to n/s.
    std::optional<double> q;
};

struct GridSection {
    int n = 2;
    double radius = 1.0;
    int n_side = 65;
};

/// Right-hand side of `solve`.
struct RhsSection {
    std::string kind = "constant";  // mollifier | constant | tabulated
    double value = 1.0;
    double l = 4.0;
    std::vector<double> radii;
    std::vector<double> values;
};

struct VerifySection {
    int samples = 50;
    int n_side = 33;
    double radius = 1.0;
    /// "none" or "negate_order" (comparison suite runs reversed pairs).
    std::string fixture = "none";
};

struct ExperimentConfig {
    std::string source = "<defaults>";
    KernelSection kernel;
    PotentialSection potential;
    GridSection grid;
    SolveConfig solver;
    std::size_t dense_limit = 5000;
    RhsSection rhs;
    ExhaustionSchedule schedule;
    ExhaustionOptions exhaustion;
    VerifySection verify;
    std::uint64_t seed = 42;
    std::string output_dir = "out";

    FractionalOrder order() const;
    Kernel make_kernel() const;
    Potential make_potential() const;
    double declared_q() const;

    /// Re-checks every constraint; throws ConfigError naming the rule.
    void validate() const;
};

/// The `solve` right-hand side on a grid: the mollifier f_l (resolution rule
/// enforced), a constant on the ball, or a radial table interpolated linearly
/// and held constant beyond its ends.
DiscreteField make_rhs(const RhsSection& rhs, GridPtr grid);

/// Sectioned key = value text (INI). Unknown sections or keys are errors.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<stream>");
ExperimentConfig load_config(const std::string& path);

}  // namespace fracfund
