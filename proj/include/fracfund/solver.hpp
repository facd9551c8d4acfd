#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fracfund/operator.hpp"
#include "fracfund/variational.hpp"

namespace fracfund {

enum class Preconditioner { none, diagonal };
std::string to_string(Preconditioner p);
Preconditioner preconditioner_from_string(const std::string& name);

struct SolveConfig {
    double cg_tolerance = 1e-10;
    /// Defaults to 10 * N_active when unset.
    std::optional<std::size_t> max_iterations;
    Preconditioner preconditioner = Preconditioner::none;

    /// Throws ConfigError unless tolerance is in (0, 1e-2) and max_iterations >= 1.
    void validate() const;
};

struct SolveReport {
    DiscreteField solution;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double energy_value = 0.0;
    NormReport norm_report;
    /// y_s0_norm(u) / l2_norm(h), absent when h = 0.
    std::optional<double> laxmilgram_ratio;
    /// Relative residual |b - Au| / |b| after each iteration (entry 0 is the start).
    std::vector<double> residual_history;
};

/// Conjugate gradients on A u = h^n f from u = 0. Deterministic: every dot
/// product is a plain serial sum. Throws NonConvergence with the residual
/// history when the budget runs out, AssemblyError on nonpositive curvature.
SolveReport weak_solve(const AssembledOperator& A, const DiscreteField& f,
                       const SolveConfig& cfg = {});

/// max over trials of |<Au, phi> - h^n <f, phi>| / (|phi| |h^n f|) for seeded
/// random test fields phi (Euclidean norms on node values).
double verify_weak_formulation(const AssembledOperator& A, const DiscreteField& u,
                               const DiscreteField& f, int trials, std::uint64_t seed);

struct PrincipleCheck {
    /// min u for the maximum principle, max(u1 - u2) for comparison.
    double value = 0.0;
    /// 1e-8 * scale, the round-off allowance.
    double tolerance = 0.0;
    bool passed = false;
};

/// Solves with f >= 0 and reports min u against -1e-8 max|u|.
/// Throws DomainError if f has a negative entry.
PrincipleCheck check_maximum_principle(const AssembledOperator& A, const DiscreteField& f,
                                       const SolveConfig& cfg = {});

/// Solves with f1 and f2 and reports max(u1 - u2) against 1e-8 max(|u1|,|u2|).
/// The ordering f1 <= f2 is not enforced, so reversed inputs surface as failures.
PrincipleCheck check_comparison(const AssembledOperator& A, const DiscreteField& f1,
                                const DiscreteField& f2, const SolveConfig& cfg = {});

struct PlancherelResult {
    double form = 0.0;      // <Au, v> with the assembled pure kernel
    double spectral = 0.0;  // <Qu, Qv> on the periodic supercube
    double relative_gap = 0.0;
};

/// Compares the assembled form with the square-root route. A must carry the
/// pure fractional kernel and V = 0; u and v must vanish (to 1e-12 relative)
/// within distance R/4 of the boundary.
PlancherelResult plancherel_crosscheck(const AssembledOperator& A, const DiscreteField& u,
                                       const DiscreteField& v);

}  // namespace fracfund
