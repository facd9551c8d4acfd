#include "fracfund/solver.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fracfund/errors.hpp"
#include "fracfund/spectral.hpp"

namespace fracfund {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

// How often the recurrence residual is replaced by the true one.
constexpr std::size_t kResidualRefresh = 50;

}  // namespace

std::string to_string(Preconditioner p) { return p == Preconditioner::none ? "none" : "diagonal"; }

Preconditioner preconditioner_from_string(const std::string& name) {
    if (name == "none") return Preconditioner::none;
    if (name == "diagonal") return Preconditioner::diagonal;
    throw ConfigError("solver.preconditioner must be one of {none, diagonal}, got '" + name + "'");
}

void SolveConfig::validate() const {
    if (!(cg_tolerance > 0.0 && cg_tolerance < 1e-2)) {
        throw ConfigError("solver.tolerance must lie in (0, 1e-2)");
    }
    if (max_iterations && *max_iterations < 1) {
        throw ConfigError("solver.max_iterations must be >= 1");
    }
}

SolveReport weak_solve(const AssembledOperator& A, const DiscreteField& f, const SolveConfig& cfg) {
    cfg.validate();
    if (f.grid_ptr() != A.grid_ptr() && !(f.grid() == A.grid())) {
        throw DomainError("weak_solve: right-hand side lives on a different grid");
    }
    const std::size_t m = A.size();
    const double hn = A.grid().cell_volume();
    const std::size_t budget = cfg.max_iterations.value_or(10 * m);

    std::vector<double> b(m);
    for (std::size_t i = 0; i < m; ++i) b[i] = hn * f[i];
    const double bnorm = std::sqrt(dot(b, b));

    SolveReport report{DiscreteField(A.grid_ptr()), 0, 0.0, 0.0, {}, std::nullopt, {}};
    std::vector<double> x(m, 0.0);
    if (bnorm == 0.0) {
        report.residual_history.push_back(0.0);
        report.norm_report = compute_norms(A, report.solution);
        return report;
    }

    std::vector<double> inv_diag(m, 1.0);
    if (cfg.preconditioner == Preconditioner::diagonal) {
        for (std::size_t i = 0; i < m; ++i) inv_diag[i] = 1.0 / A.diagonal()[i];
    }
    std::vector<double> r = b, z(m), p(m), ap(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double rel = 1.0;
    report.residual_history.push_back(rel);

    std::size_t it = 0;
    while (true) {
        if (rel <= cfg.cg_tolerance) {
            // Confirm against the true residual before accepting.
            A.apply(x, ap);
            for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
            rel = std::sqrt(dot(r, r)) / bnorm;
            if (rel <= cfg.cg_tolerance) break;
            for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
            p = z;
            rz = dot(r, z);
        }
        if (it >= budget) {
            std::ostringstream msg;
            msg << "conjugate gradients did not reach relative residual " << cfg.cg_tolerance
                << " within " << budget << " iterations (last " << rel << ")";
            throw NonConvergence(msg.str(), report.residual_history);
        }
        A.apply(p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0)) {
            std::ostringstream msg;
            msg << "nonpositive curvature " << curvature << " at iteration " << it
                << ": the assembled operator is not positive definite";
            throw AssemblyError(msg.str(), curvature);
        }
        const double alpha = rz / curvature;
        for (std::size_t i = 0; i < m; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        ++it;
        if (it % kResidualRefresh == 0) {
            A.apply(x, ap);
            for (std::size_t i = 0; i < m; ++i) r[i] = b[i] - ap[i];
        }
        for (std::size_t i = 0; i < m; ++i) z[i] = inv_diag[i] * r[i];
        const double rz_next = dot(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < m; ++i) p[i] = z[i] + beta * p[i];
        rel = std::sqrt(dot(r, r)) / bnorm;
        report.residual_history.push_back(rel);
    }

    report.solution = DiscreteField(A.grid_ptr(), std::move(x));
    report.iterations = it;
    report.final_residual = rel;
    report.energy_value = energy(A, report.solution, f);
    report.norm_report = compute_norms(A, report.solution);
    const double fl2 = lp_norm(f, 2.0);
    if (fl2 > 0.0) report.laxmilgram_ratio = report.norm_report.y_s0_norm / fl2;
    return report;
}

double verify_weak_formulation(const AssembledOperator& A, const DiscreteField& u,
                               const DiscreteField& f, int trials, std::uint64_t seed) {
    const std::size_t m = A.size();
    const double hn = A.grid().cell_volume();
    std::vector<double> au(m), b(m);
    A.apply(u.values(), au);
    for (std::size_t i = 0; i < m; ++i) b[i] = hn * f[i];
    const double scale = std::sqrt(dot(b, b));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::vector<double> phi(m);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        for (double& v : phi) v = normal(rng);
        const double defect = std::abs(dot(au, phi) - dot(b, phi));
        const double norm = std::sqrt(dot(phi, phi)) * (scale > 0.0 ? scale : 1.0);
        worst = std::max(worst, defect / norm);
    }
    return worst;
}

PrincipleCheck check_maximum_principle(const AssembledOperator& A, const DiscreteField& f,
                                       const SolveConfig& cfg) {
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] < 0.0) {
            throw DomainError("check_maximum_principle: source is negative at node " +
                              std::to_string(i));
        }
    }
    const SolveReport rep = weak_solve(A, f, cfg);
    PrincipleCheck c;
    double hi = 0.0;
    c.value = std::numeric_limits<double>::infinity();
    for (double v : rep.solution.values()) {
        c.value = std::min(c.value, v);
        hi = std::max(hi, std::abs(v));
    }
    c.tolerance = 1e-8 * hi;
    c.passed = c.value >= -c.tolerance;
    return c;
}

PrincipleCheck check_comparison(const AssembledOperator& A, const DiscreteField& f1,
                                const DiscreteField& f2, const SolveConfig& cfg) {
    const SolveReport r1 = weak_solve(A, f1, cfg);
    const SolveReport r2 = weak_solve(A, f2, cfg);
    double worst = -std::numeric_limits<double>::infinity(), scale = 0.0;
    for (std::size_t i = 0; i < r1.solution.size(); ++i) {
        worst = std::max(worst, r1.solution[i] - r2.solution[i]);
        scale = std::max({scale, std::abs(r1.solution[i]), std::abs(r2.solution[i])});
    }
    PrincipleCheck c;
    c.value = worst;
    c.tolerance = 1e-8 * scale;
    c.passed = c.value <= c.tolerance;
    return c;
}

PlancherelResult plancherel_crosscheck(const AssembledOperator& A, const DiscreteField& u,
                                       const DiscreteField& v) {
    if (A.kernel().family() != KernelFamily::pure_fractional || A.kernel().lambda() != 1.0 ||
        A.kernel().Lambda() != 1.0) {
        throw DomainError("plancherel_crosscheck needs the pure fractional kernel");
    }
    if (!A.potential().is_zero()) throw DomainError("plancherel_crosscheck needs V = 0");
    const Grid& g = A.grid();
    for (const DiscreteField* w : {&u, &v}) {
        double peak = 0.0, rim = 0.0;
        for (std::size_t a = 0; a < w->size(); ++a) {
            const Point x = g.position(a);
            double r2 = 0.0;
            for (int d = 0; d < g.n(); ++d) r2 += x[d] * x[d];
            peak = std::max(peak, std::abs((*w)[a]));
            if (r2 > 0.5625 * g.radius() * g.radius()) rim = std::max(rim, std::abs((*w)[a]));
        }
        if (rim > 1e-12 * peak) {
            throw DomainError(
                "plancherel_crosscheck: fields must vanish within R/4 of the boundary");
        }
    }
    PlancherelResult res;
    res.form = A.form(u.values(), v.values());
    const SpectralTorus torus(A.grid_ptr());
    const double s = A.kernel().s();
    res.spectral = torus.torus_dot(torus.sqrt_operator(u, s), torus.sqrt_operator(v, s));
    const double scale = std::max(std::abs(res.form), std::abs(res.spectral));
    res.relative_gap = scale == 0.0 ? 0.0 : std::abs(res.form - res.spectral) / scale;
    return res;
}

}  // namespace fracfund
