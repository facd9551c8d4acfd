// Acceptance criteria 1-9. One line per criterion; exit status 1 if any fails.

#include <Eigen/Dense>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracfund/config.hpp"
#include "fracfund/errors.hpp"
#include "fracfund/fundamental.hpp"
#include "fracfund/random_fields.hpp"
#include "fracfund/solver.hpp"
#include "fracfund/verify.hpp"
#include "support.hpp"

using namespace fracfund;

namespace {

struct Outcome {
    bool passed = false;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_seconds;
    std::function<Outcome()> run;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

// (-Delta)^s (1 - |x|^2)_+^s at the origin by radial quadrature.
double getoor_constant(int n, double s) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const double inner = ts.integrate(
        [s](double r) {
            const double g = r < 1e-8 ? s : -std::expm1(s * std::log1p(-r * r)) / (r * r);
            return g * std::pow(r, 1.0 - 2.0 * s);
        },
        0.0, 1.0);
    return testing::closed_form_c(n, s) * testing::sphere(n) * (inner + 1.0 / (2.0 * s));
}

Outcome multiplier_bounds() {
    struct Pair {
        int n;
        double s;
    };
    double worst_pure = 0.0, lo = INFINITY, hi = 0.0;
    auto sweep = [](const Kernel& k, auto&& visit) {
        for (int i = 0; i < 20; ++i) {
            const double r = std::pow(10.0, -1.0 + 3.0 * i / 19.0);
            const double t = 2.399963229728653 * i;  // golden-angle directions
            std::array<double, 3> xi{r * std::cos(t), r * std::sin(t), 0.0};
            if (k.n() == 3) xi = {r * std::cos(t) * 0.6, r * std::sin(t) * 0.6, r * 0.8};
            visit(multiplier(k, std::span<const double>(xi.data(), k.n())) / std::pow(r, 2.0 * k.s()));
        }
    };
    for (Pair p : {Pair{2, 0.25}, Pair{2, 0.5}, Pair{2, 0.75}, Pair{3, 0.5}}) {
        sweep(Kernel::pure_fractional(FractionalOrder(p.s, p.n)),
              [&](double ratio) { worst_pure = std::max(worst_pure, std::abs(ratio - 1.0)); });
    }
    sweep(Kernel::modulated(FractionalOrder(0.5, 2), 1.0, 2.0), [&](double ratio) {
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    });
    return {worst_pure <= 0.01 && lo >= 0.99 && hi <= 2.02,
            "pure max |m/|xi|^2s - 1| = " + fmt(worst_pure) + " (<= 0.01); modulated ratio in [" + fmt(lo) +
                ", " + fmt(hi) + "] (within [0.99, 2.02])"};
}

Outcome getoor() {
    const double s = 0.5;
    const double rhs = getoor_constant(2, s);
    const FractionalOrder o(s, 2);
    std::vector<double> errors;
    for (int N : {65, 129}) {
        const GridPtr g = build_grid(2, 1.0, N);
        const AssembledOperator A(Kernel::pure_fractional(o), Potential::zero(o), g);
        const SolveReport r = weak_solve(A, DiscreteField(g, std::vector<double>(g->active_count(), rhs)));
        double worst = 0.0;
        for (std::size_t a = 0; a < g->active_count(); ++a) {
            const double rad = testing::norm(g->position(a), 2);
            if (rad > 0.8) continue;
            const double exact = std::sqrt(1.0 - rad * rad);
            worst = std::max(worst, std::abs(r.solution[a] - exact) / exact);
        }
        errors.push_back(worst);
    }
    const bool ok = std::abs(rhs - std::numbers::pi / 2) < 1e-10 && errors[1] <= 0.05 && errors[1] < errors[0];
    return {ok, "rhs " + fmt(rhs) + "; max relative error on |x|<=0.8: N=65 " + fmt(errors[0]) + ", N=129 " +
                    fmt(errors[1]) + " (<= 0.05, decreasing)"};
}

struct DecayRuns {
    FundamentalReport v0;
    FundamentalReport v1;
};

const DecayRuns& decay_runs() {
    static const DecayRuns runs = [] {
        const FractionalOrder o(0.5, 2);
        ExhaustionSchedule sch;
        sch.radii = {2.0, 4.0, 8.0};
        sch.scales = {4.0, 8.0, 16.0};
        const Kernel k = Kernel::pure_fractional(o);
        return DecayRuns{run_exhaustion(k, Potential::zero(o), sch, SolveConfig{}),
                         run_exhaustion(k, Potential::constant(1.0, o), sch, SolveConfig{})};
    }();
    return runs;
}

double stage_drift(const FundamentalReport& r) {
    double lo = INFINITY, hi = 0.0;
    for (const StageReport& s : r.stages) {
        lo = std::min(lo, s.window_constant);
        hi = std::max(hi, s.window_constant);
    }
    return hi / lo - 1.0;
}

Outcome decay() {
    const DecayRuns& d = decay_runs();
    const DecayFit& f0 = *d.v0.decay_fit;
    const DecayFit& f1 = *d.v1.decay_fit;
    bool nonneg = true;
    for (const auto* r : {&d.v0, &d.v1})
        for (const StageReport& s : r->stages) nonneg = nonneg && s.nonnegative;
    const double excess = max_difference_on_common_nodes(*d.v1.final_field, *d.v0.final_field);
    const double drift = stage_drift(d.v1);
    const bool ok = nonneg && std::abs(f0.slope + 1.0) <= 0.15 && f0.r_squared >= 0.98 && excess <= 1e-8 &&
                    f1.slope <= -0.85 && drift <= 0.25;
    return {ok, "V=0 slope " + fmt(f0.slope) + " (r^2 " + fmt(f0.r_squared) + "); V=1 max(u1-u0) " + fmt(excess) +
                    ", slope " + fmt(f1.slope) + " (<= -0.85), |x|u1 window constant stage drift " + fmt(drift) +
                    " (<= 0.25); nonnegative " + (nonneg ? "yes" : "no")};
}

Outcome l1_scaling() {
    const DecayRuns& d = decay_runs();
    const auto& diag = d.v0.diagnostics;
    if (!diag || !diag->lp.fitted_exponent) return {false, "no L^1 radius fit available"};
    const double e = *diag->lp.fitted_exponent;
    return {std::abs(e - 1.0) <= 0.2, "fitted exponent " + fmt(e) + " over r in {0.5, 1, 2}, expected 1 +- 0.2"};
}

ExperimentConfig verify_config() {
    ExperimentConfig c;
    c.kernel.s = 0.5;
    c.grid.n = 2;
    c.verify.samples = 50;
    c.verify.n_side = 33;
    c.verify.radius = 1.0;
    c.seed = 42;
    return c;
}

Outcome from_suites(std::initializer_list<const char*> suites, const std::string& only = "") {
    bool ok = true;
    std::ostringstream out;
    for (const char* name : suites) {
        const VerifySummary s = run_verify(name, verify_config());
        for (const CheckResult& c : s.checks) {
            if (!only.empty() && c.name != only) continue;
            ok = ok && c.passed;
            out << (out.tellp() ? "; " : "") << c.name << ' ' << fmt(c.measured) << " (" << c.comparator << ' '
                << fmt(c.threshold) << ')';
        }
    }
    return {ok, out.str()};
}

Outcome tiny_instances() {
    double worst = 0.0;
    int grids = 0;
    for (int n : {2, 3}) {
        for (int side = 2; side <= 8; ++side) {
            GridPtr g;
            try {
                g = build_grid(n, 1.0, side);
            } catch (const Error&) {
                continue;
            }
            if (g->active_count() == 0 || g->active_count() > 20) continue;
            ++grids;
            for (double s : {0.3, 0.7}) {
                const FractionalOrder o(s, n);
                for (int variant = 0; variant < 2; ++variant) {
                    const Kernel k = variant ? Kernel::modulated(o, 1.0, 2.0) : Kernel::pure_fractional(o);
                    const Potential V = variant ? Potential::constant(1.0, o) : Potential::zero(o);
                    const AssembledOperator A(k, V, g);
                    FieldSampler fs(static_cast<std::uint64_t>(1000 * n + 10 * side + variant));
                    const DiscreteField f = fs.white_noise(g);
                    const std::size_t m = A.size();
                    const std::vector<double> dense = A.to_dense();
                    Eigen::MatrixXd M(m, m);
                    Eigen::VectorXd b(m);
                    for (std::size_t i = 0; i < m; ++i) {
                        b(i) = g->cell_volume() * f[i];
                        for (std::size_t j = 0; j < m; ++j) M(i, j) = dense[i * m + j];
                    }
                    const Eigen::VectorXd x = M.fullPivLu().solve(b);
                    const SolveReport r = weak_solve(A, f, {1e-15, {}, Preconditioner::none});
                    double err = 0.0;
                    for (std::size_t i = 0; i < m; ++i) err = std::max(err, std::abs(r.solution[i] - x(i)));
                    worst = std::max(worst, err / x.cwiseAbs().maxCoeff());
                }
            }
        }
    }
    return {grids > 0 && worst <= 1e-12,
            std::to_string(grids) + " grids, max relative deviation " + fmt(worst) + " (<= 1e-12)"};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "multiplier bounds", 60, multiplier_bounds},
        {2, "Getoor solver oracle", 600, getoor},
        {3, "fundamental solution decay", 1800, decay},
        {4, "maximum and comparison principles", 300,
         [] { return from_suites({"maxprinciple", "comparison"}); }},
        {5, "minimizer equivalence", 300, [] { return from_suites({"minimizer"}, "minimizer_violations"); }},
        {6, "Plancherel identity", 300, [] { return from_suites({"plancherel"}); }},
        {7, "local L^1 radius scaling", 1800, l1_scaling},
        {8, "Lax-Milgram stability", 600,
         [] { return from_suites({"embedding"}, "laxmilgram_ratio_refinement_drift"); }},
        {9, "tiny-instance exactness", 1, tiny_instances},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs <= c.budget_seconds;
        const bool passed = o.passed && in_time;
        if (!passed) ++failures;
        std::printf("criterion %d %s: %s -- %s [%.1f s of %.0f s]\n", c.id, passed ? "PASS" : "FAIL",
                    c.name.c_str(), o.detail.c_str(), secs, c.budget_seconds);
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
