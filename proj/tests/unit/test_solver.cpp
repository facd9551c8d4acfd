#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>

#include "fracfund/errors.hpp"
#include "fracfund/random_fields.hpp"
#include "fracfund/solver.hpp"
#include "support.hpp"

using namespace fracfund;

TEST_CASE("tiny instances: CG equals dense elimination") {
    struct Case {
        int n, side;
    };
    int grids = 0;
    for (Case c : {Case{2, 3}, Case{2, 4}, Case{2, 5}, Case{2, 6}, Case{3, 3}, Case{3, 4}}) {
        const GridPtr g = build_grid(c.n, 1.0, c.side);
        REQUIRE(g->active_count() <= 20);
        ++grids;
        for (double s : {0.25, 0.5, 0.8}) {
            const FractionalOrder o(s, c.n);
            for (int variant = 0; variant < 2; ++variant) {
                const Kernel k = variant ? Kernel::modulated(o, 1.0, 4.0) : Kernel::pure_fractional(o);
                const Potential V = variant ? Potential::constant(3.0, o) : Potential::zero(o);
                const AssembledOperator A(k, V, g);
                FieldSampler fs(static_cast<std::uint64_t>(100 * c.side + variant));
                const DiscreteField f = fs.white_noise(g);
                const std::size_t m = A.size();
                const auto dense = A.to_dense();
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
                CHECK(err <= 1e-12 * x.cwiseAbs().maxCoeff());
            }
        }
    }
    CHECK(grids == 6);
}

TEST_CASE("solver config validation") {
    CHECK_THROWS_AS((SolveConfig{0.0, {}, Preconditioner::none}).validate(), ConfigError);
    CHECK_THROWS_AS((SolveConfig{0.5, {}, Preconditioner::none}).validate(), ConfigError);
    CHECK_THROWS_AS((SolveConfig{1e-8, 0, Preconditioner::none}).validate(), ConfigError);
    CHECK(preconditioner_from_string("diagonal") == Preconditioner::diagonal);
    CHECK(to_string(Preconditioner::none) == "none");
    CHECK_THROWS_AS(preconditioner_from_string("ilu"), ConfigError);
}

TEST_CASE("budget exhaustion raises NonConvergence with the residual history") {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 1.0, 33);
    const AssembledOperator A(Kernel::pure_fractional(o), Potential::zero(o), g);
    const DiscreteField f(g, std::vector<double>(g->active_count(), 1.0));
    try {
        weak_solve(A, f, {1e-10, 1, Preconditioner::none});
        FAIL("expected NonConvergence");
    } catch (const NonConvergence& e) {
        CHECK(e.residual_history().size() == 2);
        CHECK(e.residual_history().front() == 1.0);
        CHECK(e.achieved() == e.residual_history().back());
    }
}

TEST_CASE("zero source gives the zero solution without iterating") {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 1.0, 17);
    const AssembledOperator A(Kernel::pure_fractional(o), Potential::zero(o), g);
    const SolveReport r = weak_solve(A, DiscreteField(g));
    CHECK(r.iterations == 0);
    CHECK(testing::max_abs(r.solution.values()) == 0.0);
    CHECK_FALSE(r.laxmilgram_ratio);
}

TEST_CASE("preconditioning, storage and reruns give the same solution") {
    const FractionalOrder o(0.7, 2);
    const GridPtr g = build_grid(2, 1.0, 41);
    const Kernel k = Kernel::modulated(o, 1.0, 2.0);
    const Potential V = Potential::constant(0.5, o);
    const AssembledOperator dense(k, V, g, {100000, true});
    const AssembledOperator free(k, V, g, {1, true});
    FieldSampler fs(3);
    const DiscreteField f = fs.gaussian_bumps(g, 3, true);
    const SolveReport a = weak_solve(dense, f, {1e-12, {}, Preconditioner::none});
    const SolveReport b = weak_solve(dense, f, {1e-12, {}, Preconditioner::diagonal});
    const SolveReport c = weak_solve(free, f, {1e-12, {}, Preconditioner::none});
    const SolveReport d = weak_solve(dense, f, {1e-12, {}, Preconditioner::none});
    const double scale = testing::max_abs(a.solution.values());
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(a.solution[i] - b.solution[i]) <= 1e-9 * scale);
        CHECK(std::abs(a.solution[i] - c.solution[i]) <= 1e-9 * scale);
        CHECK(a.solution[i] == d.solution[i]);
    }
    CHECK(a.residual_history.front() == 1.0);
    CHECK(a.final_residual <= 1e-12);
    CHECK(verify_weak_formulation(dense, a.solution, f, 20, 1) < 1e-10);
}

TEST_CASE("maximum principle and comparison checks") {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 1.0, 25);
    const AssembledOperator A(Kernel::modulated(o, 1.0, 2.0), Potential::constant(1.0, o), g);
    FieldSampler fs(12);
    const DiscreteField f1 = fs.gaussian_bumps(g, 2, true);
    DiscreteField f2 = fs.gaussian_bumps(g, 2);
    for (std::size_t i = 0; i < f2.size(); ++i) f2[i] += f1[i];
    const PrincipleCheck mp = check_maximum_principle(A, fs.gaussian_bumps(g, 2));
    CHECK(mp.passed);
    CHECK(mp.value >= 0.0);
    CHECK_THROWS_AS(check_maximum_principle(A, f1), DomainError);
    const PrincipleCheck ok = check_comparison(A, f1, f2);
    CHECK(ok.passed);
    CHECK(ok.value <= 0.0);
    const PrincipleCheck reversed = check_comparison(A, f2, f1);
    CHECK_FALSE(reversed.passed);
    CHECK(reversed.value > reversed.tolerance);
}

TEST_CASE("Plancherel cross-check and its preconditions") {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 1.0, 33);
    const AssembledOperator A(Kernel::pure_fractional(o), Potential::zero(o), g);
    const DiscreteField u = FieldSampler::compact_bump(g, Point{0.0, 0.0, 0.0}, 0.6);
    const DiscreteField v = FieldSampler::compact_bump(g, Point{0.1, 0.1, 0.0}, 0.4);
    const PlancherelResult r = plancherel_crosscheck(A, u, v);
    CHECK(r.relative_gap < 0.1);
    CHECK(r.form == doctest::Approx(A.form(u.values(), v.values())).epsilon(1e-14));
    CHECK(plancherel_crosscheck(A, v, u).spectral == doctest::Approx(r.spectral).epsilon(1e-12));

    const AssembledOperator modulated(Kernel::modulated(o, 1.0, 2.0), Potential::zero(o), g);
    CHECK_THROWS_AS(plancherel_crosscheck(modulated, u, v), DomainError);
    const AssembledOperator with_v(Kernel::pure_fractional(o), Potential::constant(1.0, o), g);
    CHECK_THROWS_AS(plancherel_crosscheck(with_v, u, v), DomainError);
    const DiscreteField wide = FieldSampler::compact_bump(g, Point{0.0, 0.0, 0.0}, 0.95);
    CHECK_THROWS_AS(plancherel_crosscheck(A, wide, v), DomainError);
}
