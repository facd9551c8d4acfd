#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <numbers>

#include "fracfund/errors.hpp"
#include "fracfund/fundamental.hpp"
#include "support.hpp"

using namespace fracfund;

namespace {

/// Riesz potential constant: (-Delta)^s G = delta with G = C |x|^{2s-n}.
double riesz_constant(int n, double s) {
    return std::tgamma(n / 2.0 - s) /
           (std::pow(4.0, s) * std::pow(std::numbers::pi, n / 2.0) * std::tgamma(s));
}

}  // namespace

TEST_CASE("mollifier has unit mass and unit discrete mass") {
    for (int n : {2, 3}) {
        for (double l : {1.0, 3.0}) {
            const Mollifier m(l, n);
            const auto radial = [&](double r) {
                const double x[3] = {r, 0.0, 0.0};
                return m(std::span<const double>(x, n)) * testing::sphere(n) * std::pow(r, n - 1);
            };
            const double mass =
                boost::math::quadrature::gauss_kronrod<double, 61>::integrate(radial, 0.0, 1.0 / l, 15, 1e-13);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-10));
            CHECK(m.support_radius() == 1.0 / l);
        }
    }
    const GridPtr g = build_grid(2, 1.0, 65);
    const DiscreteField f = sample_mollifier(Mollifier(4.0, 2), g);
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    CHECK(g->cell_volume() * sum == doctest::Approx(1.0).epsilon(1e-13));
    CHECK_THROWS_AS(Mollifier(0.5, 2), ConfigError);
}

TEST_CASE("resolution rule is enforced with a clear message") {
    const GridPtr coarse = build_grid(2, 1.0, 17);  // h = 1/8
    CHECK_THROWS_WITH_AS(sample_mollifier(Mollifier(4.0, 2), coarse), doctest::Contains("1/(4l)"),
                         ConfigError);
    ExhaustionSchedule sch;
    sch.radii = {2.0, 4.0};
    sch.scales = {4.0, 8.0};
    sch.n_sides = {129, 129};
    CHECK_THROWS_WITH_AS(sch.validate(), doctest::Contains("resolution rule h <= 1/(4l) violated at stage 2"),
                         ConfigError);
    sch.n_sides = {129, 257};
    CHECK_NOTHROW(sch.validate());
}

TEST_CASE("schedule validation and nested stage grids") {
    ExhaustionSchedule sch;
    sch.radii = {2.0, 4.0, 8.0};
    sch.scales = {4.0, 8.0, 16.0};
    const auto stages = sch.stages();
    REQUIRE(stages.size() == 3);
    for (const Stage& st : stages) {
        CHECK(st.spacing <= 1.0 / (4.0 * st.scale) * (1 + 1e-12));
        CHECK(st.n_side >= 129);
        const double ratio = st.radius / st.spacing;
        CHECK(ratio == doctest::Approx(std::round(ratio)).epsilon(1e-12));
        CHECK(st.n_side == 2 * static_cast<int>(std::round(ratio)) + 1);
    }
    for (std::size_t i = 1; i < stages.size(); ++i) {
        const double k = stages[i - 1].spacing / stages[i].spacing;
        CHECK(k == doctest::Approx(std::round(k)).epsilon(1e-12));
    }
    sch.scales = {4.0};
    CHECK(sch.stages()[2].scale == 4.0);

    ExhaustionSchedule bad = sch;
    bad.radii = {2.0, 2.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.scales = {8.0, 4.0, 4.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.scales = {4.0, 8.0};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.scales = {0.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = sch;
    bad.min_n_side = 4;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("decay fit recovers an exact power law") {
    const GridPtr g = build_grid(2, 4.0, 129);
    const DiscreteField f = DiscreteField::sample(g, [](const Point& x) {
        return 3.0 * std::pow(std::hypot(x[0], x[1]), -1.3);
    });
    const DecayFit fit = fit_decay(f, 0.3, 2.0, 8);
    CHECK(fit.slope == doctest::Approx(-1.3).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.shells >= 4);
    const FractionalOrder o(0.35, 2);  // n - 2s = 1.3
    CHECK(envelope_constant(f, o, 0.3, 2.0) == doctest::Approx(3.0).epsilon(1e-12));

    CHECK_THROWS_AS(fit_decay(f, 0.01, 2.0, 8), DomainError);
    CHECK_THROWS_AS(fit_decay(f, 0.3, 3.0, 8), DomainError);
    CHECK_THROWS_AS(fit_decay(f, 0.3, 2.0, 3), DomainError);
    const DiscreteField tiny = DiscreteField::sample(g, [](const Point&) { return 1e-20; });
    CHECK_THROWS_AS(fit_decay(tiny, 0.3, 2.0, 8), NumericFailure);
}

TEST_CASE("radial shells cover the window") {
    const GridPtr g = build_grid(2, 2.0, 65);
    const DiscreteField f = DiscreteField::sample(g, [](const Point&) { return 2.0; });
    const auto shells = radial_shells(f, 0.25, 1.0, 6);
    REQUIRE_FALSE(shells.empty());
    CHECK(shells.front().r_lo == 0.25);
    CHECK(shells.back().r_hi == 1.0);
    std::size_t total = 0;
    for (const Shell& s : shells) {
        CHECK(s.count >= 8);
        CHECK(s.value_geo == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(s.r_geo >= s.r_lo);
        CHECK(s.r_geo < s.r_hi);
        total += s.count;
    }
    std::size_t expected = 0;
    for (std::size_t a = 0; a < g->active_count(); ++a) {
        const Point x = g->position(a);
        const double r = std::hypot(x[0], x[1]);
        if (r >= 0.25 && r < 1.0) ++expected;
    }
    CHECK(total == expected);
}

TEST_CASE("common-node comparisons") {
    const GridPtr a = build_grid(2, 1.0, 17), b = build_grid(2, 2.0, 33);  // same lattice
    const auto smooth = [](const Point& x) { return std::cos(x[0]) * std::exp(x[1]); };
    const DiscreteField u = DiscreteField::sample(a, smooth);
    const DiscreteField v = DiscreteField::sample(b, smooth);
    const DiscreteField w = DiscreteField::sample(b, [&](const Point& x) { return smooth(x) - 1.0; });
    CHECK(max_difference_on_common_nodes(u, v) == 0.0);
    CHECK(max_difference_on_common_nodes(u, w) == doctest::Approx(1.0).epsilon(1e-14));
    std::size_t inside = 0;
    for (std::size_t i = 0; i < a->active_count(); ++i) {
        const Point x = a->position(i);
        if (std::hypot(x[0], x[1]) < 0.5) ++inside;
    }
    CHECK(lp_distance_on_common_nodes(u, w, 2.0, 0.5) ==
          doctest::Approx(std::sqrt(inside * a->cell_volume())).epsilon(1e-13));
    const DiscreteField shifted = DiscreteField::sample(build_grid(2, 1.0, 16), smooth);
    CHECK_THROWS_AS(max_difference_on_common_nodes(u, shifted), DomainError);
}

TEST_CASE("local diagnostics reject parameters outside their ranges") {
    const FractionalOrder o(0.5, 2);
    const GridPtr g = build_grid(2, 2.0, 65);
    const DiscreteField f = DiscreteField::sample(g, [](const Point& x) {
        return 1.0 / std::max(std::hypot(x[0], x[1]), 0.05);
    });
    const Potential V = Potential::constant(1.0, o);
    DiagnosticParams ok;
    ok.radii = {0.25, 0.5, 1.0};
    ok.l = 4.0;
    const DiagnosticTable t = lemma58_diagnostics(f, V, o, ok);
    CHECK(t.rows.size() == 3);
    CHECK(t.q == V.declared_q());
    for (const DiagnosticRow& r : t.rows) {
        CHECK(r.l1_V == doctest::Approx(r.lp).epsilon(1e-12));  // p = 1 and V = 1
        REQUIRE(r.wgamma_p);
    }
    DiagnosticParams bad = ok;
    bad.p = 2.5;  // n/(n-2s) = 2
    CHECK_THROWS_AS(lemma58_diagnostics(f, V, o, bad), DomainError);
    bad = ok;
    bad.gamma = 0.6;
    CHECK_THROWS_AS(lemma58_diagnostics(f, V, o, bad), DomainError);
    bad = ok;
    bad.radii.clear();
    CHECK_THROWS_AS(lemma58_diagnostics(f, V, o, bad), DomainError);
}

TEST_CASE("short exhaustion approaches the Riesz potential") {
    const FractionalOrder o(0.5, 2);
    ExhaustionSchedule sch;
    sch.radii = {2.0, 4.0};
    sch.scales = {4.0, 8.0};
    const FundamentalReport rep =
        run_exhaustion(Kernel::pure_fractional(o), Potential::zero(o), sch, SolveConfig{});
    REQUIRE(rep.stages.size() == 2);
    REQUIRE(rep.final_field);
    REQUIRE(rep.decay_fit);
    CHECK(rep.cauchy_gaps.size() == 1);
    for (const StageReport& s : rep.stages) {
        CHECK(s.nonnegative);
        CHECK(s.mass_defect < 1e-8);
    }
    CHECK(rep.decay_fit->slope == doctest::Approx(-1.0).epsilon(0.15));
    const double c = riesz_constant(2, 0.5);
    CHECK(c == doctest::Approx(1.0 / (2.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(rep.pointwise_bound_constant == doctest::Approx(c).epsilon(0.1));
    CHECK(rep.stages[1].window_constant == doctest::Approx(rep.stages[0].window_constant).epsilon(0.25));
}

TEST_CASE("a failing stage carries the partial report") {
    const FractionalOrder o(0.5, 2);
    ExhaustionSchedule sch;
    sch.radii = {1.0, 2.0};
    sch.scales = {2.0};
    sch.min_n_side = 33;
    const SolveConfig cfg{1e-10, 1, Preconditioner::none};
    try {
        run_exhaustion(Kernel::pure_fractional(o), Potential::zero(o), sch, cfg);
        FAIL("expected StageFailure");
    } catch (const StageFailure& e) {
        CHECK(e.stage() == 0);
        CHECK(e.partial().stages.empty());
        CHECK(std::string(e.what()).find("stage 1") != std::string::npos);
    }
}
