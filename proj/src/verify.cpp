#include "fracfund/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracfund/errors.hpp"
#include "fracfund/random_fields.hpp"
#include "fracfund/report.hpp"
#include "fracfund/solver.hpp"
#include "fracfund/variational.hpp"

namespace fracfund {

namespace {

using Clock = std::chrono::steady_clock;

constexpr const char* kMultiplierAnchor =
    "multiplier bounds: lambda |xi|^{2s} <= m(xi) <= Lambda |xi|^{2s}";
constexpr const char* kEmbeddingAnchor =
    "critical Sobolev embedding: |u|_{L^{2n/(n-2s)}} <= S [u]_{H^s}";
constexpr const char* kHdotAnchor = "Gagliardo seminorm equals (2/c) |xi|^{2s} |u^|^2 integral";
constexpr const char* kPoincareAnchor = "Poincare-type bound |u|_{L^2} <= C |u|_{Y}";
constexpr const char* kLaxMilgramAnchor = "Lax-Milgram stability |u|_Y <= C |h|_{L^2}";
constexpr const char* kMaxPrincipleAnchor = "maximum principle: f >= 0 implies u >= 0";
constexpr const char* kComparisonAnchor =
    "comparison principle: f1 <= f2 implies u1 <= u2";
constexpr const char* kPlancherelAnchor = "square-root identity <L_K u, v> = <Qu, Qv>";
constexpr const char* kMinimizerAnchor = "weak solution is the unique minimizer of E_V";
constexpr const char* kDecayAnchor = "fundamental solution: 0 <= e_V(x) <= C |x|^{-(n-2s)}";
constexpr const char* kScalingAnchor = "local L^p bound C r^{n/p-(n-2s)} on balls";

class Suite {
public:
    Suite(std::string name, const ExperimentConfig& cfg, std::size_t index)
        : name_(std::move(name)), cfg_(cfg), sampler_(mix(cfg.seed, index)) {}

    FieldSampler& sampler() { return sampler_; }
    const ExperimentConfig& cfg() const { return cfg_; }

    void check(const std::string& name, const std::string& anchor, double measured,
               double threshold, const std::string& comparator = "<=") {
        CheckResult c;
        c.suite = name_;
        c.name = name;
        c.anchor = anchor;
        c.measured = measured;
        c.threshold = threshold;
        c.comparator = comparator;
        c.passed = comparator == "<=" ? measured <= threshold : measured >= threshold;
        c.seconds = std::chrono::duration<double>(Clock::now() - mark_).count();
        mark_ = Clock::now();
        checks_.push_back(std::move(c));
    }

    std::vector<CheckResult> take() { return std::move(checks_); }

private:
    static std::uint64_t mix(std::uint64_t seed, std::size_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index)};
        std::uint32_t words[2];
        seq.generate(words, words + 2);
        return (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    }

    std::string name_;
    const ExperimentConfig& cfg_;
    FieldSampler sampler_;
    std::vector<CheckResult> checks_;
    Clock::time_point mark_ = Clock::now();
};

GridPtr verify_grid(const ExperimentConfig& cfg, int n_side) {
    return build_grid(cfg.grid.n, cfg.verify.radius, n_side);
}

int bump_count(FieldSampler& s) { return 1 + static_cast<int>(s.uniform(0.0, 4.0)); }

double max_abs(const DiscreteField& u) {
    double m = 0.0;
    for (double v : u.values()) m = std::max(m, std::abs(v));
    return m;
}

void multiplier_suite(Suite& suite) {
    const Kernel k = suite.cfg().make_kernel();
    const int n = k.n();
    const double s = k.s();
    constexpr int count = 20;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    double unit_gap = 0.0;
    double asym = 0.0;
    for (int i = 0; i < count; ++i) {
        const double r = std::pow(10.0, -1.0 + 3.0 * i / (count - 1));
        std::array<double, 3> xi{};
        double norm = 0.0;
        while (norm < 1e-8) {
            norm = 0.0;
            for (int d = 0; d < n; ++d) {
                xi[d] = suite.sampler().normal();
                norm += xi[d] * xi[d];
            }
            norm = std::sqrt(norm);
        }
        std::array<double, 3> neg{};
        for (int d = 0; d < n; ++d) {
            xi[d] *= r / norm;
            neg[d] = -xi[d];
        }
        const double m = multiplier(k, std::span<const double>(xi.data(), n));
        const double m_neg = multiplier(k, std::span<const double>(neg.data(), n));
        const double ratio = m / std::pow(r, 2.0 * s);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
        unit_gap = std::max(unit_gap, std::abs(ratio - 1.0));
        asym = std::max(asym, std::abs(m - m_neg) / m);
    }
    suite.check("multiplier_lower_bound", kMultiplierAnchor, lo, 0.99 * k.lambda(), ">=");
    suite.check("multiplier_upper_bound", kMultiplierAnchor, hi, 1.01 * k.Lambda(), "<=");
    if (k.family() == KernelFamily::pure_fractional) {
        suite.check("multiplier_equals_xi_pow_2s", kMultiplierAnchor, unit_gap, 0.01);
    }
    suite.check("multiplier_even", kMultiplierAnchor, asym, 1e-10);
    const std::array<double, 3> zero{};
    suite.check("multiplier_vanishes_at_zero", kMultiplierAnchor,
                std::abs(multiplier(k, std::span<const double>(zero.data(), n))), 1e-14);
}

void embedding_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const FractionalOrder order = cfg.order();
    const Kernel k = cfg.make_kernel();
    const Potential V = cfg.make_potential();
    const int coarse_side = cfg.verify.n_side;
    const int fine_side = 2 * coarse_side - 1;
    const GridPtr coarse = verify_grid(cfg, coarse_side);
    const GridPtr fine = verify_grid(cfg, fine_side);
    const AssemblyOptions opts{cfg.dense_limit, true};
    const GagliardoForm form_c(order, coarse, opts);
    const GagliardoForm form_f(order, fine, opts);
    const AssembledOperator A_c = assemble(k, V, coarse, opts);
    const AssembledOperator A_f = assemble(k, V, fine, opts);
    const int samples = std::max(1, cfg.verify.samples);

    double emb_c = 0.0, emb_f = 0.0, hdot_gap = 0.0;
    double poinc_c = 0.0, poinc_f = 0.0, lm_c = 0.0, lm_f = 0.0;
    for (int i = 0; i < samples; ++i) {
        const BumpSum g = suite.sampler().random_bumps(order.n(), cfg.verify.radius,
                                                       bump_count(suite.sampler()), true);
        const DiscreteField u_c = DiscreteField::sample(coarse, g);
        const DiscreteField u_f = DiscreteField::sample(fine, g);
        emb_c = std::max(emb_c, embedding_ratio(form_c, order, u_c));
        emb_f = std::max(emb_f, embedding_ratio(form_f, order, u_f));
        poinc_c = std::max(poinc_c, lp_norm(u_c, 2.0) / std::sqrt(A_c.form(u_c.values(), u_c.values())));
        poinc_f = std::max(poinc_f, lp_norm(u_f, 2.0) / std::sqrt(A_f.form(u_f.values(), u_f.values())));

        const SolveReport r_c = weak_solve(A_c, u_c, cfg.solver);
        const SolveReport r_f = weak_solve(A_f, u_f, cfg.solver);
        lm_c = std::max(lm_c, r_c.laxmilgram_ratio.value_or(0.0));
        lm_f = std::max(lm_f, r_f.laxmilgram_ratio.value_or(0.0));

        const DiscreteField bump = suite.sampler().random_compact_bump(coarse, 0.7);
        hdot_gap = std::max(hdot_gap, std::abs(hdot_s_identity_check(order, bump) - 1.0));
    }
    auto drift = [](double a, double b) { return std::max(a / b, b / a); };
    suite.check("embedding_constant_refinement_drift", kEmbeddingAnchor, drift(emb_c, emb_f), 2.0);
    suite.check("hdot_gagliardo_identity_gap", kHdotAnchor, hdot_gap, 0.1);
    suite.check("poincare_constant_refinement_drift", kPoincareAnchor, drift(poinc_c, poinc_f),
                2.0);
    suite.check("laxmilgram_ratio_refinement_drift", kLaxMilgramAnchor, drift(lm_c, lm_f), 2.0);
}

void maxprinciple_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const GridPtr grid = verify_grid(cfg, cfg.verify.n_side);
    const AssembledOperator A =
        assemble(cfg.make_kernel(), cfg.make_potential(), grid, {cfg.dense_limit, true});
    int violations = 0;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < cfg.verify.samples; ++i) {
        const DiscreteField f = suite.sampler().gaussian_bumps(grid, bump_count(suite.sampler()));
        const PrincipleCheck c = check_maximum_principle(A, f, cfg.solver);
        if (!c.passed) ++violations;
        worst = std::min(worst, c.value / std::max(c.tolerance * 1e8, 1e-300));
    }
    suite.check("maximum_principle_violations", kMaxPrincipleAnchor, violations, 0.0);
    suite.check("maximum_principle_worst_min_over_max", kMaxPrincipleAnchor, worst, -1e-8, ">=");
}

void comparison_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const GridPtr grid = verify_grid(cfg, cfg.verify.n_side);
    const AssembledOperator A =
        assemble(cfg.make_kernel(), cfg.make_potential(), grid, {cfg.dense_limit, true});
    const bool negate = cfg.verify.fixture == "negate_order";
    int violations = 0;
    for (int i = 0; i < cfg.verify.samples; ++i) {
        const DiscreteField f1 =
            suite.sampler().gaussian_bumps(grid, bump_count(suite.sampler()), true);
        DiscreteField f2 = suite.sampler().gaussian_bumps(grid, bump_count(suite.sampler()));
        for (std::size_t a = 0; a < f2.size(); ++a) f2[a] += f1[a];
        const PrincipleCheck c =
            negate ? check_comparison(A, f2, f1, cfg.solver) : check_comparison(A, f1, f2, cfg.solver);
        if (!c.passed) ++violations;
    }
    suite.check(negate ? "comparison_violations_negated_order" : "comparison_violations",
                kComparisonAnchor, violations, 0.0);
}

void plancherel_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const FractionalOrder order = cfg.order();
    const GridPtr grid = verify_grid(cfg, cfg.verify.n_side);
    const AssembledOperator A =
        assemble(Kernel::pure_fractional(order), Potential::zero(order), grid,
                 {cfg.dense_limit, true});
    const int pairs = std::max(1, cfg.verify.samples / 5);
    const double R = cfg.verify.radius;
    const Point origin{0.0, 0.0, 0.0};
    double gap_uv = 0.0;
    double gap_uu = 0.0;
    for (int i = 0; i < pairs; ++i) {
        const DiscreteField u =
            FieldSampler::compact_bump(grid, origin, suite.sampler().uniform(0.25 * R, 0.7 * R));
        const DiscreteField v =
            FieldSampler::compact_bump(grid, origin, suite.sampler().uniform(0.25 * R, 0.7 * R));
        gap_uv = std::max(gap_uv, plancherel_crosscheck(A, u, v).relative_gap);
        gap_uu = std::max(gap_uu, plancherel_crosscheck(A, u, u).relative_gap);
    }
    suite.check("plancherel_gap_pairs", kPlancherelAnchor, gap_uv, 0.1);
    suite.check("plancherel_gap_norms", kPlancherelAnchor, gap_uu, 0.1);
}

void minimizer_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const GridPtr grid = verify_grid(cfg, cfg.verify.n_side);
    const AssembledOperator A =
        assemble(cfg.make_kernel(), cfg.make_potential(), grid, {cfg.dense_limit, true});
    const int solves = std::max(1, cfg.verify.samples / 5);
    const int directions = std::max(1, cfg.verify.samples);
    static constexpr double steps[] = {1e-3, -1e-3, 1e-2, -1e-2, 1e-1, -1e-1};
    int violations = 0;
    double defect = 0.0;
    double identity_gap = 0.0;
    for (int i = 0; i < solves; ++i) {
        const DiscreteField f =
            suite.sampler().gaussian_bumps(grid, bump_count(suite.sampler()), true);
        const SolveReport r = weak_solve(A, f, cfg.solver);
        const DiscreteField& u = r.solution;
        const double e0 = energy(A, u, f);
        // At the minimizer E(u) = -<Au, u>.
        const double auu = A.form(u.values(), u.values());
        identity_gap = std::max(identity_gap, std::abs(e0 + auu) / std::max(auu, 1e-300));
        defect = std::max(defect, verify_weak_formulation(
                                      A, u, f, 10,
                                      static_cast<std::uint64_t>(suite.sampler().engine()())));
        for (int j = 0; j < directions; ++j) {
            const DiscreteField phi =
                suite.sampler().gaussian_bumps(grid, bump_count(suite.sampler()), true);
            for (double t : steps) {
                DiscreteField w = u;
                for (std::size_t a = 0; a < w.size(); ++a) w[a] += t * phi[a];
                if (energy(A, w, f) < e0) ++violations;
            }
        }
    }
    suite.check("minimizer_violations", kMinimizerAnchor, violations, 0.0);
    suite.check("weak_formulation_defect", kMinimizerAnchor, defect, 1e-8);
    suite.check("minimum_energy_identity_gap", kMinimizerAnchor, identity_gap, 1e-8);
}

void decay_suite(Suite& suite) {
    const ExperimentConfig& cfg = suite.cfg();
    const FractionalOrder order = cfg.order();
    const Kernel k = cfg.make_kernel();
    const Potential V = cfg.make_potential();
    const double e = order.n() - 2.0 * order.s();

    FundamentalReport rep = run_exhaustion(k, V, cfg.schedule, cfg.solver, cfg.exhaustion);
    std::optional<FundamentalReport> reference;
    if (!V.is_zero()) {
        reference = run_exhaustion(k, Potential::zero(order), cfg.schedule, cfg.solver,
                                   cfg.exhaustion);
    }
    const FundamentalReport& base = reference ? *reference : rep;

    int negative = 0;
    double mass = 0.0;
    for (const StageReport& s : rep.stages) {
        if (!s.nonnegative) ++negative;
        mass = std::max(mass, s.mass_defect / std::max(s.source_mass, 1e-300));
    }
    suite.check("negative_stages", kDecayAnchor, negative, 0.0);
    suite.check("mass_identity_defect", kDecayAnchor, mass, 1e-8);

    if (rep.stages.size() >= 2) {
        const double c1 = rep.stages[rep.stages.size() - 2].window_constant;
        const double c2 = rep.stages.back().window_constant;
        suite.check("window_constant_stage_drift", kDecayAnchor, std::abs(c2 / c1 - 1.0), 0.25);
    }
    if (rep.cauchy_gaps.size() >= 2) {
        double worst = 0.0;
        for (std::size_t i = 1; i < rep.cauchy_gaps.size(); ++i) {
            worst = std::max(worst, rep.cauchy_gaps[i] / rep.cauchy_gaps[i - 1]);
        }
        suite.check("cauchy_gap_growth", kDecayAnchor, worst, 1.0);
    }

    if (base.decay_fit) {
        const DecayFit& fit = *base.decay_fit;
        suite.check("decay_slope_error", kDecayAnchor, std::abs(fit.slope + e), 0.15);
        suite.check("decay_fit_r_squared", kDecayAnchor, fit.r_squared, 0.98, ">=");
    }
    if (reference) {
        if (rep.decay_fit) {
            suite.check("decay_slope_upper_envelope", kDecayAnchor, rep.decay_fit->slope,
                        -e + 0.15);
        }
        const double scale = std::max(max_abs(*rep.final_field), max_abs(*base.final_field));
        suite.check("potential_lowers_solution",
                    kDecayAnchor,
                    max_difference_on_common_nodes(*rep.final_field, *base.final_field) /
                        std::max(scale, 1e-300),
                    1e-8);
    }
    if (base.diagnostics && base.diagnostics->lp.fitted_exponent) {
        const Envelope& lp = base.diagnostics->lp;
        suite.check("lp_radius_exponent_error", kScalingAnchor,
                    std::abs(*lp.fitted_exponent - lp.expected_exponent), 0.2);
    }
}

struct SuiteEntry {
    const char* name;
    void (*run)(Suite&);
};

constexpr SuiteEntry kSuites[] = {
    {"multiplier", multiplier_suite},     {"embedding", embedding_suite},
    {"maxprinciple", maxprinciple_suite}, {"comparison", comparison_suite},
    {"plancherel", plancherel_suite},     {"minimizer", minimizer_suite},
    {"decay", decay_suite},
};

}  // namespace

bool VerifySummary::passed() const { return failures() == 0; }

std::size_t VerifySummary::failures() const {
    return static_cast<std::size_t>(
        std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.passed; }));
}

const std::vector<std::string>& verify_suite_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& s : kSuites) v.emplace_back(s.name);
        return v;
    }();
    return names;
}

VerifySummary run_verify(const std::string& suite, const ExperimentConfig& cfg) {
    VerifySummary out;
    out.suite = suite;
    out.seed = cfg.seed;
    bool found = false;
    for (std::size_t i = 0; i < std::size(kSuites); ++i) {
        if (suite != "all" && suite != kSuites[i].name) continue;
        found = true;
        Suite s(kSuites[i].name, cfg, i);
        kSuites[i].run(s);
        for (CheckResult& c : s.take()) out.checks.push_back(std::move(c));
    }
    if (!found) {
        std::string valid;
        for (const auto& n : verify_suite_names()) valid += n + ", ";
        throw ConfigError("unknown verify suite '" + suite + "'; valid suites: " + valid + "all");
    }
    return out;
}

nlohmann::json to_json(const CheckResult& c) {
    return {{"suite", c.suite},
            {"name", c.name},
            {"anchor", c.anchor},
            {"measured", std::isfinite(c.measured) ? nlohmann::json(c.measured) : nlohmann::json()},
            {"threshold", c.threshold},
            {"comparator", c.comparator},
            {"passed", c.passed}};
}

nlohmann::json to_json(const VerifySummary& s) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : s.checks) checks.push_back(to_json(c));
    return {{"suite", s.suite},
            {"seed", s.seed},
            {"tests", s.checks.size()},
            {"failures", s.failures()},
            {"passed", s.passed()},
            {"checks", checks}};
}

std::string junit_xml(const VerifySummary& s) {
    auto escape = [](const std::string& in) {
        std::string out;
        for (char ch : in) {
            switch (ch) {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                case '"': out += "&quot;"; break;
                default: out += ch;
            }
        }
        return out;
    };
    std::ostringstream x;
    x << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<testsuite name=\"" << escape(s.suite) << "\" tests=\"" << s.checks.size()
      << "\" failures=\"" << s.failures() << "\">\n";
    for (const auto& c : s.checks) {
        x << "  <testcase classname=\"" << escape(c.suite) << "\" name=\"" << escape(c.name)
          << "\">\n";
        if (!c.passed) {
            x << "    <failure message=\"" << escape(c.anchor) << ": measured "
              << format_double(c.measured) << ", required " << escape(c.comparator) << ' '
              << format_double(c.threshold) << "\"/>\n";
        }
        x << "  </testcase>\n";
    }
    x << "</testsuite>\n";
    return x.str();
}

}  // namespace fracfund
