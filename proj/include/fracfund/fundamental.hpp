#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "fracfund/errors.hpp"
#include "fracfund/operator.hpp"
#include "fracfund/solver.hpp"

namespace fracfund {

/// f_l(x) = l^n f(l x) with f = C exp(-1/(1-|x|^2)) on B_1 and unit integral.
class Mollifier {
public:
    explicit Mollifier(double l, int n);

    double scale() const noexcept { return l_; }
    int n() const noexcept { return n_; }
    double support_radius() const noexcept { return 1.0 / l_; }
    double operator()(std::span<const double> x) const;

private:
    double l_;
    int n_;
    double normalization_;
};

/// Samples f_l at the active nodes and rescales so that h^n sum = 1.
/// Throws ConfigError when h > 1/(4l).
DiscreteField sample_mollifier(const Mollifier& m, GridPtr grid);

struct Stage {
    double radius;
    double scale;
    double spacing;
    int n_side;
};

/// Balls B_{a_k} and mollifier scales l_k, one pair per stage.
struct ExhaustionSchedule {
    int n = 2;
    std::vector<double> radii;
    std::vector<double> scales;  // one entry is broadcast to every stage
    /// Lower bound on nodes per axis of each stage grid.
    int min_n_side = 129;
    /// Explicit nodes per axis, one per radius; replaces the automatic choice.
    std::vector<int> n_sides;

    /// Radii positive and strictly increasing, scales >= 1 and nondecreasing,
    /// one scale or one per radius, min_n_side >= 8. Explicit n_sides must
    /// satisfy the resolution rule h <= 1/(4l). Throws ConfigError.
    void validate() const;
    /// Stage grids: h = a / ceil(max(4 l a, (min_n_side - 1) / 2)), so h <= 1/(4l),
    /// a/h is an integer and radii that double keep the lattices nested.
    std::vector<Stage> stages() const;
};

struct DecayFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    double r_min = 0.0;
    double r_max = 0.0;
    int shells = 0;
};

struct Shell {
    double r_lo = 0.0;
    double r_hi = 0.0;
    std::size_t count = 0;
    /// Geometric means of |x| and of the field over the shell's nodes.
    double r_geo = 0.0;
    double value_geo = 0.0;
    double value_mean = 0.0;
    double value_max = 0.0;
};

/// Equal-width shells about the origin covering [r_min, r_max); shells with
/// fewer than 8 nodes are merged into a neighbour.
std::vector<Shell> radial_shells(const DiscreteField& field, double r_min, double r_max,
                                 int n_shells);

/// Least squares of log(value_geo) against log(r_geo) over radial_shells.
/// Requires r_min >= 4h, r_max <= R/2, n_shells >= 4. Throws NumericFailure
/// when a node value in the window is below 1e-14.
DecayFit fit_decay(const DiscreteField& field, double r_min, double r_max, int n_shells);

/// max of field(x) |x|^{n-2s} over active |x| >= max(3/l, 2 h sqrt(n)).
double pointwise_bound_constant(const DiscreteField& field, const FractionalOrder& order, double l);

/// max of field(x) |x|^{n-2s} over active r_lo <= |x| <= r_hi.
double envelope_constant(const DiscreteField& field, const FractionalOrder& order, double r_lo,
                         double r_hi);

struct DiagnosticParams {
    double p = 1.0;
    double gamma = 0.25;
    std::vector<double> radii{0.5, 1.0, 2.0};
    std::vector<std::array<double, 3>> centres{{0.0, 0.0, 0.0}};
    /// Mollifier scale of the field, for the pointwise window |x| >= 3/l.
    double l = 1.0;
    bool wgamma = true;
};

struct DiagnosticRow {
    std::array<double, 3> centre{};
    double r = 0.0;
    double lp = 0.0;
    double l1_V = 0.0;
    double v_lq = 0.0;
    /// l1_V / |V|_{L^q(B_r)}; zero when V vanishes on the ball.
    double l1_V_normalised = 0.0;
    std::optional<double> wgamma_p;
};

/// C r^e envelope of one column: e is the expected exponent, `constant` the
/// least-squares C with e fixed, `fitted_exponent` the free log-log slope.
struct Envelope {
    double expected_exponent = 0.0;
    std::optional<double> fitted_exponent;
    std::optional<double> constant;
};

struct DiagnosticTable {
    double p = 1.0;
    double gamma = 0.0;
    double q = 0.0;
    std::vector<DiagnosticRow> rows;
    Envelope lp;
    Envelope l1_V;
    Envelope wgamma_p;
    double pointwise_constant = 0.0;
};

/// Local bounds of the approximants: L^p, L^1_V and W^{gamma,p} on balls and
/// the pointwise bound. Throws DomainError naming the violated range.
DiagnosticTable lemma58_diagnostics(const DiscreteField& field, const Potential& V,
                                    const FractionalOrder& order, const DiagnosticParams& params);

struct StageReport {
    Stage stage;
    std::size_t active_nodes = 0;
    std::string storage;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    double min_value = 0.0;
    double max_value = 0.0;
    double source_mass = 0.0;
    /// |sum_i (A u)_i - h^n sum f_i|: the discrete <A u, 1> = int f_l.
    double mass_defect = 0.0;
    double pointwise_constant = 0.0;
    /// The same maximum over 3/l_1 <= |x| <= a_1, a window shared by all stages.
    double window_constant = 0.0;
    bool nonnegative = false;
    double seconds = 0.0;
};

struct ExhaustionOptions {
    /// Decay window; unset ends default to max(3/l, 4h) and a_max / 8.
    std::optional<double> fit_r_min;
    std::optional<double> fit_r_max;
    int fit_shells = 12;
    int profile_shells = 64;
    DiagnosticParams diagnostics;
    AssemblyOptions assembly;
};

struct FundamentalReport {
    std::vector<StageReport> stages;
    std::optional<DiscreteField> final_field;
    /// L^p distance of successive stages on coincident nodes of B_{a_1}.
    std::vector<double> cauchy_gaps;
    std::optional<DecayFit> decay_fit;
    std::vector<Shell> radial_profile;
    std::optional<DiagnosticTable> diagnostics;
    double pointwise_bound_constant = 0.0;
};

/// A stage failed to solve; carries the report of the stages before it.
class StageFailure : public NumericFailure {
public:
    StageFailure(const std::string& what, double achieved, std::size_t stage,
                 std::shared_ptr<FundamentalReport> partial)
        : NumericFailure(what, achieved), stage_(stage), partial_(std::move(partial)) {}

    std::size_t stage() const noexcept { return stage_; }
    const FundamentalReport& partial() const noexcept { return *partial_; }

private:
    std::size_t stage_;
    std::shared_ptr<FundamentalReport> partial_;
};

/// Solves (L_K + V) u = f_l on every stage ball and collects the diagnostics.
FundamentalReport run_exhaustion(const Kernel& k, const Potential& V,
                                 const ExhaustionSchedule& schedule, const SolveConfig& cfg,
                                 const ExhaustionOptions& options = {});

/// max(a - b) over nodes present in both grids and inside B_r (r <= 0 means
/// every common node). Throws DomainError if the grids share no node.
double max_difference_on_common_nodes(const DiscreteField& a, const DiscreteField& b,
                                      double r = 0.0);

/// (h_c^n sum |a - b|^p)^{1/p} over common nodes inside B_r, h_c the coarser spacing.
double lp_distance_on_common_nodes(const DiscreteField& a, const DiscreteField& b, double p,
                                   double r);

}  // namespace fracfund
