#include "fracfund/fundamental.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fracfund/quadrature.hpp"
#include "fracfund/variational.hpp"

namespace fracfund {

namespace {

double radius_of(const Point& x, int n) {
    double r2 = 0.0;
    for (int d = 0; d < n; ++d) r2 += x[d] * x[d];
    return std::sqrt(r2);
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double m = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LineFit f;
    f.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double e = y[i] - (f.intercept + f.slope * x[i]);
        sse += e * e;
    }
    f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
    return f;
}

// Fits value ~ C r^e: free slope and the constant with e fixed at `expected`.
Envelope envelope(const std::vector<double>& r, const std::vector<double>& v, double expected) {
    Envelope e;
    e.expected_exponent = expected;
    std::vector<double> lr, lv;
    for (std::size_t i = 0; i < r.size(); ++i) {
        if (v[i] > 0.0) {
            lr.push_back(std::log(r[i]));
            lv.push_back(std::log(v[i]));
        }
    }
    if (lr.size() != r.size() || lr.empty()) return e;
    double acc = 0.0;
    for (std::size_t i = 0; i < lr.size(); ++i) acc += lv[i] - expected * lr[i];
    e.constant = std::exp(acc / static_cast<double>(lr.size()));
    if (lr.size() >= 2) e.fitted_exponent = least_squares(lr, lv).slope;
    return e;
}

// Lattice index of x along each axis of g, if x is a node of g.
std::optional<LatticeIndex> node_of(const Grid& g, const Point& x) {
    LatticeIndex idx{0, 0, 0};
    const double mid = 0.5 * (g.n_side() - 1);
    for (int d = 0; d < g.n(); ++d) {
        const double t = x[d] / g.spacing() + mid;
        const double r = std::round(t);
        if (std::abs(t - r) > 1e-6) return std::nullopt;
        idx[d] = static_cast<int>(r);
    }
    return idx;
}

template <class F>
std::size_t for_common_nodes(const DiscreteField& a, const DiscreteField& b, double r, F&& f) {
    const Grid& ga = a.grid();
    const Grid& gb = b.grid();
    if (ga.n() != gb.n()) throw DomainError("fields have different dimensions");
    std::size_t count = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const Point x = ga.position(i);
        if (r > 0.0 && radius_of(x, ga.n()) >= r) continue;
        const auto idx = node_of(gb, x);
        if (!idx) continue;
        const std::int64_t j = gb.active_index(*idx);
        if (j < 0) continue;
        f(a[i], b[static_cast<std::size_t>(j)]);
        ++count;
    }
    if (count == 0) throw DomainError("the two grids share no active node");
    return count;
}

}  // namespace

// ---------------------------------------------------------------------------

Mollifier::Mollifier(double l, int n) : l_(l), n_(n) {
    if (!(l >= 1.0) || !std::isfinite(l)) throw ConfigError("mollifier scale l must be >= 1");
    if (n < 2 || n > 3) throw ConfigError("mollifier dimension must be 2 or 3");
    const auto radial = [n](double r) {
        return r < 1.0 ? std::exp(-1.0 / (1.0 - r * r)) * std::pow(r, n - 1) : 0.0;
    };
    const double mass = sphere_area(n) * quad::adaptive(radial, 0.0, 1.0, 1e-12).value;
    normalization_ = 1.0 / mass;
}

double Mollifier::operator()(std::span<const double> x) const {
    double r2 = 0.0;
    for (double v : x) r2 += v * v;
    r2 *= l_ * l_;
    if (r2 >= 1.0) return 0.0;
    return std::pow(l_, n_) * normalization_ * std::exp(-1.0 / (1.0 - r2));
}

DiscreteField sample_mollifier(const Mollifier& m, GridPtr grid) {
    const double h = grid->spacing();
    if (h > 0.25 / m.scale() * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "resolution rule h <= 1/(4l) violated: h = " << h << ", l = " << m.scale()
            << ", 1/(4l) = " << 0.25 / m.scale();
        throw ConfigError(msg.str());
    }
    if (grid->n() != m.n()) throw ConfigError("mollifier and grid dimensions differ");
    const int n = grid->n();
    DiscreteField f = DiscreteField::sample(
        grid, [&](const Point& x) { return m(std::span<const double>(x.data(), n)); });
    double sum = 0.0;
    for (double v : f.values()) sum += v;
    const double mass = grid->cell_volume() * sum;
    if (!(mass > 0.0)) throw ConfigError("mollifier support contains no active node");
    for (double& v : f.values()) v /= mass;
    return f;
}

// ---------------------------------------------------------------------------

void ExhaustionSchedule::validate() const {
    if (n != 2 && n != 3) throw ConfigError("schedule dimension must be 2 or 3");
    if (radii.empty()) throw ConfigError("schedule needs at least one radius");
    for (std::size_t i = 0; i < radii.size(); ++i) {
        if (!(radii[i] > 0.0) || !std::isfinite(radii[i])) {
            throw ConfigError("schedule radii must be positive");
        }
        if (i > 0 && !(radii[i] > radii[i - 1])) {
            throw ConfigError("schedule radii must be strictly increasing");
        }
    }
    if (scales.size() != 1 && scales.size() != radii.size()) {
        throw ConfigError("schedule needs one mollifier scale or one per radius");
    }
    for (std::size_t i = 0; i < scales.size(); ++i) {
        if (!(scales[i] >= 1.0) || !std::isfinite(scales[i])) {
            throw ConfigError("mollifier scales l must be >= 1");
        }
        if (i > 0 && scales[i] < scales[i - 1]) {
            throw ConfigError("mollifier scales must be nondecreasing");
        }
    }
    if (min_n_side < 8) throw ConfigError("grid N_side must be >= 8");
    if (!n_sides.empty()) {
        if (n_sides.size() != radii.size()) {
            throw ConfigError("schedule N_side list needs one entry per radius");
        }
        for (std::size_t i = 0; i < radii.size(); ++i) {
            if (n_sides[i] < 8) throw ConfigError("grid N_side must be >= 8");
            const double h = 2.0 * radii[i] / (n_sides[i] - 1);
            const double l = scales.size() == 1 ? scales[0] : scales[i];
            if (h > 1.0 / (4.0 * l) * (1.0 + 1e-12)) {
                std::ostringstream msg;
                msg << "resolution rule h <= 1/(4l) violated at stage " << i + 1 << ": h = " << h
                    << ", l = " << l << ", 1/(4l) = " << 1.0 / (4.0 * l);
                throw ConfigError(msg.str());
            }
        }
    }
}

std::vector<Stage> ExhaustionSchedule::stages() const {
    validate();
    std::vector<Stage> out;
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double a = radii[i];
        const double l = scales.size() == 1 ? scales[0] : scales[i];
        if (!n_sides.empty()) {
            out.push_back({a, l, 2.0 * a / (n_sides[i] - 1), n_sides[i]});
            continue;
        }
        const double cells = std::ceil(std::max(4.0 * l * a, 0.5 * (min_n_side - 1)) - 1e-9);
        const double h = a / cells;
        out.push_back({a, l, h, static_cast<int>(2.0 * cells) + 1});
    }
    return out;
}

// ---------------------------------------------------------------------------

std::vector<Shell> radial_shells(const DiscreteField& field, double r_min, double r_max,
                                 int n_shells) {
    if (!(r_max > r_min) || n_shells < 1) throw DomainError("radial_shells: empty window");
    const Grid& g = field.grid();
    const double width = (r_max - r_min) / n_shells;
    struct Acc {
        std::size_t count = 0;
        double log_r = 0.0, log_v = 0.0, sum = 0.0, max = -INFINITY;
        bool nonpositive = false;
    };
    std::vector<Acc> acc(static_cast<std::size_t>(n_shells));
    for (std::size_t a = 0; a < field.size(); ++a) {
        const double r = radius_of(g.position(a), g.n());
        if (r < r_min || r >= r_max) continue;
        const auto k = std::min<std::size_t>(static_cast<std::size_t>((r - r_min) / width),
                                             acc.size() - 1);
        Acc& s = acc[k];
        ++s.count;
        s.log_r += std::log(r);
        s.sum += field[a];
        s.max = std::max(s.max, field[a]);
        if (field[a] > 0.0) {
            s.log_v += std::log(field[a]);
        } else {
            s.nonpositive = true;
        }
    }
    // Merge thin shells forward (the last one backward).
    constexpr std::size_t kMinNodes = 8;
    std::vector<Shell> shells;
    std::vector<Acc> merged;
    double lo = r_min;
    Acc cur;
    for (std::size_t k = 0; k < acc.size(); ++k) {
        cur.count += acc[k].count;
        cur.log_r += acc[k].log_r;
        cur.log_v += acc[k].log_v;
        cur.sum += acc[k].sum;
        cur.max = std::max(cur.max, acc[k].max);
        cur.nonpositive = cur.nonpositive || acc[k].nonpositive;
        const double hi = r_min + (k + 1) * width;
        if (cur.count >= kMinNodes) {
            shells.push_back({lo, hi, cur.count, 0, 0, 0, 0});
            merged.push_back(cur);
            cur = Acc{};
            lo = hi;
        }
    }
    if (cur.count > 0) {
        if (merged.empty()) {
            shells.push_back({lo, r_max, cur.count, 0, 0, 0, 0});
            merged.push_back(cur);
        } else {
            Acc& last = merged.back();
            last.count += cur.count;
            last.log_r += cur.log_r;
            last.log_v += cur.log_v;
            last.sum += cur.sum;
            last.max = std::max(last.max, cur.max);
            last.nonpositive = last.nonpositive || cur.nonpositive;
            shells.back().r_hi = r_max;
            shells.back().count = last.count;
        }
    }
    for (std::size_t k = 0; k < shells.size(); ++k) {
        const Acc& s = merged[k];
        const double c = static_cast<double>(s.count);
        shells[k].r_geo = std::exp(s.log_r / c);
        shells[k].value_geo = s.nonpositive ? 0.0 : std::exp(s.log_v / c);
        shells[k].value_mean = s.sum / c;
        shells[k].value_max = s.max;
    }
    return shells;
}

DecayFit fit_decay(const DiscreteField& field, double r_min, double r_max, int n_shells) {
    const Grid& g = field.grid();
    const double h = g.spacing();
    if (r_min < 4.0 * h * (1.0 - 1e-12)) {
        throw DomainError("fit_decay: r_min must be >= 4h (discretisation layer)");
    }
    if (r_max > 0.5 * g.radius() * (1.0 + 1e-12)) {
        throw DomainError("fit_decay: r_max must be <= R/2 (boundary truncation)");
    }
    if (n_shells < 4) throw DomainError("fit_decay: needs at least 4 shells");
    for (std::size_t a = 0; a < field.size(); ++a) {
        const double r = radius_of(g.position(a), g.n());
        if (r >= r_min && r < r_max && !(field[a] > 1e-14)) {
            std::ostringstream msg;
            msg << "fit_decay: field value " << field[a] << " at |x| = " << r
                << " is below the 1e-14 floor; the field is degenerate in the window";
            throw NumericFailure(msg.str(), field[a]);
        }
    }
    const std::vector<Shell> shells = radial_shells(field, r_min, r_max, n_shells);
    if (shells.size() < 2) throw DomainError("fit_decay: fewer than two populated shells");
    std::vector<double> x, y;
    for (const Shell& s : shells) {
        x.push_back(std::log(s.r_geo));
        y.push_back(std::log(s.value_geo));
    }
    const LineFit f = least_squares(x, y);
    return {f.slope, f.intercept, f.r_squared, r_min, r_max, static_cast<int>(shells.size())};
}

double pointwise_bound_constant(const DiscreteField& field, const FractionalOrder& order,
                                double l) {
    const Grid& g = field.grid();
    const double floor = std::max(3.0 / l, 2.0 * g.spacing() * std::sqrt(double(g.n())));
    return envelope_constant(field, order, floor, std::numeric_limits<double>::infinity());
}

double envelope_constant(const DiscreteField& field, const FractionalOrder& order, double r_lo,
                         double r_hi) {
    const Grid& g = field.grid();
    const double e = order.n() - 2.0 * order.s();
    double best = 0.0;
    for (std::size_t a = 0; a < field.size(); ++a) {
        const double r = radius_of(g.position(a), g.n());
        if (r >= r_lo && r <= r_hi) best = std::max(best, field[a] * std::pow(r, e));
    }
    return best;
}

// ---------------------------------------------------------------------------

DiagnosticTable lemma58_diagnostics(const DiscreteField& field, const Potential& V,
                                    const FractionalOrder& order, const DiagnosticParams& params) {
    const int n = order.n();
    const double s = order.s();
    const double p = params.p;
    order.require_embedding();
    if (!(p >= 1.0 && p < n / (n - 2.0 * s))) {
        std::ostringstream msg;
        msg << "L^p bound needs 1 <= p < n/(n-2s) = " << n / (n - 2.0 * s) << ", got p = " << p;
        throw DomainError(msg.str());
    }
    if (params.wgamma) {
        if (!(params.gamma > 0.0 && params.gamma < s)) {
            throw DomainError("W^{gamma,p} bound needs gamma in (0, s)");
        }
        if (!(p < n / (n - s))) {
            std::ostringstream msg;
            msg << "W^{gamma,p} bound needs p < n/(n-s) = " << n / (n - s) << ", got p = " << p;
            throw DomainError(msg.str());
        }
    }
    if (params.radii.empty() || params.centres.empty()) {
        throw DomainError("diagnostics need at least one radius and one centre");
    }

    const Grid& g = field.grid();
    const DiscreteField Vs = sample_potential(V, field.grid_ptr());
    const double q = V.declared_q();
    const double hn = g.cell_volume();

    DiagnosticTable t;
    t.p = p;
    t.gamma = params.gamma;
    t.q = q;
    for (const auto& c : params.centres) {
        for (double r : params.radii) {
            DiagnosticRow row;
            row.centre = c;
            row.r = r;
            const std::span<const double> cs(c.data(), n);
            row.lp = lp_norm_ball(field, p, cs, r);
            double l1v = 0.0, vq = 0.0;
            for (std::size_t a = 0; a < field.size(); ++a) {
                const Point x = g.position(a);
                double d2 = 0.0;
                for (int d = 0; d < n; ++d) d2 += (x[d] - c[d]) * (x[d] - c[d]);
                if (d2 >= r * r) continue;
                l1v += Vs[a] * std::abs(field[a]);
                vq += std::pow(Vs[a], q);
            }
            row.l1_V = hn * l1v;
            row.v_lq = std::pow(hn * vq, 1.0 / q);
            row.l1_V_normalised = row.v_lq > 0.0 ? row.l1_V / row.v_lq : 0.0;
            if (params.wgamma) {
                row.wgamma_p = wgamma_p_seminorm(order, field, params.gamma, p, cs, r);
            }
            t.rows.push_back(row);
        }
    }

    // Envelopes over the radii at the first centre.
    std::vector<double> rs, lp, l1, wg;
    for (const auto& row : t.rows) {
        if (row.centre != params.centres.front()) continue;
        rs.push_back(row.r);
        lp.push_back(row.lp);
        l1.push_back(row.l1_V_normalised);
        wg.push_back(row.wgamma_p.value_or(0.0));
    }
    const double base = n / p - (n - 2.0 * s);
    t.lp = envelope(rs, lp, base);
    const double p_dual = q / (q - 1.0);
    t.l1_V = envelope(rs, l1, n / p_dual - (n - 2.0 * s));
    t.wgamma_p = envelope(rs, wg, base - params.gamma);
    if (!params.wgamma) t.wgamma_p = Envelope{base - params.gamma, std::nullopt, std::nullopt};
    t.pointwise_constant = pointwise_bound_constant(field, order, params.l);
    return t;
}

// ---------------------------------------------------------------------------

double max_difference_on_common_nodes(const DiscreteField& a, const DiscreteField& b, double r) {
    double worst = -INFINITY;
    for_common_nodes(a, b, r, [&](double x, double y) { worst = std::max(worst, x - y); });
    return worst;
}

double lp_distance_on_common_nodes(const DiscreteField& a, const DiscreteField& b, double p,
                                   double r) {
    if (!(p >= 1.0)) throw DomainError("lp distance needs p >= 1");
    double acc = 0.0;
    for_common_nodes(a, b, r, [&](double x, double y) { acc += std::pow(std::abs(x - y), p); });
    const double hc = std::max(a.grid().spacing(), b.grid().spacing());
    return std::pow(std::pow(hc, a.grid().n()) * acc, 1.0 / p);
}

FundamentalReport run_exhaustion(const Kernel& k, const Potential& V,
                                 const ExhaustionSchedule& schedule, const SolveConfig& cfg,
                                 const ExhaustionOptions& options) {
    if (schedule.n != k.n()) throw ConfigError("schedule and kernel dimensions differ");
    cfg.validate();
    const std::vector<Stage> stages = schedule.stages();
    auto report = std::make_shared<FundamentalReport>();
    std::vector<DiscreteField> fields;

    for (std::size_t i = 0; i < stages.size(); ++i) {
        const Stage& st = stages[i];
        const auto t0 = std::chrono::steady_clock::now();
        GridPtr grid = build_grid(k.n(), st.radius, st.n_side);
        const DiscreteField f = sample_mollifier(Mollifier(st.scale, k.n()), grid);
        const AssembledOperator A(k, V, grid, options.assembly);
        std::optional<SolveReport> solved;
        try {
            solved.emplace(weak_solve(A, f, cfg));
        } catch (const NumericFailure& e) {
            std::ostringstream msg;
            msg << "stage " << i + 1 << " (a = " << st.radius << ", l = " << st.scale
                << ") failed: " << e.what();
            throw StageFailure(msg.str(), e.achieved(), i, report);
        }
        SolveReport& solve = *solved;
        StageReport sr;
        sr.stage = st;
        sr.active_nodes = grid->active_count();
        sr.storage = to_string(A.storage());
        sr.iterations = solve.iterations;
        sr.final_residual = solve.final_residual;
        const auto vals = solve.solution.values();
        sr.min_value = *std::min_element(vals.begin(), vals.end());
        sr.max_value = *std::max_element(vals.begin(), vals.end());
        sr.nonnegative = sr.min_value >= -1e-8 * std::abs(sr.max_value);
        double fsum = 0.0;
        for (double v : f.values()) fsum += v;
        sr.source_mass = grid->cell_volume() * fsum;
        const DiscreteField au = A.apply(solve.solution);
        double asum = 0.0;
        for (double v : au.values()) asum += v;
        sr.mass_defect = std::abs(asum - sr.source_mass);
        sr.pointwise_constant = pointwise_bound_constant(solve.solution, k.order(), st.scale);
        sr.window_constant = envelope_constant(solve.solution, k.order(), 3.0 / stages[0].scale,
                                               stages[0].radius);
        sr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        report->stages.push_back(sr);
        fields.push_back(std::move(solve.solution));
        if (fields.size() >= 2) {
            report->cauchy_gaps.push_back(lp_distance_on_common_nodes(
                fields[fields.size() - 2], fields.back(), options.diagnostics.p, stages[0].radius));
        }
    }

    const Stage& last = stages.back();
    const DiscreteField& u = fields.back();
    const double h = last.spacing;
    const double r_min = options.fit_r_min.value_or(std::max(3.0 / last.scale, 4.0 * h));
    const double r_max = options.fit_r_max.value_or(last.radius / 8.0);
    report->decay_fit = fit_decay(u, r_min, r_max, options.fit_shells);
    report->radial_profile = radial_shells(u, h, 0.5 * last.radius, options.profile_shells);
    DiagnosticParams dp = options.diagnostics;
    dp.l = last.scale;
    report->diagnostics = lemma58_diagnostics(u, V, k.order(), dp);
    report->pointwise_bound_constant = report->stages.back().pointwise_constant;
    report->final_field = u;
    return std::move(*report);
}

}  // namespace fracfund
