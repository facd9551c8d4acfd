#include "fracfund/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fracfund/errors.hpp"

namespace fracfund {

using nlohmann::json;

namespace {

// JSON has no inf/nan; they become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

template <class T>
json optional_number(const std::optional<T>& v) {
    return v ? number(static_cast<double>(*v)) : json(nullptr);
}

std::string exponent_key(double p) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", p);
    return buf;
}

json envelope_json(const Envelope& e) {
    return {{"expected_exponent", number(e.expected_exponent)},
            {"fitted_exponent", optional_number(e.fitted_exponent)},
            {"constant", optional_number(e.constant)}};
}

json rhs_json(const RhsSection& r) {
    json out = {{"kind", r.kind}};
    if (r.kind == "mollifier") out["l"] = number(r.l);
    if (r.kind == "constant") out["value"] = number(r.value);
    if (r.kind == "tabulated") {
        out["radii"] = r.radii;
        out["values"] = r.values;
    }
    return out;
}

}  // namespace

json metadata_block(const std::string& kind) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return {{"schema_version", kSchemaVersion}, {"kind", kind}, {"generated_at", buf}};
}

json to_json(const NormReport& r) {
    json lp = json::object();
    for (const auto& [p, v] : r.lp_norms) lp[exponent_key(p)] = number(v);
    return {{"x_s0_norm", number(r.x_s0_norm)},   {"l2_norm", number(r.l2_norm)},
            {"l2_V_norm", number(r.l2_V_norm)},   {"y_s0_norm", number(r.y_s0_norm)},
            {"gagliardo_norm", optional_number(r.gagliardo_norm)},
            {"hdot_s_norm", optional_number(r.hdot_s_norm)},
            {"lp_norms", lp}};
}

json to_json(const DecayFit& f) {
    return {{"slope", number(f.slope)},   {"intercept", number(f.intercept)},
            {"r_squared", number(f.r_squared)}, {"r_min", number(f.r_min)},
            {"r_max", number(f.r_max)},   {"shells", f.shells}};
}

json to_json(const StageReport& s) {
    return {{"radius", number(s.stage.radius)},
            {"scale", number(s.stage.scale)},
            {"spacing", number(s.stage.spacing)},
            {"n_side", s.stage.n_side},
            {"active_nodes", s.active_nodes},
            {"storage", s.storage},
            {"iterations", s.iterations},
            {"final_residual", number(s.final_residual)},
            {"min_value", number(s.min_value)},
            {"max_value", number(s.max_value)},
            {"nonnegative", s.nonnegative},
            {"source_mass", number(s.source_mass)},
            {"mass_defect", number(s.mass_defect)},
            {"pointwise_constant", number(s.pointwise_constant)},
            {"window_constant", number(s.window_constant)}};
}

json to_json(const DiagnosticTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows) {
        rows.push_back({{"centre", {r.centre[0], r.centre[1], r.centre[2]}},
                        {"r", number(r.r)},
                        {"lp_norm", number(r.lp)},
                        {"l1_V_norm", number(r.l1_V)},
                        {"V_lq_norm", number(r.v_lq)},
                        {"l1_V_over_V_lq", number(r.l1_V_normalised)},
                        {"wgamma_p_seminorm", optional_number(r.wgamma_p)}});
    }
    return {{"p", number(t.p)},
            {"gamma", number(t.gamma)},
            {"q", number(t.q)},
            {"rows", rows},
            {"envelopes",
             {{"lp_norm", envelope_json(t.lp)},
              {"l1_V_over_V_lq", envelope_json(t.l1_V)},
              {"wgamma_p_seminorm", envelope_json(t.wgamma_p)}}},
            {"pointwise_constant", number(t.pointwise_constant)}};
}

json to_json(const FundamentalReport& r) {
    json stages = json::array();
    for (const auto& s : r.stages) stages.push_back(to_json(s));
    json gaps = json::array();
    for (double g : r.cauchy_gaps) gaps.push_back(number(g));
    return {{"stages", stages},
            {"cauchy_gaps", gaps},
            {"decay_fit", r.decay_fit ? to_json(*r.decay_fit) : json(nullptr)},
            {"diagnostics", r.diagnostics ? to_json(*r.diagnostics) : json(nullptr)},
            {"pointwise_bound_constant", number(r.pointwise_bound_constant)}};
}

json config_json(const ExperimentConfig& c) {
    json pot = {{"kind", c.potential.kind}, {"q", number(c.declared_q())}};
    if (c.potential.kind == "constant") pot["value"] = number(c.potential.value);
    if (c.potential.kind == "inverse_power") {
        pot["beta"] = number(c.potential.beta);
        pot["amplitude"] = number(c.potential.amplitude);
    }
    if (c.potential.kind == "tabulated") {
        pot["radii"] = c.potential.radii;
        pot["values"] = c.potential.values;
    }
    return {{"kernel",
             {{"family", to_string(c.kernel.family)},
              {"s", number(c.kernel.s)},
              {"lambda", number(c.kernel.lambda)},
              {"Lambda", number(c.kernel.Lambda)}}},
            {"potential", pot},
            {"grid", {{"n", c.grid.n}, {"R", number(c.grid.radius)}, {"N_side", c.grid.n_side}}},
            {"solver",
             {{"tolerance", number(c.solver.cg_tolerance)},
              {"max_iterations", c.solver.max_iterations ? json(*c.solver.max_iterations) : json(nullptr)},
              {"preconditioner", to_string(c.solver.preconditioner)},
              {"dense_limit", c.dense_limit}}},
            {"rhs", rhs_json(c.rhs)},
            {"schedule",
             {{"radii", c.schedule.radii},
              {"scales", c.schedule.scales},
              {"min_N_side", c.schedule.min_n_side},
              {"N_side", c.schedule.n_sides}}},
            {"fit",
             {{"r_min", optional_number(c.exhaustion.fit_r_min)},
              {"r_max", optional_number(c.exhaustion.fit_r_max)},
              {"shells", c.exhaustion.fit_shells},
              {"profile_shells", c.exhaustion.profile_shells}}},
            {"diagnostics",
             {{"p", number(c.exhaustion.diagnostics.p)},
              {"gamma", number(c.exhaustion.diagnostics.gamma)},
              {"radii", c.exhaustion.diagnostics.radii},
              {"wgamma", c.exhaustion.diagnostics.wgamma}}},
            {"verify",
             {{"samples", c.verify.samples},
              {"N_side", c.verify.n_side},
              {"R", number(c.verify.radius)},
              {"fixture", c.verify.fixture}}},
            {"seed", c.seed}};
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_atomic(const std::string& path, const std::string& text) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out << text;
        out.flush();
        if (!out) throw Error("failed writing '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string field_csv(const DiscreteField& field) {
    std::ostringstream out;
    write_field_csv(out, field);
    return out.str();
}

std::string residual_history_csv(const std::vector<double>& history) {
    std::ostringstream out;
    out << "iteration,relative_residual\n";
    for (std::size_t i = 0; i < history.size(); ++i) {
        out << i << ',' << format_double(history[i]) << '\n';
    }
    return out.str();
}

std::string radial_profile_csv(const std::vector<Shell>& shells, const FractionalOrder& order) {
    const double e = order.n() - 2.0 * order.s();
    std::ostringstream out;
    out << "r_lo,r_hi,count,r_geo,u_geo_mean,u_mean,u_max,u_geo_mean_times_r_pow_n_minus_2s"
           "__pointwise_decay_bound\n";
    for (const Shell& s : shells) {
        out << format_double(s.r_lo) << ',' << format_double(s.r_hi) << ',' << s.count << ','
            << format_double(s.r_geo) << ',' << format_double(s.value_geo) << ','
            << format_double(s.value_mean) << ',' << format_double(s.value_max) << ','
            << format_double(s.value_geo * std::pow(s.r_geo, e)) << '\n';
    }
    return out.str();
}

std::string diagnostics_csv(const DiagnosticTable& t, int n) {
    std::ostringstream out;
    static constexpr const char* axes[] = {"centre_x", "centre_y", "centre_z"};
    for (int d = 0; d < n; ++d) out << axes[d] << ',';
    out << "r,lp_norm__local_lp_bound,l1_V_norm,V_lq_norm,l1_V_over_V_lq__weighted_l1_bound,"
           "wgamma_p_seminorm__local_fractional_sobolev_bound\n";
    for (const auto& r : t.rows) {
        for (int d = 0; d < n; ++d) out << format_double(r.centre[d]) << ',';
        out << format_double(r.r) << ',' << format_double(r.lp) << ',' << format_double(r.l1_V)
            << ',' << format_double(r.v_lq) << ',' << format_double(r.l1_V_normalised) << ','
            << (r.wgamma_p ? format_double(*r.wgamma_p) : std::string()) << '\n';
    }
    return out.str();
}

}  // namespace fracfund
