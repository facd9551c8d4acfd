#include "fracfund/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fracfund/errors.hpp"

namespace fracfund {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"kernel", {"family", "s", "lambda", "Lambda"}},
        {"potential", {"kind", "value", "beta", "amplitude", "radii", "values", "q"}},
        {"grid", {"n", "R", "N_side"}},
        {"solver", {"tolerance", "max_iterations", "preconditioner", "dense_limit"}},
        {"rhs", {"kind", "value", "l", "radii", "values"}},
        {"schedule", {"radii", "scales", "min_N_side", "N_side"}},
        {"fit", {"r_min", "r_max", "shells", "profile_shells"}},
        {"diagnostics", {"p", "gamma", "radii", "wgamma"}},
        {"verify", {"samples", "N_side", "R", "fixture"}},
        {"run", {"seed", "output_dir"}},
    };
    return keys;
}

std::string key_name(const std::string& section, const std::string& key) {
    return section + "." + key;
}

template <class T>
T parse_value(const std::string& section, const std::string& key, const std::string& text) {
    std::istringstream in(text);
    T v{};
    in >> v;
    if (in.fail() || !(in >> std::ws).eof()) {
        throw ConfigError(key_name(section, key) + ": cannot parse '" + text + "'");
    }
    return v;
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& text) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        const auto e = item.find_last_not_of(" \t");
        out.push_back(parse_value<double>(section, key, item.substr(b, e - b + 1)));
    }
    if (out.empty()) throw ConfigError(key_name(section, key) + ": empty list");
    return out;
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(key_name(section, key) + ": expected true or false, got '" + text + "'");
}

}  // namespace

FractionalOrder ExperimentConfig::order() const { return FractionalOrder(kernel.s, grid.n); }

Kernel ExperimentConfig::make_kernel() const {
    const FractionalOrder o = order();
    return kernel.family == KernelFamily::pure_fractional
               ? Kernel::pure_fractional(o, kernel.lambda, kernel.Lambda)
               : Kernel::modulated(o, kernel.lambda, kernel.Lambda);
}

double ExperimentConfig::declared_q() const {
    return potential.q.value_or(grid.n / kernel.s);
}

Potential ExperimentConfig::make_potential() const {
    const FractionalOrder o = order();
    const double q = declared_q();
    const std::string& k = potential.kind;
    if (k == "zero") return Potential(Potential::Zero{}, q, o);
    if (k == "constant") return Potential(Potential::Constant{potential.value}, q, o);
    if (k == "inverse_power") {
        return Potential(Potential::InversePower{potential.beta, potential.amplitude}, q, o);
    }
    if (k == "tabulated") {
        return Potential(Potential::Tabulated{potential.radii, potential.values}, q, o);
    }
    throw ConfigError("potential.kind must be one of {zero, constant, inverse_power, tabulated}, got '" +
                      k + "'");
}

void ExperimentConfig::validate() const {
    const FractionalOrder o = order();  // s in (0,1), n >= 2
    if (grid.n != 2 && grid.n != 3) throw ConfigError("grid.n must be 2 or 3");
    if (!(kernel.lambda > 0.0)) throw ConfigError("kernel.lambda must be > 0");
    if (!(kernel.lambda <= kernel.Lambda)) throw ConfigError("kernel requires lambda <= Lambda");
    make_kernel();
    make_potential();  // q > n/(2s), nonnegativity, beta q < n
    if (!(grid.radius > 0.0)) throw ConfigError("grid.R must be > 0");
    if (grid.n_side < 8) throw ConfigError("grid.N_side must be >= 8");
    solver.validate();
    if (dense_limit < 1) throw ConfigError("solver.dense_limit must be >= 1");

    if (rhs.kind == "mollifier") {
        if (!(rhs.l >= 1.0)) throw ConfigError("rhs.l must be >= 1");
    } else if (rhs.kind == "constant") {
        if (!std::isfinite(rhs.value)) throw ConfigError("rhs.value must be finite");
    } else if (rhs.kind == "tabulated") {
        if (rhs.radii.size() != rhs.values.size() || rhs.radii.empty()) {
            throw ConfigError("rhs.radii and rhs.values must have equal, nonzero length");
        }
        if (!std::is_sorted(rhs.radii.begin(), rhs.radii.end(), std::less_equal<>()) ||
            rhs.radii.front() < 0.0) {
            throw ConfigError("rhs.radii must be nonnegative and strictly increasing");
        }
    } else {
        throw ConfigError("rhs.kind must be one of {mollifier, constant, tabulated}, got '" +
                          rhs.kind + "'");
    }

    ExhaustionSchedule sch = schedule;
    sch.n = grid.n;
    sch.validate();

    const DiagnosticParams& d = exhaustion.diagnostics;
    const double n = grid.n, s = kernel.s;
    if (!(d.p >= 1.0 && d.p < n / (n - 2.0 * s))) {
        std::ostringstream msg;
        msg << "diagnostics.p must satisfy 1 <= p < n/(n-2s) = " << n / (n - 2.0 * s);
        throw ConfigError(msg.str());
    }
    if (d.wgamma) {
        if (!(d.gamma > 0.0 && d.gamma < s)) {
            throw ConfigError("diagnostics.gamma must satisfy gamma in (0,s)");
        }
        if (!(d.p < n / (n - s))) {
            std::ostringstream msg;
            msg << "diagnostics.p must satisfy p < n/(n-s) = " << n / (n - s)
                << " for the W^{gamma,p} bound";
            throw ConfigError(msg.str());
        }
    }
    for (double r : d.radii) {
        if (!(r > 0.0)) throw ConfigError("diagnostics.radii must be positive");
    }
    if (exhaustion.fit_shells < 4) throw ConfigError("fit.shells must be >= 4");
    if (exhaustion.profile_shells < 1) throw ConfigError("fit.profile_shells must be >= 1");
    if (exhaustion.fit_r_min && exhaustion.fit_r_max &&
        !(*exhaustion.fit_r_min < *exhaustion.fit_r_max)) {
        throw ConfigError("fit requires r_min < r_max");
    }
    if (verify.samples < 1) throw ConfigError("verify.samples must be >= 1");
    if (verify.n_side < 8) throw ConfigError("verify.N_side must be >= 8");
    if (!(verify.radius > 0.0)) throw ConfigError("verify.R must be > 0");
    if (verify.fixture != "none" && verify.fixture != "negate_order") {
        throw ConfigError("verify.fixture must be one of {none, negate_order}");
    }
    (void)o;
}

DiscreteField make_rhs(const RhsSection& rhs, GridPtr grid) {
    if (rhs.kind == "mollifier") return sample_mollifier(Mollifier(rhs.l, grid->n()), grid);
    if (rhs.kind == "constant") {
        return DiscreteField(grid, std::vector<double>(grid->active_count(), rhs.value));
    }
    if (rhs.kind == "tabulated") {
        const auto& r = rhs.radii;
        const auto& v = rhs.values;
        const int n = grid->n();
        return DiscreteField::sample(std::move(grid), [&](const Point& x) {
            double rr = 0.0;
            for (int d = 0; d < n; ++d) rr += x[d] * x[d];
            rr = std::sqrt(rr);
            if (rr <= r.front()) return v.front();
            if (rr >= r.back()) return v.back();
            const std::size_t j = static_cast<std::size_t>(
                std::upper_bound(r.begin(), r.end(), rr) - r.begin());
            const double t = (rr - r[j - 1]) / (r[j] - r[j - 1]);
            return (1.0 - t) * v[j - 1] + t * v[j];
        });
    }
    throw ConfigError("rhs.kind must be one of {mollifier, constant, tabulated}, got '" + rhs.kind +
                      "'");
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
    pt::ptree tree;
    try {
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(source + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    for (const auto& [section, body] : tree) {
        const auto it = known_keys().find(section);
        if (it == known_keys().end()) {
            if (body.empty()) throw ConfigError(source + ": key '" + section + "' outside a section");
            throw ConfigError(source + ": unknown section [" + section + "]");
        }
        for (const auto& [key, value] : body) {
            if (!it->second.count(key)) {
                throw ConfigError(source + ": unknown key '" + key_name(section, key) + "'");
            }
            (void)value;
        }
    }

    ExperimentConfig c;
    c.source = source;
    auto get = [&](const char* section, const char* key) -> std::optional<std::string> {
        const auto v = tree.get_optional<std::string>(pt::ptree::path_type(std::string(section) + "." + key));
        return v ? std::optional<std::string>(*v) : std::nullopt;
    };
    auto num = [&](const char* section, const char* key, auto& target) {
        if (auto v = get(section, key)) {
            target = parse_value<std::decay_t<decltype(target)>>(section, key, *v);
        }
    };
    auto list = [&](const char* section, const char* key, std::vector<double>& target) {
        if (auto v = get(section, key)) target = parse_list(section, key, *v);
    };

    if (auto v = get("kernel", "family")) c.kernel.family = kernel_family_from_string(*v);
    num("kernel", "s", c.kernel.s);
    num("kernel", "lambda", c.kernel.lambda);
    num("kernel", "Lambda", c.kernel.Lambda);

    if (auto v = get("potential", "kind")) c.potential.kind = *v;
    num("potential", "value", c.potential.value);
    num("potential", "beta", c.potential.beta);
    num("potential", "amplitude", c.potential.amplitude);
    list("potential", "radii", c.potential.radii);
    list("potential", "values", c.potential.values);
    if (auto v = get("potential", "q")) c.potential.q = parse_value<double>("potential", "q", *v);

    num("grid", "n", c.grid.n);
    num("grid", "R", c.grid.radius);
    num("grid", "N_side", c.grid.n_side);

    num("solver", "tolerance", c.solver.cg_tolerance);
    if (auto v = get("solver", "max_iterations")) {
        const long long m = parse_value<long long>("solver", "max_iterations", *v);
        if (m < 1) throw ConfigError("solver.max_iterations must be >= 1");
        c.solver.max_iterations = static_cast<std::size_t>(m);
    }
    if (auto v = get("solver", "preconditioner")) c.solver.preconditioner = preconditioner_from_string(*v);
    num("solver", "dense_limit", c.dense_limit);

    if (auto v = get("rhs", "kind")) c.rhs.kind = *v;
    num("rhs", "value", c.rhs.value);
    num("rhs", "l", c.rhs.l);
    list("rhs", "radii", c.rhs.radii);
    list("rhs", "values", c.rhs.values);

    c.schedule.n = c.grid.n;
    c.schedule.radii = {2.0, 4.0, 8.0};
    c.schedule.scales = {4.0, 8.0, 16.0};
    list("schedule", "radii", c.schedule.radii);
    list("schedule", "scales", c.schedule.scales);
    num("schedule", "min_N_side", c.schedule.min_n_side);
    {
        std::vector<double> sides;
        list("schedule", "N_side", sides);
        for (double v : sides) {
            if (v != std::floor(v)) throw ConfigError("schedule.N_side: entries must be integers");
            c.schedule.n_sides.push_back(static_cast<int>(v));
        }
    }

    if (auto v = get("fit", "r_min")) c.exhaustion.fit_r_min = parse_value<double>("fit", "r_min", *v);
    if (auto v = get("fit", "r_max")) c.exhaustion.fit_r_max = parse_value<double>("fit", "r_max", *v);
    num("fit", "shells", c.exhaustion.fit_shells);
    num("fit", "profile_shells", c.exhaustion.profile_shells);

    num("diagnostics", "p", c.exhaustion.diagnostics.p);
    num("diagnostics", "gamma", c.exhaustion.diagnostics.gamma);
    list("diagnostics", "radii", c.exhaustion.diagnostics.radii);
    if (auto v = get("diagnostics", "wgamma")) {
        c.exhaustion.diagnostics.wgamma = parse_bool("diagnostics", "wgamma", *v);
    }

    num("verify", "samples", c.verify.samples);
    num("verify", "N_side", c.verify.n_side);
    num("verify", "R", c.verify.radius);
    if (auto v = get("verify", "fixture")) c.verify.fixture = *v;

    num("run", "seed", c.seed);
    if (auto v = get("run", "output_dir")) c.output_dir = *v;

    c.exhaustion.assembly.dense_limit = c.dense_limit;
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in, path);
}

}  // namespace fracfund
