#include "fracfund/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "fracfund/errors.hpp"
#include "fracfund/quadrature.hpp"

namespace fracfund {

namespace {

constexpr double kPi = std::numbers::pi;

double norm(std::span<const double> y) {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    return std::sqrt(r2);
}

// Resolution of one pass of the radial-angular rule; each level refines every knob.
struct Level {
    int order;           // Gauss points per panel
    int inner_levels;    // geometric panels toward r = 0
    int periods;         // full oscillation periods integrated before the asymptotic tail
    int angular_levels;  // geometric panels toward the kink of |<w, xi>|^{2s}
    int phi_points;      // trapezoid points in the azimuth (n = 3)
};

Level level_params(int level) {
    return {8 + 4 * level, 30 + 10 * level, 32 << level, 16 + 8 * level, 16 << level};
}

// Integral over (0, inf) of (1 - cos(r t)) r^{-1-2s} dr, split at delta.
// Below delta: Gauss panels graded geometrically toward 0 plus the two-term
// Taylor remainder under the innermost breakpoint. Above: panels up to a
// multiple of the period, then a three-term asymptotic expansion of the
// cosine tail.
double radial_cosine_integral(double t, double s, double delta, const Level& lv) {
    if (t == 0.0) return 0.0;
    const double alpha = 1.0 + 2.0 * s;
    auto integrand = [&](double r) {
        const double half = std::sin(0.5 * r * t);
        return 2.0 * half * half * std::pow(r, -alpha);
    };

    // |y| < delta
    const std::vector<double> breaks = quad::graded_toward(0.0, delta, lv.inner_levels);
    const double r0 = breaks.front();
    double inner = t * t * std::pow(r0, 2.0 - 2.0 * s) / (2.0 * (2.0 - 2.0 * s)) -
                   std::pow(t, 4) * std::pow(r0, 4.0 - 2.0 * s) / (24.0 * (4.0 - 2.0 * s));
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        inner += quad::gauss(integrand, breaks[i], breaks[i + 1], lv.order);
    }

    // |y| >= delta
    const double half_period = kPi / t;
    double outer = 0.0;
    double a = delta;
    while (a < half_period) {
        const double b = std::min(2.0 * a, a + half_period);
        outer += quad::gauss(integrand, a, b, lv.order);
        a = b;
    }
    const double x_end = a + 2.0 * lv.periods * half_period;
    while (a < x_end - 0.5 * half_period) {
        outer += quad::gauss(integrand, a, a + half_period, lv.order);
        a += half_period;
    }
    // Tail beyond X: int r^{-alpha} - int cos(t r) r^{-alpha}.
    const double X = a;
    const double sx = std::sin(t * X), cx = std::cos(t * X);
    const double cos_tail = -sx * std::pow(X, -alpha) / t +
                            alpha * cx * std::pow(X, -alpha - 1.0) / (t * t) +
                            alpha * (alpha + 1.0) * sx * std::pow(X, -alpha - 2.0) / (t * t * t);
    outer += std::pow(X, -2.0 * s) / (2.0 * s) - cos_tail;
    return inner + outer;
}

// Orthonormal completion of a unit vector in R^3.
void complete_basis(const std::array<double, 3>& e, std::array<double, 3>& u,
                    std::array<double, 3>& v) {
    std::array<double, 3> seed{1.0, 0.0, 0.0};
    if (std::abs(e[0]) > 0.9) seed = {0.0, 1.0, 0.0};
    u = {e[1] * seed[2] - e[2] * seed[1], e[2] * seed[0] - e[0] * seed[2],
         e[0] * seed[1] - e[1] * seed[0]};
    const double nu = std::sqrt(u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
    for (double& c : u) c /= nu;
    v = {e[1] * u[2] - e[2] * u[1], e[2] * u[0] - e[0] * u[2], e[0] * u[1] - e[1] * u[0]};
}

// Angular integral of a(w) * R(|<w, xi>|) over the unit sphere, where R is the
// radial cosine integral. Panels are graded toward the great circle <w, xi> = 0
// where R(t) ~ t^{2s} has a kink.
template <class Modulation>
double multiplier_core(int n, double s, std::span<const double> xi, const Modulation& a,
                       const Level& lv) {
    const double xnorm = norm(xi);
    if (xnorm == 0.0) return 0.0;
    const double delta = std::min(1.0, 1.0 / xnorm);
    const quad::GaussRule& rule = quad::gauss_legendre(lv.order);

    // psi in [0, pi/2] (n = 2) or mu in [0, 1] (n = 3), graded toward 0 where t = 0.
    const double top = (n == 2) ? 0.5 * kPi : 1.0;
    std::vector<double> breaks = quad::graded_toward(0.0, top, lv.angular_levels);
    breaks.insert(breaks.begin(), 0.0);

    double total = 0.0;
    if (n == 2) {
        const std::array<double, 2> e{xi[0] / xnorm, xi[1] / xnorm};
        const std::array<double, 2> perp{-e[1], e[0]};
        for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
            const double lo = breaks[p], hi = breaks[p + 1];
            const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double psi = mid + half * rule.nodes[i];
                // theta = pi/2 - psi measured from xi; both signs of theta.
                const double c = std::sin(psi), sn = std::cos(psi);
                const double radial = radial_cosine_integral(xnorm * c, s, delta, lv);
                const std::array<double, 2> w1{c * e[0] + sn * perp[0], c * e[1] + sn * perp[1]};
                const std::array<double, 2> w2{c * e[0] - sn * perp[0], c * e[1] - sn * perp[1]};
                total += half * rule.weights[i] * radial * (a(w1) + a(w2));
            }
        }
        // The half circle theta in (pi/2, 3pi/2) mirrors the first through w -> -w.
        return 2.0 * total;
    }

    const std::array<double, 3> e{xi[0] / xnorm, xi[1] / xnorm, xi[2] / xnorm};
    std::array<double, 3> u{}, v{};
    complete_basis(e, u, v);
    const int m_phi = lv.phi_points;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double lo = breaks[p], hi = breaks[p + 1];
        const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
            const double mu = mid + half * rule.nodes[i];
            const double radial = radial_cosine_integral(xnorm * mu, s, delta, lv);
            const double sn = std::sqrt(std::max(0.0, 1.0 - mu * mu));
            double ring = 0.0;
            for (int j = 0; j < m_phi; ++j) {
                const double phi = 2.0 * kPi * j / m_phi;
                const double cp = std::cos(phi), sp = std::sin(phi);
                const std::array<double, 3> w{mu * e[0] + sn * (cp * u[0] + sp * v[0]),
                                              mu * e[1] + sn * (cp * u[1] + sp * v[1]),
                                              mu * e[2] + sn * (cp * u[2] + sp * v[2])};
                ring += a(w);
            }
            total += half * rule.weights[i] * radial * ring * (2.0 * kPi / m_phi);
        }
    }
    // mu in [-1, 0] mirrors through w -> -w.
    return 2.0 * total;
}

template <class Core>
double refine_until_converged(const Core& core, const QuadratureParams& params, const char* what) {
    double previous = core(level_params(0));
    double change = 0.0;
    for (int level = 1; level <= params.max_level; ++level) {
        const double current = core(level_params(level));
        change = std::abs(current - previous);
        const double scale = std::abs(current);
        if (change <= params.rel_tol * scale || (scale == 0.0 && change == 0.0)) return current;
        previous = current;
        change /= (scale > 0.0 ? scale : 1.0);
    }
    std::ostringstream msg;
    msg << what << ": quadrature did not reach relative tolerance " << params.rel_tol
        << " (achieved " << change << ")";
    throw NumericFailure(msg.str(), change);
}

// Integral of f over the unit sphere for smooth f (trapezoid in angle for n = 2,
// Gauss in cos(theta) times trapezoid in phi for n = 3).
template <class F>
double sphere_integral(int n, const F& f, int resolution = 64) {
    if (n == 2) {
        double sum = 0.0;
        for (int j = 0; j < resolution; ++j) {
            const double th = 2.0 * kPi * j / resolution;
            const std::array<double, 2> w{std::cos(th), std::sin(th)};
            sum += f(std::span<const double>(w));
        }
        return sum * 2.0 * kPi / resolution;
    }
    const quad::GaussRule& rule = quad::gauss_legendre(std::min(resolution, 64));
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
        const double mu = rule.nodes[i];
        const double sn = std::sqrt(1.0 - mu * mu);
        double ring = 0.0;
        for (int j = 0; j < resolution; ++j) {
            const double ph = 2.0 * kPi * j / resolution;
            const std::array<double, 3> w{sn * std::cos(ph), sn * std::sin(ph), mu};
            ring += f(std::span<const double>(w));
        }
        sum += rule.weights[i] * ring * 2.0 * kPi / resolution;
    }
    return sum;
}

}  // namespace

FractionalOrder::FractionalOrder(double s, int n) : s_(s), n_(n) {
    if (!(s > 0.0 && s < 1.0)) {
        std::ostringstream msg;
        msg << "fractional order must satisfy s in (0,1), got s = " << s;
        throw ConfigError(msg.str());
    }
    if (n < 2) {
        std::ostringstream msg;
        msg << "dimension must satisfy n >= 2, got n = " << n;
        throw ConfigError(msg.str());
    }
}

void FractionalOrder::require_embedding() const {
    if (!embedding_admissible()) throw DomainError("routine requires 2s < n");
}

std::string to_string(KernelFamily family) {
    return family == KernelFamily::pure_fractional ? "pure_fractional" : "modulated";
}

KernelFamily kernel_family_from_string(const std::string& name) {
    if (name == "pure_fractional") return KernelFamily::pure_fractional;
    if (name == "modulated") return KernelFamily::modulated;
    throw ConfigError("kernel family must be one of {pure_fractional, modulated}, got '" + name +
                      "'");
}

double sphere_area(int n) {
    return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n);
}

double normalization_constant(const FractionalOrder& order, const QuadratureParams& params) {
    std::array<double, 3> e1{1.0, 0.0, 0.0};
    const std::span<const double> xi(e1.data(), order.n());
    auto unit = [](const auto&) { return 1.0; };
    const double integral = refine_until_converged(
        [&](const Level& lv) { return multiplier_core(order.n(), order.s(), xi, unit, lv); },
        params, "normalization_constant");
    if (!(integral > 0.0) || !std::isfinite(integral)) {
        throw NumericFailure("normalization_constant: non-positive defining integral", 1.0);
    }
    return 1.0 / integral;
}

Kernel::Kernel(FractionalOrder order, double lambda, double Lambda, KernelFamily family)
    : order_(order), lambda_(lambda), Lambda_(Lambda), family_(family), c_ns_(0.0),
      modulation_mass_(0.0) {
    if (!(lambda > 0.0) || !(Lambda >= lambda) || !std::isfinite(Lambda)) {
        std::ostringstream msg;
        msg << "kernel bounds must satisfy 0 < lambda <= Lambda < inf, got lambda = " << lambda
            << ", Lambda = " << Lambda;
        throw ConfigError(msg.str());
    }
    if (order.n() > 3) throw ConfigError("kernels are implemented for n in {2, 3}");
    c_ns_ = normalization_constant(order_);
    modulation_mass_ = family_ == KernelFamily::pure_fractional
                           ? sphere_area(order_.n())
                           : sphere_integral(order_.n(), [this](std::span<const double> w) {
                                 return modulation(w);
                             });
}

Kernel Kernel::pure_fractional(FractionalOrder order, double lambda, double Lambda) {
    if (lambda > 1.0 || Lambda < 1.0) {
        std::ostringstream msg;
        msg << "pure_fractional kernel needs lambda <= 1 <= Lambda, got lambda = " << lambda
            << ", Lambda = " << Lambda;
        throw ConfigError(msg.str());
    }
    return Kernel(order, lambda, Lambda, KernelFamily::pure_fractional);
}

Kernel Kernel::modulated(FractionalOrder order, double lambda, double Lambda) {
    return Kernel(order, lambda, Lambda, KernelFamily::modulated);
}

double Kernel::modulation(std::span<const double> unit) const {
    if (family_ == KernelFamily::pure_fractional) return 1.0;
    return lambda_ + (Lambda_ - lambda_) * unit[0] * unit[0];
}

double Kernel::eval_unchecked(std::span<const double> y) const {
    double r2 = 0.0;
    for (double v : y) r2 += v * v;
    const double radial = c_ns_ * std::pow(r2, -0.5 * (order_.n() + 2.0 * order_.s()));
    if (family_ == KernelFamily::pure_fractional) return radial;
    return (lambda_ + (Lambda_ - lambda_) * y[0] * y[0] / r2) * radial;
}

double Kernel::operator()(std::span<const double> y) const {
    if (static_cast<int>(y.size()) != order_.n()) throw DomainError("kernel_eval: dimension mismatch");
    if (norm(y) == 0.0) throw DomainError("kernel_eval: kernel is singular at y = 0");
    return eval_unchecked(y);
}

double kernel_eval(const Kernel& k, std::span<const double> y) { return k(y); }

double multiplier(const Kernel& k, std::span<const double> xi, const QuadratureParams& params) {
    if (static_cast<int>(xi.size()) != k.n()) throw DomainError("multiplier: dimension mismatch");
    for (double v : xi) {
        if (!std::isfinite(v)) throw DomainError("multiplier: xi must be finite");
    }
    if (norm(xi) == 0.0) return 0.0;
    auto a = [&k](const auto& w) { return k.modulation(std::span<const double>(w)); };
    const double integral = refine_until_converged(
        [&](const Level& lv) { return multiplier_core(k.n(), k.s(), xi, a, lv); }, params,
        "multiplier");
    return k.normalization() * integral;
}

double tail_mass(const Kernel& k, double rho) {
    if (!(rho > 0.0)) throw DomainError("tail_mass: rho must be positive");
    const double s = k.s();
    return k.normalization() * k.modulation_mass() * std::pow(rho, -2.0 * s) / (2.0 * s);
}

double near_mass_second_moment(const Kernel& k, double rho) {
    if (!(rho > 0.0)) throw DomainError("near_mass_second_moment: rho must be positive");
    const double s = k.s();
    return k.normalization() * k.modulation_mass() * std::pow(rho, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);
}

// ---------------------------------------------------------------------------
// Potential

Potential::Potential(Spec spec, double declared_q, const FractionalOrder& order)
    : spec_(std::move(spec)), q_(declared_q) {
    const double n = order.n(), s = order.s();
    if (!(declared_q > n / (2.0 * s)) || !std::isfinite(declared_q)) {
        std::ostringstream msg;
        msg << "potential exponent must satisfy q > n/(2s) = " << n / (2.0 * s) << ", got q = "
            << declared_q;
        throw ConfigError(msg.str());
    }
    if (const auto* c = std::get_if<Constant>(&spec_)) {
        if (!(c->value >= 0.0) || !std::isfinite(c->value)) {
            throw ConfigError("constant potential must be finite and nonnegative");
        }
    } else if (const auto* p = std::get_if<InversePower>(&spec_)) {
        if (!(p->beta > 0.0)) throw ConfigError("inverse_power potential needs beta > 0");
        if (!(p->amplitude >= 0.0) || !std::isfinite(p->amplitude)) {
            throw ConfigError("inverse_power amplitude must be finite and nonnegative");
        }
        if (!(p->beta * declared_q < n)) {
            std::ostringstream msg;
            msg << "inverse_power potential needs beta * q < n for local L^q integrability, got "
                << p->beta << " * " << declared_q << " >= " << n;
            throw ConfigError(msg.str());
        }
    } else if (const auto* t = std::get_if<Tabulated>(&spec_)) {
        if (t->radii.empty() || t->radii.size() != t->values.size()) {
            throw ConfigError("tabulated potential needs matching, nonempty radius/value lists");
        }
        for (std::size_t i = 0; i < t->radii.size(); ++i) {
            if (!(t->values[i] >= 0.0) || !std::isfinite(t->values[i])) {
                std::ostringstream msg;
                msg << "tabulated potential value at r = " << t->radii[i]
                    << " is negative or non-finite (" << t->values[i] << ")";
                throw ConfigError(msg.str());
            }
            if (t->radii[i] < 0.0 || (i > 0 && !(t->radii[i] > t->radii[i - 1]))) {
                throw ConfigError("tabulated potential radii must be nonnegative and increasing");
            }
        }
    }
}

Potential Potential::zero(const FractionalOrder& order) {
    return Potential(Zero{}, order.n() / (2.0 * order.s()) + 1.0, order);
}

Potential Potential::constant(double value, const FractionalOrder& order) {
    return Potential(Constant{value}, order.n() / (2.0 * order.s()) + 1.0, order);
}

bool Potential::is_zero() const noexcept {
    if (std::holds_alternative<Zero>(spec_)) return true;
    if (const auto* c = std::get_if<Constant>(&spec_)) return c->value == 0.0;
    return false;
}

std::string Potential::kind() const {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Zero>) return "zero";
            else if constexpr (std::is_same_v<T, Constant>) return "constant";
            else if constexpr (std::is_same_v<T, InversePower>) return "inverse_power";
            else return "tabulated";
        },
        spec_);
}

double Potential::operator()(std::span<const double> x) const {
    return std::visit(
        [&](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Zero>) {
                return 0.0;
            } else if constexpr (std::is_same_v<T, Constant>) {
                return v.value;
            } else if constexpr (std::is_same_v<T, InversePower>) {
                return v.amplitude * std::pow(norm(x), -v.beta);
            } else {
                const double r = norm(x);
                if (r <= v.radii.front()) return v.values.front();
                if (r >= v.radii.back()) return v.values.back();
                const auto it = std::upper_bound(v.radii.begin(), v.radii.end(), r);
                const std::size_t j = static_cast<std::size_t>(it - v.radii.begin());
                const double t = (r - v.radii[j - 1]) / (v.radii[j] - v.radii[j - 1]);
                return (1.0 - t) * v.values[j - 1] + t * v.values[j];
            }
        },
        spec_);
}

}  // namespace fracfund
