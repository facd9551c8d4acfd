#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace fracfund {

/// Order s in (0,1) of the operator together with the space dimension n >= 2.
class FractionalOrder {
public:
    FractionalOrder(double s, int n);

    double s() const noexcept { return s_; }
    int n() const noexcept { return n_; }

    /// 2s < n, the condition for the critical Sobolev embedding. Automatic for n >= 2.
    bool embedding_admissible() const noexcept { return 2.0 * s_ < n_; }
    /// Throws DomainError when a routine needing the embedding exponent is misused.
    void require_embedding() const;

    /// Critical exponent 2n / (n - 2s).
    double sobolev_exponent() const { return 2.0 * n_ / (n_ - 2.0 * s_); }

private:
    double s_;
    int n_;
};

enum class KernelFamily { pure_fractional, modulated };

std::string to_string(KernelFamily family);
KernelFamily kernel_family_from_string(const std::string& name);

/// Quadrature controls for the singular integrals below.
struct QuadratureParams {
    double rel_tol = 1e-6;
    int max_level = 5;
};

/// Symmetric kernel K(y) = a(y/|y|) c_{n,s} |y|^{-n-2s}.
///
/// pure_fractional has a == 1 (the fractional Laplacian). modulated uses the
/// angular factor a(w) = lambda + (Lambda - lambda) * w_1^2, which stays inside
/// [lambda, Lambda] and is even in every coordinate, so K(y) = K(-y) and every
/// reflection y_i -> -y_i leaves K unchanged.
class Kernel {
public:
    static Kernel pure_fractional(FractionalOrder order, double lambda = 1.0, double Lambda = 1.0);
    static Kernel modulated(FractionalOrder order, double lambda, double Lambda);

    const FractionalOrder& order() const noexcept { return order_; }
    double s() const noexcept { return order_.s(); }
    int n() const noexcept { return order_.n(); }
    double lambda() const noexcept { return lambda_; }
    double Lambda() const noexcept { return Lambda_; }
    KernelFamily family() const noexcept { return family_; }
    /// c_{n,s}, computed once at construction by quadrature.
    double normalization() const noexcept { return c_ns_; }

    /// Angular factor a(w) for a unit vector w.
    double modulation(std::span<const double> unit) const;
    /// Surface integral of a over the unit sphere.
    double modulation_mass() const noexcept { return modulation_mass_; }

    /// K(y). Throws DomainError at y = 0.
    double operator()(std::span<const double> y) const;
    /// K(y) for y != 0 without the origin check, used in tight loops.
    double eval_unchecked(std::span<const double> y) const;

private:
    Kernel(FractionalOrder order, double lambda, double Lambda, KernelFamily family);

    FractionalOrder order_;
    double lambda_;
    double Lambda_;
    KernelFamily family_;
    double c_ns_;
    double modulation_mass_;
};

/// c_{n,s} such that c * integral (1 - cos xi_1) |xi|^{-n-2s} dxi = 1, by
/// radial-angular quadrature with rel. error <= params.rel_tol. Throws
/// NumericFailure carrying the achieved tolerance when the refinement stalls.
double normalization_constant(const FractionalOrder& order, const QuadratureParams& params = {});

/// K(y); identical to k(y).
double kernel_eval(const Kernel& k, std::span<const double> y);

/// m(xi) = integral (1 - cos<y, xi>) K(y) dy.
double multiplier(const Kernel& k, std::span<const double> xi, const QuadratureParams& params = {});

/// Integral of K over |y| > rho.
double tail_mass(const Kernel& k, double rho);

/// Integral of |y|^2 K(y) over |y| < rho.
double near_mass_second_moment(const Kernel& k, double rho);

/// Surface area of the unit sphere in R^n.
double sphere_area(int n);

/// Nonnegative potential V.
class Potential {
public:
    struct Zero {};
    struct Constant {
        double value;
    };
    struct InversePower {
        double beta;
        double amplitude = 1.0;
    };
    /// Radial table (r_i, V_i), linear in between, constant beyond the ends.
    struct Tabulated {
        std::vector<double> radii;
        std::vector<double> values;
    };
    using Spec = std::variant<Zero, Constant, InversePower, Tabulated>;

    /// Validates nonnegativity, q > n / (2s) and beta * q < n.
    Potential(Spec spec, double declared_q, const FractionalOrder& order);

    static Potential zero(const FractionalOrder& order);
    static Potential constant(double value, const FractionalOrder& order);

    const Spec& spec() const noexcept { return spec_; }
    double declared_q() const noexcept { return q_; }
    /// Hoelder dual of q.
    double dual_exponent() const noexcept { return q_ / (q_ - 1.0); }
    bool is_zero() const noexcept;
    std::string kind() const;

    /// V(x) for x != 0 (inverse_power is singular at the origin).
    double operator()(std::span<const double> x) const;

private:
    Spec spec_;
    double q_;
};

}  // namespace fracfund
