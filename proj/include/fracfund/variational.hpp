#pragma once

#include <map>
#include <optional>

#include "fracfund/grid.hpp"
#include "fracfund/kernel.hpp"
#include "fracfund/operator.hpp"

namespace fracfund {

/// Norms of a field on its grid.
///
/// x_s0_norm is sqrt(<u,u>_K) for the operator's kernel, so that
/// y_s0_norm^2 = x_s0_norm^2 + l2_V_norm^2 matches the assembled form.
/// gagliardo_norm is the raw double-sum seminorm with kernel |x-y|^{-n-2s}.
struct NormReport {
    double x_s0_norm = 0.0;
    double l2_norm = 0.0;
    double l2_V_norm = 0.0;
    double y_s0_norm = 0.0;
    std::optional<double> gagliardo_norm;
    std::optional<double> hdot_s_norm;
    std::map<double, double> lp_norms;
};

struct NormOptions {
    bool gagliardo = false;
    bool hdot = false;
};

NormReport compute_norms(const AssembledOperator& A, const DiscreteField& u,
                         const NormOptions& options = {});

/// (h^n sum |u_i|^p)^{1/p}, p >= 1.
double lp_norm(const DiscreteField& u, double p);
/// Same restricted to active nodes in B_r(centre).
double lp_norm_ball(const DiscreteField& u, double p, std::span<const double> centre, double r);

/// The double sum over R^{2n} minus (Omega^c)^2 of
/// (u(x)-u(y))(v(x)-v(y)) |x-y|^{-n-2s}, discretised exactly as the assembled
/// form with K replaced by |y|^{-n-2s}. Evaluated by explicit pair sums on small
/// grids and through the matrix-free operator otherwise.
class GagliardoForm {
public:
    GagliardoForm(const FractionalOrder& order, GridPtr grid, const AssemblyOptions& options = {});

    const AssembledOperator& pure_operator() const noexcept { return pure_; }
    double inner(const DiscreteField& u, const DiscreteField& v) const;
    double seminorm(const DiscreteField& u) const;

private:
    FractionalOrder order_;
    AssembledOperator pure_;
    double factor_;  // 2 / c_{n,s}
};

double xs0_inner(const FractionalOrder& order, const DiscreteField& u, const DiscreteField& v);

/// E_V(u) = <u,u>_K + int V u^2 - 2 h^n sum f_i u_i.
double energy(const AssembledOperator& A, const DiscreteField& u, const DiscreteField& f);
double energy(const Kernel& k, const Potential& V, const DiscreteField& u, const DiscreteField& f);

/// Spectral |u|^2_{H^s} divided by (c/2) * gagliardo^2. Returns 1 for u = 0.
double hdot_s_identity_check(const FractionalOrder& order, const DiscreteField& u,
                             double padding = 8.0);

/// (sum_{x != y in B_r(c)} |u(x)-u(y)|^p |x-y|^{-n-gamma p} h^{2n})^{1/p}.
/// Requires 0 < gamma < s and 1 <= p < n/(n-s).
double wgamma_p_seminorm(const FractionalOrder& order, const DiscreteField& u, double gamma,
                         double p, std::span<const double> centre, double r,
                         bool parallel = true);

/// |u|_{L^{2n/(n-2s)}} / sqrt((c/2) gagliardo^2).
double embedding_ratio(const FractionalOrder& order, const DiscreteField& u);
double embedding_ratio(const GagliardoForm& form, const FractionalOrder& order,
                       const DiscreteField& u);

}  // namespace fracfund
