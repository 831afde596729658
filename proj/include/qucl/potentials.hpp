#pragma once

#include <string>
#include <vector>

#include "qucl/fields.hpp"
#include "qucl/report.hpp"

namespace qucl {

/// Potential V on a domain with its integrability exponent s in [n/2, infinity].
///
/// All norms of V use the cell-midpoint rule of the domain grid; this is the
/// discrete measure in which class membership is decided.
class Potential {
public:
    Potential(ScalarField field, DomainPtr domain, double s);

    const ScalarField& field() const { return field_; }
    const DomainPtr& domain() const { return domain_; }
    int dim() const { return domain_->dim(); }
    double s() const { return s_; }
    double operator()(const Vec& x) const { return field_(x); }

    /// ||V||_{L^s(Omega)}.
    double kappa() const;
    /// ||V||_{L^p(Omega)} in the same discrete measure.
    double norm(double p) const;
    /// ||V||_{L^{n/2}(Omega)}.
    double kappa_critical() const { return norm(0.5 * dim()); }
    double sup() const { return norm(kInf); }
    /// Smallest value over the midpoint points.
    double min_value() const;

    Potential scaled(double c) const;
    Potential with_exponent(double s) const;

private:
    ScalarField field_;
    DomainPtr domain_;
    double s_;
};

class Drift {
public:
    Drift(VectorField field, DomainPtr domain, double m);

    const VectorField& field() const { return field_; }
    double m() const { return m_; }
    Vec operator()(const Vec& x) const { return field_(x); }
    /// ||W||_{L^m(Omega)} of the Euclidean length.
    double kappa() const;
    double sup() const;

private:
    VectorField field_;
    DomainPtr domain_;
    double m_;
};

/// Midpoint rule used for every potential and drift norm.
RulePtr potential_rule(const DomainPtr& domain);

struct SplitResult {
    Potential V1;  // V on {|V| > t}, exponent n/2
    Potential V2;  // V on {|V| <= t}, exponent infinity
    double t = 0;
    double norm_V1 = 0;       // ||V1||_{n/2}
    double bound_V1 = 0;      // t^{-(2s/n - 1)} kappa^{2s/n}
    double sup_V2 = 0;        // ||V2||_inf
    bool bounds_hold = false;
    double reconstruction_error = 0;  // max |V1 + V2 - V| over the midpoint points
};

/// Truncation split at level t. Exponent s = infinity returns the identity split V2 = V.
SplitResult split(const Potential& V, double t);

struct ClassMembership {
    bool v0 = false;     // 2 sigma^2 kappa < 1
    bool v = false;      // 2 sigma^2 kappa < 1 and vartheta kappa < 1
    bool vs = false;     // vartheta kappa_tilde < 1
    bool drift = false;  // min(m, 2s) > 3n/2 - 1
    double two_sigma2_kappa = 0;
    double vartheta_kappa = 0;
    double vartheta_kappa_tilde = 0;
    double drift_margin = 0;
};

/// kappa_critical = ||V||_{n/2}; the s-regime class uses the same norm.
ClassMembership classify(int n, double kappa_critical, double s, double m, double sigma, double vartheta);
ClassMembership classify(const Potential& V, const Drift* W, double sigma, double vartheta);

/// Built-in potentials selectable by name.
Potential constant_potential(const DomainPtr& domain, double c, double s = kInf);
/// `high` on the box `sub`, `low` elsewhere.
Potential two_level_potential(const DomainPtr& domain, const Box& sub, double high, double low, double s);
/// |x - x0|^{-a} with |x - x0| floored at the grid spacing.
Potential radial_power_potential(const DomainPtr& domain, const Vec& x0, double a, double s);
/// Piecewise-constant potential on a list of boxes; later boxes override earlier ones.
Potential piecewise_constant_potential(const DomainPtr& domain, std::vector<Box> boxes, std::vector<double> values,
                                       double base, double s);

struct Manufactured {
    ScalarField u;
    Potential V;
    std::string name;
};

/// V := Delta u / u so that (-Delta + V) u = 0. Throws ZeroCrossing if u vanishes on a closure node.
Manufactured manufacture(const ScalarField& u, const DomainPtr& domain, double s = kInf, std::string name = "");

/// Closed-form solutions used across the test suite.
ScalarField exp_field(const Vec& a);             // e^{a.x}, Delta = |a|^2 u
ScalarField cosh_field(const Vec& a);            // cosh(a.x)
ScalarField harmonic_field(int degree, const Vec& x0);  // 1, x1, x1^2 - x2^2, Re (x1 + i x2)^3 about x0

/// ||V u||_p <= ||V||_{n/2} ||u||_{p'} with p = 2n/(n+2), p' = 2n/(n-2), all in the midpoint measure.
InequalityReport holder_product_check(const Potential& V, const ScalarField& u);

}  // namespace qucl
