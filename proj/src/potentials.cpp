#include "qucl/potentials.hpp"

#include <algorithm>

namespace qucl {

RulePtr potential_rule(const DomainPtr& domain) { return cell_midpoint_rule(domain); }

Potential::Potential(ScalarField field, DomainPtr domain, double s)
    : field_(std::move(field)), domain_(std::move(domain)), s_(s) {
    require(domain_ != nullptr, "potential needs a domain");
    require(s_ >= 0.5 * domain_->dim(), "potential exponent must be at least n/2");
}

double Potential::norm(double p) const { return lp_norm(field_, *potential_rule(domain_), p); }

double Potential::kappa() const { return norm(s_); }

double Potential::min_value() const {
    const auto rule = potential_rule(domain_);
    double m = kInf;
    std::vector<Vec> pts;
    std::vector<double> w;
    for (std::size_t b = 0; b < rule->blocks(); ++b) {
        rule->block(b, pts, w);
        for (const auto& x : pts) m = std::min(m, field_(x));
    }
    return m;
}

Potential Potential::scaled(double c) const { return Potential(field_.scaled(c), domain_, s_); }

Potential Potential::with_exponent(double s) const { return Potential(field_, domain_, s); }

Drift::Drift(VectorField field, DomainPtr domain, double m) : field_(std::move(field)), domain_(std::move(domain)), m_(m) {
    require(static_cast<bool>(field_), "drift needs an evaluator");
    require(domain_ != nullptr, "drift needs a domain");
    require(m_ > domain_->dim(), "drift exponent must exceed n");
}

double Drift::kappa() const {
    const auto len = ScalarField::analytic([f = field_](const Vec& x) { return norm(f(x)); });
    return lp_norm(len, *potential_rule(domain_), m_);
}

double Drift::sup() const {
    const auto len = ScalarField::analytic([f = field_](const Vec& x) { return norm(f(x)); });
    return lp_norm(len, *potential_rule(domain_), kInf);
}

SplitResult split(const Potential& V, double t) {
    require(t > 0.0, "split threshold must be positive");
    const int n = V.dim();
    const double s = V.s();
    if (std::isinf(s)) {
        SplitResult r{V.scaled(0.0).with_exponent(0.5 * n), V, t};
        r.sup_V2 = V.sup();
        r.bounds_hold = true;
        return r;
    }
    require(s > 0.5 * n, "split needs s in (n/2, infinity)");
    const auto f = V.field();
    const auto f1 = ScalarField::analytic([f, t](const Vec& x) {
        const double v = f(x);
        return std::abs(v) > t ? v : 0.0;
    });
    const auto f2 = ScalarField::analytic([f, t](const Vec& x) {
        const double v = f(x);
        return std::abs(v) > t ? 0.0 : v;
    });
    SplitResult r{Potential(f1, V.domain(), 0.5 * n), Potential(f2, V.domain(), kInf), t};
    r.norm_V1 = r.V1.norm(0.5 * n);
    r.bound_V1 = std::pow(t, -(2.0 * s / n - 1.0)) * std::pow(V.kappa(), 2.0 * s / n);
    r.sup_V2 = r.V2.sup();
    r.bounds_hold = r.norm_V1 <= r.bound_V1 && r.sup_V2 <= t;
    r.reconstruction_error = max_abs(*potential_rule(V.domain()), [&](const Vec& x) { return f1(x) + f2(x) - f(x); });
    return r;
}

ClassMembership classify(int n, double kappa_critical, double s, double m, double sigma, double vartheta) {
    require(sigma > 0.0 && vartheta > 0.0, "sigma and vartheta must be positive");
    ClassMembership c;
    c.two_sigma2_kappa = 2.0 * sigma * sigma * kappa_critical;
    c.vartheta_kappa = vartheta * kappa_critical;
    c.vartheta_kappa_tilde = vartheta * kappa_critical;
    c.v0 = c.two_sigma2_kappa < 1.0;
    c.v = c.v0 && c.vartheta_kappa < 1.0;
    c.vs = c.vartheta_kappa_tilde < 1.0;
    c.drift_margin = std::min(m, 2.0 * s) - (1.5 * n - 1.0);
    c.drift = c.drift_margin > 0.0;
    return c;
}

ClassMembership classify(const Potential& V, const Drift* W, double sigma, double vartheta) {
    return classify(V.dim(), V.kappa_critical(), V.s(), W ? W->m() : kInf, sigma, vartheta);
}

Potential constant_potential(const DomainPtr& domain, double c, double s) {
    return Potential(ScalarField::constant(c), domain, s);
}

Potential two_level_potential(const DomainPtr& domain, const Box& sub, double high, double low, double s) {
    return piecewise_constant_potential(domain, {sub}, {high}, low, s);
}

Potential piecewise_constant_potential(const DomainPtr& domain, std::vector<Box> boxes, std::vector<double> values,
                                       double base, double s) {
    require(boxes.size() == values.size(), "one value per box");
    const int n = domain->dim();
    auto f = ScalarField::analytic(
        [boxes = std::move(boxes), values = std::move(values), base, n](const Vec& x) {
            double v = base;
            for (std::size_t b = 0; b < boxes.size(); ++b) {
                bool in = true;
                for (int a = 0; a < n; ++a) in = in && x[a] >= boxes[b].lo[a] && x[a] <= boxes[b].hi[a];
                if (in) v = values[b];
            }
            return v;
        },
        [](const Vec&) { return Vec{}; });
    return Potential(f, domain, s);
}

Potential radial_power_potential(const DomainPtr& domain, const Vec& x0, double a, double s) {
    const double floor = domain->spacing();
    return Potential(ScalarField::analytic([=](const Vec& x) { return std::pow(std::max(distance(x, x0), floor), -a); }),
                     domain, s);
}

Manufactured manufacture(const ScalarField& u, const DomainPtr& domain, double s, std::string name) {
    require(u.has_laplacian(), "manufactured pairs need an analytic Laplacian");
    for (std::size_t i = 0; i < domain->node_count(); ++i)
        if (domain->node_in_closure(i) && u(domain->node(i)) == 0.0)
            throw ZeroCrossing("manufactured solution vanishes at a grid node");
    // Sign changes between nodes are caught on cell centers as well.
    const auto rule = potential_rule(domain);
    std::vector<Vec> pts;
    std::vector<double> w;
    for (std::size_t b = 0; b < rule->blocks(); ++b) {
        rule->block(b, pts, w);
        for (const auto& x : pts)
            if (u(x) == 0.0) throw ZeroCrossing("manufactured solution vanishes at a cell center");
    }
    double sign = 0.0;
    for (std::size_t i = 0; i < domain->node_count(); ++i) {
        if (!domain->node_in_closure(i)) continue;
        const double v = u(domain->node(i));
        if (sign == 0.0) sign = v > 0 ? 1.0 : -1.0;
        else if (v * sign < 0.0) throw ZeroCrossing("manufactured solution changes sign on the grid");
    }
    const auto V = ScalarField::analytic([u](const Vec& x) { return u.laplacian(x) / u(x); });
    return {u, Potential(V, domain, s), std::move(name)};
}

ScalarField exp_field(const Vec& a) {
    const double a2 = dot(a, a);
    return ScalarField::analytic([a](const Vec& x) { return std::exp(dot(a, x)); },
                                 [a](const Vec& x) { return std::exp(dot(a, x)) * a; },
                                 [a, a2](const Vec& x) { return a2 * std::exp(dot(a, x)); });
}

ScalarField cosh_field(const Vec& a) {
    const double a2 = dot(a, a);
    return ScalarField::analytic([a](const Vec& x) { return std::cosh(dot(a, x)); },
                                 [a](const Vec& x) { return std::sinh(dot(a, x)) * a; },
                                 [a, a2](const Vec& x) { return a2 * std::cosh(dot(a, x)); });
}

ScalarField harmonic_field(int degree, const Vec& x0) {
    auto zero = [](const Vec&) { return 0.0; };
    switch (degree) {
        case 0:
            return ScalarField::analytic([](const Vec&) { return 1.0; }, [](const Vec&) { return Vec{}; }, zero);
        case 1:
            return ScalarField::analytic([x0](const Vec& x) { return x[0] - x0[0]; },
                                         [](const Vec&) { return Vec{1, 0, 0}; }, zero);
        case 2:
            return ScalarField::analytic(
                [x0](const Vec& x) {
                    const double a = x[0] - x0[0], b = x[1] - x0[1];
                    return a * a - b * b;
                },
                [x0](const Vec& x) { return Vec{2 * (x[0] - x0[0]), -2 * (x[1] - x0[1]), 0}; }, zero);
        case 3:
            return ScalarField::analytic(
                [x0](const Vec& x) {
                    const double a = x[0] - x0[0], b = x[1] - x0[1];
                    return a * a * a - 3 * a * b * b;
                },
                [x0](const Vec& x) {
                    const double a = x[0] - x0[0], b = x[1] - x0[1];
                    return Vec{3 * a * a - 3 * b * b, -6 * a * b, 0};
                },
                zero);
        default:
            throw InvalidArgument("harmonic fields are shipped for degrees 0 to 3");
    }
}

InequalityReport holder_product_check(const Potential& V, const ScalarField& u) {
    const int n = V.dim();
    require(n >= 3, "the product bound needs n >= 3");
    const auto rule = potential_rule(V.domain());
    const double p = holder_exponent(n), pp = sobolev_exponent(n);
    const auto Vu = ScalarField::analytic([&](const Vec& x) { return V(x) * u(x); });
    const double lhs = lp_norm(Vu, *rule, p);
    const double rhs = lp_norm(V.field(), *rule, 0.5 * n) * lp_norm(u, *rule, pp);
    return InequalityReport::from_values("holder.product", "explicit", lhs, rhs);
}

}  // namespace qucl
