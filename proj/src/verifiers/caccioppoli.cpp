#include <cmath>

#include "qucl/parallel.hpp"
#include "qucl/solver.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

namespace {

const char* form_name(CaccioppoliForm f) {
    switch (f) {
        case CaccioppoliForm::Critical: return "critical";
        case CaccioppoliForm::Lebesgue: return "lebesgue";
        default: return "bounded";
    }
}

double source_norm(const ScalarField& u, const Potential& V, double p, const QuadratureSpec& spec, int workers) {
    const auto& d = V.domain();
    if (u.has_laplacian()) {
        const auto f = ScalarField::analytic([u, V](const Vec& x) { return -u.laplacian(x) + V(x) * u(x); });
        return lp_norm(f, d, p, spec, workers);
    }
    // Grid solutions: the stencil residual bounds the source pointwise.
    return residual(u, d, V.field()) * std::pow(d->volume(), 1.0 / p);
}

double form_rhs(const CaccioppoliTerms& t, CaccioppoliForm form, double s, int n, double sigma) {
    switch (form) {
        case CaccioppoliForm::Critical: {
            const auto cc = caccioppoli_constants(sigma, t.kappa);
            return cc.kappa0 * t.source + cc.kappa1 * t.function / t.d;
        }
        case CaccioppoliForm::Lebesgue: {
            const double iota = std::isinf(s) ? 0.5 : s / (2.0 * s - n);
            return t.source + (std::pow(t.kappa, iota) + 1.0 / t.d) * t.function;
        }
        default:
            return t.source + (1.0 / t.d + t.kappa) * t.function;
    }
}

double form_constant(CaccioppoliForm form, const UniversalConstants& u) {
    switch (form) {
        case CaccioppoliForm::Critical: return 1.0;
        case CaccioppoliForm::Lebesgue: return 1.0 / u.frak_c;
        default: return 1.0 / u.k;
    }
}

}  // namespace

CaccioppoliTerms caccioppoli_terms(const ScalarField& u, const Potential& V, const Ball& omega0, const Ball& omega1,
                                   CaccioppoliForm form, const VerifierSettings& settings) {
    const double gap = omega1.radius - omega0.radius - distance(omega0.center, omega1.center);
    if (!(gap > 0.0)) throw GeometryInfeasible("omega0 must lie inside omega1");
    if (u.is_grid() && gap <= 2.0 * u.domain()->spacing())
        throw GeometryInfeasible("ball gap must exceed two grid spacings");
    if (V.domain()->distance_to_complement(omega1.center) < omega1.radius * (1 - 1e-12))
        throw GeometryInfeasible("omega1 must lie inside the domain");
    const int n = V.dim();
    CaccioppoliTerms t;
    t.d = gap;
    t.gradient = gradient_l2_norm(u, omega0, settings.spec, settings.workers);
    t.function = lp_norm(u, omega1, 2.0, settings.spec, settings.workers);
    const double p = form == CaccioppoliForm::Bounded ? 2.0 : holder_exponent(n);
    t.source = source_norm(u, V, p, settings.spec, settings.workers);
    switch (form) {
        case CaccioppoliForm::Critical: t.kappa = V.kappa_critical(); break;
        case CaccioppoliForm::Lebesgue: t.kappa = V.kappa(); break;
        default: t.kappa = V.sup(); break;
    }
    return t;
}

InequalityReport caccioppoli(const ScalarField& u, const Potential& V, const Ball& omega0, const Ball& omega1,
                             CaccioppoliForm form, const VerifierSettings& settings) {
    if (form == CaccioppoliForm::Lebesgue && !(V.s() > 0.5 * V.dim()))
        throw ClassViolation("the Lebesgue form needs s > n/2");
    const auto t = caccioppoli_terms(u, V, omega0, omega1, form, settings);
    const double rhs = form_constant(form, settings.universal) * form_rhs(t, form, V.s(), V.dim(), settings.sigma);
    auto r = InequalityReport::from_values(std::string("caccioppoli.") + form_name(form) + ".explicit", "explicit",
                                           t.gradient, rhs);
    r.with("d", t.d).with("kappa", t.kappa).with("source", t.source).with("function", t.function);
    if (form == CaccioppoliForm::Critical) {
        const auto cc = caccioppoli_constants(settings.sigma, t.kappa);
        r.with("kappa0", cc.kappa0).with("kappa1", cc.kappa1);
    }
    return r;
}

InequalityReport caccioppoli_fit(const Ensemble& e, const Ball& omega0, const Ball& omega1, CaccioppoliForm form,
                                 double s, const VerifierSettings& settings) {
    require(e.size() > 0, "fit needs members");
    struct Row {
        double l, r;
    };
    VerifierSettings inner = settings;
    inner.workers = 1;
    const auto rows = parallel_map<Row>(
        e.size(),
        [&](std::size_t i) {
            const auto& m = e.members[i];
            const Potential V(m.V, e.domain, form == CaccioppoliForm::Critical ? 0.5 * e.domain->dim() : s);
            const auto t = caccioppoli_terms(m.u, V, omega0, omega1, form, inner);
            return Row{std::log(t.gradient), std::log(form_rhs(t, form, V.s(), V.dim(), settings.sigma))};
        },
        settings.workers);
    std::vector<double> l, r;
    for (const auto& row : rows) {
        l.push_back(row.l);
        r.push_back(row.r);
    }
    auto rep = fit_report(std::string("caccioppoli.") + form_name(form) + ".fit", l, r);
    rep.with("explicit_C", form_constant(form, settings.universal));
    return rep;
}

}  // namespace qucl
