#include <cmath>

#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

ThreeBallNorms three_ball_norms(const ScalarField& u, const Vec& x0, double r, const VerifierSettings& settings) {
    require(r > 0.0, "three-ball radius must be positive");
    require_ball_inside(u, x0, 3.0 * r);
    ThreeBallNorms t;
    t.inner = lp_norm(u, Ball{3, x0, r}, 2.0, settings.spec, settings.workers);
    t.middle = lp_norm(u, Ball{3, x0, 2.0 * r}, 2.0, settings.spec, settings.workers);
    t.outer = lp_norm(u, Ball{3, x0, 3.0 * r}, 2.0, settings.spec, settings.workers);
    return t;
}

double rescaled_kappa(const Potential& V, const Vec& x0, double r, const QuadratureSpec& spec) {
    const int n = V.dim();
    const double s = V.s();
    const double local = lp_norm(V.field(), Ball{n, x0, 3.0 * r}, s, spec);
    return std::isinf(s) ? std::pow(3.0 * r, 2.0) * local : std::pow(3.0 * r, 2.0 - n / s) * local;
}

double rescaled_kappa_direct(const Potential& V, const Vec& x0, double r, const QuadratureSpec& spec) {
    const int n = V.dim();
    const double t = 3.0 * r;
    const ScalarField f = V.field();
    const auto W = ScalarField::analytic([f, x0, t](const Vec& y) { return t * t * f(x0 + t * y); });
    return lp_norm(W, Ball{n, Vec{}, 1.0}, V.s(), spec);
}

InequalityReport three_ball(const ScalarField& u, const Potential& V, const Vec& x0, double r,
                            ThreeBallRegime regime, const VerifierSettings& settings) {
    const int n = V.dim();
    const double depth = regime == ThreeBallRegime::Critical ? 4.0 : 3.0;
    if (V.domain()->distance_to_complement(x0) < depth * r * (1 - 1e-12))
        throw GeometryInfeasible("centre must lie in the " + std::string(depth == 4.0 ? "4r" : "3r") + "-erosion");
    const auto t = three_ball_norms(u, x0, r, settings);
    const auto& uc = settings.universal;
    double log_pref = 0, alpha = 0;
    std::string id;
    InequalityReport rep;
    if (regime == ThreeBallRegime::Critical) {
        if (!(r < 0.25)) throw GeometryInfeasible("the critical regime needs r < r0/4 with r0 = 1");
        const double kappa = V.kappa_critical();
        const auto cls = classify(n, kappa, 0.5 * n, kInf, settings.sigma, uc.vartheta);
        if (!cls.v) throw ClassViolation("potential outside the class: 2 sigma^2 kappa or vartheta kappa >= 1");
        const auto sc = singular_constants(uc.vartheta, settings.sigma, kappa, uc.k);
        alpha = sc.alpha;
        log_pref = std::log(sc.q_V) - std::log(r);
        id = "three_ball.critical.explicit";
        rep.with("q_V", sc.q_V).with("kappa", kappa);
    } else {
        if (!(V.s() > 0.5 * n)) throw ClassViolation("the configured regime needs s > n/2");
        const double kappa = V.kappa();
        alpha = uc.alpha;
        log_pref = std::log(uc.c) + log_phi_s(uc.c1, kappa, n, V.s());
        id = "three_ball.configured.explicit";
        rep.with("kappa", kappa).with("kappa_rescaled", rescaled_kappa(V, x0, r, settings.spec));
    }
    const double log_rhs = t.outer == 0.0 ? -kInf
                                          : log_pref + alpha * std::log(t.inner) + (1.0 - alpha) * std::log(t.outer);
    auto out = InequalityReport::from_logs(id, "explicit", std::log(t.middle), log_rhs);
    out.constants = rep.constants;
    out.with("alpha", alpha).with("log_prefactor", log_pref).with("norm_inner", t.inner).with("norm_middle", t.middle)
        .with("norm_outer", t.outer).with("r", r);
    if (t.outer == 0.0) out.with_note("u vanishes on the outer ball");
    return out;
}

ThreeBallEnsembleFit three_ball_fit(const Ensemble& e, const Vec& x0, double r, const VerifierSettings& settings) {
    VerifierSettings inner = settings;
    inner.workers = 1;
    const auto norms = parallel_map<ThreeBallNorms>(
        e.size(), [&](std::size_t i) { return three_ball_norms(e.members[i].u, x0, r, inner); }, settings.workers);
    ThreeBallEnsembleFit out;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        const auto& t = norms[i];
        if (t.outer == 0.0) continue;
        if (t.inner == 0.0) throw InvalidArgument("member " + std::to_string(e.members[i].id) +
                                                  " vanishes on the inner ball only; no finite constant exists");
        out.x.push_back(std::log(t.inner / t.outer));
        out.y.push_back(std::log(t.middle / t.outer));
        out.ids.push_back(e.members[i].id);
    }
    if (out.x.empty()) throw InvalidArgument("every member vanishes on the outer ball");
    out.fit = fit_three_ball(out.x, out.y);
    // Binding member of the fitted line reported in the multiplicative form.
    std::size_t b = 0;
    double worst = -kInf;
    for (std::size_t i = 0; i < out.x.size(); ++i) {
        const double g = out.y[i] - out.fit.alpha * out.x[i];
        if (g > worst) {
            worst = g;
            b = i;
        }
    }
    auto& rep = out.report;
    rep = InequalityReport::from_logs("three_ball.joint.fit", "fit", out.y[b], out.fit.log_C + out.fit.alpha * out.x[b]);
    rep.margin = 1.0;
    rep.pass = out.fit.alpha > 0.0 && out.fit.alpha < 1.0;
    if (!rep.pass) rep.with_note("fitted exponent on the boundary of (0, 1)");
    rep.ensemble_size = static_cast<int>(out.x.size());
    rep.with("log_C", out.fit.log_C).with("C", std::exp(out.fit.log_C)).with("alpha", out.fit.alpha)
        .with("binding_member", out.ids[b]).with("r", r);
    return out;
}

}  // namespace qucl
