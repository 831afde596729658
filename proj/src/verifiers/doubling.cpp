#include <cmath>

#include "qucl/frequency.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

DoublingResult doubling(const ScalarField& u, const Potential& V, const Vec& x0, double r,
                        const std::vector<double>& rhos, const VerifierSettings& settings, bool frequency_check) {
    const int n = V.dim();
    const auto& uc = settings.universal;
    if (!(r > 0.0 && r < 0.75)) throw GeometryInfeasible("doubling needs 0 < r < r0 < 3/4");
    if (V.domain()->distance_to_complement(x0) < 4.0 * r * (1 - 1e-12))
        throw GeometryInfeasible("centre must lie in the 4r-erosion");
    for (double rho : rhos)
        if (!(rho > 0.0 && rho < r / 8.0)) throw InvalidArgument("doubling needs 0 < rho < r/8");

    DoublingResult out;
    const double outer = lp_norm(u, Shell{n, x0, r, 13.0 * r / 4.0}, 2.0, settings.spec, settings.workers);
    const double inner = lp_norm(u, Shell{n, x0, r / 4.0, r / 2.0}, 2.0, settings.spec, settings.workers);
    if (inner == 0.0) throw ZeroCrossing("u vanishes on the inner annulus");
    out.norm_ratio = outer / inner;

    const bool critical = V.s() == 0.5 * n;
    const double kappa_t = V.kappa_critical();
    std::string id;
    if (critical) {
        const auto cls = classify(n, kappa_t, 0.5 * n, kInf, settings.sigma, uc.vartheta);
        if (!cls.v) throw ClassViolation("potential outside the class: 2 sigma^2 kappa or vartheta kappa >= 1");
        out.constants = doubling_constants_critical(n, uc.vartheta, settings.sigma, uc.k, kappa_t, r, out.norm_ratio);
        id = "doubling.critical.explicit";
    } else {
        if (!(uc.vartheta * kappa_t < 1.0)) throw ClassViolation("potential outside the class: vartheta ||V||_{n/2} >= 1");
        out.constants = doubling_constants_s(n, V.s(), uc.vartheta, uc.k, kappa_t, V.kappa(), r, out.norm_ratio);
        id = "doubling.lebesgue.explicit";
    }
    const auto& c = out.constants;
    out.margins.name = "doubling";
    out.margins.columns = {"rho", "lhs", "rhs", "margin"};
    for (double rho : rhos) {
        const double a = lp_norm(u, Ball{n, x0, 2.0 * rho}, 2.0, settings.spec, settings.workers);
        const double b = lp_norm(u, Ball{n, x0, rho}, 2.0, settings.spec, settings.workers);
        const double log_rhs = b == 0.0 ? -kInf : -c.lambda_bar * std::log(rho) + std::log(c.M) + std::log(b);
        auto rep = InequalityReport::from_logs(id, "explicit", std::log(a), log_rhs);
        rep.with("rho", rho).with("r", r).with("lambda_tilde", c.lambda_tilde).with("lambda_bar", c.lambda_bar)
            .with("M", c.M).with("norm_ratio", out.norm_ratio);
        out.margins.add({rho, a, std::exp(log_rhs), rep.margin});
        out.reports.push_back(rep);
    }

    if (frequency_check) {
        FrequencyOptions fo;
        fo.rho = r;
        fo.spec = settings.spec;
        fo.workers = settings.workers;
        double lo = r / 64.0;
        for (double rho : rhos) lo = std::min(lo, rho);
        const auto p = frequency_profile(u, V.field(), n, x0, geometric_grid(lo, r, 1.1), fo);
        auto rep = doubling_from_frequency(p);
        rep.id = "doubling.frequency.explicit";
        out.reports.push_back(rep);
    }
    return out;
}

}  // namespace qucl
