#include <algorithm>
#include <cmath>

#include "qucl/frequency.hpp"
#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

double log_growth_bound(int n, double cube_extent, double frak_r, double alpha, double r, double rho0,
                        double c_tilde, double log_phi, double norm_omega0) {
    require(norm_omega0 > 0.0, "the norm on Omega_0 must be positive");
    const auto cc = chain_constants(n, cube_extent, frak_r, alpha, r);
    const double inner = std::abs(std::log(c_tilde) - log_phi + std::log(norm_omega0));
    if (inner == 0.0) return 0.0;
    return -std::exp(cc.log_tau + cc.varsigma * std::log(rho0) + std::log(inner));
}

VanishingResult vanishing_order(const ScalarField& u, const Potential& V, const Vec& x0,
                                const VanishingOptions& options, const VerifierSettings& settings) {
    const DomainPtr& domain = V.domain();
    const int n = V.dim();
    const auto& uc = settings.universal;
    require(options.r_min > 0.0, "vanishing fit needs r_min > 0");
    const double dist_x0 = domain->distance_to_complement(x0);
    if (!(dist_x0 > 10.0 * options.r_min)) throw GeometryInfeasible("the fit decade must lie inside the domain");

    const double total = lp_norm(u, domain, 2.0, settings.spec, settings.workers);
    if (total == 0.0) throw ZeroCrossing("u vanishes identically; no normalisation");

    VanishingResult out;
    out.r = geometric_grid(options.r_min, 10.0 * options.r_min, std::pow(10.0, 0.05));
    auto ball_norm = [&](double r) { return lp_norm(u, Ball{n, x0, r}, 2.0, settings.spec, 1); };
    const auto norms = parallel_map<double>(out.r.size(), [&](std::size_t i) { return ball_norm(out.r[i]); },
                                            settings.workers);
    std::vector<double> lr;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        if (!(norms[i] > 1e-150 * total)) throw NotConverged("ball norm reached the quadrature floor");
        out.log_norm.push_back(std::log(norms[i] / total));
        lr.push_back(std::log(out.r[i]));
    }
    out.slope = fit_slope(lr, out.log_norm);
    auto slope = InequalityReport::from_values("vanishing.slope.fit", "fit", out.slope, out.slope);
    slope.with("slope", out.slope).with("r_min", options.r_min);
    out.reports.push_back(slope);

    // Envelope from the doubling constants at r_bar and the growth lower bound.
    const Ball omega0 = options.omega0.value_or(Ball{n, x0, 0.5 * dist_x0});
    const double dist_omega0 = domain->distance_to_complement(omega0.center) - omega0.radius;
    if (!(dist_omega0 > 0.0)) throw GeometryInfeasible("Omega_0 must lie inside the domain");
    const double r_bar = options.r_bar > 0.0 ? options.r_bar : 0.99 * dist_x0 / 4.0;
    const double frak_r = options.frak_r > 0.0 ? options.frak_r : connectivity_radius(*domain);
    const double norm_omega0 = lp_norm(u, omega0, 2.0, settings.spec, settings.workers) / total;

    const double outer = lp_norm(u, Shell{n, x0, r_bar, 13.0 * r_bar / 4.0}, 2.0, settings.spec, settings.workers);
    const double inner = lp_norm(u, Shell{n, x0, r_bar / 4.0, r_bar / 2.0}, 2.0, settings.spec, settings.workers);
    if (inner == 0.0) throw ZeroCrossing("u vanishes on the inner annulus");
    const double kappa_t = V.kappa_critical();
    DoublingConstants dc;
    if (V.s() == 0.5 * n)
        dc = doubling_constants_critical(n, uc.vartheta, settings.sigma, uc.k, kappa_t, r_bar, outer / inner);
    else
        dc = doubling_constants_s(n, V.s(), uc.vartheta, uc.k, kappa_t, V.kappa(), r_bar, outer / inner);

    VanishingInputs vin;
    vin.n = n;
    vin.frak_r = frak_r;
    vin.r_bar = r_bar;
    vin.dist_omega0 = dist_omega0;
    vin.dist_x0 = dist_x0;
    vin.alpha = uc.alpha;
    vin.cube_extent = domain->cube_extent();
    vin.log_phi = V.s() > 0.5 * n ? log_phi_s(uc.c1, V.kappa(), n, V.s()) : 0.0;
    vin.c_tilde = options.c_tilde;
    vin.norm_omega0 = norm_omega0;
    vin.lambda_bar = dc.lambda_bar;
    vin.M = dc.M;
    out.constants = vanishing_constants(vin);
    const auto& vc = out.constants;

    out.envelope.name = "vanishing_envelope";
    out.envelope.columns = {"r", "log_norm", "log_envelope"};
    const double top = 0.5 * vc.r_hat;
    const double bottom = std::min(options.r_min, 1e-3 * top);
    std::vector<double> er;
    for (int i = 0; i < options.envelope_points; ++i)
        er.push_back(bottom * std::pow(top / bottom, (i + 0.5) / options.envelope_points));
    const auto en = parallel_map<double>(er.size(), [&](std::size_t i) { return ball_norm(er[i]); }, settings.workers);
    double worst_gap = kInf;
    InequalityReport env;
    for (std::size_t i = 0; i < er.size(); ++i) {
        const double ln = std::log(en[i] / total);
        const double le = vanishing_envelope_log(vc, er[i]);
        out.envelope.add({er[i], ln, le});
        if (i == 0 || ln - le < worst_gap) {
            worst_gap = ln - le;
            env = InequalityReport::from_logs("vanishing.envelope.explicit", "explicit", le, ln);
            env.with("r", er[i]);
        }
    }
    env.with("r_hat", vc.r_hat).with("lambda_hat", vc.lambda_hat).with("lambda_dot", vc.lambda_dot)
        .with("log_frak_N", vc.log_frak_N).with("log_frak_M", vc.log_frak_M).with("lambda_bar", dc.lambda_bar)
        .with("M", dc.M);
    if (vc.log_frak_N == -kInf) env.with_note("growth lower bound underflows; envelope is zero");
    out.reports.push_back(env);

    if (options.frequency_route) {
        FrequencyVanishingOptions fo;
        fo.frequency.rho = std::min(r_bar, 0.99 * dist_x0);
        fo.frequency.spec = settings.spec;
        fo.frequency.workers = settings.workers;
        fo.r_min = options.r_min;
        fo.norm_omega = total;
        fo.r_star = vc.r_star;
        // Same r_bar as the frequency route picks, so the growth bound sits at 2 r_bar.
        const double kappa_sup = V.sup();
        fo.frequency.kappa = kappa_sup;
        const double r_kappa = frequency_r_kappa(n, kappa_sup, fo.frequency.rho);
        const double fr_bar = 0.5 * std::min(0.5 * r_kappa, fo.r_star) * (1.0 - 1e-9);
        if (2.0 * fr_bar < frak_r / 4.0)
            fo.log_frak_M = log_growth_bound(n, domain->cube_extent(), frak_r, uc.alpha, 2.0 * fr_bar, vc.rho0,
                                             options.c_tilde, vin.log_phi, norm_omega0);
        if (10.0 * options.r_min <= fo.frequency.rho) {
            auto fv = vanishing_order_frequency(u, V.field(), n, x0, fo);
            for (auto& r : fv.reports) {
                r.id = r.id == "freq.vanishing.slope" ? "vanishing.frequency_slope.explicit"
                                                      : "vanishing.frequency_envelope.explicit";
                out.reports.push_back(r);
            }
        }
    }
    return out;
}

}  // namespace qucl
