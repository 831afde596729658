#include <algorithm>
#include <cmath>

#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

namespace {

// Largest accepted ratio between the biggest and smallest collar ratios over the r sweep.
constexpr double kHardySpread = 2.0;

}  // namespace

ConeUcConstants cone_uc_constants(int n, double alpha, double sin_theta, double rho_bar, double frak_t,
                                  double cube_extent, double frak_r) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    require(sin_theta > 0.0 && sin_theta <= 1.0 / 3.0, "cone needs 0 < sin(theta) <= 1/3");
    ConeUcConstants c;
    c.mu = (3.0 - 2.0 * sin_theta) / (3.0 - sin_theta);
    c.varpi = sin_theta / 3.0;
    const double lnmu = std::abs(std::log(c.mu));
    const double lna = std::abs(std::log(alpha));
    c.varsigma = lna / lnmu;
    c.upsilon = std::exp(std::log((1.0 + c.varpi) * rho_bar) * c.varsigma);
    if (!(rho_bar / 3.0 < frak_r / 4.0)) throw GeometryInfeasible("cone reach needs rho_bar/3 < frak_r/4");
    c.log_frak_s = chain_constants(n, cube_extent, frak_r, alpha, rho_bar / 3.0).log_eta;
    c.k_plus = std::max(1.0, std::log(1.0 + c.varpi) / lnmu - 1.0);
    c.frak_a = std::pow(alpha, -c.k_plus) - 1.0;
    // frak_s is usually far below the smallest double; the ratio is formed in logs.
    const double log_ratio = std::log(c.frak_a) + c.log_frak_s - std::log1p(-std::exp(c.log_frak_s));
    c.frak_b = std::min(std::exp(log_ratio), 1.0);
    c.varsigma_tilde = c.varsigma + (n + frak_t) * std::exp(-std::min(log_ratio, 0.0));
    return c;
}

GlobalUcResult global_uc(const ScalarField& u, const Potential& V, const Ball& omega, const std::vector<double>& radii,
                         const GlobalUcOptions& options, const VerifierSettings& settings) {
    const DomainPtr& domain = V.domain();
    const int n = domain->dim();
    const auto& uc = settings.universal;
    const double h = domain->spacing();
    require(!radii.empty(), "global bound needs at least one radius");
    const double dist_c = domain->distance_to_complement(omega.center);
    if (!(omega.radius > 0.0 && dist_c > omega.radius)) throw GeometryInfeasible("omega must lie inside the domain");
    const double frak_r = options.frak_r > 0.0 ? options.frak_r : connectivity_radius(*domain);

    GlobalUcResult out;
    const double d0 = std::min(omega.radius, dist_c / 4.0);
    out.r_star = std::min(d0, frak_r / 4.0);
    std::vector<double> rs = radii;
    std::sort(rs.begin(), rs.end(), std::greater<>());
    for (double r : rs)
        if (!(r > 0.0 && r < out.r_star))
            throw GeometryInfeasible("radius " + format_number(r) + " outside (0, r_star) with r_star = " +
                                     format_number(out.r_star));

    const double norm_total = lp_norm(u, domain, 2.0, settings.spec, settings.workers);
    const double norm_omega = lp_norm(u, omega, 2.0, settings.spec, settings.workers);
    const double norm_h1 = h1_norm(u, domain, settings.spec, settings.workers);
    const std::string geo = options.geometry == GlobalGeometry::Cone ? "cone" : "interior_chain";
    const std::string mode = mode_name(options.mode);

    if (norm_total == 0.0) {
        auto t = InequalityReport::from_logs("global_uc." + geo + "." + mode, mode, -kInf, -kInf);
        out.reports.push_back(t.with_note("u vanishes identically"));
        return out;
    }
    if (norm_omega == 0.0) throw ZeroCrossing("u vanishes on omega");

    ConeUcConstants cone;
    if (options.geometry == GlobalGeometry::Cone)
        cone = cone_uc_constants(n, uc.alpha, uc.sin_theta, options.rho_bar, uc.frak_t, domain->cube_extent(), frak_r);

    out.tradeoff.name = "global_uc";
    out.tradeoff.columns = {"r", "log_amplification", "log_collar_term", "cover_count", "hardy_ratio",
                            "log_explicit_exponent"};
    // Cover balls are inflated by the node offset so that they cover the continuum erosion, not only its nodes.
    const double slack = 0.5 * h * std::sqrt(static_cast<double>(n));
    QuadratureSpec coarse;
    coarse.radial = 6;
    coarse.polar = 8;
    coarse.azimuth = 16;
    // c_* is fitted over the whole sweep; its spread across r is the stability check.
    std::vector<double> collar_norms, hardy_ratios;
    for (double r : rs) {
        collar_norms.push_back(lp_norm(u, collar(domain, 4.0 * r), 2.0, settings.workers));
        hardy_ratios.push_back(collar_norms.back() / (std::pow(r, uc.frak_t) * norm_h1));
    }
    out.c_star = *std::max_element(hardy_ratios.begin(), hardy_ratios.end());
    const double ratio_min = *std::min_element(hardy_ratios.begin(), hardy_ratios.end());
    for (std::size_t i = 0; i < rs.size(); ++i) {
        auto hardy = InequalityReport::from_values("global_uc.hardy_collar.fit", "fit", collar_norms[i],
                                                   out.c_star * std::pow(rs[i], uc.frak_t) * norm_h1);
        hardy.with("r", rs[i]).with("c_star", out.c_star).with("ratio", hardy_ratios[i]).with("frak_t", uc.frak_t);
        out.reports.push_back(hardy);
    }
    if (rs.size() > 1) {
        auto spread = InequalityReport::from_values("global_uc.hardy_stability.fit", "fit", out.c_star / ratio_min,
                                                    kHardySpread);
        out.reports.push_back(spread.with("c_star", out.c_star).with("ratio_min", ratio_min));
    }

    for (std::size_t i = 0; i < rs.size(); ++i) {
        const double r = rs[i];
        const double hardy_ratio = hardy_ratios[i];

        if (r + slack > 4.0 * r - slack) throw GeometryInfeasible("grid too coarse for r = " + format_number(r));
        const auto inner = erode(domain, 4.0 * r - slack);
        const auto cover = greedy_cover(inner, r);
        const double ball_r = r + slack;
        const auto sq = parallel_map<double>(
            cover.count(),
            [&](std::size_t i) {
                const double v = lp_norm(u, Ball{n, cover.centers[i], ball_r}, 2.0, coarse, 1);
                return v * v;
            },
            settings.workers);
        double biggest = 0.0;
        for (double v : sq) biggest = std::max(biggest, v);
        const double n_r = static_cast<double>(cover.count());
        // ||u||_Omega <= ||u||_{interior} + ||u||_{collar} <= sqrt(n_r) A ||u||_omega + c_* r^t ||u||_{H^1}.
        const double log_amp = 0.5 * std::log(n_r) + 0.5 * std::log(biggest) - std::log(norm_omega);
        const double collar_term = out.c_star * std::pow(r, uc.frak_t) * norm_h1;
        const double log_rhs = log_add(log_amp + std::log(norm_omega), std::log(collar_term));
        double log_explicit = 0.0;
        if (options.geometry == GlobalGeometry::Cone)
            log_explicit = std::log(cone.upsilon) - cone.varsigma_tilde * std::log(r);
        else if (r < frak_r / 4.0)
            log_explicit = std::log(uc.cbar) + chain_constants(n, domain->cube_extent(), frak_r, uc.alpha, r).log_varrho;
        auto rep = InequalityReport::from_logs("global_uc." + geo + "." + mode, mode, std::log(norm_total), log_rhs);
        rep.with("r", r).with("cover_count", n_r).with("log_amplification", log_amp)
            .with("collar_term", collar_term).with("log_explicit_exponent", log_explicit)
            .with("c_hat", n_r * std::pow(r, n));
        if (options.mode == Mode::Explicit) rep.with_note("amplification fitted; the explicit exponent is reported only");
        out.reports.push_back(rep);
        out.tradeoff.add({r, log_amp, std::log(collar_term), n_r, hardy_ratio, log_explicit});
    }

    // Stability profile at the measured ratio ||u||_{H^1} / ||u||_omega.
    const double x = norm_h1 / norm_omega;
    auto stab = InequalityReport::from_values("global_uc.stability." + geo, "fit", norm_total / norm_h1, 1.0);
    if (options.geometry == GlobalGeometry::Cone) {
        ConeProfileParams p;
        p.upsilon = cone.upsilon;
        p.t = uc.frak_t;
        p.varsigma = cone.varsigma_tilde;
        const double F = stability_F(x, p);
        if (std::isfinite(F)) stab.with("profile", F);
        stab.with("upsilon", cone.upsilon).with("varsigma_tilde", cone.varsigma_tilde).with("frak_b", cone.frak_b)
            .with("log_frak_s", cone.log_frak_s).with("k_plus", cone.k_plus);
    } else {
        ProfileParams p;
        p.t = uc.frak_t;
        p.n = n;
        p.cbar = uc.cbar;
        const double psi = stability_psi(x, p);
        if (std::isfinite(psi)) stab.with("profile", psi);
        else stab.with_note("profile undefined at this ratio: c-bar ln x <= 1");
    }
    stab.with("ratio", x).with("r_star", out.r_star).with("frak_r", frak_r);
    out.reports.push_back(stab);
    return out;
}

}  // namespace qucl
