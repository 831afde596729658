#include <algorithm>
#include <cmath>

#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

namespace {

std::array<int, 2> tangential(int axis) {
    if (axis == 0) return {1, 2};
    if (axis == 1) return {0, 2};
    return {0, 1};
}

Vec normal(const FacePatch& p) {
    Vec nu{};
    nu[p.axis] = p.inward;
    return nu;
}

// Integrals of u^2 and |grad u|^2 over the patch. Grid fields are piecewise multilinear, so each
// grid cell of the face gets its own two-point rule; analytic fields use one high-order rule.
std::pair<double, double> face_integrals(const ScalarField& u, const FacePatch& p, double h) {
    const auto t = tangential(p.axis);
    Rule1D rule[2];
    for (int k = 0; k < 2; ++k) {
        const double lo = p.centre[t[k]] - p.half_width, hi = p.centre[t[k]] + p.half_width;
        if (!u.is_grid()) {
            rule[k] = gauss_legendre(24, lo, hi);
            continue;
        }
        const auto g = gauss_legendre(2);
        const double first = std::floor(lo / h + 1e-9) * h;
        for (double a = first; a < hi - 1e-12 * h; a += h) {
            const double x0 = std::max(a, lo), x1 = std::min(a + h, hi);
            if (x1 <= x0) continue;
            for (std::size_t q = 0; q < g.x.size(); ++q) {
                rule[k].x.push_back(0.5 * (x0 + x1) + 0.5 * (x1 - x0) * g.x[q]);
                rule[k].w.push_back(0.5 * (x1 - x0) * g.w[q]);
            }
        }
    }
    double uu = 0.0, gg = 0.0;
    Vec x{};
    x[p.axis] = p.face_value;
    for (std::size_t i = 0; i < rule[0].x.size(); ++i)
        for (std::size_t j = 0; j < rule[1].x.size(); ++j) {
            x[t[0]] = rule[0].x[i];
            x[t[1]] = rule[1].x[j];
            const double w = rule[0].w[i] * rule[1].w[j];
            const double v = u(x);
            const Vec gr = u.gradient(x);
            uu += w * v * v;
            gg += w * dot(gr, gr);
        }
    return {uu, gg};
}

}  // namespace

double FacePatch::area(int n) const { return std::pow(2.0 * half_width, n - 1); }

CauchyGeometry cauchy_geometry(const Domain& domain, const FacePatch& patch) {
    require(domain.dim() == 3, "face patches are implemented for n = 3");
    require(patch.axis >= 0 && patch.axis < 3 && (patch.inward == 1 || patch.inward == -1), "bad face patch");
    require(patch.half_width > 0.0, "patch half-width must be positive");
    const double face = patch.inward == 1 ? domain.lo()[patch.axis] : domain.hi()[patch.axis];
    if (std::abs(patch.face_value - face) > 1e-12) throw GeometryInfeasible("patch is not on the stated box face");
    for (int k : tangential(patch.axis))
        if (patch.centre[k] - patch.half_width < domain.lo()[k] - 1e-12 ||
            patch.centre[k] + patch.half_width > domain.hi()[k] + 1e-12)
            throw GeometryInfeasible("patch leaves the face");
    if (std::abs(patch.centre[patch.axis] - patch.face_value) > 1e-12)
        throw GeometryInfeasible("patch centre must lie on the face");

    CauchyGeometry g;
    const Vec nu = normal(patch);
    const double w = patch.half_width;
    g.rho = 0.5 * w;
    g.x0 = patch.centre - g.rho * nu;
    // B(x0, rho + r) meets the face in a disc of radius sqrt((rho + r)^2 - rho^2) < w.
    g.r = 0.99 * (std::sqrt(w * w + g.rho * g.rho) - g.rho);
    g.omega_bar = Ball{3, patch.centre + (g.r / 8.0) * nu, 0.9 * g.r / 8.0};
    if (domain.distance_to_complement(g.omega_bar.center) < g.omega_bar.radius)
        throw GeometryInfeasible("interior ball leaves the domain");
    return g;
}

CauchyTerms cauchy_terms(const ScalarField& u, const DomainPtr& domain, const FacePatch& patch, const Ball& omega_bar,
                         const VerifierSettings& settings) {
    CauchyTerms t;
    t.interior = lp_norm(u, omega_bar, 2.0, settings.spec, settings.workers);
    t.h1 = h1_norm(u, domain, settings.spec, settings.workers);
    const auto [uu, gg] = face_integrals(u, patch, domain->spacing());
    t.data = std::sqrt(uu) + std::sqrt(gg);
    return t;
}

double cauchy_optimal_log(double A, double B, double c) {
    require(A >= 0.0 && B >= 0.0 && c > 0.0, "optimal split needs A, B >= 0 and c > 0");
    if (B == 0.0) return -kInf;  // eps -> 0 drives the sum to zero
    if (A == 0.0) return std::log(B);  // eps = 1
    // d/deps (eps A + eps^{-c} B) = 0 at eps* = (c B / A)^{1/(1+c)}.
    const double log_eps = (std::log(c) + std::log(B) - std::log(A)) / (1.0 + c);
    if (log_eps >= 0.0) return std::log(A + B);
    return log_eps + std::log(A) + std::log1p(1.0 / c);
}

CauchyResult cauchy_uc(const Ensemble& e, const Potential& V, const FacePatch& patch, const CauchyOptions& options,
                       const VerifierSettings& settings) {
    const DomainPtr& domain = V.domain();
    const int n = V.dim();
    const auto& uc = settings.universal;
    CauchyResult out;
    out.geometry = cauchy_geometry(*domain, patch);
    const Ball omega_bar = options.omega_bar.value_or(out.geometry.omega_bar);
    if (domain->distance_to_complement(omega_bar.center) < omega_bar.radius)
        throw GeometryInfeasible("interior ball leaves the domain");
    out.constants = cauchy_constants(n, out.geometry.rho, out.geometry.r, options.lambda, V.kappa(), 0.0, V.s(), false,
                                     uc.chat, uc.c1);
    const auto& cc = out.constants;
    out.c = uc.cauchy_c > 0.0 ? uc.cauchy_c : cc.b / cc.a;

    VerifierSettings one = settings;
    one.workers = 1;
    const auto terms = parallel_map<CauchyTerms>(
        e.size(), [&](std::size_t i) { return cauchy_terms(e.members[i].u, domain, patch, omega_bar, one); },
        settings.workers);
    std::vector<double> log_lhs, log_rhs;
    for (const auto& t : terms) {
        log_lhs.push_back(t.interior == 0.0 ? -kInf : std::log(t.interior));
        log_rhs.push_back(cauchy_optimal_log(t.h1, t.data, out.c));
    }

    const std::string mode = mode_name(options.mode);
    if (options.mode == Mode::Fit) {
        auto rep = fit_report("cauchy.patch.fit", log_lhs, log_rhs);
        out.log_K = rep.constants.count("log_C") ? rep.constants["log_C"] : -kInf;
        rep.with("c", out.c).with("a", cc.a).with("b", cc.b).with("area", patch.area(n))
            .with("explicit_log_K", cc.log_frak_F);
        out.reports.push_back(rep);
    } else {
        out.log_K = cc.log_frak_F;
        for (std::size_t i = 0; i < terms.size(); ++i) {
            auto rep = InequalityReport::from_logs("cauchy.patch.explicit", mode, log_lhs[i], cc.log_frak_F + log_rhs[i]);
            rep.with("member", static_cast<double>(e.members[i].id)).with("c", out.c).with("area", patch.area(n));
            out.reports.push_back(rep);
        }
    }

    // eps = e^{-a tau} turns eps^{-c} into e^{b tau}.
    double defect = 0.0;
    for (double tau : {0.5, 1.0, 2.0, 5.0}) {
        const double log_eps = -cc.a * tau;
        defect = std::max(defect, std::abs(-out.c * log_eps - cc.b * tau) / (cc.b * tau));
    }
    auto eps_form = InequalityReport::from_values("cauchy.epsilon_form", "explicit", defect, 1e-12);
    if (uc.cauchy_c > 0.0) eps_form.with_note("configured c differs from b/a; the substitution is not exact");
    out.reports.push_back(eps_form.with("defect", defect));

    out.sweep.name = "cauchy_sweep";
    out.sweep.columns = {"eps", "interior_term", "data_term"};
    if (!terms.empty()) {
        const auto& t = terms.front();
        for (int k = 0; k <= 40; ++k) {
            const double eps = std::pow(10.0, -8.0 + 0.2 * k);
            out.sweep.add({eps, eps * t.h1, std::pow(eps, -out.c) * t.data});
        }
        if (t.h1 > 0.0 && t.data > 0.0) {
            const double cross = std::pow(t.data / t.h1, 1.0 / (1.0 + out.c));
            out.reports.back().with("crossover_eps", cross);
        }
    }
    return out;
}

}  // namespace qucl
