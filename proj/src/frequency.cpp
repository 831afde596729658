#include "qucl/frequency.hpp"

#include <algorithm>
#include <cmath>

#include "qucl/parallel.hpp"

namespace qucl {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
    double H = 0, D = 0, K = 0, Hbar = 0, Hhat = 0, Dhat = 0, Dhat_identity = 0;
};

Row sample(const ScalarField& u, const ScalarField& V, int n, const Vec& x0, double r, const QuadratureSpec& spec) {
    Row w;
    w.H = sphere_square_integral(u, n, x0, r, spec);
    w.D = schrodinger_energy(u, V, n, x0, r, spec);
    const double k = lp_norm(u, Ball{n, x0, r}, 2.0, spec, 1);
    w.K = k * k;
    const auto flux = boundary_flux_integrals(u, V, n, x0, r, spec);
    w.Hbar = flux.normal_square;
    w.Hhat = flux.potential_square;
    w.Dhat = dhat_integral(u, V, n, x0, r, spec);
    w.Dhat_identity = dhat_identity_integral(u, V, n, x0, r, spec);
    return w;
}

bool uniform_steps(const std::vector<double>& x) {
    const double step = x[1] - x[0];
    for (std::size_t i = 1; i + 1 < x.size(); ++i)
        if (std::abs((x[i + 1] - x[i]) - step) > 1e-9 * std::abs(step)) return false;
    return true;
}

// Fourth-order central first derivative on a grid that is uniform in r or in ln r.
std::vector<double> derivative(const std::vector<double>& r, const std::vector<double>& f) {
    std::vector<double> d(r.size(), kNaN);
    if (r.size() < 5) return d;
    std::vector<double> lr(r.size());
    std::transform(r.begin(), r.end(), lr.begin(), [](double x) { return std::log(x); });
    const bool geometric = uniform_steps(lr);
    const double step = geometric ? lr[1] - lr[0] : r[1] - r[0];
    for (std::size_t i = 2; i + 2 < r.size(); ++i) {
        const double c = (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) / (12.0 * step);
        d[i] = geometric ? c / r[i] : c;
    }
    return d;
}

double relative_defect(double lhs, double rhs) {
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    return scale == 0.0 ? 0.0 : std::abs(lhs - rhs) / scale;
}

// Per-radius checks folded into one report: the worst margin is shown, violations are counted.
// `slack` is a relative rounding allowance for checks that are equalities on exact data.
InequalityReport aggregate(const std::string& id, const std::vector<double>& radii, const std::vector<double>& log_lhs,
                           const std::vector<double>& log_rhs, double slack = 0.0) {
    if (radii.empty()) {
        auto r = InequalityReport::from_logs(id, "explicit", -kInf, 0.0);
        r.with("points", 0).with_note("no admissible radius");
        return r;
    }
    std::size_t worst = 0;
    int violations = 0;
    auto gap_at = [&](std::size_t i) { return log_lhs[i] == -kInf ? kInf : log_rhs[i] + slack - log_lhs[i]; };
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double gap = gap_at(i);
        const double worst_gap = gap_at(worst);
        if (std::isnan(gap) || gap < 0.0) ++violations;
        if (std::isnan(gap) || (!std::isnan(worst_gap) && gap < worst_gap)) worst = i;
    }
    auto r = InequalityReport::from_logs(id, "explicit", log_lhs[worst], log_rhs[worst]);
    r.pass = violations == 0;
    if (slack > 0.0) r.with("rounding_slack", slack);
    r.with("points", static_cast<double>(radii.size()))
        .with("violations", violations)
        .with("r_worst", radii[worst]);
    return r;
}

double safe_log(double x) { return x > 0.0 ? std::log(x) : (x == 0.0 ? -kInf : kNaN); }

}  // namespace

std::vector<double> geometric_grid(double r0, double r1, double ratio) {
    require(r0 > 0.0 && r1 >= r0, "geometric grid needs 0 < r0 <= r1");
    require(ratio > 1.0, "geometric grid ratio must exceed 1");
    std::vector<double> g;
    for (int k = 0;; ++k) {
        const double r = r0 * std::pow(ratio, k);
        if (r > r1 * (1.0 + 1e-12)) break;
        g.push_back(r);
    }
    return g;
}

double frequency_r_kappa(int n, double kappa, double rho) {
    require(kappa >= 0.0 && rho > 0.0, "r_kappa needs kappa >= 0 and rho > 0");
    return kappa == 0.0 ? rho : std::min(rho, std::sqrt((n - 1.0) / kappa));
}

double frequency_kappa_bar(int n, double kappa, double rho) {
    return kappa + rho * kappa * (rho * rho * (1.0 + kappa) + n - 1.0);
}

FrequencyProfile frequency_profile(const ScalarField& u, const ScalarField& V, int n, const Vec& x0,
                                   std::vector<double> r_grid, const FrequencyOptions& options) {
    require(!r_grid.empty(), "frequency profile needs radii");
    require(std::is_sorted(r_grid.begin(), r_grid.end()) && r_grid.front() > 0.0, "radii must be positive and increasing");
    FrequencyProfile p;
    p.n = n;
    p.x0 = x0;
    p.u = u;
    p.V = V;
    p.spec = options.spec;
    p.rho = options.rho > 0.0 ? options.rho : r_grid.back();
    require(r_grid.back() <= p.rho * (1.0 + 1e-12), "radii must lie in (0, rho]");
    require_ball_inside(u, x0, p.rho);
    require_ball_inside(V, x0, p.rho);

    const double vmax = lp_norm(V, Ball{n, x0, p.rho}, kInf, options.spec, options.workers);
    p.V_zero = vmax == 0.0;
    p.kappa = options.kappa >= 0.0 ? options.kappa : vmax;
    p.r_kappa = frequency_r_kappa(n, p.kappa, p.rho);
    p.kappa_bar = frequency_kappa_bar(n, p.kappa, p.rho);
    p.kappa_tilde = p.kappa_bar * p.r_kappa;

    auto rows = parallel_map<Row>(
        r_grid.size() + 1,
        [&](std::size_t i) { return sample(u, V, n, x0, i < r_grid.size() ? r_grid[i] : p.r_kappa, options.spec); },
        options.workers);
    const Row at_r_kappa = rows.back();
    rows.pop_back();

    for (std::size_t i = 0; i < r_grid.size(); ++i) {
        const Row& w = rows[i];
        if (!(w.H > 0.0)) {
            p.truncated = true;
            break;
        }
        p.r.push_back(r_grid[i]);
        p.H.push_back(w.H);
        p.D.push_back(w.D);
        p.N.push_back(r_grid[i] * w.D / w.H);
        p.K.push_back(w.K);
        p.Hbar.push_back(w.Hbar);
        p.Hhat.push_back(w.Hhat);
        p.Dhat.push_back(w.Dhat);
        p.Dhat_identity.push_back(w.Dhat_identity);
        if (w.D <= 0.0) p.nonpositive_D.push_back(r_grid[i]);
    }
    p.dH = derivative(p.r, p.H);
    p.dD = derivative(p.r, p.D);

    p.N_r_kappa = at_r_kappa.H > 0.0 ? p.r_kappa * at_r_kappa.D / at_r_kappa.H : kNaN;
    p.M = std::exp(p.kappa_tilde) * std::max(p.N_r_kappa, 1.0);
    p.M_bar = p.M + n;
    return p;
}

Table FrequencyProfile::table() const {
    Table t;
    t.name = "frequency";
    t.columns = {"r", "H", "D", "N", "K", "Hbar", "Hhat", "Dhat", "Dhat_identity", "dH", "dD"};
    for (std::size_t i = 0; i < size(); ++i)
        t.add({r[i], H[i], D[i], N[i], K[i], Hbar[i], Hhat[i], Dhat[i], Dhat_identity[i], dH[i], dD[i]});
    return t;
}

Table identity_defects(const FrequencyProfile& p) {
    Table t;
    t.name = "frequency_identities";
    t.columns = {"r", "defect_H", "defect_D"};
    const int n = p.n;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (std::isnan(p.dH[i]) || std::isnan(p.dD[i])) continue;
        const double r = p.r[i];
        const double eH = relative_defect(p.dH[i], (n - 1.0) * p.H[i] / r + 2.0 * p.D[i]);
        const double eD =
            relative_defect(p.dD[i], (n - 2.0) * p.D[i] / r + p.Dhat_identity[i] + 2.0 * p.Hbar[i] + p.Hhat[i]);
        t.add({r, eH, eD});
    }
    return t;
}

std::vector<InequalityReport> check_identities(const FrequencyProfile& p, double tolerance) {
    require(p.size() >= 5, "identity check needs at least five radii");
    require(tolerance > 0.0, "identity tolerance must be positive");
    const auto t = identity_defects(p);
    std::vector<InequalityReport> out;
    for (const char* col : {"defect_H", "defect_D"}) {
        const auto d = t.column(col);
        const double worst = d.empty() ? 0.0 : *std::max_element(d.begin(), d.end());
        auto r = InequalityReport::from_values(std::string("freq.identity.") + (col[7] == 'H' ? "H" : "D"), "explicit",
                                               worst, tolerance);
        r.with("points", static_cast<double>(d.size()));
        out.push_back(r);
    }
    return out;
}

std::vector<InequalityReport> frequency_bound(const FrequencyProfile& p) {
    std::vector<InequalityReport> out;
    const double log_bound = p.kappa_tilde + std::log(std::max(p.N_r_kappa, 1.0));
    {
        std::vector<double> rr, lhs, rhs;
        int skipped = 0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.r[i] >= p.r_kappa * (1.0 - 1e-12)) continue;
            rr.push_back(p.r[i]);
            if (p.N[i] <= 0.0) ++skipped;
            lhs.push_back(p.N[i] <= 0.0 ? -kInf : std::log(p.N[i]));
            rhs.push_back(log_bound);
        }
        // N is constant for homogeneous harmonic fields, where the bound is an equality.
        auto r = aggregate("freq.bound", rr, lhs, rhs, 1e-12);
        r.with("kappa", p.kappa).with("r_kappa", p.r_kappa).with("kappa_bar", p.kappa_bar)
            .with("kappa_tilde", p.kappa_tilde).with("N_r_kappa", p.N_r_kappa).with("M", p.M);
        if (skipped > 0) r.with_note("D(r) <= 0 at " + std::to_string(skipped) + " radii; bound trivial there");
        out.push_back(r);
    }
    {
        std::vector<double> rr, lhs, rhs;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p.r[i] > p.r_kappa * (1.0 + 1e-12)) continue;
            rr.push_back(p.r[i]);
            lhs.push_back(safe_log(p.K[i]));
            rhs.push_back(std::log(p.r[i] * p.H[i]));
        }
        out.push_back(aggregate("freq.K", rr, lhs, rhs));
    }
    if (p.V_zero) {
        std::vector<double> rr, lhs, rhs;
        for (std::size_t i = 0; i < p.size(); ++i) {
            rr.push_back(p.r[i]);
            lhs.push_back(2.0 * safe_log(std::abs(p.D[i])));
            rhs.push_back(safe_log(p.Hbar[i] * p.H[i]));
        }
        // Equality for homogeneous harmonic fields.
        auto r = aggregate("freq.cauchy_schwarz", rr, lhs, rhs, 1e-10);
        out.push_back(r);
    } else {
        auto r = InequalityReport::from_logs("freq.cauchy_schwarz", "explicit", -kInf, 0.0);
        r.with_note("skipped: V does not vanish, D may be negative");
        out.push_back(r);
    }
    return out;
}

InequalityReport doubling_from_frequency(const FrequencyProfile& p) {
    std::vector<double> rr;
    for (double r : p.r)
        if (r < 0.5 * p.r_kappa * (1.0 - 1e-12)) rr.push_back(r);
    const auto norms = parallel_map<std::array<double, 2>>(rr.size(), [&](std::size_t i) {
        return std::array<double, 2>{lp_norm(p.u, Ball{p.n, p.x0, rr[i]}, 2.0, p.spec, 1),
                                     lp_norm(p.u, Ball{p.n, p.x0, 2.0 * rr[i]}, 2.0, p.spec, 1)};
    });
    std::vector<double> lhs, rhs;
    for (const auto& nm : norms) {
        lhs.push_back(safe_log(nm[1]) - safe_log(nm[0]));
        rhs.push_back(p.M_bar * std::log(2.0));
    }
    auto r = aggregate("freq.doubling", rr, lhs, rhs);
    r.with("M_bar", p.M_bar).with("M", p.M).with("r_kappa", p.r_kappa);
    return r;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "slope fit needs two points");
    const double mx = pairwise_sum(x) / x.size(), my = pairwise_sum(y) / y.size();
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    require(sxx > 0.0, "slope fit needs distinct abscissae");
    return sxy / sxx;
}

FrequencyVanishing vanishing_order_frequency(const ScalarField& u, const ScalarField& V, int n, const Vec& x0,
                                             const FrequencyVanishingOptions& options) {
    require(options.r_min > 0.0, "vanishing fit needs r_min > 0");
    const auto& fo = options.frequency;
    const double rho = fo.rho > 0.0 ? fo.rho : 10.0 * options.r_min;
    require(rho >= 10.0 * options.r_min * (1.0 - 1e-12), "rho must cover the fitted decade");

    double norm_omega = options.norm_omega;
    if (norm_omega <= 0.0) norm_omega = u.domain() ? lp_norm(u, u.domain(), 2.0, fo.spec, fo.workers) : 1.0;
    require(norm_omega > 0.0, "u vanishes identically");
    const double log_scale = std::log(norm_omega);

    FrequencyOptions prof = fo;
    prof.rho = rho;
    const auto p = frequency_profile(u, V, n, x0, {rho}, prof);

    FrequencyVanishing out;
    out.M_bar = p.M_bar;
    out.r_bar = 0.5 * std::min(0.5 * p.r_kappa, options.r_star) * (1.0 - 1e-9);
    out.r = geometric_grid(options.r_min, 10.0 * options.r_min);
    const auto norms = parallel_map<double>(
        out.r.size(), [&](std::size_t i) { return lp_norm(u, Ball{n, x0, out.r[i]}, 2.0, fo.spec, 1); }, fo.workers);
    std::vector<double> lr;
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        if (norms[i] / norm_omega < options.underflow_floor) out.underflow = true;
        out.log_norm.push_back(safe_log(norms[i]) - log_scale);
        lr.push_back(std::log(out.r[i]));
    }
    out.slope = out.underflow ? kNaN : fit_slope(lr, out.log_norm);

    auto s = out.underflow ? InequalityReport::from_logs("freq.vanishing.slope", "explicit", kNaN, 0.0)
                           : InequalityReport::from_values("freq.vanishing.slope", "explicit", std::max(out.slope, 0.0),
                                                           out.M_bar);
    s.with("slope", out.slope).with("M_bar", out.M_bar);
    if (out.underflow) s.with_note("norms reached the quadrature floor");
    out.reports.push_back(s);

    // [(2 r_bar)^{-M_bar} frak_M] r^{M_bar} <= ||u||_{B_r} on (0, r_bar).
    std::vector<double> rr, lhs, rhs;
    for (std::size_t i = 0; i < out.r.size(); ++i) {
        if (out.r[i] >= out.r_bar) continue;
        rr.push_back(out.r[i]);
        lhs.push_back(options.log_frak_M - out.M_bar * std::log(2.0 * out.r_bar) + out.M_bar * std::log(out.r[i]));
        rhs.push_back(out.log_norm[i]);
    }
    auto e = aggregate("freq.vanishing.envelope", rr, lhs, rhs);
    e.with("r_bar", out.r_bar).with("log_frak_M", options.log_frak_M);
    if (options.log_frak_M == -kInf) e.with_note("growth lower bound underflows; envelope is zero");
    out.reports.push_back(e);
    return out;
}

}  // namespace qucl
