#include <algorithm>
#include <cmath>

#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

PropagationResult propagate_smallness(const ScalarField& u, const DomainPtr& domain, const ChainPlan& chain, double r,
                                      Mode mode, const Potential* V, const VerifierSettings& settings) {
    require(r > 0.0, "chain radius must be positive");
    if (chain.centers.empty()) throw GeometryInfeasible("empty chain");
    for (double q : chain.overlap_ratios)
        if (q > 1.0 + 1e-12) throw GeometryInfeasible("chain link leaves the previous middle ball");
    const int n = domain->dim();
    const auto& uc = settings.universal;
    const std::string suffix = std::string(".") + mode_name(mode);

    PropagationResult out;
    out.links = static_cast<int>(chain.links());
    const double total = lp_norm(u, domain, 2.0, settings.spec, settings.workers);
    if (total == 0.0) {
        auto t = InequalityReport::from_logs("propagation.recursion" + suffix, mode_name(mode), -kInf, -kInf);
        out.reports.push_back(t.with_note("u vanishes identically"));
        return out;
    }

    double log_C = 0.0;
    if (mode == Mode::Explicit) {
        if (!V) throw InvalidArgument("explicit propagation needs the potential");
        const double depth = 4.0 * r * (1 - 1e-12);
        for (const auto& c : chain.centers)
            if (domain->distance_to_complement(c) < depth) throw GeometryInfeasible("chain centre outside the 4r-erosion");
        const double kappa = V->kappa_critical();
        const auto cls = classify(n, kappa, 0.5 * n, kInf, settings.sigma, uc.vartheta);
        if (!cls.v) throw ClassViolation("potential outside the class: 2 sigma^2 kappa or vartheta kappa >= 1");
        const auto sc = singular_constants(uc.vartheta, settings.sigma, kappa, uc.k);
        out.alpha = sc.alpha;
        log_C = std::log(sc.q_V) - std::log(r);
    } else {
        out.alpha = uc.alpha;
    }

    VerifierSettings inner = settings;
    inner.workers = 1;
    const auto norms = parallel_map<ThreeBallNorms>(
        chain.centers.size(), [&](std::size_t j) { return three_ball_norms(u, chain.centers[j], r, inner); },
        settings.workers);
    std::vector<double> lb;  // ln of the normalised inner norms b_j
    for (const auto& t : norms) lb.push_back(t.inner == 0.0 ? -kInf : std::log(t.inner / total));

    const double a = out.alpha;
    if (mode == Mode::Fit) {
        log_C = -kInf;
        for (std::size_t j = 0; j + 1 < lb.size(); ++j) {
            if (lb[j + 1] == -kInf) continue;
            if (lb[j] == -kInf) throw ZeroCrossing("u vanishes on a chain ball but not on the next one");
            log_C = std::max(log_C, lb[j + 1] - a * lb[j]);
        }
        if (log_C == -kInf) log_C = 0.0;
    }
    out.log_C = log_C;

    out.link_table.name = "propagation";
    out.link_table.columns = {"link", "log_b_prev", "log_b_next", "log_bound", "margin"};
    // b_{j+1} <= ||u||_{B(x_j, 2r)} <= C b_j^alpha ||u||_{B(x_j, 3r)}^{1 - alpha} <= C b_j^alpha.
    for (std::size_t j = 0; j + 1 < lb.size(); ++j) {
        const double bound = lb[j] == -kInf ? -kInf : log_C + a * lb[j];
        auto rep = InequalityReport::from_logs("propagation.link" + suffix, mode_name(mode), lb[j + 1], bound);
        rep.with("link", static_cast<double>(j)).with("log_C", log_C).with("alpha", a);
        out.link_table.add({static_cast<double>(j), lb[j], lb[j + 1], bound, rep.margin});
        out.reports.push_back(rep);
    }

    // The recursion B_{j+1} = C B_j^alpha against its closed form C^{1 + ... + alpha^{L-1}} b_0^{alpha^L}.
    const int L = out.links;
    double logB = lb.front(), exponent = 1.0, geometric = 0.0;
    for (int j = 0; j < L; ++j) {
        logB = log_C + a * logB;
        geometric += exponent;
        exponent *= a;
    }
    out.exponent = exponent;
    auto rec = InequalityReport::from_logs("propagation.recursion" + suffix, mode_name(mode), lb.back(), logB);
    const double closed = geometric * log_C + exponent * lb.front();
    rec.with("links", L).with("alpha_power", exponent).with("alpha_power_pow", std::pow(a, L))
        .with("log_closed_form", closed).with("closed_form_defect", std::abs(closed - logB));
    out.reports.push_back(rec);

    // With b_0 <= 1 and eta <= alpha^L, b_0^{alpha^L} <= b_0^eta; C^{1/(1-alpha)} bounds the geometric sum when C >= 1.
    const double frak_r = connectivity_radius(*domain);
    if (r < frak_r / 4.0) {
        const auto cc = chain_constants(n, domain->cube_extent(), frak_r, a, r);
        const double log_Cp = std::max(log_C, 0.0) / (1.0 - a);
        const double log_eta_bound = lb.front() == -kInf ? -kInf : log_Cp + std::exp(cc.log_eta) * lb.front();
        auto eta = InequalityReport::from_logs("propagation.eta" + suffix, mode_name(mode), lb.back(), log_eta_bound);
        eta.with("log_eta", cc.log_eta).with("m_r", static_cast<double>(cc.m_r)).with("frak_r", frak_r);
        out.reports.push_back(eta);
    }
    return out;
}

std::vector<InequalityReport> chain_accounting(const Domain& domain, const Vec& x, const Vec& y, double r,
                                               double alpha, double frak_r) {
    if (!(r < frak_r / 4.0)) throw GeometryInfeasible("chain accounting needs r < frak_r/4");
    const int n = domain.dim();
    const auto pc = path_chain_plan(domain, x, y, r);
    const auto cc = chain_constants(n, domain.cube_extent(), frak_r, alpha, r);
    const double steps = pc.plan.p_r + 1.0;
    // alpha^{p+1} >= eta is ln eta <= (p+1) ln alpha; compared as magnitudes, |(p+1) ln alpha| <= |ln eta|.
    auto exponent = InequalityReport::from_logs("chain.exponent", "explicit", std::log(-steps * std::log(alpha)),
                                                std::log(-cc.log_eta));
    exponent.with("p_r", pc.plan.p_r).with("log_eta", cc.log_eta).with("alpha", alpha).with("r", r);
    auto count = InequalityReport::from_values("chain.count", "explicit", steps, static_cast<double>(pc.m_r));
    count.with("p_r", pc.plan.p_r).with("m_r", static_cast<double>(pc.m_r)).with("r", r);
    return {exponent, count};
}

InequalityReport cone_accounting(const ConeInput& input) {
    const auto cc = cone_chain(input);
    auto rep = InequalityReport::from_values("cone.count", "explicit", cc.k_x, cc.h_bound);
    if (cc.k_x < cc.k_plus) {
        rep.pass = false;
        rep.with_note("k_x below k_plus");
    }
    rep.with("k_x", cc.k_x).with("k_plus", cc.k_plus).with("h_bound", cc.h_bound).with("mu", cc.mu)
        .with("varpi", cc.varpi).with("d", cc.d);
    return rep;
}

}  // namespace qucl
