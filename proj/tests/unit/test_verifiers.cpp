#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qucl/fit.hpp"
#include "qucl/verifiers.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

DomainPtr cube(double side, double h) { return std::make_shared<const Domain>(Domain::box(3, {side, side, side}, h)); }

const InequalityReport& find(const std::vector<InequalityReport>& rs, const std::string& id) {
    for (const auto& r : rs)
        if (r.id == id) return r;
    throw std::runtime_error("missing report " + id);
}

}  // namespace

TEST_CASE("caccioppoli examples", "[verifiers][caccioppoli]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Ball w0{3, {0.5, 0.5, 0.5}, 0.15}, w1{3, {0.5, 0.5, 0.5}, 0.3};

    const auto flat = caccioppoli(ScalarField::constant(2.0), constant_potential(d, 0.0, 1.5), w0, w1,
                                  CaccioppoliForm::Critical);
    CHECK(flat.pass);
    CHECK(flat.lhs == 0.0);

    const Potential one = constant_potential(d, 1.0, 1.5);
    const auto r = caccioppoli(exp_field({1, 0, 0}), one, w0, w1, CaccioppoliForm::Critical);
    INFO("margin " << r.margin);
    CHECK(r.pass);
    CHECK(r.constants.at("d") == Approx(0.15));

    // Outside the class the critical form refuses.
    CHECK_THROWS_AS(caccioppoli(exp_field({2, 0, 0}), constant_potential(d, 4.0, 1.5), w0, w1, CaccioppoliForm::Critical),
                    ClassViolation);
    const auto grid = exp_field({1, 0, 0}).sampled(d);
    CHECK_THROWS_AS(caccioppoli(grid, one, Ball{3, w0.center, 0.2}, Ball{3, w0.center, 0.3}, CaccioppoliForm::Critical),
                    GeometryInfeasible);
    CHECK_THROWS_AS(caccioppoli(grid, one, w1, w0, CaccioppoliForm::Bounded), GeometryInfeasible);
}

TEST_CASE("caccioppoli modes are coherent", "[verifiers][caccioppoli][property]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Ball w0{3, {0.5, 0.5, 0.5}, 0.1}, w1{3, {0.5, 0.5, 0.5}, 0.3};
    const auto e = exponential_ensemble(d, 1.0, 8, 5);
    for (auto form : {CaccioppoliForm::Critical, CaccioppoliForm::Bounded}) {
        bool all = true;
        for (const auto& m : e.members)
            all = all && caccioppoli(m.u, Potential(m.V, d, 1.5), w0, w1, form).pass;
        const auto fit = caccioppoli_fit(e, w0, w1, form, 1.5);
        CHECK(fit.pass);
        CHECK(fit.ensemble_size == 8);
        if (all) CHECK(fit.constants.at("C") <= fit.constants.at("explicit_C") * (1 + 1e-12));
    }
}

TEST_CASE("three-ball trivial and geometry cases", "[verifiers][three_ball]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Potential V = constant_potential(d, 0.5, 1.5);
    const auto z = three_ball(ScalarField::constant(0.0), V, {0.5, 0.5, 0.5}, 0.1, ThreeBallRegime::Critical);
    CHECK(z.pass);
    CHECK(z.lhs == 0.0);
    CHECK_THROWS_AS(three_ball(exp_field({1, 0, 0}), V, {0.2, 0.5, 0.5}, 0.1, ThreeBallRegime::Critical),
                    GeometryInfeasible);
    CHECK_NOTHROW(three_ball(exp_field({1, 0, 0}), V.with_exponent(kInf), {0.35, 0.5, 0.5}, 0.1,
                             ThreeBallRegime::Configured));
    CHECK_THROWS_AS(three_ball(exp_field({1, 0, 0}), V, {0.5, 0.5, 0.5}, 0.1, ThreeBallRegime::Configured),
                    ClassViolation);
}

TEST_CASE("three-ball reports are invariant under u -> c u", "[verifiers][three_ball][property]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Potential V = constant_potential(d, 0.5, 1.5);
    const auto u = exp_field({0.7, 0, 0});
    const auto base = three_ball(u, V, {0.5, 0.5, 0.5}, 0.1, ThreeBallRegime::Critical);
    for (double c : {1e-6, 1.0, 1e6}) {
        const auto r = three_ball(u.scaled(c), V, {0.5, 0.5, 0.5}, 0.1, ThreeBallRegime::Critical);
        CHECK(r.margin == Approx(base.margin).epsilon(1e-10));
        CHECK(r.lhs == Approx(c * base.lhs).epsilon(1e-10));
        CHECK(r.rhs == Approx(c * base.rhs).epsilon(1e-10));
        CHECK(r.pass == base.pass);
    }
}

TEST_CASE("rescaled potential norm matches the rescaled field", "[verifiers][three_ball][property]") {
    const auto d = cube(1.0, 1.0 / 16);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = U(rng), b = 3 * U(rng);
        const double s = trial % 3 == 0 ? kInf : 2.0 + 3 * U(rng);
        const Potential V(ScalarField::analytic([a, b](const Vec& x) { return a + b * x[0] * x[1] + std::sin(x[2]); }),
                          d, s);
        const Vec x0{0.3 + 0.4 * U(rng), 0.3 + 0.4 * U(rng), 0.3 + 0.4 * U(rng)};
        const double r = 0.02 + 0.05 * U(rng);
        const double k1 = rescaled_kappa(V, x0, r), k2 = rescaled_kappa_direct(V, x0, r);
        INFO("s " << s << " " << k1 << " vs " << k2);
        CHECK(std::abs(k1 - k2) <= 1e-10 * std::max(1.0, k2));
    }
}

TEST_CASE("three-ball fit against the explicit constant", "[verifiers][three_ball][property]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Potential V = constant_potential(d, 0.5, 1.5);
    const Vec x0{0.5, 0.5, 0.5};
    const double r = 0.1;
    const auto e = exponential_ensemble(d, 0.5, 12, 9);
    const auto f = three_ball_fit(e, x0, r);
    CHECK(f.report.pass);
    CHECK(f.fit.alpha > 0.0);
    CHECK(f.fit.alpha < 1.0);
    bool all = true;
    for (const auto& m : e.members) all = all && three_ball(m.u, V, x0, r, ThreeBallRegime::Critical).pass;
    REQUIRE(all);
    const auto sc = singular_constants(1.0, talenti_constant(3), V.kappa_critical(), 1.0);
    const double fitted = three_ball_log_C(f.x, f.y, sc.alpha);
    CHECK(fitted <= std::log(sc.q_V / r));
}

TEST_CASE("doubling routes and the rho < r/8 precondition", "[verifiers][doubling]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Vec x0{0.5, 0.5, 0.5};
    const double r = 0.1;
    const auto u = harmonic_field(1, x0);
    const auto res = doubling(u, constant_potential(d, 0.0, 1.5), x0, r, {r / 16, r / 32});
    for (const auto& rep : res.reports) {
        INFO(rep.id << " margin " << rep.margin);
        CHECK(rep.pass);
    }
    CHECK(find(res.reports, "doubling.frequency.explicit").pass);
    CHECK(res.margins.rows.size() == 2);
    CHECK_THROWS_AS(doubling(u, constant_potential(d, 0.0, 1.5), x0, r, {r / 8}), InvalidArgument);
    CHECK_THROWS_AS(doubling(u, constant_potential(d, 0.0, 1.5), {0.2, 0.5, 0.5}, r, {r / 16}), GeometryInfeasible);
}

TEST_CASE("propagation along a path chain", "[verifiers][propagation]") {
    const auto d = cube(1.0, 1.0 / 16);
    const double r = 0.05;
    const auto pc = path_chain_plan(*d, {0.2, 0.2, 0.2}, {0.8, 0.8, 0.8}, r);
    const auto res = propagate_smallness(exp_field({1, 0, 0}), d, pc.plan, r, Mode::Fit);
    CHECK(res.links == static_cast<int>(pc.plan.links()));
    for (const auto& rep : res.reports) {
        INFO(rep.id << " margin " << rep.margin);
        CHECK(rep.pass);
    }
    CHECK(res.exponent == Approx(std::pow(res.alpha, res.links)).epsilon(1e-13));
    const auto& rec = find(res.reports, "propagation.recursion.fit");
    CHECK(rec.constants.at("closed_form_defect") <= 1e-9);

    // A single link reduces to one three-ball step.
    ChainPlan one;
    one.centers = {Vec{0.5, 0.5, 0.5}, Vec{0.55, 0.5, 0.5}};
    one.radii = {r, r};
    one.overlap_ratios = {1.0};
    const auto single = propagate_smallness(exp_field({1, 0, 0}), d, one, r, Mode::Fit);
    CHECK(single.links == 1);
    CHECK(find(single.reports, "propagation.link.fit").margin == Approx(1.0));
}

TEST_CASE("explicit propagation needs the class and deep centres", "[verifiers][propagation]") {
    const auto d = cube(1.0, 1.0 / 16);
    const double r = 0.05;
    const auto pc = path_chain_plan(*d, {0.3, 0.3, 0.3}, {0.7, 0.7, 0.7}, r);
    const Potential V = constant_potential(d, 0.5, 1.5);
    const auto u = exp_field({std::sqrt(0.5), 0, 0});
    const auto res = propagate_smallness(u, d, pc.plan, r, Mode::Explicit, &V);
    for (const auto& rep : res.reports) CHECK(rep.pass);
    CHECK_THROWS_AS(propagate_smallness(u, d, pc.plan, r, Mode::Explicit), InvalidArgument);
    const Potential big = constant_potential(d, 10.0, 1.5);
    CHECK_THROWS_AS(propagate_smallness(exp_field({1, 0, 0}), d, pc.plan, r, Mode::Explicit, &big), ClassViolation);
}

TEST_CASE("chain accounting over random instances", "[verifiers][propagation][property]") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double side = 0.6 + 0.6 * U(rng);
        const auto d = cube(side, side / 12);
        const double frak_r = connectivity_radius(*d);
        const double r = frak_r / 4.0 * (0.2 + 0.7 * U(rng));
        const double lo = 4 * r, hi = side - 4 * r;
        const Vec x{lo + (hi - lo) * U(rng), lo + (hi - lo) * U(rng), lo + (hi - lo) * U(rng)};
        const Vec y{lo + (hi - lo) * U(rng), lo + (hi - lo) * U(rng), lo + (hi - lo) * U(rng)};
        for (const auto& rep : chain_accounting(*d, x, y, r, 25.0 / 153.0, frak_r)) {
            INFO(rep.id << " trial " << trial << " margin " << rep.margin);
            CHECK(rep.pass);
        }
    }
    const auto d = cube(1.0, 1.0 / 16);
    CHECK_THROWS_AS(chain_accounting(*d, {0.5, 0.5, 0.5}, {0.5, 0.5, 0.5}, 0.3, 0.5, 1.0), GeometryInfeasible);
}

TEST_CASE("cone accounting", "[verifiers][propagation]") {
    ConeInput in;
    in.apex = {0, 0, 0};
    in.axis = {0, 0, 1};
    in.rho_bar = 0.9;
    in.r = 0.02;
    in.x = {0, 0, 0.1};
    const auto rep = cone_accounting(in);
    CHECK(rep.pass);
    CHECK(rep.constants.at("k_x") >= rep.constants.at("k_plus"));
}

TEST_CASE("global bound from an interior ball", "[verifiers][global_uc]") {
    const auto d = cube(1.0, 1.0 / 32);
    const Potential V = constant_potential(d, 1.0, kInf);
    const Ball omega{3, {0.3, 0.3, 0.3}, 0.12};
    const auto res = global_uc(exp_field({1, 0, 0}), V, omega, {0.05, 0.025});
    CHECK(res.r_star == Approx(0.075));
    for (const auto& rep : res.reports) {
        INFO(rep.id << " margin " << rep.margin);
        CHECK(rep.pass);
    }
    CHECK(res.tradeoff.rows.size() == 2);
    CHECK_THROWS_AS(global_uc(exp_field({1, 0, 0}), V, omega, {0.1}), GeometryInfeasible);

    GlobalUcOptions cone;
    cone.geometry = GlobalGeometry::Cone;
    const auto c = global_uc(exp_field({1, 0, 0}), V, omega, {0.05}, cone);
    CHECK(all_pass(c.reports));
}

TEST_CASE("cone constants", "[verifiers][global_uc]") {
    const auto c = cone_uc_constants(3, 25.0 / 153.0, 1.0 / 3.0, 0.3, 0.25, 1.0, 1.0);
    CHECK(c.mu == Approx(7.0 / 8.0));
    CHECK(c.varpi == Approx(1.0 / 9.0));
    CHECK(c.varsigma == Approx(std::log(153.0 / 25.0) / std::log(8.0 / 7.0)));
    CHECK(c.frak_b <= 1.0);
    CHECK(c.varsigma_tilde >= c.varsigma);
}

TEST_CASE("vanishing slopes for zeros of order 0, 1 and 2", "[verifiers][vanishing]") {
    const auto d = cube(0.5, 1.0 / 32);
    const Vec x0{0.25, 0.25, 0.25};
    const ScalarField us[3] = {
        exp_field({1, 0, 0}),
        ScalarField::analytic([](const Vec& x) { return std::sinh(x[0] - 0.25); }),
        ScalarField::analytic([](const Vec& x) { return std::sinh(x[0] - 0.25) * std::sinh(x[1] - 0.25); }),
    };
    const double V[3] = {1.0, 1.0, 2.0};
    for (int k = 0; k < 3; ++k) {
        const auto v = vanishing_order(us[k], constant_potential(d, V[k], kInf), x0);
        INFO("order " << k << " slope " << v.slope);
        CHECK(std::abs(v.slope - (k + 1.5)) <= 0.25);
        for (const auto& rep : v.reports) CHECK(rep.pass);
        CHECK(v.constants.r_hat > 0.0);
    }
    CHECK_THROWS_AS(vanishing_order(ScalarField::constant(0.0), constant_potential(d, 1.0, kInf), x0), ZeroCrossing);
}

TEST_CASE("cauchy construction and optimal split", "[verifiers][cauchy]") {
    const auto d = cube(1.0, 1.0 / 16);
    FacePatch p;
    p.axis = 0;
    p.face_value = 0.0;
    p.inward = 1;
    p.centre = {0, 0.5, 0.5};
    p.half_width = 0.2;
    const auto g = cauchy_geometry(*d, p);
    CHECK_FALSE(d->contains(g.x0));
    CHECK(std::sqrt(std::pow(g.rho + g.r, 2) - g.rho * g.rho) < p.half_width);
    CHECK(d->distance_to_complement(g.omega_bar.center) >= g.omega_bar.radius);

    for (double c : {0.5, 2.0, 5.0})
        for (double B : {1e-6, 1e-2, 1.0, 10.0}) {
            const double A = 3.0;
            double best = kInf;
            for (int k = 0; k <= 20000; ++k) {
                const double eps = std::pow(10.0, -12.0 + 12.0 * k / 20000.0);
                best = std::min(best, eps * A + std::pow(eps, -c) * B);
            }
            CHECK(cauchy_optimal_log(A, B, c) == Approx(std::log(best)).margin(1e-6));
        }

    FacePatch off = p;
    off.centre = {0, 0.9, 0.5};
    CHECK_THROWS_AS(cauchy_geometry(*d, off), GeometryInfeasible);
}

TEST_CASE("cauchy fit is monotone in the patch size", "[verifiers][cauchy]") {
    const auto d = cube(1.0, 1.0 / 16);
    const Potential V = constant_potential(d, 1.0, kInf);
    const auto e = exponential_ensemble(d, 1.0, 6, 2);
    FacePatch p;
    p.centre = {0, 0.5, 0.5};
    p.half_width = 0.05;
    CauchyOptions o;
    o.omega_bar = cauchy_geometry(*d, p).omega_bar;
    double prev = kInf;
    for (double w : {0.05, 0.1, 0.2}) {
        p.half_width = w;
        const auto res = cauchy_uc(e, V, p, o);
        for (const auto& rep : res.reports) CHECK(rep.pass);
        CHECK(res.log_K <= prev);
        prev = res.log_K;
        CHECK(res.sweep.rows.size() == 41);
    }
    Ensemble zero{d, {}};
    zero.members.push_back(Member{0, Provenance::Manufactured, "zero", ScalarField::constant(0.0)});
    const auto z = cauchy_uc(zero, V, p, o);
    CHECK(z.reports.front().pass);
    CHECK(z.reports.front().lhs == 0.0);
}

TEST_CASE("cover counts scale like eps^-n", "[verifiers][cover]") {
    const auto d = cube(1.0, 1.0 / 32);
    const auto mask = erode(d, 0.1);
    const auto c = cover_check(mask, {0.25, 0.125, 0.0625});
    CHECK(c.counts.size() == 3);
    CHECK(c.counts[2] > c.counts[0]);
    for (const auto& rep : c.reports) {
        INFO(rep.id << " margin " << rep.margin);
        CHECK(rep.pass);
    }
    CHECK(c.c_hat <= c.c_hat_proof);
}

TEST_CASE("broken lines on random cube unions", "[verifiers][cover][property]") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> step(0, 5);
    for (int trial = 0; trial < 50; ++trial) {
        CubeComplex cubes;
        cubes.edge = 0.1;
        std::array<int, 3> at{0, 0, 0};
        cubes.cells.push_back(at);
        const int len = 2 + trial % 20;
        for (int i = 0; i < len; ++i) {
            const int s = step(rng);
            at[s / 2] += s % 2 ? 1 : -1;
            if (std::find(cubes.cells.begin(), cubes.cells.end(), at) == cubes.cells.end()) cubes.cells.push_back(at);
        }
        const auto box0 = cubes.cell_box(0), box1 = cubes.cell_box(cubes.cells.size() - 1);
        const auto rep = broken_line_check(cubes, 0.5 * (box0.lo + box0.hi), 0.5 * (box1.lo + box1.hi));
        INFO("trial " << trial << " margin " << rep.margin);
        CHECK(rep.pass);
    }
}
