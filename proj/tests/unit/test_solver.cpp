#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qucl/solver.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

DomainPtr cube(double side, double h) { return std::make_shared<const Domain>(Domain::box(3, {side, side, side}, h)); }

double max_node_error(const ScalarField& u, const ScalarField& exact, const Domain& d) {
    double e = 0.0;
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.node_in_closure(i)) e = std::max(e, std::abs(u(d.node(i)) - exact(d.node(i))));
    return e;
}

}  // namespace

TEST_CASE("manufactured Schrodinger solution converges at second order", "[solver]") {
    const auto u = exp_field({1, 0, 0});
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32, 1.0 / 64}) {
        DiscreteProblem p;
        p.domain = cube(1.0, h);
        p.V = ScalarField::constant(1.0);
        p.boundary = u;
        const auto s = solve_dirichlet(p, {1e-12});
        CHECK(s.residual_norm <= 1e-12);
        errs.push_back(max_node_error(s.u, u, *p.domain));
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) {
        const double ratio = errs[k] / errs[k + 1];
        INFO("ratio " << ratio);
        CHECK(ratio >= 3.5);
        CHECK(ratio <= 4.5);
    }
}

TEST_CASE("homogeneous data gives the zero solution", "[solver]") {
    DiscreteProblem p;
    p.domain = cube(1.0, 1.0 / 16);
    p.V = ScalarField::constant(3.0);
    const auto s = solve_dirichlet(p);
    for (double v : s.u.values()) CHECK(v == 0.0);
    CHECK(s.iterations == 0);
}

TEST_CASE("drift solve recovers e^{x1}", "[solver]") {
    const auto u = exp_field({1, 0, 0});
    std::vector<double> errs;
    for (double h : {1.0 / 16, 1.0 / 32}) {
        DiscreteProblem p;
        p.domain = cube(1.0, h);
        p.W = VectorField::constant({1, 0, 0});
        p.boundary = u;
        const auto s = solve_dirichlet(p, {1e-11});
        CHECK(s.bicgstab);
        CHECK(s.residual_norm <= 1e-11);
        errs.push_back(max_node_error(s.u, u, *p.domain));
    }
    CHECK(errs[0] / errs[1] >= 3.5);
    CHECK(errs[0] / errs[1] <= 4.5);

    DiscreteProblem fast;
    fast.domain = cube(1.0, 1.0 / 16);
    fast.W = VectorField::constant({40, 0, 0});
    CHECK_THROWS_AS(solve_dirichlet(fast), InvalidArgument);
}

TEST_CASE("solver preconditions", "[solver]") {
    DiscreteProblem p;
    p.domain = cube(1.0, 1.0 / 8);
    CHECK_THROWS_AS(solve_dirichlet(p), InvalidArgument);
    p.domain = cube(1.0, 1.0 / 16);
    CHECK_THROWS_AS(solve_dirichlet(p, {1e-3}), InvalidArgument);
    // V near minus the first Dirichlet eigenvalue: indefinite operator.
    p.V = ScalarField::constant(-40.0);
    p.boundary = ScalarField::constant(1.0);
    CHECK_THROWS_AS(solve_dirichlet(p, {1e-10, 500}), NotConverged);
}

TEST_CASE("stencil residual", "[solver]") {
    auto d = cube(1.0, 1.0 / 16);
    const auto lin = ScalarField::analytic([](const Vec& x) { return 2 * x[0] - x[1] + 0.5 * x[2] + 1; });
    CHECK(residual(lin, d, ScalarField::constant(0.0)) <= 1e-11);
    CHECK(residual(ScalarField::constant(0.0), d, ScalarField::constant(4.0)) == 0.0);
    const double r1 = residual(exp_field({1, 0, 0}), d, ScalarField::constant(1.0));
    const double r2 = residual(exp_field({1, 0, 0}), cube(1.0, 1.0 / 32), ScalarField::constant(1.0));
    CHECK(r1 / r2 == Approx(4.0).margin(0.3));
}

TEST_CASE("operator symmetry without drift", "[solver][property]") {
    auto d = std::make_shared<const Domain>(3, std::vector<Box>{{{0, 0, 0}, {1, 0.5, 0.5}}, {{0, 0, 0}, {0.5, 1, 0.5}}},
                                            1.0 / 16);
    const GridOperator A(d, ScalarField::analytic([](const Vec& x) { return 1 + x[0] * x[1]; }));
    CHECK(A.symmetric());
    std::mt19937_64 rng(1);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        std::vector<double> x(A.size()), y(A.size()), Ax, Ay;
        for (auto& v : x) v = N(rng);
        for (auto& v : y) v = N(rng);
        A.apply(x, Ax);
        A.apply(y, Ay);
        CHECK(dot(y, Ax) == Approx(dot(x, Ay)).epsilon(1e-12));
    }
}

TEST_CASE("discrete maximum principle", "[solver][property]") {
    auto d = cube(1.0, 1.0 / 16);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const Vec c{U(rng), U(rng), U(rng)};
        const double amp = 20.0 * U(rng);
        DiscreteProblem p;
        p.domain = d;
        p.V = ScalarField::analytic([c, amp](const Vec& x) { return amp * std::exp(-dot(x - c, x - c)); });
        p.boundary = ScalarField::analytic([c](const Vec& x) { return std::sin(5 * x[0] + c[1]) + x[2] * c[0]; });
        const auto s = solve_dirichlet(p);
        double lo = kInf, hi = -kInf;
        for (std::size_t i = 0; i < d->node_count(); ++i)
            if (!d->node_interior(i)) {
                lo = std::min(lo, p.boundary(d->node(i)));
                hi = std::max(hi, p.boundary(d->node(i)));
            }
        for (std::size_t i = 0; i < d->node_count(); ++i)
            if (d->node_interior(i)) {
                CHECK(s.u.values()[i] <= std::max(hi, 0.0) + 1e-9);
                CHECK(s.u.values()[i] >= std::min(lo, 0.0) - 1e-9);
            }
    }
}

TEST_CASE("smallest Dirichlet eigenvalue", "[solver]") {
    auto d = cube(1.0, 1.0 / 32);
    const auto e0 = eigen_smallest(d, ScalarField::constant(0.0));
    CHECK(e0.lambda == Approx(3.0 * kPi * kPi).epsilon(1e-2));
    CHECK(e0.residual <= 1e-8);
    const double mx = *std::max_element(e0.field.values().begin(), e0.field.values().end());
    for (double v : e0.field.values()) CHECK(v >= -1e-12 * mx);
    const auto e5 = eigen_smallest(d, ScalarField::constant(5.0));
    CHECK(e5.lambda == Approx(e0.lambda + 5.0).epsilon(1e-9));
}

TEST_CASE("discrete Sobolev quotient", "[solver]") {
    SobolevOptions opt;
    opt.starts = 5;
    const auto a = sobolev_constant(cube(1.0, 1.0 / 12), opt);
    const auto b = sobolev_constant(cube(2.0, 2.0 / 12), opt);
    INFO("sigma " << a.sigma << " dilated " << b.sigma);
    CHECK(b.sigma / a.sigma == Approx(1.0).margin(0.02));
    for (double q : a.per_start) CHECK(q == Approx(a.per_start[0]).epsilon(0.01));
    // Nested boxes on the same grid: extension by zero.
    const auto small = sobolev_constant(std::make_shared<const Domain>(Domain::box(3, {0.75, 0.75, 0.75}, 1.0 / 12)), opt);
    CHECK(small.sigma <= a.sigma * (1 + 1e-6));
    CHECK(a.sigma > 0.0);
    CHECK(a.sigma < 1.0);
}
