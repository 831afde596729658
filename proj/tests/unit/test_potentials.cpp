#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qucl/potentials.hpp"
#include "qucl/solver.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

DomainPtr unit_cube(double h) { return std::make_shared<const Domain>(Domain::box(3, {1, 1, 1}, h)); }

// Random grid-aligned boxes with random values on a coarse lattice of step 1/8.
Potential random_piecewise(const DomainPtr& d, std::mt19937_64& rng, double s) {
    std::uniform_int_distribution<int> cell(0, 7);
    std::uniform_real_distribution<double> value(-20.0, 20.0);
    const int count = 1 + static_cast<int>(rng() % 6);
    std::vector<Box> boxes;
    std::vector<double> values;
    for (int b = 0; b < count; ++b) {
        Box box;
        for (int a = 0; a < 3; ++a) {
            int i = cell(rng), j = cell(rng);
            if (i > j) std::swap(i, j);
            box.lo[a] = i / 8.0;
            box.hi[a] = (j + 1) / 8.0;
        }
        boxes.push_back(box);
        values.push_back(value(rng));
    }
    return piecewise_constant_potential(d, boxes, values, value(rng) * 0.1, s);
}

}  // namespace

TEST_CASE("potential norms use the cell-midpoint measure", "[potentials]") {
    auto d = unit_cube(1.0 / 16);
    const auto V = constant_potential(d, 2.0, 3.0);
    CHECK(V.kappa() == Approx(2.0).epsilon(1e-14));
    CHECK(V.kappa_critical() == Approx(2.0).epsilon(1e-14));
    CHECK(V.sup() == 2.0);
    CHECK(V.scaled(-0.5).min_value() == -1.0);
    CHECK_THROWS_AS(Potential(ScalarField::constant(1.0), d, 1.0), InvalidArgument);
    CHECK_THROWS_AS(Drift(VectorField::constant({1, 0, 0}), d, 3.0), InvalidArgument);
    CHECK(Drift(VectorField::constant({3, 4, 0}), d, 6.0).kappa() == Approx(5.0).epsilon(1e-14));
}

TEST_CASE("split of the two-level example", "[potentials]") {
    auto d = unit_cube(1.0 / 20);
    // Volume 0.1: 0.5 x 0.5 x 0.4.
    const auto V = two_level_potential(d, Box{{0, 0, 0}, {0.5, 0.5, 0.4}}, 10.0, 0.0, 3.0);
    CHECK(V.kappa() == Approx(10.0 * std::cbrt(0.1)).epsilon(1e-12));
    const auto r = split(V, 5.0);
    CHECK(r.norm_V1 == Approx(10.0 * std::pow(0.1, 2.0 / 3.0)).epsilon(1e-12));
    CHECK(r.bound_V1 == Approx(std::pow(V.kappa(), 2) / 5.0).epsilon(1e-12));
    CHECK(r.bound_V1 == Approx(4.309).margin(1e-3));
    CHECK(r.bounds_hold);
    CHECK(r.reconstruction_error == 0.0);

    const auto c = split(constant_potential(d, 3.0, 2.0), 4.0);
    CHECK(c.norm_V1 == 0.0);
    CHECK(c.sup_V2 == 3.0);
    CHECK_THROWS_AS(split(V, 0.0), InvalidArgument);

    const auto inf = split(constant_potential(d, 3.0), 1.0);
    CHECK(inf.V2.sup() == 3.0);
    CHECK(inf.V1.sup() == 0.0);
}

TEST_CASE("split bounds over random piecewise-constant potentials", "[potentials][property]") {
    auto d = unit_cube(1.0 / 16);
    std::mt19937_64 rng(42);
    for (int trial = 0; trial < 150; ++trial) {
        const double s = std::array<double, 3>{2.0, 3.0, 5.0}[trial % 3];
        const auto V = random_piecewise(d, rng, s);
        const double t = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(50.0))(rng));
        const auto r = split(V, t);
        CHECK(r.bounds_hold);
        CHECK(r.reconstruction_error == 0.0);
    }
}

TEST_CASE("split norms move monotonically with the threshold", "[potentials][property]") {
    auto d = unit_cube(1.0 / 16);
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 10; ++trial) {
        const auto V = random_piecewise(d, rng, 3.0);
        double prev1 = kInf, prev2 = 0.0;
        for (double t = 0.05; t < 40.0; t *= 1.5) {
            const auto r = split(V, t);
            CHECK(r.norm_V1 <= prev1);
            CHECK(r.sup_V2 >= prev2);
            prev1 = r.norm_V1;
            prev2 = r.sup_V2;
        }
    }
}

TEST_CASE("class membership", "[potentials]") {
    const auto zero = classify(3, 0.0, 3.0, kInf, 1.0, 1.0);
    CHECK(zero.v0);
    CHECK(zero.v);
    CHECK(zero.vs);
    CHECK(classify(3, 0.4, 3.0, kInf, 1.0, 1.0).v0);
    CHECK_FALSE(classify(3, 0.6, 3.0, kInf, 1.0, 1.0).v0);
    const auto nm = classify(3, 0.1, 3.0, 6.0, 1.0, 1.0);
    CHECK(nm.drift);
    CHECK(nm.drift_margin == Approx(2.5));
    CHECK_FALSE(classify(3, 0.1, 1.6, 6.0, 1.0, 1.0).drift);
    CHECK_THROWS_AS(classify(3, 0.1, 3.0, 6.0, 0.0, 1.0), InvalidArgument);
}

TEST_CASE("manufactured pairs", "[potentials]") {
    auto d = unit_cube(1.0 / 16);
    const auto m1 = manufacture(exp_field({1, 0, 0}), d);
    const auto m2 = manufacture(cosh_field({0.6, 0.8, 0}), d);
    const auto m3 = manufacture(exp_field({2, 0, 0}), d);
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int i = 0; i < 100; ++i) {
        const Vec x{U(rng), U(rng), U(rng)};
        CHECK(m1.V(x) == Approx(1.0).epsilon(1e-14));
        CHECK(m2.V(x) == Approx(1.0).epsilon(1e-14));
        CHECK(m3.V(x) == Approx(4.0).epsilon(1e-14));
    }
    const auto sum = ScalarField::analytic([](const Vec& x) { return std::exp(x[0]) + std::exp(x[1]); }, {},
                                           [](const Vec& x) { return std::exp(x[0]) + std::exp(x[1]); });
    CHECK(manufacture(sum, d).V({0.3, 0.7, 0.1}) == Approx(1.0).epsilon(1e-14));
    for (const auto* m : {&m1, &m2, &m3}) CHECK(analytic_residual(m->u, m->V.field(), d) <= 1e-10);

    const auto shifted = ScalarField::analytic([](const Vec& x) { return x[0] - 0.5; }, {}, [](const Vec&) { return 0.0; });
    CHECK_THROWS_AS(manufacture(shifted, d), ZeroCrossing);
    const auto crossing = ScalarField::analytic([](const Vec& x) { return x[0] - 0.53; }, {}, [](const Vec&) { return 0.0; });
    CHECK_THROWS_AS(manufacture(crossing, d), ZeroCrossing);
}

TEST_CASE("Holder product bound", "[potentials][property]") {
    auto d = unit_cube(1.0 / 12);
    const auto one = constant_potential(d, 1.0, 1.5);
    CHECK(holder_product_check(one, exp_field({1, 0, 0})).pass);
    const auto z = holder_product_check(one, ScalarField::constant(0.0));
    CHECK(z.pass);
    CHECK(z.lhs == 0.0);

    std::mt19937_64 rng(5);
    std::normal_distribution<double> N(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> uv(d->node_count()), vv(d->node_count());
        for (auto& x : uv) x = N(rng);
        for (auto& x : vv) x = 5.0 * N(rng);
        const Potential V(ScalarField::grid(d, vv), d, 1.5);
        const auto r = holder_product_check(V, ScalarField::grid(d, uv));
        CHECK(r.pass);
    }
}
