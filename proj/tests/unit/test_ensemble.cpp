#include <catch_amalgamated.hpp>

#include "qucl/ensemble.hpp"

using namespace qucl;

namespace {
DomainPtr cube(double h) { return std::make_shared<const Domain>(Domain::box(3, {1, 1, 1}, h)); }
}  // namespace

TEST_CASE("manufactured members solve the equation exactly", "[ensemble]") {
    const auto d = cube(1.0 / 16);
    for (double c : {0.0, 1.0, -2.0}) {
        const auto e = exponential_ensemble(d, c, 5, 7);
        REQUIRE(e.size() == 5);
        for (const auto& m : e.members) {
            CHECK(m.residual == 0.0);
            // Central differences of the closed form against c u.
            const Vec x{0.4, 0.55, 0.3};
            const double h = 1e-3;
            double lap = -6 * m.u(x);
            for (int k = 0; k < 3; ++k) {
                Vec p = x, q = x;
                p[k] += h;
                q[k] -= h;
                lap += m.u(p) + m.u(q);
            }
            lap /= h * h;
            CHECK(std::abs(lap - c * m.u(x)) <= 1e-4 * std::max(1.0, std::abs(m.u(x))));
            CHECK(analytic_residual(m.u, m.V, d) <= 1e-10 * std::max(1.0, lp_norm(m.u, d, kInf)));
        }
    }
}

TEST_CASE("seeded ensembles are reproducible", "[ensemble]") {
    const auto d = cube(1.0 / 16);
    const auto a = exponential_ensemble(d, 1.0, 3, 42);
    const auto b = exponential_ensemble(d, 1.0, 3, 42);
    for (int i = 0; i < 3; ++i) CHECK(a.members[i].u({0.3, 0.2, 0.1}) == b.members[i].u({0.3, 0.2, 0.1}));
    const auto s1 = solved_ensemble(d, ScalarField::constant(1.0), 3, 5, {1e-10}, 1);
    const auto s3 = solved_ensemble(d, ScalarField::constant(1.0), 3, 5, {1e-10}, 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(s1.members[i].u.values() == s3.members[i].u.values());
        CHECK(s1.members[i].residual <= 1e-8);
        CHECK(s1.members[i].provenance == Provenance::Solved);
    }
    auto all = a;
    all.append(s1);
    CHECK(all.size() == 6);
    CHECK(all.members.back().id == 5);
}
