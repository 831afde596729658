#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qucl/geometry.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

DomainPtr unit_cube(double h) { return std::make_shared<const Domain>(Domain::box(3, {1, 1, 1}, h)); }

DomainPtr l_shape(double h) {
    return std::make_shared<const Domain>(3, std::vector<Box>{{{0, 0, 0}, {1, 0.5, 0.5}}, {{0, 0, 0}, {0.5, 1, 0.5}}}, h);
}

Vec random_point(std::mt19937_64& rng, const Vec& lo, const Vec& hi) {
    Vec x{};
    for (int i = 0; i < 3; ++i) x[i] = std::uniform_real_distribution<double>(lo[i], hi[i])(rng);
    return x;
}

// Staircase of 10 cubes climbing one axis at a time.
CubeComplex staircase(double edge) {
    CubeComplex c;
    c.n = 3;
    c.edge = edge;
    std::array<int, 3> cell{0, 0, 0};
    for (int k = 0; k < 10; ++k) {
        c.cells.push_back(cell);
        cell[k % 3] += 1;
    }
    return c;
}

}  // namespace

TEST_CASE("box distance to the complement is exact", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    CHECK(d->distance_to_complement({0.5, 0.5, 0.5}) == 0.5);
    CHECK(d->distance_to_complement({0.1, 0.7, 0.3}) == Approx(0.1).epsilon(1e-15));
    CHECK(d->distance_to_complement({1.5, 0.5, 0.5}) == 0.0);
    CHECK(d->cube_extent() == 1.0);
    CHECK(d->volume() == 1.0);

    auto L = l_shape(1.0 / 16);
    // Reentrant corner at (0.5, 0.5, z); distance to it from (0.25, 0.25, 0.25) is limited by the z face.
    CHECK(L->distance_to_complement({0.25, 0.25, 0.25}) == Approx(0.25));
    CHECK(L->distance_to_complement({0.45, 0.45, 0.25}) == Approx(std::hypot(0.05, 0.05)));
    CHECK(L->volume() == Approx(0.375));
    CHECK_FALSE(L->contains({0.75, 0.75, 0.25}));
}

TEST_CASE("domain invariants are enforced", "[geometry]") {
    CHECK_THROWS_AS(Domain::box(4, {1, 1, 1}, 0.1), InvalidArgument);
    CHECK_THROWS_AS(Domain::box(3, {1, 1, 1}, 0.3), InvalidArgument);
    CHECK_THROWS_AS(Domain::box(3, {1, 1, 1}, 0.25), InvalidArgument);
    CHECK_THROWS_AS(Domain::box(3, {1, -1, 1}, 0.1), InvalidArgument);
}

TEST_CASE("erosion of the unit cube at r = 1/4", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    const auto m = erode(d, 0.25);
    for (std::size_t i = 0; i < d->node_count(); ++i) {
        const Vec x = d->node(i);
        bool inside = true;
        for (int a = 0; a < 3; ++a) inside = inside && x[a] > 0.25 + 1e-12 && x[a] < 0.75 - 1e-12;
        CHECK(m.member(i) == inside);
    }
    CHECK(m.connected());
    CHECK(m.measure() == Approx(0.125).epsilon(1e-12));
    CHECK_THROWS_AS(erode(d, 0.6), EmptyRegion);
    CHECK_THROWS_AS(erode(d, 0.0), InvalidArgument);
}

TEST_CASE("erosion of an L-shaped union stays connected", "[geometry]") {
    auto L = l_shape(1.0 / 20);
    const auto m = erode(L, 0.1);
    CHECK(m.connected());
    CHECK_FALSE(m.empty());
}

TEST_CASE("collar measure matches the eroded-box volume", "[geometry]") {
    auto d = unit_cube(1.0 / 20);
    const auto c = collar(d, 0.1);
    CHECK(std::abs(c.measure() - (1.0 - std::pow(0.8, 3))) <= std::pow(1.0 / 20, 3));
    double prev = 2.0;
    for (double r : {0.2, 0.1, 0.05}) {
        const double m = collar(d, r).measure();
        CHECK(m < prev);
        prev = m;
    }
}

TEST_CASE("erosion, collar and level set partition the closure", "[geometry][property]") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        auto d = trial % 2 ? unit_cube(1.0 / 16) : l_shape(1.0 / 16);
        const double r = std::uniform_real_distribution<double>(0.02, 0.2)(rng);
        const double rr = trial % 4 == 0 ? 0.125 : r;  // hit grid-aligned level sets too
        const auto e = erode(d, rr);
        const auto c = collar(d, rr);
        for (std::size_t i = 0; i < d->node_count(); ++i) {
            const int covered = e.member(i) + c.member(i) + e.level(i);
            CHECK(covered == (d->node_in_closure(i) ? 1 : 0));
            CHECK(e.level(i) == c.level(i));
        }
    }
}

TEST_CASE("ball masks agree with the Euclidean predicate", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    const Vec c{0.4, 0.5, 0.55};
    const auto b = ball_mask(d, c, 0.3);
    const auto a = annulus_mask(d, c, 0.1, 0.3);
    for (std::size_t i = 0; i < d->node_count(); ++i) {
        const double t = distance(d->node(i), c);
        CHECK(b.member(i) == (t < 0.3));
        CHECK(a.member(i) == (t > 0.1 && t < 0.3));
    }
}

TEST_CASE("connectivity radius of the unit cube", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    const double r = connectivity_radius(*d);
    CHECK(r > 0.45);
    CHECK(r <= 0.5);
}

TEST_CASE("greedy cover examples", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    const Vec c{0.5, 0.5, 0.5};
    const auto point = ball_mask(d, c, 1e-3);
    REQUIRE(point.count() == 1);
    CHECK(greedy_cover(point, 0.01).count() == 1);

    const auto all = erode(d, 1e-6);
    CHECK(greedy_cover(all, 2.0).count() == 1);

    const auto c4 = greedy_cover(all, 0.25);
    const auto c8 = greedy_cover(all, 0.125);
    CHECK(static_cast<double>(c8.count()) / c4.count() <= 8.0 * 1.5);
    CHECK(c8.covers(all));
    CHECK(c8.min_separation() > 0.125);
    // Packing: disjoint eps/2 balls sit inside the eps/2-fattened cube.
    const double eps = 0.125;
    CHECK(c8.count() * unit_ball_volume(3) * std::pow(eps / 2, 3) <= std::pow(1.0 + eps, 3));
    CHECK_THROWS_AS(greedy_cover(all, 0.0), InvalidArgument);
}

TEST_CASE("cube path examples", "[geometry]") {
    const double edge = 0.1;
    const double r = edge * std::sqrt(3.0);
    CubeComplex one{3, {0, 0, 0}, edge, {{0, 0, 0}}};
    const auto p1 = cube_path(one, {0.01, 0.02, 0.03}, {0.09, 0.08, 0.07});
    CHECK(p1.length() <= r);

    CubeComplex two{3, {0, 0, 0}, edge, {{0, 0, 0}, {1, 0, 0}}};
    const auto p2 = cube_path(two, {0.01, 0.05, 0.05}, {0.19, 0.05, 0.05});
    CHECK(p2.length() <= 2 * r);
    CHECK(p2.points.size() == 3);

    CubeComplex split{3, {0, 0, 0}, edge, {{0, 0, 0}, {2, 0, 0}}};
    CHECK_THROWS_AS(cube_path(split, {0.01, 0.01, 0.01}, {0.25, 0.05, 0.05}), GeometryInfeasible);
    CHECK_THROWS_AS(cube_path(two, {0.01, 0.05, 0.05}, {0.5, 0.05, 0.05}), OutOfDomain);
}

TEST_CASE("cube path on a 10-cube staircase stays short and inside", "[geometry][property]") {
    std::mt19937_64 rng(3);
    const auto cubes = staircase(0.1);
    const double r = 0.1 * std::sqrt(3.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto& a = cubes.cells[rng() % 10];
        const auto& b = cubes.cells[rng() % 10];
        auto pick = [&](const std::array<int, 3>& c) {
            Vec lo{}, hi{};
            for (int i = 0; i < 3; ++i) {
                lo[i] = c[i] * 0.1;
                hi[i] = lo[i] + 0.1;
            }
            return random_point(rng, lo, hi);
        };
        const auto path = cube_path(cubes, pick(a), pick(b));
        CHECK(path.length() <= 10 * r);
        for (std::size_t i = 0; i + 1 < path.points.size(); ++i)
            for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
                CHECK(cubes.contains(path.points[i] + t * (path.points[i + 1] - path.points[i])));
    }
}

TEST_CASE("ball chain spacing and counts", "[geometry]") {
    const auto plan = ball_chain(BrokenLine{{{0, 0, 0}, {1, 0, 0}}}, 0.25);
    REQUIRE(plan.centers.size() == 5);
    for (std::size_t j = 0; j < 5; ++j) CHECK(plan.centers[j][0] == Approx(0.25 * j).margin(1e-15));
    CHECK(plan.p_r == 4);

    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        BrokenLine line;
        const int k = 2 + static_cast<int>(rng() % 5);
        for (int i = 0; i < k; ++i) line.points.push_back(random_point(rng, {0, 0, 0}, {1, 1, 1}));
        const double r = std::uniform_real_distribution<double>(0.02, 0.5)(rng);
        const auto c = ball_chain(line, r);
        CHECK(c.centers.size() <= std::ceil(line.length() / r) + 1);
        for (std::size_t j = 1; j <= static_cast<std::size_t>(c.p_r); ++j)
            CHECK(distance(c.centers[j], c.centers[j - 1]) == Approx(r).epsilon(1e-9));
        for (double ratio : c.overlap_ratios) CHECK(ratio <= 1.0);
        // Sampled sphere points of each next ball stay in the doubled previous ball.
        for (std::size_t j = 0; j + 1 < c.centers.size(); ++j)
            for (int s = 0; s < 26; ++s) {
                Vec dir{double(s % 3) - 1, double(s / 3 % 3) - 1, double(s / 9) - 1};
                if (norm(dir) == 0) dir = {1, 0, 0};
                const Vec y = c.centers[j + 1] + (r / norm(dir)) * dir;
                CHECK(distance(y, c.centers[j]) <= 2 * r * (1 + 1e-15));
            }
    }
}

TEST_CASE("ball chain on the staircase path respects m_r", "[geometry]") {
    const auto cubes = staircase(0.1);
    const double r = 0.1 * std::sqrt(3.0);
    const auto path = cube_path(cubes, {0.05, 0.05, 0.05}, {0.35, 0.35, 0.35});
    const auto plan = ball_chain(path, r);
    CHECK(plan.p_r + 1 <= chain_cube_count(3, 1.0, r));
    CHECK(chain_cube_count(3, 1.0, 0.5) == 64);
}

TEST_CASE("path chain plan inside a box", "[geometry]") {
    auto d = unit_cube(1.0 / 16);
    const double r = 0.05;
    const auto pc = path_chain_plan(*d, {0.2, 0.2, 0.2}, {0.8, 0.8, 0.8}, r);
    CHECK(pc.plan.p_r + 1 <= pc.m_r);
    for (const auto& x : pc.plan.centers) CHECK(d->distance_to_complement(x) >= 3 * r * (1 - 1e-12));
    CHECK_THROWS_AS(path_chain_plan(*d, {0.1, 0.5, 0.5}, {0.5, 0.5, 0.5}, r), GeometryInfeasible);
}

TEST_CASE("cone chain closed forms", "[geometry]") {
    ConeInput in;
    in.sin_theta = 1.0 / 3.0;
    in.rho_bar = 1.2;
    in.d0 = 1.0;
    in.apex = {0, 0, 0};
    in.axis = {0, 0, 1};
    in.r = 0.05;
    in.x = {0, 0, 0.05};
    const auto c = cone_chain(in);
    CHECK(c.mu == Approx(7.0 / 8.0).epsilon(1e-15));
    CHECK(c.varpi == Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(c.plan.radii[0] == Approx(1.0 / 9.0).epsilon(1e-15));
    CHECK(c.within_bounds);
    CHECK(c.nested_containment);
    for (std::size_t k = 0; k < c.plan.centers.size(); ++k)
        CHECK(norm(c.plan.centers[k]) == Approx(std::pow(7.0 / 8.0, k)).epsilon(1e-12));

    in.d0 = 0.7;
    CHECK_THROWS_AS(cone_chain(in), GeometryInfeasible);
}

TEST_CASE("cone chain index bounds over random configurations", "[geometry][property]") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int trial = 0; trial < 1000; ++trial) {
        ConeInput in;
        in.sin_theta = 0.01 + (1.0 / 3.0 - 0.01) * U(rng);
        in.rho_bar = 0.2 + U(rng);
        in.r = in.rho_bar / 3.0 * std::pow(10.0, -3.0 * U(rng));
        Vec axis{U(rng) - 0.5, U(rng) - 0.5, U(rng) - 0.5};
        in.axis = axis;
        in.apex = {U(rng), U(rng), U(rng)};
        const double d = in.r + (in.rho_bar / 3.0 - in.r) * U(rng);
        in.x = in.apex + (d / norm(axis)) * axis;
        const auto c = cone_chain(in);
        CHECK(c.within_bounds);
        CHECK(c.nested_containment);
        CHECK(c.cones_contain_balls);
    }
}
