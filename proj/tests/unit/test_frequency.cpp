#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "qucl/frequency.hpp"
#include "qucl/potentials.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

const Vec kCenter{0.5, 0.5, 0.5};
const ScalarField kZero = ScalarField::constant(0.0);

double worst(const std::vector<InequalityReport>& rs, const std::string& id) {
    for (const auto& r : rs)
        if (r.id == id) return r.lhs;
    FAIL("missing report " << id);
    return 0;
}

const InequalityReport& find(const std::vector<InequalityReport>& rs, const std::string& id) {
    for (const auto& r : rs)
        if (r.id == id) return r;
    throw std::runtime_error("missing report " + id);
}

}  // namespace

TEST_CASE("frequency of homogeneous harmonic polynomials", "[frequency]") {
    const auto grid = geometric_grid(0.1, 0.5);
    for (int k = 0; k <= 3; ++k) {
        const auto p = frequency_profile(harmonic_field(k, kCenter), kZero, 3, kCenter, grid);
        double err = 0;
        for (double N : p.N) err = std::max(err, std::abs(N - k));
        INFO("degree " << k << " error " << err);
        CHECK(err <= 1e-6);
        CHECK_FALSE(p.truncated);
        CHECK(p.V_zero);
        CHECK(p.kappa == 0.0);
        CHECK(p.r_kappa == p.rho);
        for (const auto& r : frequency_bound(p)) {
            INFO(r.id << " margin " << r.margin);
            CHECK(r.pass);
        }
        for (const auto& r : check_identities(p)) CHECK(r.pass);
    }
}

TEST_CASE("closed-form columns for u = x1", "[frequency]") {
    const auto p = frequency_profile(harmonic_field(1, kCenter), kZero, 3, kCenter, geometric_grid(0.1, 0.4));
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double r = p.r[i];
        CHECK(p.H[i] == Approx(4 * kPi / 3 * std::pow(r, 4)).epsilon(1e-12));
        CHECK(p.D[i] == Approx(4 * kPi / 3 * std::pow(r, 3)).epsilon(1e-12));
        CHECK(p.K[i] == Approx(4 * kPi / 15 * std::pow(r, 5)).epsilon(1e-12));
        CHECK(p.N[i] == Approx(p.r[i] * p.D[i] / p.H[i]).epsilon(1e-15));
    }
    CHECK(p.M_bar == Approx(4.0).margin(1e-12));
    const auto d = doubling_from_frequency(p);
    CHECK(d.pass);
    CHECK(d.lhs == Approx(std::pow(2.0, 2.5)).epsilon(1e-10));
    CHECK(d.rhs == Approx(16.0).epsilon(1e-12));
    const auto t = p.table();
    CHECK(t.columns.front() == "r");
    CHECK(t.rows.size() == p.size());
}

TEST_CASE("doubling ratio for the degree-2 field", "[frequency]") {
    const auto p = frequency_profile(harmonic_field(2, kCenter), kZero, 3, kCenter, geometric_grid(0.05, 0.4));
    const auto d = doubling_from_frequency(p);
    CHECK(d.pass);
    CHECK(d.lhs == Approx(std::pow(2.0, 3.5)).epsilon(1e-10));
    CHECK(p.M_bar == Approx(5.0).margin(1e-10));
}

TEST_CASE("u = e^{x1} with V = 1", "[frequency]") {
    const auto u = exp_field({1, 0, 0});
    FrequencyOptions o;
    o.rho = 0.5;
    const auto p = frequency_profile(u, ScalarField::constant(1.0), 3, kCenter, geometric_grid(0.05, 0.5), o);
    CHECK(p.kappa == Approx(1.0));
    CHECK(p.r_kappa == Approx(0.5));
    CHECK(p.kappa_bar == Approx(2.25));
    CHECK(p.kappa_tilde == Approx(1.125));
    for (std::size_t i = 1; i < p.size(); ++i) CHECK(p.N[i] > p.N[i - 1]);
    CHECK(p.nonpositive_D.empty());
    for (const auto& r : frequency_bound(p)) {
        INFO(r.id << " margin " << r.margin);
        CHECK(r.pass);
    }
    CHECK(find(frequency_bound(p), "freq.cauchy_schwarz").trivial);
    const auto ids = check_identities(p);
    INFO("defects " << ids[0].lhs << " " << ids[1].lhs);
    CHECK(worst(ids, "freq.identity.H") <= 0.01);
    CHECK(worst(ids, "freq.identity.D") <= 0.01);
    CHECK(doubling_from_frequency(p).pass);
}

TEST_CASE("identity defects on grid-sampled fields", "[frequency]") {
    const auto u = exp_field({1, 0, 0});
    std::vector<double> defects;
    for (double h : {1.0 / 32, 1.0 / 64}) {
        auto d = std::make_shared<const Domain>(Domain::box(3, {1, 1, 1}, h));
        const auto p = frequency_profile(u.sampled(d), ScalarField::constant(1.0), 3, kCenter, geometric_grid(0.1, 0.4));
        const auto ids = check_identities(p, 0.03);
        INFO("h " << h << " defects " << ids[0].lhs << " " << ids[1].lhs);
        defects.push_back(std::max(ids[0].lhs, ids[1].lhs));
        if (h < 0.02) {
            CHECK(ids[0].pass);
            CHECK(ids[1].pass);
        }
        for (const auto& r : frequency_bound(p)) CHECK(r.pass);
    }
    INFO("refinement " << defects[0] / defects[1]);
    CHECK(defects[0] / defects[1] >= std::pow(2.0, 1.5));
}

TEST_CASE("constant field and uniform grids", "[frequency]") {
    std::vector<double> uniform;
    for (int i = 1; i <= 8; ++i) uniform.push_back(0.05 * i);
    const auto p = frequency_profile(ScalarField::constant(2.0), kZero, 3, kCenter, uniform);
    for (double D : p.D) CHECK(D == 0.0);
    for (std::size_t i = 2; i + 2 < p.size(); ++i) CHECK(p.dH[i] == Approx(2.0 * p.H[i] / p.r[i]).epsilon(1e-10));
    CHECK(p.nonpositive_D.size() == p.size());
    for (const auto& r : check_identities(p)) CHECK(r.pass);
    CHECK(p.M_bar == Approx(4.0));
}

TEST_CASE("frequency preconditions and truncation", "[frequency]") {
    auto d = std::make_shared<const Domain>(Domain::box(3, {1, 1, 1}, 1.0 / 16));
    const auto u = exp_field({1, 0, 0}).sampled(d);
    CHECK_THROWS_AS(frequency_profile(u, kZero, 3, kCenter, {0.1, 0.6}), OutOfDomain);
    CHECK_THROWS_AS(frequency_profile(u, kZero, 3, kCenter, {0.2, 0.1}), InvalidArgument);
    const auto p = frequency_profile(kZero, kZero, 3, kCenter, {0.1, 0.2});
    CHECK(p.truncated);
    CHECK(p.size() == 0);
    CHECK_THROWS_AS(check_identities(frequency_profile(harmonic_field(1, kCenter), kZero, 3, kCenter, {0.1, 0.2})),
                    InvalidArgument);
}

TEST_CASE("kappa-tilde zero limit", "[frequency]") {
    CHECK(frequency_kappa_bar(3, 0.0, 0.7) == 0.0);
    CHECK(frequency_r_kappa(3, 0.0, 0.7) == 0.7);
    CHECK(frequency_r_kappa(3, 8.0, 0.7) == 0.5);
}

TEST_CASE("K <= r H on random exponential fields", "[frequency][property]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    QuadratureSpec coarse;
    coarse.radial = 12;
    coarse.polar = 16;
    coarse.azimuth = 32;
    for (int trial = 0; trial < 30; ++trial) {
        const Vec a{2 * U(rng), 2 * U(rng), 2 * U(rng)};
        const Vec x0 = kCenter + 0.1 * Vec{U(rng), U(rng), U(rng)};
        const auto m = ScalarField::analytic([a](const Vec& x) { return std::exp(dot(a, x)) + 0.3 * std::sin(x[2]); });
        FrequencyOptions o;
        o.spec = coarse;
        o.rho = 0.3;
        o.kappa = 0.0;
        const auto p = frequency_profile(m, kZero, 3, x0, geometric_grid(0.02, 0.3, 1.2), o);
        CHECK(find(frequency_bound(p), "freq.K").pass);
    }
}

TEST_CASE("vanishing slopes from the frequency route", "[frequency]") {
    FrequencyVanishingOptions o;
    o.frequency.rho = 0.4;
    for (int k = 0; k <= 2; ++k) {
        const auto v = vanishing_order_frequency(harmonic_field(k, kCenter), kZero, 3, kCenter, o);
        INFO("degree " << k << " slope " << v.slope);
        CHECK(v.slope == Approx(k + 1.5).margin(1e-6));
        CHECK_FALSE(v.underflow);
        for (const auto& r : v.reports) CHECK(r.pass);
        CHECK(v.M_bar == Approx(std::max(k, 1) + 3.0).margin(1e-9));
    }
    o.log_frak_M = std::log(1e-3);
    const auto v = vanishing_order_frequency(harmonic_field(1, kCenter), kZero, 3, kCenter, o);
    CHECK(find(v.reports, "freq.vanishing.envelope").pass);
    CHECK(fit_slope({0, 1, 2}, {1, 3, 5}) == Approx(2.0));
}
