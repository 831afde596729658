#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "qucl/verifiers.hpp"

using namespace qucl;
using Catch::Approx;

namespace {

using Dense = std::vector<std::vector<double>>;

// Cyclic Jacobi rotations; returns the smallest eigenvalue of a symmetric matrix.
double jacobi_min_eigenvalue(Dense a) {
    const std::size_t m = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < m; ++p)
            for (std::size_t q = p + 1; q < m; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (std::size_t k = 0; k < m; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < m; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
    }
    double lo = a[0][0];
    for (std::size_t i = 1; i < m; ++i) lo = std::min(lo, a[i][i]);
    return lo;
}

// Unweighted smallest quotient ||Delta (f(r) Y_l)|| / ||f Y_l|| over the radial grid, built densely.
double dense_anchor(double a, double b, int N, int ell) {
    const int n = 3;
    const double h = (b - a) / N;
    Dense A(N + 1, std::vector<double>(N - 1, 0.0));
    for (int i = 0; i <= N; ++i) {
        const double r = a + h * i;
        auto put = [&](int j, double v) {
            if (j >= 1 && j <= N - 1) A[i][j - 1] += v;
        };
        put(i - 1, 1.0 / (h * h) - (n - 1) / r / (2 * h));
        put(i, -2.0 / (h * h) - ell * (ell + 1.0) / (r * r));
        put(i + 1, 1.0 / (h * h) + (n - 1) / r / (2 * h));
    }
    Dense K(N - 1, std::vector<double>(N - 1, 0.0));
    for (int p = 0; p < N - 1; ++p)
        for (int q = 0; q < N - 1; ++q) {
            double s = 0;
            for (int i = 0; i <= N; ++i) {
                const double r = a + h * i;
                s += r * r * h * A[i][p] * A[i][q];
            }
            const double rp = a + h * (p + 1), rq = a + h * (q + 1);
            K[p][q] = s / std::sqrt(rp * rp * h * rq * rq * h);
        }
    return std::sqrt(jacobi_min_eigenvalue(K));
}

CarlemanSpec square_spec(CarlemanWeight w) {
    CarlemanSpec s;
    s.norm = CarlemanNorm::Square;
    s.weight = w;
    s.inner = 0.5;
    s.outer = 1.0;
    return s;
}

}  // namespace

TEST_CASE("tau = 0 matches a dense unweighted oracle", "[carleman]") {
    for (int ell : {0, 1, 3}) {
        auto s = square_spec(CarlemanWeight::Exponential);
        s.points = 16;
        const double q = carleman_quotient(s, 0.0, ell);
        INFO("degree " << ell);
        CHECK(q == Approx(dense_anchor(0.5, 1.0, 16, ell)).epsilon(1e-9));
    }
}

TEST_CASE("tau = 0 quotient does not depend on the weight", "[carleman]") {
    for (auto norm : {CarlemanNorm::Square, CarlemanNorm::Lebesgue}) {
        std::vector<double> q;
        for (auto w : {CarlemanWeight::Quadratic, CarlemanWeight::Exponential, CarlemanWeight::Inverse,
                       CarlemanWeight::Logarithmic}) {
            auto s = square_spec(w);
            s.norm = norm;
            s.points = 200;
            q.push_back(carleman_quotient(s, 0.0, 2));
        }
        for (double v : q) CHECK(v == Approx(q.front()).epsilon(1e-12));
    }
}

TEST_CASE("shrinking the support annulus cannot lower the quotient", "[carleman][property]") {
    // Test functions on the smaller annulus extend by zero to the larger one on a shared grid,
    // so the smaller minimum is the larger one restricted to a subspace.
    for (double tau : {0.0, 2.0, 8.0}) {
        for (int ell : {0, 2, 5}) {
            auto big = square_spec(CarlemanWeight::Inverse);
            big.h = 1.0 / 400;
            auto small = big;
            small.inner = 0.6;
            small.outer = 0.9;
            const double qb = carleman_quotient(big, tau, ell);
            const double qs = carleman_quotient(small, tau, ell);
            INFO("tau " << tau << " degree " << ell << " full " << qb << " sub " << qs);
            CHECK(qs >= qb * (1 - 1e-9));
        }
    }
}

TEST_CASE("tau beyond the admissible range is refused", "[carleman]") {
    auto s = square_spec(CarlemanWeight::Inverse);
    const double tmax = carleman_tau_max(s);
    CHECK(tmax == Approx(std::log(1e12) / 1.0));
    CHECK_THROWS_AS(carleman_quotient(s, 1.01 * tmax, 0), InvalidArgument);
    CHECK_THROWS_AS(carleman_estimate(s, {1.0, 2.0 * tmax}, 1.5, 0.2), InvalidArgument);
    CHECK_NOTHROW(carleman_quotient(s, tmax, 0));
}

TEST_CASE("weights and predicted powers", "[carleman]") {
    CarlemanSpec s;
    s.weight = CarlemanWeight::Quadratic;
    CHECK(carleman_weight(s, 0.5) == Approx(0.75));
    s.weight = CarlemanWeight::Inverse;
    CHECK(carleman_weight(s, 0.5) == Approx(1.0));
    s.weight = CarlemanWeight::Logarithmic;
    CHECK(carleman_weight(s, 1.0) == 0.0);
    CHECK(carleman_predicted_power(3, CarlemanNorm::Lebesgue) == Approx(11.0 / 12.0));
    CHECK(carleman_predicted_power(3, CarlemanNorm::Square) == 1.5);
}

TEST_CASE("quotient grows with tau and the extremal degree is reported", "[carleman]") {
    auto s = square_spec(CarlemanWeight::Inverse);
    s.points = 400;
    const auto lo = carleman_extremal(s, 2.0);
    const auto hi = carleman_extremal(s, 20.0);
    CHECK(hi.quotient > lo.quotient);
    CHECK(hi.ell >= lo.ell);
    CHECK(carleman_quotient(s, 20.0, hi.ell) == Approx(hi.quotient).epsilon(1e-12));
}

TEST_CASE("scaling report is independent of the worker count", "[carleman]") {
    auto s = square_spec(CarlemanWeight::Inverse);
    s.points = 300;
    const std::vector<double> taus{2.0, 4.0, 8.0};
    const auto a = carleman_estimate(s, taus, 1.5, 0.2, 1);
    const auto b = carleman_estimate(s, taus, 1.5, 0.2, 3);
    REQUIRE(a.points.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) CHECK(a.points[i].quotient == b.points[i].quotient);
    CHECK(a.slope == b.slope);
    CHECK(a.table().rows.size() == 3);
}
