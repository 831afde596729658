#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace qucl {

/// Points and vectors live in R^3; two-dimensional problems keep the third coordinate at zero.
using Vec = std::array<double, 3>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = std::numbers::pi;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define QUCL_ERROR_KIND(Name, tag)                                 \
    class Name : public Error {                                    \
    public:                                                        \
        using Error::Error;                                        \
        const char* kind() const noexcept override { return tag; } \
    };

QUCL_ERROR_KIND(InvalidArgument, "invalid-argument")
QUCL_ERROR_KIND(EmptyRegion, "empty-region")
QUCL_ERROR_KIND(GeometryInfeasible, "geometry-infeasible")
QUCL_ERROR_KIND(ClassViolation, "class-violation")
QUCL_ERROR_KIND(OutOfDomain, "out-of-domain")
QUCL_ERROR_KIND(NotConverged, "not-converged")
QUCL_ERROR_KIND(ConfigError, "config-error")
QUCL_ERROR_KIND(ZeroCrossing, "zero-crossing")

#undef QUCL_ERROR_KIND

inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }
inline double distance(const Vec& a, const Vec& b) { return norm(a - b); }

/// Pairwise (cascade) summation; the result depends only on the order of `v`.
double pairwise_sum(std::span<const double> v);

/// Volume of the unit ball in R^n.
double unit_ball_volume(int n);

/// Surface measure of the unit sphere in R^n, n * unit_ball_volume(n).
double unit_sphere_area(int n);

/// Sobolev exponents 2n/(n+2) and 2n/(n-2) (the latter infinite for n = 2).
inline double holder_exponent(int n) { return 2.0 * n / (n + 2.0); }
inline double sobolev_exponent(int n) { return n > 2 ? 2.0 * n / (n - 2.0) : kInf; }

/// ln(exp(a) + exp(b)) without overflow.
double log_add(double a, double b);

void require(bool cond, const std::string& what);

}  // namespace qucl
