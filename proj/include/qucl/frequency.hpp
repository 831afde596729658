#pragma once

#include <vector>

#include "qucl/fields.hpp"
#include "qucl/report.hpp"

namespace qucl {

/// r0 ratio^k for k = 0, 1, ... up to r1.
std::vector<double> geometric_grid(double r0, double r1, double ratio = 1.05);

struct FrequencyOptions {
    double rho = 0;     // radius of the ball B(x0, rho) carrying the solution; 0 selects the largest grid radius
    double kappa = -1;  // bound on sup |V| over B(x0, rho); negative selects the quadrature maximum
    QuadratureSpec spec;
    int workers = 0;
};

/// Frequency data of u around x0: one row per radius.
struct FrequencyProfile {
    int n = 3;
    Vec x0{};
    ScalarField u, V;
    QuadratureSpec spec;

    std::vector<double> r;
    std::vector<double> H;      // int_{S_r} u^2
    std::vector<double> D;      // int_{B_r} |grad u|^2 + V u^2
    std::vector<double> N;      // r D / H
    std::vector<double> K;      // int_{B_r} u^2
    std::vector<double> Hbar;   // int_{S_r} (d_nu u)^2
    std::vector<double> Hhat;   // int_{S_r} V u^2
    std::vector<double> Dhat;   // potential term as defined, r^{-1} on the u^2 part only
    std::vector<double> Dhat_identity;  // potential term that enters D'
    std::vector<double> dH, dD;  // fourth-order central differences; NaN within two points of either end

    double rho = 0, kappa = 0, r_kappa = 0, kappa_bar = 0, kappa_tilde = 0;
    double N_r_kappa = 0, M = 0, M_bar = 0;
    bool V_zero = false;
    bool truncated = false;  // H vanished; rows from that radius on were dropped
    std::vector<double> nonpositive_D;  // radii with D <= 0

    std::size_t size() const { return r.size(); }
    Table table() const;
};

/// r_kappa = min(rho, sqrt((n - 1)/kappa)), rho when kappa = 0.
double frequency_r_kappa(int n, double kappa, double rho);
/// kappa + rho kappa (rho^2 (1 + kappa) + n - 1).
double frequency_kappa_bar(int n, double kappa, double rho);

/// Samples the frequency columns on `r_grid` (increasing, geometric or uniform).
/// Throws OutOfDomain when B(x0, max(r_grid, rho)) leaves the field's domain.
FrequencyProfile frequency_profile(const ScalarField& u, const ScalarField& V, int n, const Vec& x0,
                                   std::vector<double> r_grid, const FrequencyOptions& options = {});

/// Largest relative defects of H' = (n-1)H/r + 2D and D' = (n-2)D/r + Dhat + 2 Hbar + Hhat,
/// each reported against `tolerance`.
std::vector<InequalityReport> check_identities(const FrequencyProfile& p, double tolerance = 0.01);

/// Relative identity defects at every radius where both differences exist (columns r, defect_H, defect_D).
Table identity_defects(const FrequencyProfile& p);

/// N(r) <= e^{kappa_tilde} max(N(r_kappa), 1) for grid radii below r_kappa, K(r) <= r H(r) for r <= r_kappa,
/// and Hbar H >= D^2 when V vanishes on the ball.
std::vector<InequalityReport> frequency_bound(const FrequencyProfile& p);

/// ||u||_{B_2r} <= 2^{M_bar} ||u||_{B_r} for every grid radius r < r_kappa / 2.
InequalityReport doubling_from_frequency(const FrequencyProfile& p);

struct FrequencyVanishingOptions {
    FrequencyOptions frequency;
    double r_min = 1e-3;          // the slope is fitted on [r_min, 10 r_min]
    double r_star = kInf;          // growth-bound radius; r_bar < min(r_kappa/2, r_star)/2
    double log_frak_M = -kInf;     // ln of the growth lower bound at r_bar, when known
    double norm_omega = 0;         // ||u||_{L^2(Omega)}; 0 computes it from u's domain, or takes 1 without one
    double underflow_floor = 1e-150;
};

struct FrequencyVanishing {
    double slope = 0;
    double M_bar = 0;
    double r_bar = 0;
    bool underflow = false;
    std::vector<double> r, log_norm;  // normalised ln ||u||_{B_r} on the fitted decade
    std::vector<InequalityReport> reports;  // slope <= M_bar, and the r^{M_bar} lower envelope on (0, r_bar)
};

/// Log-slope of r -> ||u||_{L^2(B(x0, r))} over the smallest decade, with the explicit frequency bound.
FrequencyVanishing vanishing_order_frequency(const ScalarField& u, const ScalarField& V, int n, const Vec& x0,
                                             const FrequencyVanishingOptions& options = {});

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace qucl
