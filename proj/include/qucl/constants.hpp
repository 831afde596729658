#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qucl/core.hpp"

namespace qucl {

/// Named values with the formula each was computed from, in insertion order.
class ConstantTable {
public:
    struct Entry {
        std::string name;
        double value = 0.0;
        std::string formula;
    };

    void input(const std::string& name, double value);
    void set(const std::string& name, double value, const std::string& formula);
    double get(const std::string& name) const;
    bool has(const std::string& name) const;
    const std::vector<Entry>& inputs() const { return inputs_; }
    const std::vector<Entry>& entries() const { return entries_; }
    std::map<std::string, double> values() const;

    /// `kind name = value ; formula` lines with 17 significant digits.
    std::string serialize() const;
    static ConstantTable parse(const std::string& text);

    bool operator==(const ConstantTable&) const;

private:
    std::vector<Entry> inputs_;
    std::vector<Entry> entries_;
};

/// Generic universal constants that enter as configuration.
struct UniversalConstants {
    double k = 1.0;          // bold k
    double c = 1.0;          // bold c
    double c1 = 1.0;         // bold c_1
    double cbar = 1.0;       // c-bar
    double chat = 1.0;       // c-hat
    double frak_c = 1.0;     // fraktur c in the drift/Lebesgue Caccioppoli forms
    double vartheta = 1.0;   // Carleman constant
    double alpha = 25.0 / 153.0;
    double frak_t = 0.25;
    double sin_theta = 1.0 / 3.0;
    double cauchy_c = 0.0;   // 0 selects b/a from the construction
};

/// Sharp Sobolev constant of R^3 in ||w||_6 <= sigma ||grad w||_2.
double talenti_constant(int n);

/// Three-ball interpolation exponent (ln 18 - ln 16)/(ln 18 - ln 5) of the explicit regime.
double explicit_three_ball_alpha();

struct Exponents {
    int n = 3;
    double s = kInf, m = kInf;
    double p = 0, p_prime = 0;
    double gamma = 0;      // 8ns/((3n+2)(2s-n)); 1 at s = infinity
    double iota = 0;       // s/(2s-n); 1 at s = infinity
    double gamma_s = 0;    // drift-regime potential exponent
    double delta_m = 0;    // 2m/(m-n); 2 at m = infinity
    double ell = 0;        // min(m,2s)/n - 1
    double delta = 0;      // (3n-2)/(4n(ell+1))
    double beta = 0;       // 1/(1/2 - delta)
    double ell_m = 0;      // m beta/n; 2 at m = infinity
    double k_s = 0;        // 2s beta/n; 2/3 at s = infinity
    bool drift_class = false;  // min(m,2s) > 3n/2 - 1
    double drift_margin = 0;
};

Exponents exponents(int n, double s, double m = kInf);

/// Exponent gamma(n, s) alone; valid on (n/2, infinity].
double gamma_exponent(int n, double s);

struct CaccioppoliConstants {
    double I = 1, kappa0 = 0, kappa1 = 0;
};

/// kappa is ||V||_{L^{n/2}}; requires 2 sigma^2 kappa < 1.
CaccioppoliConstants caccioppoli_constants(double sigma, double kappa);

struct SingularConstants {
    double theta_V = 0;
    double q_raw = 0;   // k theta_V (1 + kappa^1) with the given k and theta
    double q_V = 0;     // the same with k and theta clamped to at least 1
    bool clamped = false;
    double frak_q = 0;  // q_V^{1/(1-alpha)}
    double lambda_V = 0;
    double alpha = 0;
};

SingularConstants singular_constants(double vartheta, double sigma, double kappa, double k, double r0 = 1.0);

/// Exponent e^{c1 kappa^gamma}; the s = infinity branch is e^{c1 kappa}. Returned as a logarithm.
double log_phi_s(double c1, double kappa, int n, double s);
/// ln of e^{c1 (kappa_W^{ell_m} + kappa_V^{k_s})}.
double log_phi_ms(double c1, double kappa_V, double kappa_W, int n, double s, double m);
/// ln of e^{c1 (kappa_W^{delta_m} + kappa_V^{gamma_s})}.
double log_phi_drift_three_ball(double c1, double kappa_V, double kappa_W, int n, double s, double m);

/// 1 + kappa_W^{m/(m-n)} + kappa_V^{s/(2s-n)} with the stated infinite-exponent conventions.
double aleph(double kappa_V, double kappa_W, int n, double s, double m);

struct ChainConstants {
    long long m_r = 0;
    double frak_h = 0, frak_h_bar = 0, varsigma = 0;
    double log_eta = 0, log_varrho = 0, log_tau = 0;
    double eta = 0, varrho = 0, tau = 0;  // may under/overflow; logs are authoritative
    double identity_defect = 0;           // tau alpha r^varsigma eta - 1 evaluated in the log domain
};

ChainConstants chain_constants(int n, double cube_extent, double frak_r, double alpha, double r);

/// Fraktur h = 2^{n-1}|ln alpha| ((frak_r/4)^n + (D sqrt n)^n).
double frak_h(int n, double cube_extent, double frak_r, double alpha);

struct DoublingConstants {
    double lambda_tilde = 0, lambda_bar = 0, M = 0;
    double theta_V = 0, kappa_term = 0;
};

/// Critical-exponent doubling constants; kappa = ||V||_{n/2}, requires the class with 2 sigma^2 kappa < 1 and vartheta kappa < 1.
DoublingConstants doubling_constants_critical(int n, double vartheta, double sigma, double k, double kappa, double r,
                                              double norm_ratio);

/// Supercritical doubling constants; kappa_tilde = ||V||_{n/2}, kappa_s = ||V||_{L^s}.
DoublingConstants doubling_constants_s(int n, double s, double vartheta, double k, double kappa_tilde, double kappa_s,
                                       double r, double norm_ratio);

struct VanishingConstants {
    double r_hat = 0, rho0 = 0, d0 = 0, r_star = 0;
    double log_frak_M = 0;   // ln of the growth lower bound at r_hat/2
    double lambda_hat = 0, lambda_dot = 0;
    double log_frak_N = 0;   // ln of the envelope prefactor
};

struct VanishingInputs {
    int n = 3;
    double frak_r = 1, r_bar = 0.1, dist_omega0 = 0.1, dist_x0 = 0.1;
    double alpha = 25.0 / 153.0;
    double cube_extent = 1;
    double log_phi = 0;       // ln phi_s(V)
    double c_tilde = 1;
    double norm_omega0 = 1;   // ||u||_{L^2(Omega_0)} with ||u||_{L^2(Omega)} = 1
    double lambda_bar = 11, M = 1;
};

VanishingConstants vanishing_constants(const VanishingInputs& in);

/// ln of the envelope N r^{lambda_hat} e^{-lambda_dot (ln r)^2}.
double vanishing_envelope_log(const VanishingConstants& c, double r);

/// r_hat = min(r_bar/16, r_star).
double vanishing_r_hat(double r_bar, double r_star);

struct ProfileParams {
    double a = 1;      // knee of Psi
    double hhat = 1;
    double t = 0.25;
    int n = 3;
    double cbar = 1;
};

/// Two-branch stability profile a/x on (0, a] and hhat^{t/n} (ln(cbar ln x))^{-t/n} beyond.
double stability_psi(double x, const ProfileParams& p);
double stability_psi_right(double x, const ProfileParams& p);

struct ConeProfileParams {
    double upsilon = 1;
    double t = 0.25;
    double varsigma = 1;
};

/// e^{u'} / x on (0, e^{u'}] and u'' (ln x)^{-t/varsigma} beyond, u' = upsilon + t/varsigma, u'' = u'^{t/varsigma}.
double stability_F(double x, const ConeProfileParams& p);

struct CauchyConstants {
    double a = 0, b = 0;
    double log_upsilon = 0;
    double log_frak_F = 0;
    double psi_floor = 0;  // ln((2 rho + r)^2 / (rho + r)^2)
};

CauchyConstants cauchy_constants(int n, double rho, double r, double lambda, double kappa_V, double kappa_W, double s,
                                 bool has_drift, double chat, double c1);

/// psi(x) = ln((2 rho + r)^2 / |x - x0|^2).
double cauchy_weight(const Vec& x, const Vec& x0, double rho, double r);

/// Nearest admissible Carleman exponent, dist(lambda, N + (n-2)/2) = 1/2.
double lambda_grid_neighbor(int n, double lambda);
std::vector<double> lambda_grid(int n, int count);

/// Full table for the constants subcommand.
ConstantTable constant_table(int n, double s, double m, double sigma, const UniversalConstants& u, double kappa_V,
                             double kappa_W, double cube_extent, double frak_r, double r);

}  // namespace qucl
