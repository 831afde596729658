#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qucl/ensemble.hpp"
#include "qucl/fit.hpp"
#include "qucl/geometry.hpp"
#include "qucl/potentials.hpp"
#include "qucl/report.hpp"

namespace qucl {

enum class Mode { Explicit, Fit };
const char* mode_name(Mode m);
/// "explicit" or "fit"; anything else throws InvalidArgument.
Mode parse_mode(const std::string& text);

struct VerifierSettings {
    UniversalConstants universal;
    double sigma = talenti_constant(3);
    QuadratureSpec spec;
    int workers = 0;
};

/// Fit-mode report for lhs_i <= C rhs_i over members: the smallest C, the binding member's sides
/// scaled by it, and the ensemble size. Fails only when some member has lhs > 0 = rhs.
InequalityReport fit_report(const std::string& id, const std::vector<double>& log_lhs,
                            const std::vector<double>& log_rhs);

// ---------------------------------------------------------------------------------------------
// Gradient bounds on nested balls.

enum class CaccioppoliForm {
    Critical,  // explicit kappa^0, kappa^1 for ||V||_{n/2} small
    Lebesgue,  // (kappa_V^{s/(2s-n)} + d^{-1}) with the configured fraktur c
    Bounded,   // (d^{-1} + kappa_V) with the configured k
};

struct CaccioppoliTerms {
    double gradient = 0;   // ||grad u||_{L^2(omega0)}
    double source = 0;     // ||(-Delta + V) u||_{L^p(Omega)}
    double function = 0;   // ||u||_{L^2(omega1)}
    double d = 0;
    double kappa = 0;      // the potential norm the form uses
};

CaccioppoliTerms caccioppoli_terms(const ScalarField& u, const Potential& V, const Ball& omega0, const Ball& omega1,
                                   CaccioppoliForm form, const VerifierSettings& settings = {});

/// Explicit mode checks the form with its constants; the critical form throws ClassViolation
/// unless 2 sigma^2 ||V||_{n/2} < 1. Throws GeometryInfeasible when d <= 2h on a grid field.
InequalityReport caccioppoli(const ScalarField& u, const Potential& V, const Ball& omega0, const Ball& omega1,
                             CaccioppoliForm form, const VerifierSettings& settings = {});

/// Smallest constant C with ||grad u|| <= C (right-hand side without its constant) over the ensemble.
InequalityReport caccioppoli_fit(const Ensemble& e, const Ball& omega0, const Ball& omega1, CaccioppoliForm form,
                                 double s = kInf, const VerifierSettings& settings = {});

// ---------------------------------------------------------------------------------------------
// Three-ball inequalities.

struct ThreeBallNorms {
    double inner = 0, middle = 0, outer = 0;  // ||u|| on B(x0, r), B(x0, 2r), B(x0, 3r)
};
ThreeBallNorms three_ball_norms(const ScalarField& u, const Vec& x0, double r, const VerifierSettings& settings = {});

enum class ThreeBallRegime {
    Critical,    // s = n/2: q_V r^{-1} with the explicit alpha
    Configured,  // s in (n/2, infinity]: configured c, c1 and alpha
};

/// Explicit three-ball report. Requires x0 in the 4r-erosion and r < 1/4 for the critical regime
/// (3r-erosion otherwise) and class membership; u = 0 on B(x0, 3r) passes trivially.
InequalityReport three_ball(const ScalarField& u, const Potential& V, const Vec& x0, double r,
                            ThreeBallRegime regime, const VerifierSettings& settings = {});

/// (3r)^{2-n/s} ||V||_{L^s(B(x0, 3r))}.
double rescaled_kappa(const Potential& V, const Vec& x0, double r, const QuadratureSpec& spec = {});
/// ||W||_{L^s(B(0, 1))} for W(y) = (3r)^2 V(x0 + 3r y), computed on the unit ball.
double rescaled_kappa_direct(const Potential& V, const Vec& x0, double r, const QuadratureSpec& spec = {});

struct ThreeBallEnsembleFit {
    ThreeBallFit fit;
    std::vector<double> x, y;  // per member: ln(inner/outer), ln(middle/outer)
    std::vector<int> ids;
    InequalityReport report;
};

/// Joint (C, alpha) fit over an ensemble at one centre and radius; members vanishing on B(x0, 3r) are skipped.
ThreeBallEnsembleFit three_ball_fit(const Ensemble& e, const Vec& x0, double r, const VerifierSettings& settings = {});

// ---------------------------------------------------------------------------------------------
// Discrete Carleman quotients for radial test functions times spherical harmonics.

enum class CarlemanNorm {
    Lebesgue,  // ||e^{tau phi} Delta u||_{L^p}, p = 2n/(n+2), against ||e^{tau phi} u||_{L^2}
    Square,    // ||e^{tau phi} Delta u||_{L^2} against ||e^{tau phi} u||_{L^2}
    Singular,  // |||x|^{-lambda} Delta u||_{L^p} against |||x|^{-lambda} u||_{L^{p'}}
};

enum class CarlemanWeight {
    Quadratic,    // R^2 - |x|^2
    Exponential,  // e^{lambda (c - |x|)}
    Inverse,      // 1/|x| - 1
    Logarithmic,  // -ln |x|; tau plays the role of lambda
};

struct CarlemanSpec {
    int n = 3;
    CarlemanNorm norm = CarlemanNorm::Lebesgue;
    CarlemanWeight weight = CarlemanWeight::Inverse;
    double R = 1.0;            // quadratic weight
    double lambda = 1.0;       // exponential weight
    double c = 2.0;            // exponential weight
    double inner = 0.5, outer = 1.0;  // support annulus
    int points = 1500;         // radial intervals
    double h = 0;              // radial spacing; overrides points when positive
    int irls_iterations = 30;
    int max_ell = 400;
    int ell_patience = 4;      // degrees examined past the best one
    double max_dynamic_range = 1e12;
};

struct CarlemanPoint {
    double tau = 0;
    double quotient = 0;
    int ell = 0;
};

struct CarlemanScaling {
    std::vector<CarlemanPoint> points;
    double slope = 0;
    double predicted = 0;
    double tolerance = 0;
    double tau_max = 0;  // admissible range is [0, tau_max]
    InequalityReport report;
    Table table() const;
};

double carleman_weight(const CarlemanSpec& spec, double r);
/// Largest tau with weight dynamic range e^{tau osc(phi)} <= max_dynamic_range.
double carleman_tau_max(const CarlemanSpec& spec);
/// Smallest discrete quotient for one tau and degree ell. Throws InvalidArgument outside the admissible range.
double carleman_quotient(const CarlemanSpec& spec, double tau, int ell);
/// Minimum over ell with the minimising degree.
CarlemanPoint carleman_extremal(const CarlemanSpec& spec, double tau);
/// Extremal quotients over the tau grid and the log-log slope against the predicted power.
CarlemanScaling carleman_estimate(const CarlemanSpec& spec, const std::vector<double>& taus, double predicted,
                                  double tolerance, int workers = 0);
/// Predicted tau powers: 3/4 + 1/(2n) for the Lebesgue norm and 3/2 for the square norm.
double carleman_predicted_power(int n, CarlemanNorm norm);

// ---------------------------------------------------------------------------------------------
// Propagation of smallness along ball chains.

struct PropagationResult {
    std::vector<InequalityReport> reports;
    Table link_table;     // per link: norms and the applied bound
    double alpha = 0;
    double log_C = 0;     // per-link constant
    double exponent = 0;  // alpha^links by repeated multiplication
    int links = 0;
};

/// Runs the chain recursion on the normalised u. Explicit mode uses q_V r^{-1} per link and needs V in the class;
/// fit mode fits the per-link constant at the configured alpha.
PropagationResult propagate_smallness(const ScalarField& u, const DomainPtr& domain, const ChainPlan& chain, double r,
                                      Mode mode, const Potential* V = nullptr, const VerifierSettings& settings = {});

/// alpha^{p_r + 1} >= eta(r) and p_r + 1 <= m_r for the path chain from x to y.
std::vector<InequalityReport> chain_accounting(const Domain& domain, const Vec& x, const Vec& y, double r,
                                               double alpha, double frak_r);
/// k_+ <= k_x <= h(r) for a cone chain.
InequalityReport cone_accounting(const ConeInput& input);

// ---------------------------------------------------------------------------------------------
// Global bounds from an interior region.

enum class GlobalGeometry { InteriorChain, Cone };

struct GlobalUcOptions {
    GlobalGeometry geometry = GlobalGeometry::InteriorChain;
    Mode mode = Mode::Fit;
    double frak_r = 0;      // 0 computes the connectivity radius
    double rho_bar = 0.3;   // cone reach for the cone geometry
    bool check_cover = true;
};

struct GlobalUcResult {
    std::vector<InequalityReport> reports;
    Table tradeoff;  // r, log amplification term, log collar term, cover count, Hardy ratio
    double r_star = 0;
    double c_star = 0;
};

struct ConeUcConstants {
    double mu = 0, varpi = 0, upsilon = 0, varsigma = 0, varsigma_tilde = 0;
    double log_frak_s = 0, frak_a = 0, frak_b = 0, k_plus = 0;
};
ConeUcConstants cone_uc_constants(int n, double alpha, double sin_theta, double rho_bar, double frak_t,
                                  double cube_extent, double frak_r);

/// ||u||_Omega against the interior norm on omega plus the collar term, for each r of the sweep.
GlobalUcResult global_uc(const ScalarField& u, const Potential& V, const Ball& omega, const std::vector<double>& radii,
                         const GlobalUcOptions& options = {}, const VerifierSettings& settings = {});

// ---------------------------------------------------------------------------------------------
// Doubling and vanishing order.

struct DoublingResult {
    std::vector<InequalityReport> reports;
    Table margins;  // rho, lhs, rhs, margin
    DoublingConstants constants;
    double norm_ratio = 0;
};

/// ||u||_{B(x0, 2 rho)} <= rho^{-lambda_bar} M ||u||_{B(x0, rho)} for each rho in (0, r/8).
/// The critical regime (V.s() = n/2) needs the class with 2 sigma^2 kappa < 1 and vartheta kappa < 1;
/// otherwise vartheta ||V||_{n/2} < 1. With `frequency_check`, also runs the frequency route.
DoublingResult doubling(const ScalarField& u, const Potential& V, const Vec& x0, double r,
                        const std::vector<double>& rhos, const VerifierSettings& settings = {},
                        bool frequency_check = true);

struct VanishingOptions {
    double r_min = 1e-3;        // slope fitted on [r_min, 10 r_min]
    double r_bar = 0;           // doubling radius; 0 takes 0.99 dist(x0)/4
    std::optional<Ball> omega0; // defaults to B(x0, dist(x0)/2)
    double frak_r = 0;          // 0 computes the connectivity radius
    double c_tilde = 0.5;
    int envelope_points = 40;
    bool frequency_route = true;
};

struct VanishingResult {
    double slope = 0;
    double predicted = 0;  // set by callers that know the order
    VanishingConstants constants;
    std::vector<double> r, log_norm;  // normalised, on the fit decade
    std::vector<InequalityReport> reports;
    Table envelope;  // r, log norm, log envelope
};

VanishingResult vanishing_order(const ScalarField& u, const Potential& V, const Vec& x0,
                                const VanishingOptions& options = {}, const VerifierSettings& settings = {});

/// ln of the growth lower bound -tau(r) |ln(c_tilde phi^{-1} ||u||_{Omega_0})| rho0^varsigma.
double log_growth_bound(int n, double cube_extent, double frak_r, double alpha, double r, double rho0,
                        double c_tilde, double log_phi, double norm_omega0);

// ---------------------------------------------------------------------------------------------
// Interior bounds from Cauchy data on a face patch.

/// Square patch {x_axis = face_value} x [centre +- half_width]^2 on a box face.
struct FacePatch {
    int axis = 0;
    double face_value = 0;
    int inward = 1;  // +1 when the domain lies on the side of increasing coordinate
    Vec centre{};
    double half_width = 0.1;
    double area(int n) const;
};

struct CauchyGeometry {
    Vec x0{};
    double rho = 0, r = 0;
    Ball omega_bar;
};

/// rho = w/2, x0 = centre - rho nu outside, r = 0.99 (sqrt(w^2 + rho^2) - rho) so that B(x0, rho + r)
/// meets the boundary inside the patch, and the default omega-bar of radius 0.9 r/8 at centre + (r/8) nu.
CauchyGeometry cauchy_geometry(const Domain& domain, const FacePatch& patch);

struct CauchyTerms {
    double interior = 0;  // ||u||_{L^2(omega_bar)}
    double h1 = 0;        // ||u||_{H^1(Omega)}
    double data = 0;      // ||u||_{L^2(S)} + ||grad u||_{L^2(S)}
};
CauchyTerms cauchy_terms(const ScalarField& u, const DomainPtr& domain, const FacePatch& patch, const Ball& omega_bar,
                         const VerifierSettings& settings = {});

/// min over 0 < eps <= 1 of eps A + eps^{-c} B, in logs.
double cauchy_optimal_log(double A, double B, double c);

struct CauchyOptions {
    double lambda = 1.0;  // Carleman exponent entering a and b
    std::optional<Ball> omega_bar;
    Mode mode = Mode::Fit;
};

struct CauchyResult {
    std::vector<InequalityReport> reports;
    CauchyGeometry geometry;
    CauchyConstants constants;
    double c = 0;
    double log_K = -kInf;  // fitted hat-c Upsilon
    Table sweep;           // eps, interior term, data term
};

CauchyResult cauchy_uc(const Ensemble& e, const Potential& V, const FacePatch& patch, const CauchyOptions& options = {},
                       const VerifierSettings& settings = {});

// ---------------------------------------------------------------------------------------------
// Coverings and broken lines.

struct CoverCheck {
    std::vector<double> eps;
    std::vector<std::size_t> counts;
    double c_hat = 0;        // fitted at eps.front()
    double c_hat_proof = 0;  // 2^n (d + eps0)^n / |B_1|
    std::vector<InequalityReport> reports;
};

/// Fits c-hat = l(eps_0) eps_0^n at the first radius and checks l(eps) <= c-hat eps^{-n} at the others.
CoverCheck cover_check(const RegionMask& mask, const std::vector<double>& eps);

/// Length of the cube path between x and y against (number of cubes) r with r = edge sqrt(n).
InequalityReport broken_line_check(const CubeComplex& cubes, const Vec& x, const Vec& y);

}  // namespace qucl
