#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "qucl/geometry.hpp"
#include "qucl/quadrature.hpp"

namespace qucl {

/// A real function on R^n with gradient access, either closed-form or sampled on
/// the node grid of a domain and interpolated multilinearly.
class ScalarField {
public:
    using Fn = std::function<double(const Vec&)>;
    using GradFn = std::function<Vec(const Vec&)>;
    enum class Source { Analytic, Grid };

    ScalarField();

    /// Without `grad`, gradients use central differences of `f`.
    static ScalarField analytic(Fn f, GradFn grad = {}, Fn laplacian = {});
    static ScalarField constant(double c);
    /// Node values of `domain`, in storage order; nodes outside the closure are ignored.
    static ScalarField grid(DomainPtr domain, std::vector<double> values);

    double operator()(const Vec& x) const;
    Vec gradient(const Vec& x) const;
    bool has_laplacian() const;
    double laplacian(const Vec& x) const;

    Source source() const;
    bool is_grid() const { return source() == Source::Grid; }
    /// Sampling domain for grid fields; optional support check for analytic ones.
    const DomainPtr& domain() const;
    ScalarField with_domain(DomainPtr domain) const;
    /// Node values (grid fields only).
    const std::vector<double>& values() const;

    ScalarField scaled(double c) const;
    /// Samples this field at the nodes of `domain`.
    ScalarField sampled(const DomainPtr& domain) const;

private:
    struct Impl;
    explicit ScalarField(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

class VectorField {
public:
    using Fn = std::function<Vec(const Vec&)>;

    VectorField() = default;
    explicit VectorField(Fn f) : f_(std::move(f)) {}
    static VectorField constant(const Vec& w);

    Vec operator()(const Vec& x) const { return f_(x); }
    explicit operator bool() const { return static_cast<bool>(f_); }

private:
    Fn f_;
};

struct Ball {
    int n = 3;
    Vec center{};
    double radius = 0.0;
};

/// The open shell {inner < |x - center| < outer}.
struct Shell {
    int n = 3;
    Vec center{};
    double inner = 0.0;
    double outer = 0.0;
};

/// Weighted L^p norm over a rule; p = infinity gives the maximum over its points.
double lp_norm(const ScalarField& f, const Rule& rule, double p, int workers = 0);
double lp_norm(const ScalarField& f, const RegionMask& mask, double p, int workers = 0);
double lp_norm(const ScalarField& f, const Ball& ball, double p, const QuadratureSpec& spec = {}, int workers = 0);
double lp_norm(const ScalarField& f, const Shell& shell, double p, const QuadratureSpec& spec = {}, int workers = 0);
/// Norm over the whole domain: grid-cell Gauss rule for grid fields, box Gauss rule otherwise.
double lp_norm(const ScalarField& f, const DomainPtr& domain, double p, const QuadratureSpec& spec = {}, int workers = 0);

/// Volume rule used for whole-domain integrals of `f`.
RulePtr volume_rule_for(const ScalarField& f, const DomainPtr& domain, const QuadratureSpec& spec = {});

double h1_norm(const ScalarField& f, const DomainPtr& domain, const QuadratureSpec& spec = {}, int workers = 0);
double gradient_l2_norm(const ScalarField& f, const RegionMask& mask, int workers = 0);
double gradient_l2_norm(const ScalarField& f, const Ball& ball, const QuadratureSpec& spec = {}, int workers = 0);

/// Integral of f^2 over the sphere |x - x0| = r.
double sphere_square_integral(const ScalarField& f, int n, const Vec& x0, double r, const QuadratureSpec& spec = {});

/// Integral of |grad f|^2 + V f^2 over B(x0, r).
double schrodinger_energy(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                          const QuadratureSpec& spec = {});

struct FluxIntegrals {
    double normal_square = 0.0;     // integral of (d_nu f)^2 on the sphere
    double potential_square = 0.0;  // integral of V f^2 on the sphere
};

FluxIntegrals boundary_flux_integrals(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                                      const QuadratureSpec& spec = {});

/// -int_{B_r} V {2 f (x - x0).grad f + (n - 2) r^{-1} f^2}.
double dhat_integral(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                     const QuadratureSpec& spec = {});

/// -r^{-1} int_{B_r} V {2 f (x - x0).grad f + (n - 2) f^2}; the potential term in d/dr of the energy.
double dhat_identity_integral(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                              const QuadratureSpec& spec = {});

/// Throws OutOfDomain unless B(x0, r) lies in the field's domain (when it has one).
void require_ball_inside(const ScalarField& f, const Vec& x0, double r);

/// Raw little-endian float64 node values at `path` plus a JSON header at `path + ".json"`.
void save_grid_field(const ScalarField& f, const std::string& path);
ScalarField load_grid_field(const std::string& path);

}  // namespace qucl
