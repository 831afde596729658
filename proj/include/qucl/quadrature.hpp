#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "qucl/geometry.hpp"

namespace qucl {

struct Rule1D {
    std::vector<double> x;
    std::vector<double> w;
};

/// Gauss-Legendre nodes and weights on [-1, 1].
Rule1D gauss_legendre(int order);

/// Gauss-Legendre rule mapped to [a, b].
Rule1D gauss_legendre(int order, double a, double b);

struct QuadratureSpec {
    int radial = 24;
    int polar = 32;
    int azimuth = 64;
    int box_order = 8;
    int box_split = 2;
};

/// A weighted point set split into blocks. Block contents and order are fixed,
/// so block-wise reductions are reproducible for any worker count.
class Rule {
public:
    virtual ~Rule() = default;
    virtual std::size_t blocks() const = 0;
    virtual void block(std::size_t b, std::vector<Vec>& points, std::vector<double>& weights) const = 0;
};

using RulePtr = std::shared_ptr<const Rule>;

/// Surface rule on the sphere |x - c| = r: Gauss-Legendre in cos(polar) times
/// trapezoid in azimuth for n = 3, trapezoid in angle for n = 2.
RulePtr sphere_rule(int n, const Vec& c, double r, const QuadratureSpec& spec = {});

/// Volume rule on {a < |x - c| < b}: Gauss-Legendre in radius times the sphere rule.
RulePtr shell_rule(int n, const Vec& c, double a, double b, const QuadratureSpec& spec = {});

inline RulePtr ball_rule(int n, const Vec& c, double r, const QuadratureSpec& spec = {}) {
    return shell_rule(n, c, 0.0, r, spec);
}

/// Tensor Gauss-Legendre on the covered cells of a box union.
RulePtr domain_rule(const Domain& domain, const QuadratureSpec& spec = {});

/// Two-point Gauss-Legendre on every grid cell inside the domain; exact for
/// products of two multilinear interpolants.
RulePtr grid_cell_rule(const DomainPtr& domain);

/// Midpoint rule at grid-cell centers inside the domain.
RulePtr cell_midpoint_rule(const DomainPtr& domain);

/// Half-spacing sub-point rule of a mask, weighted by its predicate.
RulePtr mask_rule(const RegionMask& mask);

/// Sum of w_i f(x_i), reduced per block and then pairwise over blocks.
double integrate(const Rule& rule, const std::function<double(const Vec&)>& f, int workers = 0);

/// Largest |f| over the rule points with positive weight.
double max_abs(const Rule& rule, const std::function<double(const Vec&)>& f, int workers = 0);

double total_weight(const Rule& rule);

}  // namespace qucl
