#pragma once

#include <optional>
#include <vector>

#include "qucl/potentials.hpp"

namespace qucl {

/// Matrix-free finite-difference operator -Delta_h + W.grad_h + V on the interior
/// nodes of a domain, with homogeneous Dirichlet data on the boundary nodes.
class GridOperator {
public:
    GridOperator(DomainPtr domain, const ScalarField& V, const VectorField& W = {});

    const DomainPtr& domain() const { return domain_; }
    std::size_t size() const { return nodes_.size(); }
    /// Node index of every unknown, in storage order.
    const std::vector<std::size_t>& nodes() const { return nodes_; }
    /// Unknown index of a node, or -1.
    long unknown(std::size_t node) const { return unknown_[node]; }
    const std::vector<double>& diagonal() const { return diag_; }
    bool symmetric() const { return !has_drift_; }
    bool has_drift() const { return has_drift_; }

    void apply(const std::vector<double>& x, std::vector<double>& y) const;
    /// Right-hand side contribution of Dirichlet node values (storage-order node vector).
    std::vector<double> boundary_contribution(const std::vector<double>& node_values) const;
    /// Stencil residual (-Delta_h + W.grad_h + V) u - f at every unknown, from full node values.
    std::vector<double> residual_nodes(const std::vector<double>& node_values, const std::vector<double>& f) const;

private:
    DomainPtr domain_;
    bool has_drift_ = false;
    std::vector<std::size_t> nodes_;
    std::vector<long> unknown_;
    std::vector<double> diag_;
    // Per unknown and direction (-x, +x, -y, +y, -z, +z): coupling coefficient and neighbour node.
    std::vector<std::array<double, 6>> coef_;
    std::vector<std::array<std::size_t, 6>> nbr_;
};

struct DiscreteProblem {
    DomainPtr domain;
    ScalarField V = ScalarField::constant(0.0);
    VectorField W;
    ScalarField rhs = ScalarField::constant(0.0);
    ScalarField boundary = ScalarField::constant(0.0);
};

struct SolverOptions {
    double tol = 1e-10;
    long max_iterations = 0;  // 0 selects 20 N^{1/3} 1000
};

struct Solution {
    ScalarField u;
    double residual_norm = 0;
    long iterations = 0;
    bool bicgstab = false;
};

/// Preconditioned conjugate gradients without drift, BiCGStab with drift; Jacobi preconditioning.
/// Throws NotConverged at the iteration cap and InvalidArgument when the grid Peclet number |W| h / 2 >= 1.
Solution solve_dirichlet(const DiscreteProblem& problem, const SolverOptions& options = {});

/// Largest |(-Delta_h + W.grad_h + V) u| over the interior nodes of the domain (u sampled at the nodes).
double residual(const ScalarField& u, const DomainPtr& domain, const ScalarField& V, const VectorField& W = {},
                const ScalarField& f = ScalarField::constant(0.0));

/// Largest |-Delta u + V u| over the closure nodes using the analytic Laplacian of u.
double analytic_residual(const ScalarField& u, const ScalarField& V, const DomainPtr& domain);

struct Eigenpair {
    double lambda = 0;
    ScalarField field;
    double residual = 0;  // ||A v - lambda v|| / (|lambda| ||v||)
    long iterations = 0;
};

/// Smallest Dirichlet eigenvalue of -Delta_h + V by shifted inverse iteration; eigenfield is nonnegative.
Eigenpair eigen_smallest(const DomainPtr& domain, const ScalarField& V, double tol = 1e-8);

struct SobolevEstimate {
    double sigma = 0;
    ScalarField maximizer;
    int starts = 0;
    long steps = 0;
    bool stagnated = false;
    std::vector<double> per_start;
};

struct SobolevOptions {
    int starts = 5;
    int max_steps = 400;
    double rel_tol = 1e-9;
    unsigned seed = 1;
    bool bump_start = true;  // the first start is the smooth bump
};

/// Discrete sup ||w||_{6} / ||grad_h w||_2 over zero-boundary grid fields (n = 3), node-sum norms.
SobolevEstimate sobolev_constant(const DomainPtr& domain, const SobolevOptions& options = {});

/// Two-grid Richardson value sigma_h2 + (sigma_h2 - sigma_h) / 3.
double richardson(double coarse, double fine);

/// Pairwise-reduced dot product.
double dot(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace qucl
