#include "qucl/solver.hpp"

#include <algorithm>
#include <random>

namespace qucl {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> p(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) p[i] = a[i] * b[i];
    return pairwise_sum(p);
}

namespace {

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void axpy(double a, const std::vector<double>& x, std::vector<double>& y) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

long default_cap(std::size_t N) {
    return static_cast<long>(20.0 * std::cbrt(static_cast<double>(std::max<std::size_t>(N, 1))) * 1000.0);
}

struct KrylovResult {
    long iterations = 0;
    double residual = 0;
    bool converged = false;
};

KrylovResult pcg(const GridOperator& A, const std::vector<double>& b, std::vector<double>& x, double tol, long cap) {
    const std::size_t N = b.size();
    const double bn = norm2(b);
    KrylovResult out;
    if (bn == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        out.converged = true;
        return out;
    }
    const auto& d = A.diagonal();
    std::vector<double> r(N), z(N), p(N), q(N);
    // Restarts from the true residual until it meets the tolerance.
    for (int restart = 0; restart < 5; ++restart) {
        A.apply(x, q);
        for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - q[i];
        double rn = norm2(r);
        out.residual = rn / bn;
        if (out.residual <= tol) {
            out.converged = true;
            return out;
        }
        for (std::size_t i = 0; i < N; ++i) z[i] = r[i] / d[i];
        p = z;
        double rz = dot(r, z);
        while (rn > 0.5 * tol * bn && out.iterations < cap) {
            A.apply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) return out;  // indefinite or breakdown
            const double a = rz / pq;
            axpy(a, p, x);
            axpy(-a, q, r);
            for (std::size_t i = 0; i < N; ++i) z[i] = r[i] / d[i];
            const double rz2 = dot(r, z);
            const double beta = rz2 / rz;
            rz = rz2;
            for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
            rn = norm2(r);
            ++out.iterations;
        }
        if (out.iterations >= cap) break;
    }
    A.apply(x, q);
    for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - q[i];
    out.residual = norm2(r) / bn;
    out.converged = out.residual <= tol;
    return out;
}

KrylovResult bicgstab(const GridOperator& A, const std::vector<double>& b, std::vector<double>& x, double tol, long cap) {
    const std::size_t N = b.size();
    const double bn = norm2(b);
    KrylovResult out;
    if (bn == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        out.converged = true;
        return out;
    }
    const auto& d = A.diagonal();
    std::vector<double> r(N), rhat(N), p(N, 0.0), v(N, 0.0), s(N), t(N), y(N), z(N);
    A.apply(x, t);
    for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - t[i];
    rhat = r;
    double rho = 1.0, alpha = 1.0, omega = 1.0;
    double rn = norm2(r);
    while (rn > tol * bn && out.iterations < cap) {
        const double rho2 = dot(rhat, r);
        if (rho2 == 0.0) break;
        const double beta = (rho2 / rho) * (alpha / omega);
        rho = rho2;
        for (std::size_t i = 0; i < N; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
        for (std::size_t i = 0; i < N; ++i) y[i] = p[i] / d[i];
        A.apply(y, v);
        alpha = rho / dot(rhat, v);
        for (std::size_t i = 0; i < N; ++i) s[i] = r[i] - alpha * v[i];
        axpy(alpha, y, x);
        ++out.iterations;
        if (norm2(s) <= tol * bn) {
            r = s;
            rn = norm2(r);
            break;
        }
        for (std::size_t i = 0; i < N; ++i) z[i] = s[i] / d[i];
        A.apply(z, t);
        const double tt = dot(t, t);
        omega = tt > 0.0 ? dot(t, s) / tt : 0.0;
        axpy(omega, z, x);
        for (std::size_t i = 0; i < N; ++i) r[i] = s[i] - omega * t[i];
        rn = norm2(r);
        if (omega == 0.0) break;
    }
    A.apply(x, t);
    for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - t[i];
    out.residual = norm2(r) / bn;
    out.converged = out.residual <= tol;
    return out;
}

std::vector<double> node_samples(const ScalarField& f, const Domain& d) {
    std::vector<double> v(d.node_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (d.node_in_closure(i)) v[i] = f(d.node(i));
    return v;
}

}  // namespace

GridOperator::GridOperator(DomainPtr domain, const ScalarField& V, const VectorField& W)
    : domain_(std::move(domain)), has_drift_(static_cast<bool>(W)) {
    const Domain& d = *domain_;
    const int n = d.dim();
    const double h = d.spacing();
    const double ih2 = 1.0 / (h * h);
    unknown_.assign(d.node_count(), -1);
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.node_interior(i)) {
            unknown_[i] = static_cast<long>(nodes_.size());
            nodes_.push_back(i);
        }
    diag_.resize(nodes_.size());
    coef_.assign(nodes_.size(), {});
    nbr_.assign(nodes_.size(), {});
    const std::array<std::size_t, 3> stride{1, static_cast<std::size_t>(d.dims()[0]),
                                            static_cast<std::size_t>(d.dims()[0]) * d.dims()[1]};
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
        const std::size_t idx = nodes_[u];
        const Vec x = d.node(idx);
        const Vec w = has_drift_ ? W(x) : Vec{};
        if (has_drift_ && norm(w) * h / 2.0 >= 1.0)
            throw InvalidArgument("grid Peclet number |W| h / 2 >= 1; refine the grid below h = " +
                                  std::to_string(2.0 / norm(w)));
        diag_[u] = 2.0 * n * ih2 + V(x);
        for (int a = 0; a < n; ++a) {
            for (int side = 0; side < 2; ++side) {
                const std::size_t j = side ? idx + stride[a] : idx - stride[a];
                if (!d.node_in_closure(j)) throw GeometryInfeasible("interior node with a neighbour outside the domain");
                coef_[u][2 * a + side] = -ih2 + (side ? 1.0 : -1.0) * w[a] / (2.0 * h);
                nbr_[u][2 * a + side] = j;
            }
        }
    }
}

void GridOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(nodes_.size());
    const int dirs = 2 * domain_->dim();
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
        double acc = diag_[u] * x[u];
        for (int k = 0; k < dirs; ++k) {
            const long v = unknown_[nbr_[u][k]];
            if (v >= 0) acc += coef_[u][k] * x[static_cast<std::size_t>(v)];
        }
        y[u] = acc;
    }
}

std::vector<double> GridOperator::boundary_contribution(const std::vector<double>& g) const {
    std::vector<double> b(nodes_.size(), 0.0);
    const int dirs = 2 * domain_->dim();
    for (std::size_t u = 0; u < nodes_.size(); ++u)
        for (int k = 0; k < dirs; ++k)
            if (unknown_[nbr_[u][k]] < 0) b[u] -= coef_[u][k] * g[nbr_[u][k]];
    return b;
}

std::vector<double> GridOperator::residual_nodes(const std::vector<double>& values, const std::vector<double>& f) const {
    std::vector<double> r(nodes_.size());
    const int dirs = 2 * domain_->dim();
    for (std::size_t u = 0; u < nodes_.size(); ++u) {
        double acc = diag_[u] * values[nodes_[u]];
        for (int k = 0; k < dirs; ++k) acc += coef_[u][k] * values[nbr_[u][k]];
        r[u] = acc - f[u];
    }
    return r;
}

Solution solve_dirichlet(const DiscreteProblem& p, const SolverOptions& opt) {
    require(p.domain != nullptr, "problem needs a domain");
    const Domain& d = *p.domain;
    for (int a = 0; a < d.dim(); ++a) require(d.dims()[a] >= 17, "solver needs at least 17 nodes per axis");
    require(opt.tol >= 1e-14 && opt.tol <= 1e-6, "solver tolerance must lie in [1e-14, 1e-6]");
    const GridOperator A(p.domain, p.V, p.W);
    const auto g = node_samples(p.boundary, d);
    auto b = A.boundary_contribution(g);
    for (std::size_t u = 0; u < A.size(); ++u) b[u] += p.rhs(d.node(A.nodes()[u]));
    std::vector<double> x(A.size(), 0.0);
    const long cap = opt.max_iterations > 0 ? opt.max_iterations : default_cap(A.size());
    const auto res = A.has_drift() ? bicgstab(A, b, x, opt.tol, cap) : pcg(A, b, x, opt.tol, cap);
    if (!res.converged)
        throw NotConverged("linear solve stopped at relative residual " + std::to_string(res.residual) + " after " +
                           std::to_string(res.iterations) +
                           " iterations; the discrete operator may be indefinite or nearly singular");
    std::vector<double> values(d.node_count(), 0.0);
    for (std::size_t i = 0; i < values.size(); ++i)
        if (d.node_in_closure(i) && !d.node_interior(i)) values[i] = g[i];
    for (std::size_t u = 0; u < A.size(); ++u) values[A.nodes()[u]] = x[u];
    Solution s;
    s.u = ScalarField::grid(p.domain, std::move(values));
    s.residual_norm = res.residual;
    s.iterations = res.iterations;
    s.bicgstab = A.has_drift();
    return s;
}

double residual(const ScalarField& u, const DomainPtr& domain, const ScalarField& V, const VectorField& W,
                const ScalarField& f) {
    const GridOperator A(domain, V, W);
    const auto values = node_samples(u, *domain);
    std::vector<double> fv(A.size());
    for (std::size_t k = 0; k < A.size(); ++k) fv[k] = f(domain->node(A.nodes()[k]));
    const auto r = A.residual_nodes(values, fv);
    double m = 0.0;
    for (double x : r) m = std::max(m, std::abs(x));
    return m;
}

double analytic_residual(const ScalarField& u, const ScalarField& V, const DomainPtr& domain) {
    double m = 0.0;
    for (std::size_t i = 0; i < domain->node_count(); ++i) {
        if (!domain->node_in_closure(i)) continue;
        const Vec x = domain->node(i);
        m = std::max(m, std::abs(-u.laplacian(x) + V(x) * u(x)));
    }
    return m;
}

Eigenpair eigen_smallest(const DomainPtr& domain, const ScalarField& V, double tol) {
    const Domain& d = *domain;
    double shift = kInf;
    for (std::size_t i = 0; i < d.node_count(); ++i)
        if (d.node_interior(i)) shift = std::min(shift, V(d.node(i)));
    const auto Vs = ScalarField::analytic([V, shift](const Vec& x) { return V(x) - shift; });
    const GridOperator A(domain, Vs);
    const std::size_t N = A.size();
    require(N > 0, "no interior nodes");
    std::vector<double> x(N, 1.0), y(N), Ax(N);
    double s = 1.0 / norm2(x);
    for (double& v : x) v *= s;
    Eigenpair out;
    const long cap = 2000;
    double mu = 0.0;
    for (long it = 1; it <= cap; ++it) {
        A.apply(x, Ax);
        mu = dot(x, Ax);
        std::vector<double> r(N);
        for (std::size_t i = 0; i < N; ++i) r[i] = Ax[i] - mu * x[i];
        out.residual = norm2(r) / std::abs(mu + shift);
        out.iterations = it - 1;
        if (out.residual <= tol) break;
        // Warm start: A^{-1} x is close to x / mu once the iteration settles.
        for (std::size_t i = 0; i < N; ++i) y[i] = x[i] / mu;
        pcg(A, x, y, std::min(1e-3 * out.residual, 1e-6), default_cap(N));
        s = 1.0 / norm2(y);
        for (std::size_t i = 0; i < N; ++i) x[i] = y[i] * s;
        if (it == cap) throw NotConverged("inverse iteration did not reach the eigen-residual tolerance");
    }
    double total = 0.0;
    for (double v : x) total += v;
    if (total < 0.0)
        for (double& v : x) v = -v;
    std::vector<double> values(d.node_count(), 0.0);
    for (std::size_t u = 0; u < N; ++u) values[A.nodes()[u]] = x[u];
    out.lambda = mu + shift;
    out.field = ScalarField::grid(domain, std::move(values));
    return out;
}

namespace {

struct SobolevState {
    const GridOperator& L;
    double h3;

    double grad_norm(const std::vector<double>& w) const {
        std::vector<double> Lw;
        L.apply(w, Lw);
        return std::sqrt(h3 * dot(w, Lw));
    }
    double six_norm(const std::vector<double>& w) const {
        std::vector<double> p(w.size());
        for (std::size_t i = 0; i < w.size(); ++i) {
            const double a = w[i] * w[i];
            p[i] = a * a * a;
        }
        return std::pow(h3 * pairwise_sum(p), 1.0 / 6.0);
    }
    double quotient(const std::vector<double>& w) const { return six_norm(w) / grad_norm(w); }
    void normalize(std::vector<double>& w) const {
        const double g = grad_norm(w);
        for (double& v : w) v /= g;
    }
};

}  // namespace

SobolevEstimate sobolev_constant(const DomainPtr& domain, const SobolevOptions& opt) {
    require(domain->dim() == 3, "the Sobolev quotient is implemented for n = 3");
    require(opt.starts >= 1, "at least one start");
    const GridOperator L(domain, ScalarField::constant(0.0));
    const std::size_t N = L.size();
    require(N > 0, "no interior nodes");
    const double h = domain->spacing();
    SobolevState st{L, h * h * h};
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    SobolevEstimate best;
    best.sigma = -1.0;
    std::vector<double> best_w;
    for (int start = 0; start < opt.starts; ++start) {
        std::vector<double> w(N);
        for (std::size_t u = 0; u < N; ++u) {
            const Vec x = domain->node(L.nodes()[u]);
            if (start == 0 && opt.bump_start) {
                double b = 1.0;
                for (int a = 0; a < 3; ++a) {
                    const double t = (x[a] - domain->lo()[a]) / (domain->hi()[a] - domain->lo()[a]);
                    b *= std::sin(kPi * t);
                }
                w[u] = std::max(b, 1e-3);
            } else {
                w[u] = U(rng);
            }
        }
        st.normalize(w);
        double q = st.quotient(w);
        std::vector<double> z(N), w5(N), cand(N);
        long steps = 0;
        bool stagnated = false;
        for (int it = 0; it < opt.max_steps; ++it) {
            for (std::size_t i = 0; i < N; ++i) {
                const double a = w[i] * w[i];
                w5[i] = a * a * w[i];
            }
            pcg(L, w5, z, 1e-10, default_cap(N));
            st.normalize(z);
            double beta = 1.0;
            bool improved = false;
            double qc = q;
            while (beta > 1e-6) {
                for (std::size_t i = 0; i < N; ++i) cand[i] = (1.0 - beta) * w[i] + beta * z[i];
                st.normalize(cand);
                qc = st.quotient(cand);
                if (qc > q) {
                    improved = true;
                    break;
                }
                beta *= 0.5;
            }
            ++steps;
            if (!improved) {
                stagnated = true;
                break;
            }
            const double gain = (qc - q) / q;
            w = cand;
            q = qc;
            if (gain < opt.rel_tol) break;
        }
        best.per_start.push_back(q);
        best.steps += steps;
        if (q > best.sigma) {
            best.sigma = q;
            best_w = w;
            best.stagnated = stagnated;
        }
    }
    best.starts = opt.starts;
    std::vector<double> values(domain->node_count(), 0.0);
    for (std::size_t u = 0; u < N; ++u) values[L.nodes()[u]] = best_w[u];
    best.maximizer = ScalarField::grid(domain, std::move(values));
    return best;
}

double richardson(double coarse, double fine) { return fine + (fine - coarse) / 3.0; }

}  // namespace qucl
