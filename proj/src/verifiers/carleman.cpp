#include <algorithm>
#include <cmath>

#include "qucl/frequency.hpp"
#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

namespace {

// Symmetric positive definite matrix with two sub-diagonals, factored in place as L L^T.
struct Penta {
    std::vector<double> d0, d1, d2;  // diagonal, first and second sub-diagonal (d1[i] = K(i+1, i))

    explicit Penta(std::size_t m) : d0(m, 0.0), d1(m, 0.0), d2(m, 0.0) {}

    void factor() {
        const std::size_t m = d0.size();
        for (std::size_t i = 0; i < m; ++i) {
            // Row i of L: l(i, i-2), l(i, i-1), l(i, i).
            double a2 = i >= 2 ? d2[i - 2] : 0.0;
            double a1 = i >= 1 ? d1[i - 1] : 0.0;
            if (i >= 2) a2 /= d0[i - 2];
            if (i >= 1) {
                const double cross = i >= 2 ? a2 * d1[i - 2] : 0.0;
                a1 = (a1 - cross) / d0[i - 1];
            }
            double diag = d0[i] - a1 * a1 - a2 * a2;
            if (!(diag > 0.0)) throw NotConverged("weighted normal matrix lost positive definiteness");
            if (i >= 2) d2[i - 2] = a2;
            if (i >= 1) d1[i - 1] = a1;
            d0[i] = std::sqrt(diag);
        }
    }

    // Solves L L^T x = b in place.
    void solve(std::vector<double>& x) const {
        const std::size_t m = d0.size();
        for (std::size_t i = 0; i < m; ++i) {
            double s = x[i];
            if (i >= 1) s -= d1[i - 1] * x[i - 1];
            if (i >= 2) s -= d2[i - 2] * x[i - 2];
            x[i] = s / d0[i];
        }
        for (std::size_t k = m; k-- > 0;) {
            double s = x[k];
            if (k + 1 < m) s -= d1[k] * x[k + 1];
            if (k + 2 < m) s -= d2[k] * x[k + 2];
            x[k] = s / d0[k];
        }
    }
};

struct Radial {
    std::size_t N = 0;           // intervals; unknowns 1..N-1
    std::vector<double> r;       // nodes 0..N
    std::vector<double> lo, mid, hi;  // conjugated operator row i: couplings to i-1, i, i+1
    std::vector<double> wout, win;
};

Radial build(const CarlemanSpec& s, double tau, int ell) {
    Radial R;
    R.N = s.h > 0 ? static_cast<std::size_t>(std::llround((s.outer - s.inner) / s.h)) : static_cast<std::size_t>(s.points);
    require(R.N >= 4, "radial grid needs at least four intervals");
    const double h = (s.outer - s.inner) / static_cast<double>(R.N);
    const int n = s.n;
    R.r.resize(R.N + 1);
    for (std::size_t i = 0; i <= R.N; ++i) R.r[i] = s.inner + h * static_cast<double>(i);
    std::vector<double> phi(R.N + 1);
    for (std::size_t i = 0; i <= R.N; ++i) phi[i] = carleman_weight(s, R.r[i]);
    R.lo.assign(R.N + 1, 0.0);
    R.mid.assign(R.N + 1, 0.0);
    R.hi.assign(R.N + 1, 0.0);
    const double deg = static_cast<double>(ell) * (ell + n - 2);
    for (std::size_t i = 0; i <= R.N; ++i) {
        const double ri = R.r[i];
        const double drift = (n - 1) / ri / (2.0 * h);
        if (i >= 1) R.lo[i] = (1.0 / (h * h) - drift) * std::exp(tau * (phi[i] - phi[i - 1]));
        R.mid[i] = -2.0 / (h * h) - deg / (ri * ri);
        if (i + 1 <= R.N) R.hi[i] = (1.0 / (h * h) + drift) * std::exp(tau * (phi[i] - phi[i + 1]));
    }
    R.wout.resize(R.N + 1);
    for (std::size_t i = 0; i <= R.N; ++i) R.wout[i] = std::pow(R.r[i], n - 1) * h;
    R.win.resize(R.N - 1);
    for (std::size_t j = 1; j < R.N; ++j) R.win[j - 1] = std::pow(R.r[j], n - 1) * h;
    return R;
}

// g = A v with v on unknowns 1..N-1 (index j-1) and g on rows 0..N.
void apply(const Radial& R, const std::vector<double>& v, std::vector<double>& g) {
    const std::size_t N = R.N;
    g.assign(N + 1, 0.0);
    auto val = [&](std::size_t j) { return (j >= 1 && j < N) ? v[j - 1] : 0.0; };
    for (std::size_t i = 0; i <= N; ++i) {
        double s = R.mid[i] * val(i);
        if (i >= 1) s += R.lo[i] * val(i - 1);
        if (i + 1 <= N) s += R.hi[i] * val(i + 1);
        g[i] = s;
    }
}

// K = A^T diag(d) A restricted to the unknowns.
Penta normal_matrix(const Radial& R, const std::vector<double>& d) {
    const std::size_t N = R.N, m = N - 1;
    Penta K(m);
    // Column j of A (unknown j) has entries at rows j-1 (hi[j-1]), j (mid[j]), j+1 (lo[j+1]).
    auto entry = [&](std::size_t row, std::size_t j) -> double {
        if (row + 1 == j) return R.hi[row];
        if (row == j) return R.mid[row];
        if (row == j + 1) return R.lo[row];
        return 0.0;
    };
    for (std::size_t a = 1; a <= m; ++a) {
        for (std::size_t off = 0; off <= 2 && a + off <= m; ++off) {
            const std::size_t b = a + off;
            double s = 0.0;
            for (std::size_t row = b - 1; row <= a + 1; ++row) s += d[row] * entry(row, a) * entry(row, b);
            if (off == 0) K.d0[a - 1] = s;
            else if (off == 1) K.d1[a - 1] = s;
            else K.d2[a - 1] = s;
        }
    }
    return K;
}

// Number of eigenvalues of K v = mu diag(M) v below sigma, from the pivots of an unpivoted L D L^T of K - sigma M.
std::size_t count_below(const Penta& K, const std::vector<double>& M, double sigma) {
    const std::size_t m = M.size();
    std::vector<double> D(m), l1(m, 0.0);
    std::size_t neg = 0;
    for (std::size_t i = 0; i < m; ++i) {
        const double b = i >= 2 ? K.d2[i - 2] / D[i - 2] : 0.0;
        double a = i >= 1 ? K.d1[i - 1] : 0.0;
        if (i >= 2) a -= b * l1[i - 1] * D[i - 2];
        if (i >= 1) a /= D[i - 1];
        double d = K.d0[i] - sigma * M[i];
        if (i >= 1) d -= a * a * D[i - 1];
        if (i >= 2) d -= b * b * D[i - 2];
        if (d == 0.0) d = -1e-300;
        D[i] = d;
        l1[i] = a;
        if (d < 0.0) ++neg;
    }
    return neg;
}

// Smallest eigenpair of K v = mu diag(M) v; v is the warm start. The eigenvalue is bracketed by
// bisection on the inertia, then inverse iteration shifted to just below it gives the vector.
double smallest(const Penta& K, const std::vector<double>& M, std::vector<double>& v) {
    const std::size_t m = v.size();
    auto mnorm = [&](const std::vector<double>& x) {
        double s = 0;
        for (std::size_t i = 0; i < m; ++i) s += M[i] * x[i] * x[i];
        return std::sqrt(s);
    };
    auto kdot = [&](const std::vector<double>& x) {
        double s = 0;
        for (std::size_t i = 0; i < m; ++i) {
            double kx = K.d0[i] * x[i];
            if (i >= 1) kx += K.d1[i - 1] * x[i - 1];
            if (i >= 2) kx += K.d2[i - 2] * x[i - 2];
            if (i + 1 < m) kx += K.d1[i] * x[i + 1];
            if (i + 2 < m) kx += K.d2[i] * x[i + 2];
            s += x[i] * kx;
        }
        return s;
    };
    double nv = mnorm(v);
    for (auto& x : v) x /= nv;
    double hi = kdot(v), lo = 0.0;
    while (count_below(K, M, hi) == 0) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (count_below(K, M, mid) == 0 ? lo : hi) = mid;
    }
    // Rounding in the pivots can put lo a hair above the eigenvalue; back off until the shift factors.
    Penta L = K;
    for (double back : {1e-9, 1e-6, 1e-3, 1e-1, 1.0}) {
        L = K;
        for (std::size_t i = 0; i < m; ++i) L.d0[i] -= lo * (1.0 - back) * M[i];
        try {
            L.factor();
            break;
        } catch (const NotConverged&) {
            if (back == 1.0) throw;
        }
    }
    std::vector<double> w(m);
    double mu = kdot(v), prev = kInf;
    for (int it = 0; it < 50; ++it) {
        for (std::size_t i = 0; i < m; ++i) w[i] = M[i] * v[i];
        L.solve(w);
        nv = mnorm(w);
        for (std::size_t i = 0; i < m; ++i) v[i] = w[i] / nv;
        prev = mu;
        mu = kdot(v);
        if (std::abs(prev - mu) <= 1e-12 * mu) break;
    }
    return mu;
}

double beta_fn(double a, double b) { return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b)); }

// ||Y||_q on the unit sphere of R^3 for Y = sin^l(theta) cos(l phi).
double harmonic_norm(int ell, double q) {
    const double az = ell == 0 ? 2.0 * kPi : 2.0 * beta_fn(0.5 * (q + 1.0), 0.5);
    const double po = beta_fn(0.5 * (ell * q + 2.0), 0.5);
    return std::pow(az * po, 1.0 / q);
}

}  // namespace

double carleman_predicted_power(int n, CarlemanNorm norm) {
    return norm == CarlemanNorm::Square ? 1.5 : 0.75 + 0.5 / n;
}

double carleman_weight(const CarlemanSpec& s, double r) {
    switch (s.weight) {
        case CarlemanWeight::Quadratic: return s.R * s.R - r * r;
        case CarlemanWeight::Exponential: return std::exp(s.lambda * (s.c - r));
        case CarlemanWeight::Inverse: return 1.0 / r - 1.0;
        default: return -std::log(r);
    }
}

double carleman_tau_max(const CarlemanSpec& s) {
    require(s.inner > 0.0 && s.outer > s.inner, "support annulus needs 0 < inner < outer");
    // Every catalogue weight is monotone in r, so the oscillation sits at the ends.
    const double osc = std::abs(carleman_weight(s, s.inner) - carleman_weight(s, s.outer));
    return osc == 0.0 ? kInf : std::log(s.max_dynamic_range) / osc;
}

double carleman_quotient(const CarlemanSpec& s, double tau, int ell) {
    require(s.n == 3, "the angular factors are implemented for n = 3");
    require(ell >= 0, "degree must be nonnegative");
    const double tmax = carleman_tau_max(s);
    if (tau < 0.0 || tau > tmax * (1 + 1e-12))
        throw InvalidArgument("tau " + format_number(tau) + " outside the admissible range [0, " + format_number(tmax) +
                              "] for weight dynamic range " + format_number(s.max_dynamic_range));
    const auto R = build(s, tau, ell);
    const std::size_t m = R.N - 1;
    std::vector<double> v(m);
    for (std::size_t j = 0; j < m; ++j) v[j] = std::sin(kPi * (j + 1.0) / R.N);
    std::vector<double> g;

    if (s.norm == CarlemanNorm::Square) {
        const double mu = smallest(normal_matrix(R, R.wout), R.win, v);
        return std::sqrt(std::max(mu, 0.0));
    }

    const double p = holder_exponent(s.n);
    const double q = s.norm == CarlemanNorm::Lebesgue ? 2.0 : sobolev_exponent(s.n);
    const double angular = harmonic_norm(ell, p) / harmonic_norm(ell, q);
    std::vector<double> dout = R.wout, din = R.win;
    double best = kInf;
    for (int it = 0; it < s.irls_iterations; ++it) {
        smallest(normal_matrix(R, dout), din, v);
        apply(R, v, g);
        double num = 0, den = 0, gmax = 0, vmax = 0;
        for (std::size_t i = 0; i <= R.N; ++i) {
            num += R.wout[i] * std::pow(std::abs(g[i]), p);
            gmax = std::max(gmax, std::abs(g[i]));
        }
        for (std::size_t j = 0; j < m; ++j) {
            den += R.win[j] * std::pow(std::abs(v[j]), q);
            vmax = std::max(vmax, std::abs(v[j]));
        }
        best = std::min(best, std::pow(num, 1.0 / p) / std::pow(den, 1.0 / q));
        for (std::size_t i = 0; i <= R.N; ++i) dout[i] = R.wout[i] * std::pow(std::max(std::abs(g[i]), 1e-6 * gmax), p - 2.0);
        if (q != 2.0)
            for (std::size_t j = 0; j < m; ++j) din[j] = R.win[j] * std::pow(std::max(std::abs(v[j]), 1e-6 * vmax), q - 2.0);
    }
    return best * angular;
}

CarlemanPoint carleman_extremal(const CarlemanSpec& s, double tau) {
    CarlemanPoint best{tau, kInf, -1};
    for (int ell = 0; ell <= s.max_ell; ++ell) {
        const double q = carleman_quotient(s, tau, ell);
        if (q < best.quotient) {
            best.quotient = q;
            best.ell = ell;
        }
        if (ell > best.ell + s.ell_patience) break;
    }
    return best;
}

CarlemanScaling carleman_estimate(const CarlemanSpec& s, const std::vector<double>& taus, double predicted,
                                  double tolerance, int workers) {
    require(taus.size() >= 2, "scaling needs at least two tau values");
    CarlemanScaling out;
    out.tau_max = carleman_tau_max(s);
    for (double t : taus)
        if (!(t > 0.0) || t > out.tau_max * (1 + 1e-12))
            throw InvalidArgument("tau " + format_number(t) + " outside the admissible range (0, " +
                                  format_number(out.tau_max) + "]");
    out.points = parallel_map<CarlemanPoint>(taus.size(), [&](std::size_t i) { return carleman_extremal(s, taus[i]); },
                                             workers);
    std::vector<double> x, y;
    for (const auto& p : out.points) {
        x.push_back(std::log(p.tau));
        y.push_back(std::log(p.quotient));
    }
    out.slope = fit_slope(x, y);
    out.predicted = predicted;
    out.tolerance = tolerance;
    const char* norm = s.norm == CarlemanNorm::Lebesgue ? "lebesgue" : s.norm == CarlemanNorm::Square ? "square" : "singular";
    out.report = InequalityReport::from_values(std::string("carleman.") + norm + ".scaling", "explicit",
                                               std::abs(out.slope - predicted), tolerance);
    out.report.with("slope", out.slope).with("predicted", predicted).with("tau_min", taus.front())
        .with("tau_max", taus.back()).with("tau_admissible", out.tau_max).with("inner", s.inner)
        .with("outer", s.outer);
    return out;
}

Table CarlemanScaling::table() const {
    Table t;
    t.name = "carleman";
    t.columns = {"tau", "quotient", "ell"};
    for (const auto& p : points) t.add({p.tau, p.quotient, static_cast<double>(p.ell)});
    return t;
}

}  // namespace qucl
