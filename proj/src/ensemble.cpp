#include "qucl/ensemble.hpp"

#include <cmath>
#include <random>

#include "qucl/parallel.hpp"

namespace qucl {

const char* provenance_name(Provenance p) { return p == Provenance::Manufactured ? "manufactured" : "solved"; }

void Ensemble::append(const Ensemble& other) {
    int next = members.empty() ? 0 : members.back().id + 1;
    for (Member m : other.members) {
        m.id = next++;
        members.push_back(std::move(m));
    }
}

namespace {

Vec random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    for (;;) {
        const Vec v{N(rng), N(rng), N(rng)};
        const double l = norm(v);
        if (l > 1e-3) return (1.0 / l) * v;
    }
}

struct Wave {
    double w;
    Vec a, b;
    double phi;
};

ScalarField wave_sum(std::vector<Wave> waves, double c) {
    auto f = [waves](const Vec& x) {
        double s = 0;
        for (const auto& t : waves) s += t.w * std::exp(dot(t.a, x)) * std::cos(dot(t.b, x) + t.phi);
        return s;
    };
    auto g = [waves](const Vec& x) {
        Vec s{};
        for (const auto& t : waves) {
            const double e = t.w * std::exp(dot(t.a, x));
            const double cs = std::cos(dot(t.b, x) + t.phi), sn = std::sin(dot(t.b, x) + t.phi);
            s = s + (e * cs) * t.a - (e * sn) * t.b;
        }
        return s;
    };
    auto lap = [f, c](const Vec& x) { return c * f(x); };
    return ScalarField::analytic(f, g, lap);
}

}  // namespace

Ensemble exponential_ensemble(const DomainPtr& domain, double c, int count, std::uint64_t seed, int terms,
                              bool sample) {
    require(domain != nullptr, "ensemble needs a domain");
    require(count >= 0 && terms >= 1, "member and term counts must be positive");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    Ensemble e;
    e.domain = domain;
    for (int i = 0; i < count; ++i) {
        std::vector<Wave> waves;
        for (int k = 0; k < terms; ++k) {
            Wave t;
            t.w = 0.2 + U(rng);
            const Vec ua = random_unit(rng);
            Vec ub = random_unit(rng);
            ub = ub - dot(ub, ua) * ua;
            ub = (1.0 / std::max(norm(ub), 1e-12)) * ub;
            // |a|^2 - |b|^2 = c; when c < 0 the oscillation carries the deficit.
            const double beta = 2.0 * U(rng) + std::sqrt(std::max(-c, 0.0));
            const double alpha = std::sqrt(std::max(c + beta * beta, 0.0));
            t.a = alpha * ua;
            t.b = beta * ub;
            t.phi = 0.5 * U(rng);
            waves.push_back(t);
        }
        Member m;
        m.id = i;
        m.provenance = Provenance::Manufactured;
        m.name = "exp" + std::to_string(i);
        m.u = wave_sum(std::move(waves), c);
        if (sample) m.u = m.u.sampled(domain);
        m.V = ScalarField::constant(c);
        e.members.push_back(std::move(m));
    }
    return e;
}

ScalarField random_boundary_data(std::uint64_t seed, int index) {
    std::mt19937_64 rng(seed * 1000003ULL + static_cast<std::uint64_t>(index));
    std::normal_distribution<double> N(0.0, 1.0);
    std::uniform_int_distribution<int> F(-2, 2);
    std::uniform_real_distribution<double> U(0.0, 2 * kPi);
    struct Mode {
        double amp;
        Vec k;
        double phase;
    };
    std::vector<Mode> modes;
    const double offset = 1.0 + std::abs(N(rng));
    for (int j = 0; j < 3; ++j) {
        Vec k{};
        while (norm(k) == 0.0) k = {double(F(rng)), double(F(rng)), double(F(rng))};
        modes.push_back({N(rng), kPi * k, U(rng)});
    }
    return ScalarField::analytic([modes, offset](const Vec& x) {
        double s = offset;
        for (const auto& m : modes) s += m.amp * std::sin(dot(m.k, x) + m.phase);
        return s;
    });
}

Ensemble solved_ensemble(const DomainPtr& domain, const ScalarField& V, int count, std::uint64_t seed,
                         const SolverOptions& options, int workers) {
    require(domain != nullptr, "ensemble needs a domain");
    Ensemble e;
    e.domain = domain;
    e.members = parallel_map<Member>(
        static_cast<std::size_t>(count),
        [&](std::size_t i) {
            DiscreteProblem p;
            p.domain = domain;
            p.V = V;
            p.boundary = random_boundary_data(seed, static_cast<int>(i));
            const auto s = solve_dirichlet(p, options);
            Member m;
            m.id = static_cast<int>(i);
            m.provenance = Provenance::Solved;
            m.name = "bvp" + std::to_string(i);
            m.u = s.u;
            m.V = V;
            m.residual = s.residual_norm;
            return m;
        },
        workers);
    return e;
}

}  // namespace qucl
