#include "qucl/fields.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <optional>

#include "json.hpp"

namespace qucl {

struct ScalarField::Impl {
    Source source = Source::Analytic;
    Fn f;
    GradFn grad;
    Fn lap;
    DomainPtr domain;
    std::vector<double> values;
    std::array<std::vector<double>, 3> dvalues;
    double scale = 1.0;
};

namespace {

/// Multilinear interpolation weights of x on the node grid.
struct Stencil {
    std::array<std::size_t, 8> idx{};
    std::array<double, 8> w{};
    int count = 0;
};

Stencil locate(const Domain& d, const Vec& x) {
    const int n = d.dim();
    const double h = d.spacing();
    std::array<int, 3> base{0, 0, 0};
    std::array<double, 3> t{0.0, 0.0, 0.0};
    for (int a = 0; a < n; ++a) {
        const double q = (x[a] - d.lo()[a]) / h;
        const int top = d.dims()[a] - 1;
        if (q < -1e-9 || q > top + 1e-9) throw OutOfDomain("point outside the sampled grid");
        int i = static_cast<int>(std::floor(q));
        i = std::clamp(i, 0, top - 1);
        base[a] = i;
        t[a] = std::clamp(q - i, 0.0, 1.0);
    }
    Stencil s;
    s.count = 1 << n;
    for (int c = 0; c < s.count; ++c) {
        std::array<int, 3> ix = base;
        double w = 1.0;
        for (int a = 0; a < n; ++a) {
            const int bit = (c >> a) & 1;
            ix[a] += bit;
            w *= bit ? t[a] : 1.0 - t[a];
        }
        s.idx[c] = d.index(ix[0], ix[1], ix[2]);
        s.w[c] = w;
    }
    return s;
}

double interpolate(const Domain& d, const std::vector<double>& v, const Vec& x) {
    const Stencil s = locate(d, x);
    double out = 0.0;
    for (int c = 0; c < s.count; ++c) out += s.w[c] * v[s.idx[c]];
    return out;
}

/// Node derivative along `axis`: central where both neighbours are in the closure,
/// second-order one-sided next to the boundary of the sampled set.
std::vector<double> node_derivative(const Domain& d, const std::vector<double>& v, int axis) {
    const double h = d.spacing();
    std::vector<double> out(v.size(), 0.0);
    const int top = d.dims()[axis] - 1;
    for (std::size_t idx = 0; idx < v.size(); ++idx) {
        if (!d.node_in_closure(idx)) continue;
        const auto c = d.ijk(idx);
        auto at = [&](int off) -> std::optional<double> {
            auto q = c;
            q[axis] += off;
            if (q[axis] < 0 || q[axis] > top) return std::nullopt;
            const std::size_t j = d.index(q[0], q[1], q[2]);
            if (!d.node_in_closure(j)) return std::nullopt;
            return v[j];
        };
        const auto m1 = at(-1), p1 = at(1);
        if (m1 && p1) {
            out[idx] = (*p1 - *m1) / (2.0 * h);
        } else if (p1) {
            const auto p2 = at(2);
            out[idx] = p2 ? (-3.0 * v[idx] + 4.0 * *p1 - *p2) / (2.0 * h) : (*p1 - v[idx]) / h;
        } else if (m1) {
            const auto m2 = at(-2);
            out[idx] = m2 ? (3.0 * v[idx] - 4.0 * *m1 + *m2) / (2.0 * h) : (v[idx] - *m1) / h;
        }
    }
    return out;
}

}  // namespace

ScalarField::ScalarField() : ScalarField(constant(0.0)) {}

ScalarField::ScalarField(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

ScalarField ScalarField::analytic(Fn f, GradFn grad, Fn laplacian) {
    require(static_cast<bool>(f), "analytic field needs an evaluator");
    auto impl = std::make_shared<Impl>();
    impl->f = std::move(f);
    impl->grad = std::move(grad);
    impl->lap = std::move(laplacian);
    return ScalarField(impl);
}

ScalarField ScalarField::constant(double c) {
    return analytic([c](const Vec&) { return c; }, [](const Vec&) { return Vec{}; }, [](const Vec&) { return 0.0; });
}

ScalarField ScalarField::grid(DomainPtr domain, std::vector<double> values) {
    require(domain != nullptr, "grid field needs a domain");
    require(values.size() == domain->node_count(), "grid field size does not match the node count");
    auto impl = std::make_shared<Impl>();
    impl->source = Source::Grid;
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!domain->node_in_closure(i)) values[i] = 0.0;
    for (int a = 0; a < domain->dim(); ++a) impl->dvalues[a] = node_derivative(*domain, values, a);
    impl->values = std::move(values);
    impl->domain = std::move(domain);
    return ScalarField(impl);
}

double ScalarField::operator()(const Vec& x) const {
    if (impl_->source == Source::Grid) return interpolate(*impl_->domain, impl_->values, x);
    return impl_->scale * impl_->f(x);
}

Vec ScalarField::gradient(const Vec& x) const {
    if (impl_->source == Source::Grid) {
        Vec g{};
        for (int a = 0; a < impl_->domain->dim(); ++a) g[a] = interpolate(*impl_->domain, impl_->dvalues[a], x);
        return g;
    }
    if (impl_->grad) return impl_->scale * impl_->grad(x);
    Vec g{};
    for (int a = 0; a < 3; ++a) {
        const double e = 1e-5 * (1.0 + std::abs(x[a]));
        Vec p = x, m = x;
        p[a] += e;
        m[a] -= e;
        g[a] = (impl_->f(p) - impl_->f(m)) / (2.0 * e);
    }
    return impl_->scale * g;
}

bool ScalarField::has_laplacian() const { return impl_->source == Source::Analytic && impl_->lap; }

double ScalarField::laplacian(const Vec& x) const {
    if (!has_laplacian()) throw InvalidArgument("field has no analytic Laplacian");
    return impl_->scale * impl_->lap(x);
}

ScalarField::Source ScalarField::source() const { return impl_->source; }

const DomainPtr& ScalarField::domain() const { return impl_->domain; }

ScalarField ScalarField::with_domain(DomainPtr domain) const {
    auto impl = std::make_shared<Impl>(*impl_);
    require(impl->source == Source::Analytic || domain == impl_->domain, "grid fields keep their sampling domain");
    impl->domain = std::move(domain);
    return ScalarField(impl);
}

const std::vector<double>& ScalarField::values() const {
    if (impl_->source != Source::Grid) throw InvalidArgument("analytic field has no node values");
    return impl_->values;
}

ScalarField ScalarField::scaled(double c) const {
    if (impl_->source == Source::Grid) {
        std::vector<double> v = impl_->values;
        for (double& x : v) x *= c;
        return grid(impl_->domain, std::move(v));
    }
    auto impl = std::make_shared<Impl>(*impl_);
    impl->scale *= c;
    return ScalarField(impl);
}

ScalarField ScalarField::sampled(const DomainPtr& domain) const {
    std::vector<double> v(domain->node_count(), 0.0);
    for (std::size_t i = 0; i < v.size(); ++i)
        if (domain->node_in_closure(i)) v[i] = (*this)(domain->node(i));
    return grid(domain, std::move(v));
}

VectorField VectorField::constant(const Vec& w) {
    return VectorField([w](const Vec&) { return w; });
}

void require_ball_inside(const ScalarField& f, const Vec& x0, double r) {
    const auto& d = f.domain();
    if (!d) return;
    if (!d->contains(x0) || d->distance_to_complement(x0) < r * (1.0 - 1e-12))
        throw OutOfDomain("ball leaves the field's domain");
}

double lp_norm(const ScalarField& f, const Rule& rule, double p, int workers) {
    require(p >= 1.0, "norm exponent must be at least 1");
    if (rule.blocks() == 0 || total_weight(rule) <= 0.0) throw EmptyRegion("norm over an empty region");
    if (std::isinf(p)) return max_abs(rule, [&](const Vec& x) { return f(x); }, workers);
    if (p == 2.0) return std::sqrt(integrate(rule, [&](const Vec& x) { const double v = f(x); return v * v; }, workers));
    return std::pow(integrate(rule, [&](const Vec& x) { return std::pow(std::abs(f(x)), p); }, workers), 1.0 / p);
}

double lp_norm(const ScalarField& f, const RegionMask& mask, double p, int workers) {
    return lp_norm(f, *mask_rule(mask), p, workers);
}

double lp_norm(const ScalarField& f, const Ball& ball, double p, const QuadratureSpec& spec, int workers) {
    require_ball_inside(f, ball.center, ball.radius);
    return lp_norm(f, *ball_rule(ball.n, ball.center, ball.radius, spec), p, workers);
}

double lp_norm(const ScalarField& f, const Shell& shell, double p, const QuadratureSpec& spec, int workers) {
    require_ball_inside(f, shell.center, shell.outer);
    return lp_norm(f, *shell_rule(shell.n, shell.center, shell.inner, shell.outer, spec), p, workers);
}

RulePtr volume_rule_for(const ScalarField& f, const DomainPtr& domain, const QuadratureSpec& spec) {
    if (f.is_grid()) {
        require(f.domain() == domain || (f.domain()->node_count() == domain->node_count() &&
                                         f.domain()->spacing() == domain->spacing()),
                "grid field sampled on a different domain");
        return grid_cell_rule(f.domain());
    }
    return domain_rule(*domain, spec);
}

double lp_norm(const ScalarField& f, const DomainPtr& domain, double p, const QuadratureSpec& spec, int workers) {
    return lp_norm(f, *volume_rule_for(f, domain, spec), p, workers);
}

double h1_norm(const ScalarField& f, const DomainPtr& domain, const QuadratureSpec& spec, int workers) {
    const auto rule = volume_rule_for(f, domain, spec);
    return std::sqrt(integrate(
        *rule,
        [&](const Vec& x) {
            const double v = f(x);
            const Vec g = f.gradient(x);
            return v * v + dot(g, g);
        },
        workers));
}

double gradient_l2_norm(const ScalarField& f, const RegionMask& mask, int workers) {
    return std::sqrt(integrate(*mask_rule(mask), [&](const Vec& x) { const Vec g = f.gradient(x); return dot(g, g); }, workers));
}

double gradient_l2_norm(const ScalarField& f, const Ball& ball, const QuadratureSpec& spec, int workers) {
    require_ball_inside(f, ball.center, ball.radius);
    const auto rule = ball_rule(ball.n, ball.center, ball.radius, spec);
    return std::sqrt(integrate(*rule, [&](const Vec& x) { const Vec g = f.gradient(x); return dot(g, g); }, workers));
}

double sphere_square_integral(const ScalarField& f, int n, const Vec& x0, double r, const QuadratureSpec& spec) {
    require_ball_inside(f, x0, r);
    return integrate(*sphere_rule(n, x0, r, spec), [&](const Vec& x) { const double v = f(x); return v * v; });
}

double schrodinger_energy(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                          const QuadratureSpec& spec) {
    require_ball_inside(f, x0, r);
    return integrate(*ball_rule(n, x0, r, spec), [&](const Vec& x) {
        const double v = f(x);
        const Vec g = f.gradient(x);
        return dot(g, g) + V(x) * v * v;
    });
}

FluxIntegrals boundary_flux_integrals(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                                      const QuadratureSpec& spec) {
    require_ball_inside(f, x0, r);
    const auto rule = sphere_rule(n, x0, r, spec);
    FluxIntegrals out;
    out.normal_square = integrate(*rule, [&](const Vec& x) {
        const double dn = dot(f.gradient(x), x - x0) / r;
        return dn * dn;
    });
    out.potential_square = integrate(*rule, [&](const Vec& x) { const double v = f(x); return V(x) * v * v; });
    return out;
}

double dhat_integral(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                     const QuadratureSpec& spec) {
    require_ball_inside(f, x0, r);
    return -integrate(*ball_rule(n, x0, r, spec), [&](const Vec& x) {
        const double v = f(x);
        return V(x) * (2.0 * v * dot(x - x0, f.gradient(x)) + (n - 2.0) / r * v * v);
    });
}

double dhat_identity_integral(const ScalarField& f, const ScalarField& V, int n, const Vec& x0, double r,
                              const QuadratureSpec& spec) {
    require_ball_inside(f, x0, r);
    return -integrate(*ball_rule(n, x0, r, spec), [&](const Vec& x) {
               const double v = f(x);
               return V(x) * (2.0 * v * dot(x - x0, f.gradient(x)) + (n - 2.0) * v * v);
           }) /
           r;
}

namespace {

double to_little(double x) {
    if constexpr (std::endian::native == std::endian::little) return x;
    std::uint64_t u;
    std::memcpy(&u, &x, sizeof u);
    u = __builtin_bswap64(u);
    std::memcpy(&x, &u, sizeof u);
    return x;
}

}  // namespace

void save_grid_field(const ScalarField& f, const std::string& path) {
    const auto& d = f.domain();
    const auto& v = f.values();
    std::ofstream raw(path, std::ios::binary);
    if (!raw) throw InvalidArgument("cannot open " + path);
    for (double x : v) {
        const double le = to_little(x);
        raw.write(reinterpret_cast<const char*>(&le), sizeof le);
    }
    nlohmann::json header;
    header["n"] = d->dim();
    header["h"] = d->spacing();
    header["dims"] = d->dims();
    header["origin"] = d->lo();
    header["dtype"] = "float64-le";
    auto& boxes = header["boxes"] = nlohmann::json::array();
    for (const auto& b : d->boxes()) boxes.push_back({{"lo", b.lo}, {"hi", b.hi}});
    std::ofstream meta(path + ".json");
    meta << header.dump(2) << "\n";
}

ScalarField load_grid_field(const std::string& path) {
    std::ifstream meta(path + ".json");
    if (!meta) throw InvalidArgument("missing grid header " + path + ".json");
    const auto header = nlohmann::json::parse(meta);
    std::vector<Box> boxes;
    for (const auto& b : header.at("boxes")) boxes.push_back(Box{b.at("lo").get<Vec>(), b.at("hi").get<Vec>()});
    auto d = std::make_shared<const Domain>(header.at("n").get<int>(), boxes, header.at("h").get<double>());
    if (header.at("dims").get<std::array<int, 3>>() != d->dims()) throw InvalidArgument("grid header dims mismatch");
    std::ifstream raw(path, std::ios::binary);
    std::vector<double> v(d->node_count());
    for (double& x : v) {
        double le;
        if (!raw.read(reinterpret_cast<char*>(&le), sizeof le)) throw InvalidArgument("grid file too short: " + path);
        x = to_little(le);
    }
    return ScalarField::grid(d, std::move(v));
}

}  // namespace qucl
