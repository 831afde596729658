#include "qucl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "qucl/frequency.hpp"
#include "qucl/parallel.hpp"
#include "qucl/verifiers.hpp"

namespace qucl {

namespace {

using json = nlohmann::ordered_json;

struct Context {
    const RunConfig& config;
    const ExperimentConfig& e;
    DomainPtr domain;
    Potential V;
    VerifierSettings settings;
    Mode mode;
    Vec middle;
};

DomainPtr build_domain(const RunConfig& c) {
    try {
        return std::make_shared<const Domain>(Domain::box(3, c.lengths, c.h, c.origin));
    } catch (const InvalidArgument& err) {
        throw ConfigError(std::string("[domain] ") + err.what());
    }
}

Potential build_potential(const RunConfig& c, const DomainPtr& d) {
    if (c.potential == "two_level") return two_level_potential(d, Box{c.sub_lo, c.sub_hi}, c.high, c.value, c.s);
    if (c.potential == "radial_power") return radial_power_potential(d, c.center, c.power, c.s);
    return constant_potential(d, c.value, c.s);
}

// prod_{i < k} sinh(x_i - c_i), or cosh(x_1 - c_1) for k = 0; -Delta u + k u = 0 (k = 0 uses V = 1).
ScalarField sinh_product(int k, const Vec& c) {
    require(k >= 0 && k <= 3, "sinh product order must lie in 0..3");
    if (k == 0) {
        return ScalarField::analytic([c](const Vec& x) { return std::cosh(x[0] - c[0]); },
                                     [c](const Vec& x) { return Vec{std::sinh(x[0] - c[0]), 0.0, 0.0}; },
                                     [c](const Vec& x) { return std::cosh(x[0] - c[0]); });
    }
    auto f = [k, c](const Vec& x) {
        double p = 1.0;
        for (int i = 0; i < k; ++i) p *= std::sinh(x[i] - c[i]);
        return p;
    };
    auto g = [k, c](const Vec& x) {
        Vec out{};
        for (int j = 0; j < k; ++j) {
            double p = std::cosh(x[j] - c[j]);
            for (int i = 0; i < k; ++i)
                if (i != j) p *= std::sinh(x[i] - c[i]);
            out[j] = p;
        }
        return out;
    };
    return ScalarField::analytic(f, g, [f, k](const Vec& x) { return k * f(x); });
}

ScalarField build_field(const Context& ctx, const Vec& center) {
    const std::string kind = param_text(ctx.e, "field", "exp");
    const long degree = param_integer(ctx.e, "degree", 1);
    if (kind == "exp") return exp_field(param_vec(ctx.e, "direction", {1.0, 0.0, 0.0}));
    if (kind == "harmonic") {
        if (degree < 0 || degree > 3) throw ConfigError("[experiment." + ctx.e.name + "] harmonic degree must lie in 0..3");
        return harmonic_field(static_cast<int>(degree), center);
    }
    if (kind == "sinh") {
        if (degree < 0 || degree > 3) throw ConfigError("[experiment." + ctx.e.name + "] sinh order must lie in 0..3");
        return sinh_product(static_cast<int>(degree), center);
    }
    if (kind == "constant") return ScalarField::constant(param_number(ctx.e, "value", 1.0));
    throw ConfigError("[experiment." + ctx.e.name + "] unknown field '" + kind + "'");
}

Ensemble build_ensemble(const Context& ctx) {
    const std::string kind = param_text(ctx.e, "ensemble", "exponential");
    const long members = param_integer(ctx.e, "members", 10);
    if (members < 1) throw ConfigError("[experiment." + ctx.e.name + "] members must be positive");
    const double c = param_number(ctx.e, "c", ctx.config.value);
    const int terms = static_cast<int>(param_integer(ctx.e, "terms", 3));
    const bool sample = param_integer(ctx.e, "sample", 0) != 0;
    const SolverOptions so{ctx.config.tol, ctx.config.max_iterations};
    if (kind == "exponential") return exponential_ensemble(ctx.domain, c, static_cast<int>(members), ctx.config.seed, terms, sample);
    if (kind == "solved")
        return solved_ensemble(ctx.domain, ctx.V.field(), static_cast<int>(members), ctx.config.seed, so,
                               ctx.settings.workers);
    if (kind == "mixed") {
        auto e = exponential_ensemble(ctx.domain, c, static_cast<int>((members + 1) / 2), ctx.config.seed, terms, sample);
        e.append(solved_ensemble(ctx.domain, ctx.V.field(), static_cast<int>(members / 2), ctx.config.seed, so,
                                 ctx.settings.workers));
        return e;
    }
    throw ConfigError("[experiment." + ctx.e.name + "] unknown ensemble '" + kind + "'");
}

Table members_table(const Ensemble& e) {
    Table t;
    t.name = "members";
    t.columns = {"id", "provenance", "name", "residual"};
    for (const auto& m : e.members)
        t.add({static_cast<double>(m.id), std::string(provenance_name(m.provenance)), m.name, m.residual});
    return t;
}

void run_solve(const Context& ctx, ExperimentOutput& out) {
    const std::string boundary = param_text(ctx.e, "boundary", "exp");
    DiscreteProblem p;
    p.domain = ctx.domain;
    p.V = ctx.V.field();
    if (ctx.config.drift == "constant") p.W = VectorField::constant(ctx.config.drift_value);
    ScalarField exact;
    bool has_exact = false;
    if (boundary == "exp") {
        const Vec a = param_vec(ctx.e, "direction", {1.0, 0.0, 0.0});
        p.boundary = exp_field(a);
        // e^{a.x} solves the continuum problem exactly for constant V = |a|^2 without drift.
        has_exact = ctx.config.potential == "constant" && ctx.config.drift == "none" &&
                    std::abs(ctx.config.value - dot(a, a)) <= 1e-12 * std::max(1.0, dot(a, a));
        exact = p.boundary;
    } else if (boundary == "random") {
        p.boundary = random_boundary_data(ctx.config.seed, static_cast<int>(param_integer(ctx.e, "index", 0)));
    } else {
        throw ConfigError("[experiment." + ctx.e.name + "] boundary must be exp or random");
    }
    const auto sol = solve_dirichlet(p, {ctx.config.tol, ctx.config.max_iterations});
    out.reports.push_back(
        InequalityReport::from_values("solve.residual", "explicit", sol.residual_norm, ctx.config.tol)
            .with("iterations", static_cast<double>(sol.iterations))
            .with("bicgstab", sol.bicgstab ? 1.0 : 0.0));
    Table t;
    t.name = "solve";
    t.columns = {"iterations", "relative_residual", "max_nodal_error", "h"};
    double err = std::nan("");
    if (has_exact) {
        err = 0.0;
        for (std::size_t i = 0; i < ctx.domain->node_count(); ++i)
            if (ctx.domain->node_in_closure(i)) {
                const Vec x = ctx.domain->node(i);
                err = std::max(err, std::abs(sol.u(x) - exact(x)));
            }
    }
    t.add({static_cast<double>(sol.iterations), sol.residual_norm, err, ctx.domain->spacing()});
    out.tables.push_back(t);
}

void run_constants(const Context& ctx, ExperimentOutput& out) {
    const double r = param_number(ctx.e, "r", 0.05);
    const double kappa_w = param_number(ctx.e, "kappa_w", 0.0);
    const auto table = constant_table(3, ctx.config.s, ctx.config.m, ctx.config.sigma, ctx.config.universal,
                                      ctx.V.kappa(), kappa_w, ctx.domain->cube_extent(),
                                      connectivity_radius(*ctx.domain), r);
    Table t;
    t.name = "constants";
    t.columns = {"kind", "name", "value", "formula"};
    for (const auto& in : table.inputs()) t.add({std::string("input"), in.name, in.value, in.formula});
    for (const auto& en : table.entries()) t.add({std::string("derived"), en.name, en.value, en.formula});
    out.tables.push_back(t);
}

void run_three_ball(const Context& ctx, ExperimentOutput& out) {
    const Vec x0 = param_vec(ctx.e, "center", ctx.middle);
    const double r = param_number(ctx.e, "r", 0.1);
    const std::string regime = param_text(ctx.e, "regime", "critical");
    if (regime != "critical" && regime != "configured")
        throw ConfigError("[experiment." + ctx.e.name + "] regime must be critical or configured");
    const auto e = build_ensemble(ctx);
    out.tables.push_back(members_table(e));
    if (ctx.mode == Mode::Fit) {
        const auto f = three_ball_fit(e, x0, r, ctx.settings);
        out.reports.push_back(f.report);
        Table t;
        t.name = "three_ball_fit";
        t.columns = {"id", "log_inner_over_outer", "log_middle_over_outer"};
        for (std::size_t i = 0; i < f.x.size(); ++i) t.add({static_cast<double>(f.ids[i]), f.x[i], f.y[i]});
        out.tables.push_back(t);
        return;
    }
    const auto reg = regime == "critical" ? ThreeBallRegime::Critical : ThreeBallRegime::Configured;
    const auto reps = parallel_map<InequalityReport>(
        e.size(),
        [&](std::size_t i) {
            VerifierSettings one = ctx.settings;
            one.workers = 1;
            auto rep = three_ball(e.members[i].u, Potential(e.members[i].V, ctx.domain, ctx.config.s), x0, r, reg, one);
            return rep.with("member", e.members[i].id);
        },
        ctx.settings.workers);
    out.reports.insert(out.reports.end(), reps.begin(), reps.end());
}

CaccioppoliForm parse_form(const Context& ctx) {
    const std::string f = param_text(ctx.e, "form", "critical");
    if (f == "critical") return CaccioppoliForm::Critical;
    if (f == "lebesgue") return CaccioppoliForm::Lebesgue;
    if (f == "bounded") return CaccioppoliForm::Bounded;
    throw ConfigError("[experiment." + ctx.e.name + "] form must be critical, lebesgue or bounded");
}

void run_caccioppoli(const Context& ctx, ExperimentOutput& out) {
    const Vec c = param_vec(ctx.e, "center", ctx.middle);
    const Ball w0{3, c, param_number(ctx.e, "inner", 0.1)}, w1{3, c, param_number(ctx.e, "outer", 0.3)};
    const auto form = parse_form(ctx);
    const auto e = build_ensemble(ctx);
    out.tables.push_back(members_table(e));
    if (ctx.mode == Mode::Fit) {
        out.reports.push_back(caccioppoli_fit(e, w0, w1, form, ctx.config.s, ctx.settings));
        return;
    }
    const auto reps = parallel_map<InequalityReport>(
        e.size(),
        [&](std::size_t i) {
            VerifierSettings one = ctx.settings;
            one.workers = 1;
            auto rep = caccioppoli(e.members[i].u, Potential(e.members[i].V, ctx.domain, ctx.config.s), w0, w1, form, one);
            return rep.with("member", e.members[i].id);
        },
        ctx.settings.workers);
    out.reports.insert(out.reports.end(), reps.begin(), reps.end());
}

void run_doubling(const Context& ctx, ExperimentOutput& out) {
    const Vec x0 = param_vec(ctx.e, "center", ctx.middle);
    const double r = param_number(ctx.e, "r", 0.1);
    const auto rhos = param_list(ctx.e, "rhos", {r / 16.0, r / 32.0, r / 64.0});
    const auto res = doubling(build_field(ctx, x0), ctx.V, x0, r, rhos, ctx.settings);
    out.reports = res.reports;
    out.tables.push_back(res.margins);
    out.plots.push_back({"rho", {"margin"}, PlotScale::LogLog, res.margins.name});
}

void run_frequency(const Context& ctx, ExperimentOutput& out) {
    const Vec x0 = param_vec(ctx.e, "center", ctx.middle);
    const double r_min = param_number(ctx.e, "r_min", 0.02), r_max = param_number(ctx.e, "r_max", 0.3);
    const double ratio = param_number(ctx.e, "ratio", 1.05);
    if (!(r_min > 0.0 && r_max > r_min && ratio > 1.0))
        throw ConfigError("[experiment." + ctx.e.name + "] needs 0 < r_min < r_max and ratio > 1");
    FrequencyOptions fo;
    fo.rho = param_number(ctx.e, "rho", r_max);
    fo.spec = ctx.settings.spec;
    fo.workers = ctx.settings.workers;
    const auto p = frequency_profile(build_field(ctx, x0), ctx.V.field(), 3, x0, geometric_grid(r_min, r_max, ratio), fo);
    for (auto& rep : check_identities(p)) out.reports.push_back(rep);
    for (auto& rep : frequency_bound(p)) out.reports.push_back(rep);
    if (p.r_kappa / 2.0 > p.r.front()) out.reports.push_back(doubling_from_frequency(p));
    auto t = p.table();
    t.name = "profile";
    out.tables.push_back(t);
    out.plots.push_back({"r", {"N"}, PlotScale::SemilogX, "profile"});
}

void run_vanishing(const Context& ctx, ExperimentOutput& out) {
    const Vec x0 = param_vec(ctx.e, "center", ctx.middle);
    VanishingOptions o;
    o.r_min = param_number(ctx.e, "r_min", 1e-3);
    const auto res = vanishing_order(build_field(ctx, x0), ctx.V, x0, o, ctx.settings);
    out.reports = res.reports;
    Table fit;
    fit.name = "slope";
    fit.columns = {"r", "log_norm"};
    for (std::size_t i = 0; i < res.r.size(); ++i) fit.add({res.r[i], res.log_norm[i]});
    out.tables.push_back(fit);
    out.tables.push_back(res.envelope);
    out.plots.push_back({"r", {"log_norm", "log_envelope"}, PlotScale::SemilogX, res.envelope.name});
}

void run_global_uc(const Context& ctx, ExperimentOutput& out) {
    const Ball omega{3, param_vec(ctx.e, "omega_center", {0.3, 0.3, 0.3}), param_number(ctx.e, "omega_radius", 0.12)};
    const auto radii = param_list(ctx.e, "radii", {0.05, 0.025});
    GlobalUcOptions o;
    const std::string geo = param_text(ctx.e, "geometry", "interior_chain");
    if (geo == "cone") o.geometry = GlobalGeometry::Cone;
    else if (geo != "interior_chain") throw ConfigError("[experiment." + ctx.e.name + "] geometry must be interior_chain or cone");
    o.mode = ctx.mode;
    o.rho_bar = param_number(ctx.e, "rho_bar", 0.3);
    const auto res = global_uc(build_field(ctx, omega.center), ctx.V, omega, radii, o, ctx.settings);
    out.reports = res.reports;
    out.tables.push_back(res.tradeoff);
}

void run_cauchy(const Context& ctx, ExperimentOutput& out) {
    const int axis = static_cast<int>(param_integer(ctx.e, "axis", 0));
    if (axis < 0 || axis > 2) throw ConfigError("[experiment." + ctx.e.name + "] axis must lie in 0..2");
    const std::string side = param_text(ctx.e, "side", "low");
    if (side != "low" && side != "high") throw ConfigError("[experiment." + ctx.e.name + "] side must be low or high");
    FacePatch patch;
    patch.axis = axis;
    patch.inward = side == "low" ? 1 : -1;
    patch.face_value = side == "low" ? ctx.domain->lo()[axis] : ctx.domain->hi()[axis];
    Vec centre = ctx.middle;
    centre[axis] = patch.face_value;
    patch.centre = param_vec(ctx.e, "patch_center", centre);
    auto widths = param_list(ctx.e, "half_widths", {0.05, 0.1, 0.2});
    std::sort(widths.begin(), widths.end());
    const auto e = build_ensemble(ctx);
    out.tables.push_back(members_table(e));

    CauchyOptions o;
    o.mode = ctx.mode;
    o.lambda = param_number(ctx.e, "lambda", 1.0);
    patch.half_width = widths.front();
    // One interior ball for every patch, so the constants are comparable across sizes.
    o.omega_bar = cauchy_geometry(*ctx.domain, patch).omega_bar;
    Table summary;
    summary.name = "patches";
    summary.columns = {"half_width", "area", "log_K", "c"};
    std::vector<double> log_k;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        patch.half_width = widths[i];
        auto res = cauchy_uc(e, ctx.V, patch, o, ctx.settings);
        for (auto& rep : res.reports) out.reports.push_back(rep.with("half_width", widths[i]));
        res.sweep.name = "sweep_" + std::to_string(i);
        out.tables.push_back(res.sweep);
        out.plots.push_back({"eps", {"interior_term", "data_term"}, PlotScale::LogLog, res.sweep.name});
        summary.add({widths[i], patch.area(3), res.log_K, res.c});
        log_k.push_back(res.log_K);
    }
    if (ctx.mode == Mode::Fit)
        for (std::size_t i = 1; i < log_k.size(); ++i) {
            // Larger patches carry more data, so the fitted constant may not grow.
            auto rep = InequalityReport::from_logs("cauchy.monotone.fit", "fit", log_k[i], log_k[i - 1]);
            out.reports.push_back(rep.with("half_width", widths[i]).with("smaller_half_width", widths[i - 1]));
        }
    out.tables.push_back(summary);
}

CarlemanSpec carleman_spec(const Context& ctx) {
    CarlemanSpec s;
    const std::string norm = param_text(ctx.e, "norm", "lebesgue");
    if (norm == "lebesgue") s.norm = CarlemanNorm::Lebesgue;
    else if (norm == "square") s.norm = CarlemanNorm::Square;
    else if (norm == "singular") s.norm = CarlemanNorm::Singular;
    else throw ConfigError("[experiment." + ctx.e.name + "] norm must be lebesgue, square or singular");
    const std::string weight = param_text(ctx.e, "weight", "inverse");
    if (weight == "quadratic") s.weight = CarlemanWeight::Quadratic;
    else if (weight == "exponential") s.weight = CarlemanWeight::Exponential;
    else if (weight == "inverse") s.weight = CarlemanWeight::Inverse;
    else if (weight == "logarithmic") s.weight = CarlemanWeight::Logarithmic;
    else throw ConfigError("[experiment." + ctx.e.name + "] unknown weight '" + weight + "'");
    s.inner = param_number(ctx.e, "inner", 0.5);
    s.outer = param_number(ctx.e, "outer", 1.0);
    s.points = static_cast<int>(param_integer(ctx.e, "points", s.points));
    s.R = param_number(ctx.e, "radius", s.R);
    s.lambda = param_number(ctx.e, "lambda", s.lambda);
    s.c = param_number(ctx.e, "shift", s.c);
    return s;
}

void run_carleman(const Context& ctx, ExperimentOutput& out) {
    const auto spec = carleman_spec(ctx);
    std::vector<double> taus;
    if (ctx.e.params.count("taus")) {
        taus = param_list(ctx.e, "taus", {});
    } else {
        const double tmax = carleman_tau_max(spec);
        const double hi = param_number(ctx.e, "tau_max", tmax), lo = param_number(ctx.e, "tau_min", hi / 10.0);
        for (int k = 0; k < 5; ++k) taus.push_back(lo * std::pow(hi / lo, k / 4.0));
    }
    const double predicted = param_number(ctx.e, "predicted", carleman_predicted_power(spec.n, spec.norm));
    const double tol = param_number(ctx.e, "tolerance", spec.norm == CarlemanNorm::Square ? 0.2 : 0.15);
    const auto res = carleman_estimate(spec, taus, predicted, tol, ctx.settings.workers);
    out.reports.push_back(res.report);
    out.tables.push_back(res.table());
    out.plots.push_back({"tau", {"quotient"}, PlotScale::LogLog, "carleman"});
}

void run_cover(const Context& ctx, ExperimentOutput& out) {
    const double erosion = param_number(ctx.e, "erosion", 0.1);
    const auto eps = param_list(ctx.e, "eps", {0.25, 0.125, 0.0625});
    const auto c = cover_check(erode(ctx.domain, erosion), eps);
    out.reports = c.reports;
    Table t;
    t.name = "cover";
    t.columns = {"eps", "count", "bound"};
    for (std::size_t i = 0; i < c.eps.size(); ++i)
        t.add({c.eps[i], static_cast<double>(c.counts[i]), c.c_hat * std::pow(c.eps[i], -3.0)});
    out.tables.push_back(t);
    out.plots.push_back({"eps", {"count", "bound"}, PlotScale::LogLog, "cover"});
}

void run_chain(const Context& ctx, ExperimentOutput& out) {
    const auto& d = *ctx.domain;
    const Vec x = param_vec(ctx.e, "from", d.lo() + 0.2 * (d.hi() - d.lo()));
    const Vec y = param_vec(ctx.e, "to", d.lo() + 0.8 * (d.hi() - d.lo()));
    const double r = param_number(ctx.e, "r", 0.05);
    const double frak_r = connectivity_radius(d);
    const double alpha = ctx.config.universal.alpha;
    for (auto& rep : chain_accounting(d, x, y, r, alpha, frak_r)) out.reports.push_back(rep);
    const auto pc = path_chain_plan(d, x, y, r);
    const Potential* V = ctx.mode == Mode::Explicit ? &ctx.V : nullptr;
    const auto prop = propagate_smallness(build_field(ctx, x), ctx.domain, pc.plan, r, ctx.mode, V, ctx.settings);
    out.reports.insert(out.reports.end(), prop.reports.begin(), prop.reports.end());
    out.tables.push_back(prop.link_table);

    const long instances = param_integer(ctx.e, "instances", 0);
    if (instances <= 0) return;
    // Random endpoints in the 4r-erosion at random admissible radii.
    std::mt19937_64 rng(ctx.config.seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    long failures = 0;
    for (long i = 0; i < instances; ++i) {
        const double ri = frak_r / 4.0 * (0.2 + 0.75 * U(rng));
        Vec a{}, b{};
        for (int k = 0; k < 3; ++k) {
            const double lo = d.lo()[k] + 4 * ri, hi = d.hi()[k] - 4 * ri;
            a[k] = lo + (hi - lo) * U(rng);
            b[k] = lo + (hi - lo) * U(rng);
        }
        for (const auto& rep : chain_accounting(d, a, b, ri, alpha, frak_r)) failures += rep.pass ? 0 : 1;
    }
    auto rep = InequalityReport::from_values("chain.random_accounting", "explicit", static_cast<double>(failures), 0.0);
    out.reports.push_back(rep.with("instances", static_cast<double>(instances)));
}

json number_json(double v) {
    if (std::isfinite(v)) return v;
    return std::isnan(v) ? json("nan") : json(v > 0 ? "inf" : "-inf");
}

json report_json(const InequalityReport& r) {
    json j;
    j["id"] = r.id;
    j["mode"] = r.mode;
    j["lhs"] = number_json(r.lhs);
    j["rhs"] = number_json(r.rhs);
    j["log_lhs"] = number_json(r.log_lhs);
    j["log_rhs"] = number_json(r.log_rhs);
    j["margin"] = number_json(r.margin);
    j["pass"] = r.pass;
    j["vacuous"] = r.vacuous;
    j["trivial"] = r.trivial;
    j["ensemble_size"] = r.ensemble_size;
    json c = json::object();
    for (const auto& [k, v] : r.constants) c[k] = number_json(v);
    j["constants"] = c;
    j["note"] = r.note;
    return j;
}

void write_atomic(const std::filesystem::path& path, const std::string& body) {
    const auto tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write '" + tmp + "'");
        f << body;
        if (!f) throw ConfigError("write failed for '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace

bool ExperimentOutput::pass() const { return error_kind.empty() && all_pass(reports); }

int error_exit_code(const std::string& kind) {
    if (kind == "not-converged" || kind == "zero-crossing" || kind == "empty-region") return 1;
    return 2;
}

ExperimentOutput run_experiment(const RunConfig& config, const ExperimentConfig& e, int workers) {
    const auto domain = build_domain(config);
    VerifierSettings settings;
    settings.universal = config.universal;
    settings.sigma = config.sigma;
    settings.spec = config.quadrature;
    settings.workers = workers;
    const Context ctx{config,   e,
                      domain,   build_potential(config, domain),
                      settings, parse_mode(config.mode),
                      0.5 * (domain->lo() + domain->hi())};
    ExperimentOutput out;
    out.name = e.name;
    out.kind = e.kind;
    static const std::map<std::string, void (*)(const Context&, ExperimentOutput&)> table{
        {"solve", run_solve},         {"constants", run_constants}, {"three-ball", run_three_ball},
        {"caccioppoli", run_caccioppoli}, {"doubling", run_doubling}, {"frequency", run_frequency},
        {"vanishing", run_vanishing}, {"global-uc", run_global_uc}, {"cauchy", run_cauchy},
        {"carleman", run_carleman},   {"cover", run_cover},         {"chain", run_chain},
    };
    const auto it = table.find(e.kind);
    if (it == table.end()) throw ConfigError("unknown experiment kind '" + e.kind + "'");
    it->second(ctx, out);
    return out;
}

RunResult run(const RunConfig& config) {
    RunResult res;
    const std::size_t count = config.experiments.size();
    const int workers = config.workers > 0 ? config.workers : default_workers();
    // Several experiments share the workers one each; a single experiment gets all of them.
    const int inner = count > 1 ? 1 : workers;
    res.experiments = parallel_map<ExperimentOutput>(
        count,
        [&](std::size_t i) {
            const auto& e = config.experiments[i];
            try {
                return run_experiment(config, e, inner);
            } catch (const Error& err) {
                ExperimentOutput out;
                out.name = e.name;
                out.kind = e.kind;
                out.error_kind = err.kind();
                out.error = err.what();
                return out;
            }
        },
        count > 1 ? workers : 1);

    int code = 0;
    for (const auto& x : res.experiments) {
        if (!x.error_kind.empty()) code = std::max(code, error_exit_code(x.error_kind));
        else if (!all_pass(x.reports)) code = std::max(code, 1);
    }
    res.exit_code = code;

    std::ostringstream csv;
    csv << "experiment,kind," << reports_csv({});
    for (const auto& x : res.experiments) {
        const std::string body = reports_csv(x.reports);
        std::istringstream lines(body);
        std::string line;
        std::getline(lines, line);  // header
        while (std::getline(lines, line)) csv << csv_quote(x.name) << ',' << x.kind << ',' << line << '\n';
    }
    res.report_csv = csv.str();

    json doc;
    doc["config"] = serialize_config(config, false);
    doc["exit_code"] = code;
    json exps = json::array();
    for (const auto& x : res.experiments) {
        json j;
        j["name"] = x.name;
        j["kind"] = x.kind;
        j["status"] = !x.error_kind.empty() ? "error" : (all_pass(x.reports) ? "pass" : "fail");
        if (!x.error_kind.empty()) j["error"] = {{"kind", x.error_kind}, {"message", x.error}};
        json reps = json::array();
        for (const auto& r : x.reports) reps.push_back(report_json(r));
        j["reports"] = reps;
        json tables = json::array();
        for (const auto& t : x.tables) tables.push_back(x.name + "." + t.name + ".csv");
        j["tables"] = tables;
        exps.push_back(j);
    }
    doc["experiments"] = exps;
    res.report_json = doc.dump(2) + "\n";
    return res;
}

void write_run(const RunResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    const fs::path dir(out_dir);
    for (const auto& x : result.experiments) {
        for (const auto& t : x.tables) write_atomic(dir / (x.name + "." + t.name + ".csv"), table_csv(t));
        for (const auto& p : x.plots) {
            const auto t = std::find_if(x.tables.begin(), x.tables.end(), [&](const Table& t) { return t.name == p.title; });
            if (t == x.tables.end()) continue;
            try {
                write_atomic(dir / (x.name + "." + t->name + ".svg"), svg_plot(*t, p));
            } catch (const EmptyRegion&) {
                // Nothing finite to draw; the CSV still records the table.
            }
        }
    }
    write_atomic(dir / "report.csv", result.report_csv);
    write_atomic(dir / "report.json", result.report_json);
}

}  // namespace qucl
