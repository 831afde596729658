#include "qucl/constants.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace qucl {

namespace {

std::string exact(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double parse_exact(const std::string& s) {
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(s);
}

void require_class(bool ok, const std::string& what) {
    if (!ok) throw ClassViolation(what);
}

}  // namespace

void ConstantTable::input(const std::string& name, double value) { inputs_.push_back({name, value, "input"}); }

void ConstantTable::set(const std::string& name, double value, const std::string& formula) {
    for (auto& e : entries_)
        if (e.name == name) {
            e.value = value;
            e.formula = formula;
            return;
        }
    entries_.push_back({name, value, formula});
}

double ConstantTable::get(const std::string& name) const {
    for (const auto* list : {&entries_, &inputs_})
        for (const auto& e : *list)
            if (e.name == name) return e.value;
    throw InvalidArgument("no constant named " + name);
}

bool ConstantTable::has(const std::string& name) const {
    for (const auto* list : {&entries_, &inputs_})
        for (const auto& e : *list)
            if (e.name == name) return true;
    return false;
}

std::map<std::string, double> ConstantTable::values() const {
    std::map<std::string, double> out;
    for (const auto& e : inputs_) out[e.name] = e.value;
    for (const auto& e : entries_) out[e.name] = e.value;
    return out;
}

std::string ConstantTable::serialize() const {
    std::ostringstream os;
    for (const auto& e : inputs_) os << "input " << e.name << " = " << exact(e.value) << "\n";
    for (const auto& e : entries_) os << "value " << e.name << " = " << exact(e.value) << " ; " << e.formula << "\n";
    return os.str();
}

ConstantTable ConstantTable::parse(const std::string& text) {
    ConstantTable t;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string kind, name, eq, value;
        ls >> kind >> name >> eq >> value;
        if (eq != "=") throw InvalidArgument("malformed constant line: " + line);
        if (kind == "input") {
            t.input(name, parse_exact(value));
        } else if (kind == "value") {
            const auto semi = line.find(" ; ");
            t.set(name, parse_exact(value), semi == std::string::npos ? "" : line.substr(semi + 3));
        } else {
            throw InvalidArgument("malformed constant line: " + line);
        }
    }
    return t;
}

bool ConstantTable::operator==(const ConstantTable& o) const { return serialize() == o.serialize(); }

double talenti_constant(int n) {
    require(n >= 3, "the Sobolev constant needs n >= 3");
    return std::pow(std::tgamma(n) / std::tgamma(0.5 * n), 1.0 / n) / std::sqrt(kPi * n * (n - 2.0));
}

double explicit_three_ball_alpha() { return (std::log(18.0) - std::log(16.0)) / (std::log(18.0) - std::log(5.0)); }

double gamma_exponent(int n, double s) {
    require(s > 0.5 * n, "gamma needs s > n/2");
    if (std::isinf(s)) return 1.0;
    return 8.0 * n * s / ((3.0 * n + 2.0) * (2.0 * s - n));
}

Exponents exponents(int n, double s, double m) {
    require(n >= 3, "exponents need n >= 3");
    require(s > 0.5 * n, "potential exponent must exceed n/2");
    require(m > n, "drift exponent must exceed n");
    Exponents e;
    e.n = n;
    e.s = s;
    e.m = m;
    e.p = holder_exponent(n);
    e.p_prime = sobolev_exponent(n);
    e.gamma = gamma_exponent(n, s);
    e.iota = std::isinf(s) ? 1.0 : s / (2.0 * s - n);
    if (std::isinf(s))
        e.gamma_s = 2.0 / 3.0;
    else if (s >= n)
        e.gamma_s = 4.0 * s / (3.0 * (2.0 * s - n) + 2.0);
    else
        e.gamma_s = 4.0 * n * s / ((3.0 * n + 2.0) * (2.0 * s - n));
    e.delta_m = std::isinf(m) ? 2.0 : 2.0 * m / (m - n);
    const double mm = std::min(m, 2.0 * s);
    e.ell = std::isinf(mm) ? kInf : mm / n - 1.0;
    e.delta = std::isinf(e.ell) ? 0.0 : (3.0 * n - 2.0) / (4.0 * n * (e.ell + 1.0));
    e.beta = 1.0 / (0.5 - e.delta);
    e.ell_m = std::isinf(m) ? 2.0 : m * e.beta / n;
    e.k_s = std::isinf(s) ? 2.0 / 3.0 : 2.0 * s * e.beta / n;
    e.drift_margin = mm - (1.5 * n - 1.0);
    e.drift_class = e.drift_margin > 0.0;
    return e;
}

CaccioppoliConstants caccioppoli_constants(double sigma, double kappa) {
    require(sigma > 0.0 && kappa >= 0.0, "sigma must be positive and kappa nonnegative");
    require_class(2.0 * sigma * sigma * kappa < 1.0, "2 sigma^2 kappa_V >= 1");
    CaccioppoliConstants c;
    c.I = 1.0 / std::sqrt(1.0 - 2.0 * sigma * sigma * kappa);
    c.kappa0 = std::sqrt(2.0) * (1.0 + sigma) * c.I * c.I;
    c.kappa1 = 2.0 * (1.0 + sigma) * c.I * c.I + 2.0 * sigma * std::sqrt(kappa) * c.I + sigma / std::sqrt(1.0 + sigma * sigma);
    return c;
}

SingularConstants singular_constants(double vartheta, double sigma, double kappa, double k, double r0) {
    require(vartheta > 0.0 && k > 0.0, "vartheta and k must be positive");
    require_class(vartheta * kappa < 1.0, "vartheta kappa_V >= 1");
    const auto cc = caccioppoli_constants(sigma, kappa);
    SingularConstants s;
    s.alpha = explicit_three_ball_alpha();
    s.theta_V = vartheta / (1.0 - vartheta * kappa);
    s.q_raw = k * s.theta_V * (1.0 + cc.kappa1);
    const double kk = std::max(k, 1.0), th = std::max(vartheta, 1.0);
    s.q_V = kk * (th / (1.0 - vartheta * kappa)) * (1.0 + cc.kappa1);
    s.clamped = s.q_V != s.q_raw;
    s.frak_q = std::pow(s.q_V, 1.0 / (1.0 - s.alpha));
    s.lambda_V = std::log(r0 / s.q_V) / std::log(16.0 / 5.0);
    return s;
}

double log_phi_s(double c1, double kappa, int n, double s) { return c1 * std::pow(kappa, gamma_exponent(n, s)); }

double log_phi_ms(double c1, double kappa_V, double kappa_W, int n, double s, double m) {
    const auto e = exponents(n, s, m);
    return c1 * (std::pow(kappa_W, e.ell_m) + std::pow(kappa_V, e.k_s));
}

double log_phi_drift_three_ball(double c1, double kappa_V, double kappa_W, int n, double s, double m) {
    const auto e = exponents(n, s, m);
    return c1 * (std::pow(kappa_W, e.delta_m) + std::pow(kappa_V, e.gamma_s));
}

double aleph(double kappa_V, double kappa_W, int n, double s, double m) {
    const double w = std::isinf(m) ? kappa_W : std::pow(kappa_W, m / (m - n));
    const double v = std::isinf(s) ? std::sqrt(kappa_V) : std::pow(kappa_V, s / (2.0 * s - n));
    return 1.0 + w + v;
}

double frak_h(int n, double cube_extent, double frak_r, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1)");
    return std::pow(2.0, n - 1) * std::abs(std::log(alpha)) *
           (std::pow(frak_r / 4.0, n) + std::pow(cube_extent * std::sqrt(static_cast<double>(n)), n));
}

ChainConstants chain_constants(int n, double cube_extent, double frak_r, double alpha, double r) {
    require(r > 0.0 && r < frak_r / 4.0, "chain radius must satisfy 0 < r < frak_r/4");
    ChainConstants c;
    const long long k = static_cast<long long>(std::floor(cube_extent * std::sqrt(static_cast<double>(n)) / r)) + 1;
    c.m_r = 1;
    for (int i = 0; i < n; ++i) c.m_r *= k;
    c.frak_h = frak_h(n, cube_extent, frak_r, alpha);
    c.frak_h_bar = c.frak_h + 1.0;
    c.varsigma = std::abs(std::log(alpha)) / std::log(2.0);
    const double rn = std::pow(r, -n);
    c.log_eta = -c.frak_h * rn;
    c.log_varrho = c.frak_h_bar * rn;
    c.log_tau = -(std::log(alpha) + c.varsigma * std::log(r) + c.log_eta);
    c.eta = std::exp(c.log_eta);
    c.varrho = std::exp(c.log_varrho);
    const double P = alpha * std::pow(r, c.varsigma) * c.eta;
    c.tau = 1.0 / P;
    c.identity_defect = (c.log_tau + std::log(alpha) + c.varsigma * std::log(r) + c.log_eta) /
                        std::max(1.0, std::abs(c.log_tau));
    return c;
}

namespace {

DoublingConstants finish_doubling(int n, double kappa_term, double k, double r, double norm_ratio) {
    require(r > 0.0, "doubling radius must be positive");
    if (!(norm_ratio < kInf) || norm_ratio < 0.0)
        throw ZeroCrossing("inner annulus norm vanishes; the solution is numerically zero there");
    DoublingConstants d;
    d.kappa_term = kappa_term;
    d.lambda_tilde = std::log1p(4.0 / r * k * kappa_term * norm_ratio) / std::log(9.0 / 4.0);
    d.lambda_bar = 2.0 + std::max(d.lambda_tilde + 1.0, 8.5 + 0.5 * (n - 2.0));
    d.M = k * kappa_term * d.lambda_bar * d.lambda_bar;
    return d;
}

}  // namespace

DoublingConstants doubling_constants_critical(int n, double vartheta, double sigma, double k, double kappa, double r,
                                              double norm_ratio) {
    require_class(vartheta * kappa < 1.0, "vartheta kappa_V >= 1");
    const auto cc = caccioppoli_constants(sigma, kappa);
    const double theta_V = vartheta / (1.0 - vartheta * kappa);
    auto d = finish_doubling(n, theta_V * (1.0 + cc.kappa1), k, r, norm_ratio);
    d.theta_V = theta_V;
    return d;
}

DoublingConstants doubling_constants_s(int n, double s, double vartheta, double k, double kappa_tilde, double kappa_s,
                                       double r, double norm_ratio) {
    require(s > 0.5 * n, "regime needs s > n/2");
    require_class(vartheta * kappa_tilde < 1.0, "vartheta ||V||_{n/2} >= 1");
    const double iota = std::isinf(s) ? 1.0 : s / (2.0 * s - n);
    const double theta_t = vartheta / (1.0 - vartheta * kappa_tilde);
    auto d = finish_doubling(n, theta_t * (1.0 + std::pow(kappa_s, iota)), k, r, norm_ratio);
    // The supercritical prefactor drops the Carleman factor: M_s = k (1 + kappa^iota) lambda_bar^2.
    d.M = k * (1.0 + std::pow(kappa_s, iota)) * d.lambda_bar * d.lambda_bar;
    d.theta_V = theta_t;
    return d;
}

double vanishing_r_hat(double r_bar, double r_star) { return std::min(r_bar / 16.0, r_star); }

VanishingConstants vanishing_constants(const VanishingInputs& in) {
    require(in.norm_omega0 > 0.0, "the norm on Omega_0 must be positive");
    VanishingConstants v;
    v.rho0 = in.dist_omega0 / 7.0;
    v.d0 = in.dist_x0 / 3.0;
    v.r_star = std::min({in.frak_r / 4.0, v.rho0, v.d0});
    v.r_hat = vanishing_r_hat(in.r_bar, v.r_star);
    const double rh2 = 0.5 * v.r_hat;
    const auto chain = chain_constants(in.n, in.cube_extent, in.frak_r, in.alpha, rh2);
    const double varsigma = chain.varsigma;
    const double inner = std::abs(std::log(in.c_tilde) - in.log_phi + std::log(in.norm_omega0));
    // ln M = -tau rho0^varsigma |ln(...)|, with tau kept in the log domain.
    const double log_mag = chain.log_tau + varsigma * std::log(v.rho0) + std::log(inner);
    v.log_frak_M = inner == 0.0 ? 0.0 : -std::exp(log_mag);
    v.lambda_hat = in.lambda_bar * (1.0 + std::log(rh2) / std::log(2.0)) + std::log(in.M) / std::log(2.0);
    v.lambda_dot = in.lambda_bar / std::log(2.0);
    v.log_frak_N = -(1.0 + std::log(rh2) / std::log(2.0)) * std::log(in.M) + v.log_frak_M;
    return v;
}

double vanishing_envelope_log(const VanishingConstants& c, double r) {
    const double lr = std::log(r);
    return c.log_frak_N + c.lambda_hat * lr - c.lambda_dot * lr * lr;
}

double stability_psi_right(double x, const ProfileParams& p) {
    const double inner = std::log(p.cbar * std::log(x));
    return std::pow(p.hhat, p.t / p.n) * std::pow(inner, -p.t / p.n);
}

double stability_psi(double x, const ProfileParams& p) {
    if (!(x > 0.0)) throw InvalidArgument("stability profile needs x > 0");
    if (x <= p.a) return p.a / x;
    return stability_psi_right(x, p);
}

double stability_F(double x, const ConeProfileParams& p) {
    if (!(x > 0.0)) throw InvalidArgument("stability profile needs x > 0");
    const double u1 = p.upsilon + p.t / p.varsigma;
    if (std::log(x) <= u1) return std::exp(u1) / x;
    const double u2 = std::pow(u1, p.t / p.varsigma);
    return u2 * std::pow(std::log(x), -p.t / p.varsigma);
}

CauchyConstants cauchy_constants(int n, double rho, double r, double lambda, double kappa_V, double kappa_W, double s,
                                 bool has_drift, double chat, double c1) {
    require(rho > 0.0 && r > 0.0 && lambda > 0.0, "Cauchy construction needs rho, r, lambda > 0");
    CauchyConstants c;
    const double L = 2.0 * lambda;
    const double top = 2.0 * rho + r;
    auto ratio = [&](double den) { return std::pow(top / den, L); };
    c.a = ratio(rho + r / 4.0) - ratio(rho + r / 2.0);
    c.b = ratio(rho) - ratio(rho + r / 4.0);
    if (!has_drift && std::isinf(s))
        c.log_upsilon = chat * std::pow(kappa_V, 2.0 / 3.0);
    else
        c.log_upsilon = chat * (kappa_V * kappa_V + kappa_W * kappa_W);
    c.log_frak_F = c.log_upsilon + log_phi_ms(c1, kappa_V, kappa_W, std::max(n, 3), s, kInf);
    c.psi_floor = 2.0 * std::log(top / (rho + r));
    return c;
}

double cauchy_weight(const Vec& x, const Vec& x0, double rho, double r) {
    const double t = 2.0 * rho + r;
    return std::log(t * t / dot(x - x0, x - x0));
}

double lambda_grid_neighbor(int n, double lambda) {
    const double base = 0.5 * (n - 1);
    const double k = std::max(std::round(lambda - base), -1.0);
    return base + k;
}

std::vector<double> lambda_grid(int n, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(0.5 * (n - 1) + k);
    return out;
}

ConstantTable constant_table(int n, double s, double m, double sigma, const UniversalConstants& u, double kappa_V,
                             double kappa_W, double cube_extent, double frak_r, double r) {
    ConstantTable t;
    t.input("n", n);
    t.input("s", s);
    t.input("m", m);
    t.input("sigma", sigma);
    t.input("vartheta", u.vartheta);
    t.input("k", u.k);
    t.input("kappa_V", kappa_V);
    t.input("kappa_W", kappa_W);
    t.input("D", cube_extent);
    t.input("frak_r", frak_r);
    t.input("alpha", u.alpha);
    t.input("frak_t", u.frak_t);
    t.input("r", r);

    const auto e = exponents(n, s, m);
    t.set("p", e.p, "2n/(n+2)");
    t.set("p_prime", e.p_prime, "2n/(n-2)");
    t.set("gamma", e.gamma, "8ns/((3n+2)(2s-n)); 1 at s=inf");
    t.set("iota", e.iota, "s/(2s-n); 1 at s=inf");
    t.set("gamma_s", e.gamma_s, "4s/(3(2s-n)+2) for s>=n; 4ns/((3n+2)(2s-n)) for s<=n");
    t.set("delta_m", e.delta_m, "2m/(m-n)");
    t.set("ell", e.ell, "min(m,2s)/n-1");
    t.set("delta", e.delta, "(3n-2)/(4n(ell+1))");
    t.set("beta", e.beta, "1/(1/2-delta)");
    t.set("ell_m", e.ell_m, "m beta/n; 2 at m=inf");
    t.set("k_s", e.k_s, "2s beta/n; 2/3 at s=inf");
    t.set("drift_class_margin", e.drift_margin, "min(m,2s)-(3n/2-1)");
    t.set("aleph", aleph(kappa_V, kappa_W, n, s, m), "1+kappa_W^{m/(m-n)}+kappa_V^{s/(2s-n)}");

    if (2.0 * sigma * sigma * kappa_V < 1.0) {
        const auto cc = caccioppoli_constants(sigma, kappa_V);
        t.set("I_V", cc.I, "(1-2 sigma^2 kappa)^{-1/2}");
        t.set("kappa0_V", cc.kappa0, "sqrt2 (1+sigma) I^2");
        t.set("kappa1_V", cc.kappa1, "2(1+sigma) I^2 + 2 sigma sqrt(kappa) I + sigma/sqrt(1+sigma^2)");
        if (u.vartheta * kappa_V < 1.0) {
            const auto sc = singular_constants(u.vartheta, sigma, kappa_V, u.k);
            t.set("theta_V", sc.theta_V, "vartheta/(1-vartheta kappa)");
            t.set("q_V", sc.q_V, "max(k,1) max(vartheta,1)/(1-vartheta kappa) (1+kappa1)");
            t.set("frak_q_V", sc.frak_q, "q_V^{1/(1-alpha3)}");
            t.set("lambda_V", sc.lambda_V, "ln(r0/q_V)/ln(16/5), r0=1");
            t.set("alpha3", sc.alpha, "(ln18-ln16)/(ln18-ln5)");
        }
    }
    t.set("log_phi_s", log_phi_s(u.c1, kappa_V, n, s), "c1 kappa^gamma");
    if (r > 0.0 && r < frak_r / 4.0) {
        const auto ch = chain_constants(n, cube_extent, frak_r, u.alpha, r);
        t.set("m_r", static_cast<double>(ch.m_r), "(floor(D sqrt n/r)+1)^n");
        t.set("frak_h", ch.frak_h, "2^{n-1}|ln alpha|((frak_r/4)^n+(D sqrt n)^n)");
        t.set("frak_h_bar", ch.frak_h_bar, "frak_h+1");
        t.set("log_eta", ch.log_eta, "-frak_h r^{-n}");
        t.set("log_varrho", ch.log_varrho, "frak_h_bar r^{-n}");
        t.set("varsigma", ch.varsigma, "|ln alpha|/ln2");
        t.set("log_tau", ch.log_tau, "-ln alpha - varsigma ln r - ln eta");
    }
    return t;
}

}  // namespace qucl
