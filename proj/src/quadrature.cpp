#include "qucl/quadrature.hpp"

#include <algorithm>

#include "qucl/parallel.hpp"

namespace qucl {

Rule1D gauss_legendre(int order) {
    require(order >= 1, "Gauss-Legendre order must be positive");
    // Returns P_order(x) and its derivative.
    auto legendre = [order](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= order; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        const double dp = order == 1 ? 1.0 : order * (x * p1 - p0) / (x * x - 1.0);
        return std::pair{order == 1 ? x : p1, dp};
    };
    Rule1D r;
    r.x.resize(order);
    r.w.resize(order);
    for (int i = 0; i < (order + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.x[i] = -x;
        r.x[order - 1 - i] = x;
        r.w[i] = r.w[order - 1 - i] = w;
    }
    if (order % 2 == 1) r.x[order / 2] = 0.0;
    return r;
}

Rule1D gauss_legendre(int order, double a, double b) {
    Rule1D r = gauss_legendre(order);
    const double m = 0.5 * (a + b), s = 0.5 * (b - a);
    for (int i = 0; i < order; ++i) {
        r.x[i] = m + s * r.x[i];
        r.w[i] *= s;
    }
    return r;
}

namespace {

struct UnitSphere {
    std::vector<std::vector<Vec>> dirs;
    std::vector<std::vector<double>> w;
};

UnitSphere unit_sphere(int n, const QuadratureSpec& spec) {
    require(spec.azimuth >= 3, "azimuthal order too small");
    UnitSphere s;
    const int M = spec.azimuth;
    const double dphi = 2.0 * kPi / M;
    if (n == 2) {
        s.dirs.emplace_back();
        s.w.emplace_back();
        for (int j = 0; j < M; ++j) {
            const double phi = j * dphi;
            s.dirs[0].push_back({std::cos(phi), std::sin(phi), 0.0});
            s.w[0].push_back(dphi);
        }
        return s;
    }
    const Rule1D t = gauss_legendre(spec.polar);
    for (int i = 0; i < spec.polar; ++i) {
        const double ct = t.x[i], st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        std::vector<Vec> d;
        std::vector<double> w;
        for (int j = 0; j < M; ++j) {
            const double phi = (j + 0.5) * dphi;
            d.push_back({st * std::cos(phi), st * std::sin(phi), ct});
            w.push_back(t.w[i] * dphi);
        }
        s.dirs.push_back(std::move(d));
        s.w.push_back(std::move(w));
    }
    return s;
}

class SphereRule : public Rule {
public:
    SphereRule(int n, const Vec& c, double r, const QuadratureSpec& spec) : n_(n), c_(c), r_(r), s_(unit_sphere(n, spec)) {}
    std::size_t blocks() const override { return s_.dirs.size(); }
    void block(std::size_t b, std::vector<Vec>& pts, std::vector<double>& w) const override {
        const double scale = std::pow(r_, n_ - 1);
        pts.clear();
        w.clear();
        for (std::size_t j = 0; j < s_.dirs[b].size(); ++j) {
            pts.push_back(c_ + r_ * s_.dirs[b][j]);
            w.push_back(scale * s_.w[b][j]);
        }
    }

private:
    int n_;
    Vec c_;
    double r_;
    UnitSphere s_;
};

class ShellRule : public Rule {
public:
    ShellRule(int n, const Vec& c, double a, double b, const QuadratureSpec& spec)
        : n_(n), c_(c), radial_(gauss_legendre(spec.radial, a, b)), s_(unit_sphere(n, spec)) {}
    std::size_t blocks() const override { return radial_.x.size(); }
    void block(std::size_t b, std::vector<Vec>& pts, std::vector<double>& w) const override {
        const double rho = radial_.x[b];
        const double scale = std::pow(rho, n_ - 1) * radial_.w[b];
        pts.clear();
        w.clear();
        for (std::size_t i = 0; i < s_.dirs.size(); ++i)
            for (std::size_t j = 0; j < s_.dirs[i].size(); ++j) {
                pts.push_back(c_ + rho * s_.dirs[i][j]);
                w.push_back(scale * s_.w[i][j]);
            }
    }

private:
    int n_;
    Vec c_;
    Rule1D radial_;
    UnitSphere s_;
};

class BoxesRule : public Rule {
public:
    BoxesRule(int n, std::vector<Box> boxes, int order) : n_(n), boxes_(std::move(boxes)), g_(gauss_legendre(order)) {}
    std::size_t blocks() const override { return boxes_.size(); }
    void block(std::size_t b, std::vector<Vec>& pts, std::vector<double>& w) const override {
        const Box& bx = boxes_[b];
        const int q = static_cast<int>(g_.x.size());
        const int qz = n_ == 3 ? q : 1;
        pts.clear();
        w.clear();
        Vec half{}, mid{};
        for (int i = 0; i < n_; ++i) {
            half[i] = 0.5 * (bx.hi[i] - bx.lo[i]);
            mid[i] = 0.5 * (bx.hi[i] + bx.lo[i]);
        }
        for (int k = 0; k < qz; ++k)
            for (int j = 0; j < q; ++j)
                for (int i = 0; i < q; ++i) {
                    Vec x = mid;
                    x[0] += half[0] * g_.x[i];
                    x[1] += half[1] * g_.x[j];
                    double wt = half[0] * half[1] * g_.w[i] * g_.w[j];
                    if (n_ == 3) {
                        x[2] += half[2] * g_.x[k];
                        wt *= half[2] * g_.w[k];
                    }
                    pts.push_back(x);
                    w.push_back(wt);
                }
    }

private:
    int n_;
    std::vector<Box> boxes_;
    Rule1D g_;
};

/// Cells of the node grid grouped into slabs along the last axis.
class GridCellRule : public Rule {
public:
    enum class Kind { Gauss2, Midpoint };
    GridCellRule(DomainPtr d, Kind kind) : d_(std::move(d)), kind_(kind) {}
    std::size_t blocks() const override {
        const auto& dims = d_->dims();
        return static_cast<std::size_t>(d_->dim() == 3 ? dims[2] - 1 : dims[1] - 1);
    }
    void block(std::size_t b, std::vector<Vec>& pts, std::vector<double>& w) const override {
        const int n = d_->dim();
        const double h = d_->spacing();
        const auto& dims = d_->dims();
        const auto& lo = d_->lo();
        pts.clear();
        w.clear();
        const double g = 0.5 / std::sqrt(3.0);
        const int ny = n == 3 ? dims[1] - 1 : 1;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < dims[0] - 1; ++i) {
                Vec c{};
                c[0] = lo[0] + (i + 0.5) * h;
                if (n == 3) {
                    c[1] = lo[1] + (j + 0.5) * h;
                    c[2] = lo[2] + (b + 0.5) * h;
                } else {
                    c[1] = lo[1] + (b + 0.5) * h;
                }
                if (!d_->contains(c)) continue;
                if (kind_ == Kind::Midpoint) {
                    pts.push_back(c);
                    w.push_back(std::pow(h, n));
                    continue;
                }
                const double wt = std::pow(0.5 * h, n);
                for (int s = 0; s < (1 << n); ++s) {
                    Vec x = c;
                    for (int a = 0; a < n; ++a) x[a] += ((s >> a) & 1 ? g : -g) * h;
                    pts.push_back(x);
                    w.push_back(wt);
                }
            }
    }

private:
    DomainPtr d_;
    Kind kind_;
};

class MaskRule : public Rule {
public:
    explicit MaskRule(const RegionMask& m) : m_(m) {}
    std::size_t blocks() const override {
        const auto& dims = m_.domain().dims();
        return static_cast<std::size_t>(m_.domain().dim() == 3 ? dims[2] : dims[1]);
    }
    void block(std::size_t b, std::vector<Vec>& pts, std::vector<double>& w) const override {
        const Domain& d = m_.domain();
        const int n = d.dim();
        const double q = 0.25 * d.spacing();
        const double wt = std::pow(2.0 * q, n);
        const auto& dims = d.dims();
        pts.clear();
        w.clear();
        const int ny = n == 3 ? dims[1] : 1;
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < dims[0]; ++i) {
                const std::size_t idx = n == 3 ? d.index(i, j, static_cast<int>(b)) : d.index(i, static_cast<int>(b), 0);
                if (!d.node_in_closure(idx)) continue;
                const Vec x = d.node(idx);
                for (int s = 0; s < (1 << n); ++s) {
                    Vec y = x;
                    for (int a = 0; a < n; ++a) y[a] += ((s >> a) & 1) ? q : -q;
                    if (!d.contains(y)) continue;
                    const double p = m_.weight_at(y);
                    if (p > 0.0) {
                        pts.push_back(y);
                        w.push_back(wt * p);
                    }
                }
            }
    }

private:
    RegionMask m_;
};

}  // namespace

RulePtr sphere_rule(int n, const Vec& c, double r, const QuadratureSpec& spec) {
    require(n == 2 || n == 3, "dimension must be 2 or 3");
    require(r > 0.0, "sphere radius must be positive");
    return std::make_shared<SphereRule>(n, c, r, spec);
}

RulePtr shell_rule(int n, const Vec& c, double a, double b, const QuadratureSpec& spec) {
    require(n == 2 || n == 3, "dimension must be 2 or 3");
    require(a >= 0.0 && b > a, "shell needs 0 <= a < b");
    return std::make_shared<ShellRule>(n, c, a, b, spec);
}

RulePtr domain_rule(const Domain& domain, const QuadratureSpec& spec) {
    const int n = domain.dim();
    const int k = std::max(1, spec.box_split);
    std::vector<Box> pieces;
    for (const Box& cell : domain.cells()) {
        const int kz = n == 3 ? k : 1;
        for (int c = 0; c < kz; ++c)
            for (int b = 0; b < k; ++b)
                for (int a = 0; a < k; ++a) {
                    Box p = cell;
                    const std::array<int, 3> idx{a, b, c};
                    for (int i = 0; i < n; ++i) {
                        const double step = (cell.hi[i] - cell.lo[i]) / k;
                        p.lo[i] = cell.lo[i] + idx[i] * step;
                        p.hi[i] = idx[i] + 1 == k ? cell.hi[i] : cell.lo[i] + (idx[i] + 1) * step;
                    }
                    pieces.push_back(p);
                }
    }
    return std::make_shared<BoxesRule>(n, std::move(pieces), spec.box_order);
}

RulePtr grid_cell_rule(const DomainPtr& domain) { return std::make_shared<GridCellRule>(domain, GridCellRule::Kind::Gauss2); }

RulePtr cell_midpoint_rule(const DomainPtr& domain) {
    return std::make_shared<GridCellRule>(domain, GridCellRule::Kind::Midpoint);
}

RulePtr mask_rule(const RegionMask& mask) { return std::make_shared<MaskRule>(mask); }

double integrate(const Rule& rule, const std::function<double(const Vec&)>& f, int workers) {
    const auto partial = parallel_map<double>(
        rule.blocks(),
        [&](std::size_t b) {
            std::vector<Vec> pts;
            std::vector<double> w;
            rule.block(b, pts, w);
            for (std::size_t i = 0; i < pts.size(); ++i) w[i] *= f(pts[i]);
            return pairwise_sum(w);
        },
        workers);
    return pairwise_sum(partial);
}

double max_abs(const Rule& rule, const std::function<double(const Vec&)>& f, int workers) {
    const auto partial = parallel_map<double>(
        rule.blocks(),
        [&](std::size_t b) {
            std::vector<Vec> pts;
            std::vector<double> w;
            rule.block(b, pts, w);
            double m = 0.0;
            for (std::size_t i = 0; i < pts.size(); ++i)
                if (w[i] > 0.0) m = std::max(m, std::abs(f(pts[i])));
            return m;
        },
        workers);
    return partial.empty() ? 0.0 : *std::max_element(partial.begin(), partial.end());
}

double total_weight(const Rule& rule) {
    std::vector<double> partial(rule.blocks());
    std::vector<Vec> pts;
    std::vector<double> w;
    for (std::size_t b = 0; b < rule.blocks(); ++b) {
        rule.block(b, pts, w);
        partial[b] = pairwise_sum(w);
    }
    return pairwise_sum(partial);
}

}  // namespace qucl
