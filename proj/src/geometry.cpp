#include "qucl/geometry.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <unordered_map>

namespace qucl {

namespace {

bool box_contains(const Box& b, const Vec& x, int n, double tol) {
    for (int i = 0; i < n; ++i)
        if (x[i] < b.lo[i] - tol || x[i] > b.hi[i] + tol) return false;
    return true;
}

double box_distance(const Box& b, const Vec& x, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
        const double e = std::max({b.lo[i] - x[i], 0.0, x[i] - b.hi[i]});
        s += e * e;
    }
    return std::sqrt(s);
}

bool aligned(double c, double origin, double h) {
    const double q = (c - origin) / h;
    return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, std::abs(q));
}

}  // namespace

Domain::Domain(int n, std::vector<Box> boxes, double h) : n_(n), h_(h), boxes_(std::move(boxes)) {
    require(n == 2 || n == 3, "dimension must be 2 or 3");
    require(h > 0.0 && std::isfinite(h), "grid spacing must be positive");
    require(!boxes_.empty(), "domain needs at least one box");
    for (auto& b : boxes_) {
        if (n == 2) b.lo[2] = b.hi[2] = 0.0;
        for (int i = 0; i < n; ++i) require(b.hi[i] > b.lo[i], "box extents must be strictly positive");
    }
    lo_ = boxes_[0].lo;
    hi_ = boxes_[0].hi;
    for (const auto& b : boxes_)
        for (int i = 0; i < n; ++i) {
            lo_[i] = std::min(lo_[i], b.lo[i]);
            hi_[i] = std::max(hi_[i], b.hi[i]);
        }
    for (const auto& b : boxes_)
        for (int i = 0; i < n; ++i)
            require(aligned(b.lo[i], lo_[i], h) && aligned(b.hi[i], lo_[i], h), "box faces must lie on grid lines");
    for (int i = 0; i < n; ++i) {
        dims_[i] = static_cast<int>(std::lround((hi_[i] - lo_[i]) / h)) + 1;
        require(dims_[i] >= 9, "grid needs at least 9 nodes per axis");
    }

    // Breakpoint cells, sorted into covered cells and holes.
    std::array<std::vector<double>, 3> cuts;
    for (int i = 0; i < n; ++i) {
        std::set<double> s;
        for (const auto& b : boxes_) {
            s.insert(b.lo[i]);
            s.insert(b.hi[i]);
        }
        cuts[i].assign(s.begin(), s.end());
    }
    if (n == 2) cuts[2] = {0.0, 0.0};
    const std::size_t nz = n == 3 ? cuts[2].size() - 1 : 1;
    for (std::size_t a = 0; a + 1 < cuts[0].size(); ++a)
        for (std::size_t b = 0; b + 1 < cuts[1].size(); ++b)
            for (std::size_t c = 0; c < nz; ++c) {
                Box cell{{cuts[0][a], cuts[1][b], cuts[2][c]}, {cuts[0][a + 1], cuts[1][b + 1], cuts[2][c + 1]}};
                const Vec mid = 0.5 * (cell.lo + cell.hi);
                bool covered = false;
                for (const auto& bx : boxes_)
                    if (box_contains(bx, mid, n, 0.0)) covered = true;
                (covered ? cells_ : holes_).push_back(cell);
            }

    node_dist_.resize(static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2]);
    for (std::size_t idx = 0; idx < node_dist_.size(); ++idx) {
        const Vec x = node(idx);
        node_dist_[idx] = contains(x) ? distance_to_complement(x) : -1.0;
    }
}

Domain Domain::box(int n, const Vec& lengths, double h, const Vec& origin) {
    Vec hi = origin + lengths;
    return Domain(n, {Box{origin, hi}}, h);
}

std::array<int, 3> Domain::ijk(std::size_t idx) const {
    const int i = static_cast<int>(idx % dims_[0]);
    idx /= dims_[0];
    const int j = static_cast<int>(idx % dims_[1]);
    return {i, j, static_cast<int>(idx / dims_[1])};
}

Vec Domain::node(std::size_t idx) const {
    const auto c = ijk(idx);
    Vec x{};
    for (int i = 0; i < n_; ++i) x[i] = lo_[i] + c[i] * h_;
    return x;
}

bool Domain::contains(const Vec& x) const {
    for (const auto& b : boxes_) {
        const double tol = 1e-12 * (1.0 + std::abs(x[0]) + std::abs(x[1]) + std::abs(x[2]));
        if (box_contains(b, x, n_, tol)) return true;
    }
    return false;
}

double Domain::distance_to_complement(const Vec& x) const {
    if (!contains(x)) return 0.0;
    double d = kInf;
    for (int i = 0; i < n_; ++i) d = std::min({d, x[i] - lo_[i], hi_[i] - x[i]});
    for (const auto& hole : holes_) d = std::min(d, box_distance(hole, x, n_));
    return std::max(d, 0.0);
}

double Domain::max_node_distance() const { return *std::max_element(node_dist_.begin(), node_dist_.end()); }

double Domain::cube_extent() const {
    double e = 0.0;
    for (int i = 0; i < n_; ++i) e = std::max(e, hi_[i] - lo_[i]);
    return e;
}

double Domain::min_extent() const {
    double e = kInf;
    for (int i = 0; i < n_; ++i) e = std::min(e, hi_[i] - lo_[i]);
    return e;
}

double Domain::volume() const {
    double v = 1.0;
    for (int i = 0; i < n_; ++i) v *= hi_[i] - lo_[i];
    for (const auto& hole : holes_) {
        double w = 1.0;
        for (int i = 0; i < n_; ++i) w *= hole.hi[i] - hole.lo[i];
        v -= w;
    }
    return v;
}

RegionMask::RegionMask(DomainPtr domain, MaskKind kind, std::function<double(const Vec&)> predicate)
    : domain_(std::move(domain)), kind_(kind), predicate_(std::move(predicate)) {
    const std::size_t N = domain_->node_count();
    member_.assign(N, 0);
    level_.assign(N, 0);
    for (std::size_t idx = 0; idx < N; ++idx) {
        if (!domain_->node_in_closure(idx)) continue;
        const double w = predicate_(domain_->node(idx));
        member_[idx] = w == 1.0;
        level_[idx] = w == 0.5;
    }
}

std::size_t RegionMask::count() const { return static_cast<std::size_t>(std::count(member_.begin(), member_.end(), 1)); }

std::vector<std::size_t> RegionMask::indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < member_.size(); ++i)
        if (member_[i]) out.push_back(i);
    return out;
}

std::vector<std::size_t> RegionMask::level_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < level_.size(); ++i)
        if (level_[i]) out.push_back(i);
    return out;
}

namespace {

bool flood_connected(const Domain& d, const std::vector<std::uint8_t>& in) {
    const auto first = std::find(in.begin(), in.end(), 1);
    if (first == in.end()) return false;
    std::vector<std::uint8_t> seen(in.size(), 0);
    std::vector<std::size_t> stack{static_cast<std::size_t>(first - in.begin())};
    seen[stack.back()] = 1;
    std::size_t reached = 1;
    const auto& dims = d.dims();
    while (!stack.empty()) {
        const std::size_t idx = stack.back();
        stack.pop_back();
        const auto c = d.ijk(idx);
        for (int axis = 0; axis < d.dim(); ++axis)
            for (int step : {-1, 1}) {
                auto nb = c;
                nb[axis] += step;
                if (nb[axis] < 0 || nb[axis] >= dims[axis]) continue;
                const std::size_t j = d.index(nb[0], nb[1], nb[2]);
                if (in[j] && !seen[j]) {
                    seen[j] = 1;
                    ++reached;
                    stack.push_back(j);
                }
            }
    }
    return reached == static_cast<std::size_t>(std::count(in.begin(), in.end(), 1));
}

}  // namespace

bool RegionMask::connected() const { return flood_connected(*domain_, member_); }

double RegionMask::measure() const {
    const Domain& d = *domain_;
    const int n = d.dim();
    const double q = 0.25 * d.spacing();
    const int corners = 1 << n;
    std::vector<double> per_node;
    per_node.reserve(d.node_count());
    for (std::size_t idx = 0; idx < d.node_count(); ++idx) {
        if (!d.node_in_closure(idx)) continue;
        const Vec x = d.node(idx);
        double s = 0.0;
        for (int c = 0; c < corners; ++c) {
            Vec y = x;
            for (int i = 0; i < n; ++i) y[i] += (c >> i & 1) ? q : -q;
            if (d.contains(y)) s += predicate_(y);
        }
        if (s != 0.0) per_node.push_back(s);
    }
    return pairwise_sum(per_node) * std::pow(2.0 * q, n);
}

RegionMask erode(const DomainPtr& domain, double r) {
    require(r > 0.0, "erosion radius must be positive");
    const double tol = 1e-9 * domain->spacing();
    const Domain* d = domain.get();
    RegionMask m(domain, MaskKind::Erosion, [d, r, tol](const Vec& x) {
        if (!d->contains(x)) return 0.0;
        const double dist = d->distance_to_complement(x);
        if (dist > r + tol) return 1.0;
        return std::abs(dist - r) <= tol ? 0.5 : 0.0;
    });
    if (m.empty()) throw EmptyRegion("erosion at r = " + std::to_string(r) + " has no nodes");
    m.radius = r;
    return m;
}

RegionMask collar(const DomainPtr& domain, double r) {
    require(r > 0.0, "collar width must be positive");
    const double tol = 1e-9 * domain->spacing();
    const Domain* d = domain.get();
    RegionMask m(domain, MaskKind::Collar, [d, r, tol](const Vec& x) {
        if (!d->contains(x)) return 0.0;
        const double dist = d->distance_to_complement(x);
        if (dist < r - tol) return 1.0;
        return std::abs(dist - r) <= tol ? 0.5 : 0.0;
    });
    m.radius = r;
    return m;
}

RegionMask ball_mask(const DomainPtr& domain, const Vec& center, double radius) {
    require(radius > 0.0, "ball radius must be positive");
    const Domain* d = domain.get();
    RegionMask m(domain, MaskKind::Ball, [d, center, radius](const Vec& x) {
        return d->contains(x) && distance(x, center) < radius ? 1.0 : 0.0;
    });
    m.center = center;
    m.radius = radius;
    m.outer = radius;
    return m;
}

RegionMask annulus_mask(const DomainPtr& domain, const Vec& center, double inner, double outer) {
    require(inner >= 0.0 && outer > inner, "annulus needs 0 <= inner < outer");
    const Domain* d = domain.get();
    RegionMask m(domain, MaskKind::Annulus, [d, center, inner, outer](const Vec& x) {
        const double t = distance(x, center);
        return d->contains(x) && t > inner && t < outer ? 1.0 : 0.0;
    });
    m.center = center;
    m.inner = inner;
    m.outer = outer;
    return m;
}

double connectivity_radius(const Domain& domain) {
    const std::size_t N = domain.node_count();
    std::vector<std::uint8_t> in(N);
    auto ok = [&](double r) {
        for (std::size_t i = 0; i < N; ++i) in[i] = domain.node_distance(i) > r;
        return flood_connected(domain, in);
    };
    double lo = 0.5 * domain.spacing();
    if (!ok(lo)) throw GeometryInfeasible("node erosion is disconnected already at half a grid cell");
    double hi = std::min(1.0, domain.max_node_distance());
    if (ok(hi)) return hi;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

namespace {

struct CellKey {
    long long i, j, k;
    bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
    std::size_t operator()(const CellKey& c) const {
        std::size_t h = std::hash<long long>{}(c.i);
        h ^= std::hash<long long>{}(c.j) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h ^= std::hash<long long>{}(c.k) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        return h;
    }
};

class SpatialHash {
public:
    explicit SpatialHash(double cell) : cell_(cell) {}

    void insert(const Vec& x, std::size_t id) { buckets_[key(x)].push_back(id); }

    template <class F>
    bool any_within(const Vec& x, F&& pred) const {
        const CellKey c = key(x);
        for (long long a = -1; a <= 1; ++a)
            for (long long b = -1; b <= 1; ++b)
                for (long long e = -1; e <= 1; ++e) {
                    auto it = buckets_.find({c.i + a, c.j + b, c.k + e});
                    if (it == buckets_.end()) continue;
                    for (std::size_t id : it->second)
                        if (pred(id)) return true;
                }
        return false;
    }

private:
    CellKey key(const Vec& x) const {
        return {static_cast<long long>(std::floor(x[0] / cell_)), static_cast<long long>(std::floor(x[1] / cell_)),
                static_cast<long long>(std::floor(x[2] / cell_))};
    }
    double cell_;
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> buckets_;
};

}  // namespace

Covering greedy_cover(const RegionMask& mask, double eps) {
    require(eps > 0.0, "cover radius must be positive");
    if (mask.empty()) throw EmptyRegion("cannot cover an empty mask");
    Covering cov;
    cov.radius = eps;
    SpatialHash grid(eps);
    const Domain& d = mask.domain();
    for (std::size_t idx : mask.indices()) {
        const Vec x = d.node(idx);
        const bool covered = grid.any_within(x, [&](std::size_t id) { return distance(cov.centers[id], x) <= eps; });
        if (!covered) {
            grid.insert(x, cov.centers.size());
            cov.centers.push_back(x);
        }
    }
    return cov;
}

double Covering::min_separation() const {
    double m = kInf;
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j) m = std::min(m, distance(centers[i], centers[j]));
    return m;
}

bool Covering::covers(const RegionMask& mask) const {
    SpatialHash grid(radius);
    for (std::size_t i = 0; i < centers.size(); ++i) grid.insert(centers[i], i);
    const Domain& d = mask.domain();
    for (std::size_t idx : mask.indices()) {
        const Vec x = d.node(idx);
        if (!grid.any_within(x, [&](std::size_t id) { return distance(centers[id], x) <= radius; })) return false;
    }
    return true;
}

Box CubeComplex::cell_box(std::size_t c) const {
    Box b;
    for (int i = 0; i < n; ++i) {
        b.lo[i] = origin[i] + cells[c][i] * edge;
        b.hi[i] = b.lo[i] + edge;
    }
    return b;
}

bool CubeComplex::contains(const Vec& x) const {
    const double tol = 1e-12 * edge;
    for (std::size_t c = 0; c < cells.size(); ++c)
        if (box_contains(cell_box(c), x, n, tol)) return true;
    return false;
}

double BrokenLine::length() const {
    double L = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) L += distance(points[i - 1], points[i]);
    return L;
}

namespace {

using Cell = std::array<int, 3>;

bool cells_adjacent(const Cell& a, const Cell& b) {
    if (a == b) return false;
    for (int i = 0; i < 3; ++i)
        if (std::abs(a[i] - b[i]) > 1) return false;
    return true;
}

std::vector<std::vector<std::size_t>> adjacency(const std::vector<Cell>& cells) {
    std::map<Cell, std::size_t> where;
    for (std::size_t c = 0; c < cells.size(); ++c) where[cells[c]] = c;
    std::vector<std::vector<std::size_t>> adj(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c)
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                for (int e = -1; e <= 1; ++e) {
                    const Cell nb{cells[c][0] + a, cells[c][1] + b, cells[c][2] + e};
                    auto it = where.find(nb);
                    if (it != where.end() && cells_adjacent(cells[c], nb)) adj[c].push_back(it->second);
                }
    return adj;
}

std::vector<std::size_t> bfs_parents(const std::vector<std::vector<std::size_t>>& adj, std::size_t from) {
    const std::size_t none = adj.size();
    std::vector<std::size_t> parent(adj.size(), none);
    parent[from] = from;
    std::deque<std::size_t> queue{from};
    while (!queue.empty()) {
        const std::size_t c = queue.front();
        queue.pop_front();
        for (std::size_t nb : adj[c])
            if (parent[nb] == none) {
                parent[nb] = c;
                queue.push_back(nb);
            }
    }
    return parent;
}

std::optional<std::size_t> locate(const CubeComplex& cubes, const Vec& x) {
    const double tol = 1e-12 * cubes.edge;
    for (std::size_t c = 0; c < cubes.cells.size(); ++c)
        if (box_contains(cubes.cell_box(c), x, cubes.n, tol)) return c;
    return std::nullopt;
}

Vec shared_vertex(const CubeComplex& cubes, const Cell& a, const Cell& b) {
    Vec v{};
    for (int i = 0; i < cubes.n; ++i) v[i] = cubes.origin[i] + std::max(a[i], b[i]) * cubes.edge;
    return v;
}

}  // namespace

BrokenLine cube_path(const CubeComplex& cubes, const Vec& x, const Vec& y) {
    require(!cubes.cells.empty(), "cube complex is empty");
    require(cubes.edge > 0.0, "cube edge must be positive");
    const auto adj = adjacency(cubes.cells);
    const auto from0 = bfs_parents(adj, 0);
    for (std::size_t p : from0)
        if (p == adj.size()) throw GeometryInfeasible("cube union is disconnected");
    const auto cx = locate(cubes, x);
    const auto cy = locate(cubes, y);
    if (!cx || !cy) throw OutOfDomain("path endpoint outside the cube union");
    if (*cx == *cy) return BrokenLine{{x, y}};

    const auto parent = bfs_parents(adj, *cx);
    std::vector<std::size_t> route{*cy};
    while (route.back() != *cx) route.push_back(parent[route.back()]);
    std::reverse(route.begin(), route.end());

    BrokenLine line;
    line.points.push_back(x);
    for (std::size_t i = 0; i + 1 < route.size(); ++i)
        line.points.push_back(shared_vertex(cubes, cubes.cells[route[i]], cubes.cells[route[i + 1]]));
    line.points.push_back(y);
    return line;
}

ChainPlan ball_chain(const BrokenLine& path, double r, const Domain* domain) {
    require(r > 0.0 && std::isfinite(r), "chain radius must be positive");
    require(!path.points.empty(), "path has no points");
    ChainPlan plan;
    plan.kind = ChainKind::Path;
    Vec c = path.points.front();
    plan.centers.push_back(c);

    Vec q = c;
    std::size_t seg = 1;
    while (seg < path.points.size()) {
        const Vec& b = path.points[seg];
        if (distance(b, c) < r * (1.0 - 1e-12)) {
            q = b;
            ++seg;
            continue;
        }
        const Vec dir = b - q;
        const double A = dot(dir, dir);
        const double B = dot(q - c, dir);
        const double C = dot(q - c, q - c) - r * r;
        double t = A > 0.0 ? (-B + std::sqrt(std::max(0.0, B * B - A * C))) / A : 1.0;
        t = std::clamp(t, 0.0, 1.0);
        Vec x = q + t * dir;
        for (int it = 0; it < 64 && distance(x, c) > r; ++it) {
            t = std::nextafter(t, 0.0);
            x = q + t * dir;
        }
        plan.centers.push_back(x);
        c = x;
        q = x;
        if (t >= 1.0) ++seg;
    }
    plan.p_r = static_cast<int>(plan.centers.size()) - 1;
    const Vec& y = path.points.back();
    if (distance(y, c) > 1e-12 * r) plan.centers.push_back(y);

    plan.radii.assign(plan.centers.size(), r);
    for (std::size_t j = 0; j + 1 < plan.centers.size(); ++j)
        plan.overlap_ratios.push_back((distance(plan.centers[j + 1], plan.centers[j]) + r) / (2.0 * r));
    if (domain) {
        for (const auto& x : plan.centers)
            if (domain->distance_to_complement(x) < 3.0 * r * (1.0 - 1e-12))
                throw GeometryInfeasible("path escapes the 3r-erosion");
    }
    return plan;
}

long long chain_cube_count(int n, double cube_extent, double r) {
    const long long k = static_cast<long long>(std::floor(cube_extent * std::sqrt(static_cast<double>(n)) / r)) + 1;
    long long m = 1;
    for (int i = 0; i < n; ++i) m *= k;
    return m;
}

PathChain path_chain_plan(const Domain& domain, const Vec& x, const Vec& y, double r) {
    require(r > 0.0, "chain radius must be positive");
    const int n = domain.dim();
    for (const Vec* p : {&x, &y}) {
        if (!domain.contains(*p)) throw OutOfDomain("chain endpoint outside the domain");
        if (domain.distance_to_complement(*p) < 4.0 * r * (1.0 - 1e-12))
            throw GeometryInfeasible("chain endpoints must lie in the 4r-erosion");
    }
    PathChain out;
    const double D = domain.cube_extent();
    const int k = static_cast<int>(std::floor(D * std::sqrt(static_cast<double>(n)) / r)) + 1;
    out.cells_per_axis = k;
    out.m_r = chain_cube_count(n, D, r);
    CubeComplex all;
    all.n = n;
    all.origin = domain.lo();
    all.edge = D / k;

    const int kz = n == 3 ? k : 1;
    const int probes = (1 << n) + 1;
    for (int c = 0; c < kz; ++c)
        for (int b = 0; b < k; ++b)
            for (int a = 0; a < k; ++a) {
                const Cell cell{a, b, c};
                all.cells.push_back(cell);
                const Box bx = all.cell_box(all.cells.size() - 1);
                bool keep = false;
                for (int pidx = 0; pidx < probes && !keep; ++pidx) {
                    Vec p = 0.5 * (bx.lo + bx.hi);
                    if (pidx + 1 < probes)
                        for (int i = 0; i < n; ++i) p[i] = (pidx >> i & 1) ? bx.hi[i] : bx.lo[i];
                    keep = domain.distance_to_complement(p) >= 4.0 * r;
                }
                if (!keep && !box_contains(bx, x, n, 1e-12 * all.edge) && !box_contains(bx, y, n, 1e-12 * all.edge))
                    all.cells.pop_back();
            }

    const auto cx = locate(all, x);
    const auto cy = locate(all, y);
    const auto adj = adjacency(all.cells);
    const auto parent = bfs_parents(adj, *cx);
    if (parent[*cy] == adj.size()) throw GeometryInfeasible("no cube path between the endpoints inside the 4r-erosion");

    out.cubes.n = n;
    out.cubes.origin = all.origin;
    out.cubes.edge = all.edge;
    for (std::size_t c = 0; c < all.cells.size(); ++c)
        if (parent[c] != adj.size()) out.cubes.cells.push_back(all.cells[c]);
    out.path = cube_path(out.cubes, x, y);
    out.plan = ball_chain(out.path, r, &domain);
    return out;
}

ConeChain cone_chain(const ConeInput& in) {
    require(in.n == 2 || in.n == 3, "dimension must be 2 or 3");
    require(in.sin_theta > 0.0 && in.sin_theta <= 1.0 / 3.0, "cone needs 0 < sin(theta) <= 1/3");
    require(in.rho_bar > 0.0 && in.r > 0.0, "cone radii must be positive");
    const double an = norm(in.axis);
    require(an > 0.0, "cone axis must be nonzero");
    const Vec xi = (1.0 / an) * in.axis;
    const double s = in.sin_theta;

    ConeChain out;
    out.mu = (3.0 - 2.0 * s) / (3.0 - s);
    out.varpi = s / 3.0;
    const double hi_d0 = in.rho_bar / (1.0 + s);
    out.d0 = in.d0.value_or(0.5 * (2.0 * in.rho_bar / 3.0 + hi_d0));
    if (!(out.d0 > 2.0 * in.rho_bar / 3.0 && out.d0 < in.rho_bar))
        throw GeometryInfeasible("starting distance must satisfy 2 rho/3 < d0 < rho");

    const Vec rel = in.x - in.apex;
    out.d = dot(rel, xi);
    const double off_axis = norm(rel - out.d * xi);
    require(off_axis <= 1e-9 * std::max(1.0, out.d), "point must lie on the cone axis");
    if (out.d < in.r * (1.0 - 1e-12) || out.d > in.rho_bar / 3.0)
        throw GeometryInfeasible("point must satisfy r <= d <= rho/3");

    const double lnmu = std::abs(std::log(out.mu));
    int kx = -1;
    for (int k = 0;; ++k) {
        const double dk = std::pow(out.mu, k) * out.d0;
        if (dk * (1.0 + out.varpi) < out.d) break;
        if (std::abs(out.d - dk) < out.varpi * dk) kx = k;
    }
    if (kx < 0) throw GeometryInfeasible("no chain ball contains the point");
    out.k_x = kx;

    auto& plan = out.plan;
    plan.kind = ChainKind::Cone;
    out.cones_contain_balls = true;
    for (int k = 0; k <= kx; ++k) {
        const double dk = std::pow(out.mu, k) * out.d0;
        plan.centers.push_back(in.apex + dk * xi);
        plan.radii.push_back(out.varpi * dk);
        const double slack = 1.0 + 1e-12;
        if (3.0 * out.varpi * dk > s * dk * slack || dk + 3.0 * out.varpi * dk > in.rho_bar * slack)
            out.cones_contain_balls = false;
    }
    out.nested_containment = true;
    for (int k = 0; k < kx; ++k) {
        // Axial coordinates avoid cancellation against the apex position.
        const double step = std::pow(out.mu, k) * out.d0 - std::pow(out.mu, k + 1) * out.d0;
        const double ratio = (step + plan.radii[k + 1]) / (2.0 * plan.radii[k]);
        plan.overlap_ratios.push_back(ratio);
        if (ratio > 1.0 + 1e-12) out.nested_containment = false;
    }
    plan.p_r = kx;

    out.h_bound = std::log((1.0 + out.varpi) * in.rho_bar / in.r) / lnmu;
    out.k_plus = std::max(1.0, std::log(1.0 + out.varpi) / lnmu - 1.0);
    out.within_bounds = out.k_plus <= kx && kx <= out.h_bound;
    out.final_clearance = plan.radii[kx] - distance(in.x, plan.centers[kx]) - 2.0 * out.mu * out.varpi * in.r;
    out.final_ball_contains = out.final_clearance >= -1e-12 * plan.radii[kx];
    return out;
}

}  // namespace qucl
