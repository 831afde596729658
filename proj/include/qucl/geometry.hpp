#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "qucl/core.hpp"

namespace qucl {

struct Box {
    Vec lo{};
    Vec hi{};
};

/// A finite union of axis-aligned boxes sampled on a uniform node grid.
///
/// The grid origin is the lower corner of the bounding box and every box
/// coordinate must sit on a grid line. Distances to the complement are exact.
class Domain {
public:
    Domain(int n, std::vector<Box> boxes, double h);

    static Domain box(int n, const Vec& lengths, double h, const Vec& origin = {0.0, 0.0, 0.0});

    int dim() const { return n_; }
    double spacing() const { return h_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    const Vec& lo() const { return lo_; }
    const Vec& hi() const { return hi_; }
    const std::array<int, 3>& dims() const { return dims_; }
    std::size_t node_count() const { return node_dist_.size(); }

    std::size_t index(int i, int j, int k) const {
        return static_cast<std::size_t>(i) + static_cast<std::size_t>(dims_[0]) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(dims_[1]) * k);
    }
    std::array<int, 3> ijk(std::size_t idx) const;
    Vec node(std::size_t idx) const;

    /// Closed-set membership.
    bool contains(const Vec& x) const;
    /// dist(x, R^n \ Omega); zero on and outside the boundary.
    double distance_to_complement(const Vec& x) const;

    /// Node distance to the complement, or -1 for nodes outside the closed domain.
    double node_distance(std::size_t idx) const { return node_dist_[idx]; }
    bool node_in_closure(std::size_t idx) const { return node_dist_[idx] >= 0.0; }
    bool node_interior(std::size_t idx) const { return node_dist_[idx] > 0.0; }
    double max_node_distance() const;

    /// Edge of the smallest closed cube containing the closure.
    double cube_extent() const;
    double volume() const;
    double min_extent() const;
    /// Covered cells of the breakpoint decomposition; their union is the closure.
    const std::vector<Box>& cells() const { return cells_; }

private:
    int n_;
    double h_;
    std::vector<Box> boxes_;
    Vec lo_{}, hi_{};
    std::array<int, 3> dims_{1, 1, 1};
    // Breakpoint cells of the union that are not covered; complement pieces inside the bounding box.
    std::vector<Box> holes_;
    std::vector<Box> cells_;
    std::vector<double> node_dist_;
};

using DomainPtr = std::shared_ptr<const Domain>;

enum class MaskKind { Erosion, Collar, Ball, Annulus, Custom };

/// Node subset of a domain plus the exact point predicate it was sampled from.
///
/// The predicate returns 1 inside, 0 outside and 1/2 on a level set; nodes with
/// value 1 are members and nodes with value 1/2 are level nodes.
class RegionMask {
public:
    RegionMask(DomainPtr domain, MaskKind kind, std::function<double(const Vec&)> predicate);

    const Domain& domain() const { return *domain_; }
    const DomainPtr& domain_ptr() const { return domain_; }
    MaskKind kind() const { return kind_; }
    bool member(std::size_t idx) const { return member_[idx] != 0; }
    bool level(std::size_t idx) const { return level_[idx] != 0; }
    double weight_at(const Vec& x) const { return predicate_(x); }

    std::size_t count() const;
    bool empty() const { return count() == 0; }
    std::vector<std::size_t> indices() const;
    std::vector<std::size_t> level_indices() const;
    /// Face-neighbour connectivity of the member nodes.
    bool connected() const;
    /// Midpoint rule on the half-spacing sub-grid restricted to the closed domain.
    double measure() const;

    double radius = 0.0;
    Vec center{};
    double inner = 0.0;
    double outer = 0.0;

private:
    DomainPtr domain_;
    MaskKind kind_;
    std::function<double(const Vec&)> predicate_;
    std::vector<std::uint8_t> member_;
    std::vector<std::uint8_t> level_;
};

RegionMask erode(const DomainPtr& domain, double r);
RegionMask collar(const DomainPtr& domain, double r);
RegionMask ball_mask(const DomainPtr& domain, const Vec& center, double radius);
RegionMask annulus_mask(const DomainPtr& domain, const Vec& center, double inner, double outer);

/// Largest r (capped at 1) for which the node erosion is nonempty and connected, by bisection.
double connectivity_radius(const Domain& domain);

struct Covering {
    std::vector<Vec> centers;
    double radius = 0.0;
    std::size_t count() const { return centers.size(); }
    double min_separation() const;
    bool covers(const RegionMask& mask) const;
};

/// Greedy epsilon-net over the member nodes in storage order.
Covering greedy_cover(const RegionMask& mask, double eps);

struct CubeComplex {
    int n = 3;
    Vec origin{};
    double edge = 1.0;
    std::vector<std::array<int, 3>> cells;

    Box cell_box(std::size_t c) const;
    bool contains(const Vec& x) const;
};

struct BrokenLine {
    std::vector<Vec> points;
    double length() const;
};

/// Polyline through shared cube vertices along a breadth-first cube path.
BrokenLine cube_path(const CubeComplex& cubes, const Vec& x, const Vec& y);

enum class ChainKind { Path, Cone };

struct ChainPlan {
    ChainKind kind = ChainKind::Path;
    std::vector<Vec> centers;
    std::vector<double> radii;
    /// (|x_{j+1} - x_j| + r_{j+1}) / (2 r_j); containment holds iff <= 1.
    std::vector<double> overlap_ratios;
    /// Index of the last center at exact spacing r; the endpoint follows unless it coincides with it.
    int p_r = 0;

    std::size_t links() const { return centers.empty() ? 0 : centers.size() - 1; }
};

/// Walks `path` placing a new center where it first leaves the open ball of radius r.
/// With `domain`, every center must keep distance >= 3r from the complement.
ChainPlan ball_chain(const BrokenLine& path, double r, const Domain* domain = nullptr);

struct PathChain {
    ChainPlan plan;
    BrokenLine path;
    CubeComplex cubes;
    long long m_r = 0;
    int cells_per_axis = 0;
};

/// Cube grid over the bounding cube, cube path inside the 4r-erosion, then the ball chain.
PathChain path_chain_plan(const Domain& domain, const Vec& x, const Vec& y, double r);

/// Number of cubes (floor(D sqrt(n) / r) + 1)^n.
long long chain_cube_count(int n, double cube_extent, double r);

struct ConeInput {
    int n = 3;
    Vec x{};
    Vec apex{};
    Vec axis{};
    double sin_theta = 1.0 / 3.0;
    double rho_bar = 1.0;
    double r = 0.1;
    std::optional<double> d0;
};

struct ConeChain {
    ChainPlan plan;
    double mu = 0.0;
    double varpi = 0.0;
    double d0 = 0.0;
    double d = 0.0;
    int k_x = 0;
    double k_plus = 0.0;
    double h_bound = 0.0;
    bool within_bounds = false;
    bool cones_contain_balls = false;
    bool nested_containment = false;
    /// rho_{k_x} - |x - x_{k_x}| - 2 mu varpi r; B(x, 2 mu varpi r) sits in the final ball iff >= 0.
    double final_clearance = 0.0;
    bool final_ball_contains = false;
};

ConeChain cone_chain(const ConeInput& in);

}  // namespace qucl
