#include <cmath>

#include "qucl/verifiers.hpp"

namespace qucl {

CoverCheck cover_check(const RegionMask& mask, const std::vector<double>& eps) {
    require(!eps.empty(), "cover check needs at least one radius");
    if (mask.empty()) throw EmptyRegion("cannot cover an empty mask");
    const int n = mask.domain().dim();
    CoverCheck out;
    out.eps = eps;
    for (double e : eps) out.counts.push_back(greedy_cover(mask, e).count());
    const double e0 = eps.front();
    out.c_hat = static_cast<double>(out.counts.front()) * std::pow(e0, n);
    // Centres are e-separated, so the balls B(c, e/2) are disjoint inside a ball of radius d + e/2.
    const double d = distance(mask.domain().lo(), mask.domain().hi());
    out.c_hat_proof = std::pow(2.0 * d + e0, n);
    for (std::size_t i = 0; i < eps.size(); ++i) {
        const double bound = out.c_hat * std::pow(eps[i], -n);
        auto rep = InequalityReport::from_values("cover.count.fit", "fit", static_cast<double>(out.counts[i]), bound);
        rep.with("eps", eps[i]).with("c_hat", out.c_hat);
        rep.ensemble_size = 1;
        out.reports.push_back(rep);
        if (eps[i] <= e0) {
            auto p = InequalityReport::from_values("cover.count.explicit", "explicit",
                                                   static_cast<double>(out.counts[i]),
                                                   out.c_hat_proof * std::pow(eps[i], -n));
            out.reports.push_back(p.with("eps", eps[i]).with("c_hat_proof", out.c_hat_proof));
        }
    }
    return out;
}

InequalityReport broken_line_check(const CubeComplex& cubes, const Vec& x, const Vec& y) {
    const auto path = cube_path(cubes, x, y);
    const double r = cubes.edge * std::sqrt(static_cast<double>(cubes.n));
    const double count = static_cast<double>(cubes.cells.size());
    auto rep = InequalityReport::from_values("cover.broken_line", "explicit", path.length(), count * r);
    return rep.with("cubes", count).with("r", r).with("vertices", static_cast<double>(path.points.size()));
}

}  // namespace qucl
