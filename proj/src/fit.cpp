#include "qucl/fit.hpp"

#include <algorithm>
#include <cmath>

namespace qucl {

ConstantFit fit_constant(const std::vector<double>& log_lhs, const std::vector<double>& log_rhs) {
    require(log_lhs.size() == log_rhs.size(), "one rhs per lhs");
    require(!log_lhs.empty(), "fit needs at least one member");
    ConstantFit f;
    for (std::size_t i = 0; i < log_lhs.size(); ++i) {
        require(!std::isnan(log_lhs[i]) && !std::isnan(log_rhs[i]), "fit sides must be defined");
        if (log_lhs[i] == -kInf) continue;
        ++f.members;
        if (log_rhs[i] == -kInf) {
            f.feasible = false;
            if (f.violating_member < 0) f.violating_member = static_cast<int>(i);
            continue;
        }
        const double c = log_lhs[i] - log_rhs[i];
        if (c > f.log_C) {
            f.log_C = c;
            f.binding_member = static_cast<int>(i);
        }
    }
    if (!f.feasible) f.log_C = kInf;
    return f;
}

double three_ball_log_C(const std::vector<double>& x, const std::vector<double>& y, double alpha) {
    double c = -kInf;
    for (std::size_t i = 0; i < x.size(); ++i) c = std::max(c, y[i] - alpha * x[i]);
    return c;
}

ThreeBallFit fit_three_ball(const std::vector<double>& x, const std::vector<double>& y, double alpha_min,
                            double alpha_max) {
    require(x.size() == y.size() && !x.empty(), "three-ball fit needs matching members");
    require(alpha_min <= alpha_max, "empty alpha range");
    for (std::size_t i = 0; i < x.size(); ++i) require(std::isfinite(x[i]) && std::isfinite(y[i]), "finite norms needed");
    double xbar = 0;
    for (double v : x) xbar += v;
    xbar /= static_cast<double>(x.size());

    // The objective ln C(alpha) + alpha xbar is convex piecewise linear; its kinks are pairwise slopes.
    std::vector<double> candidates{alpha_min, alpha_max};
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            if (x[i] == x[j]) continue;
            const double a = (y[i] - y[j]) / (x[i] - x[j]);
            if (a > alpha_min && a < alpha_max) candidates.push_back(a);
        }
    std::sort(candidates.begin(), candidates.end());
    ThreeBallFit best;
    double best_obj = kInf;
    for (double a : candidates) {
        const double c = three_ball_log_C(x, y, a);
        const double obj = c + a * xbar;
        if (obj <= best_obj + 1e-14 * std::max(1.0, std::abs(best_obj))) {
            best_obj = std::min(obj, best_obj);
            best.alpha = a;
            best.log_C = c;
        }
    }
    best.members = static_cast<int>(x.size());
    return best;
}

}  // namespace qucl
