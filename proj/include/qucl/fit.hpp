#pragma once

#include <string>
#include <vector>

#include "qucl/core.hpp"

namespace qucl {

/// Smallest C with lhs_i <= C rhs_i for every member, in logs.
struct ConstantFit {
    double log_C = -kInf;
    bool feasible = true;
    int violating_member = -1;  // a member with lhs > 0 and rhs = 0
    int members = 0;            // members that constrain C (lhs > 0)
    int binding_member = -1;
};

ConstantFit fit_constant(const std::vector<double>& log_lhs, const std::vector<double>& log_rhs);

/// Three-ball form y_i <= ln C + alpha x_i with x_i = ln(|B_r| / |B_3r|), y_i = ln(|B_2r| / |B_3r|).
struct ThreeBallFit {
    double log_C = 0;
    double alpha = 0;
    int members = 0;
};

/// Exact two-variable linear program: among alpha in [alpha_min, alpha_max], minimize the mean slack
/// sum_i (ln C + alpha x_i - y_i) with ln C the smallest feasible value; ties go to the larger alpha.
/// The optimum is the supporting line of the upper hull of (x_i, y_i) at the mean abscissa.
ThreeBallFit fit_three_ball(const std::vector<double>& x, const std::vector<double>& y, double alpha_min = 0.0,
                            double alpha_max = 1.0);

/// ln C for a fixed alpha: max_i (y_i - alpha x_i).
double three_ball_log_C(const std::vector<double>& x, const std::vector<double>& y, double alpha);

}  // namespace qucl
