#include <cmath>

#include "qucl/verifiers.hpp"

namespace qucl {

const char* mode_name(Mode m) { return m == Mode::Explicit ? "explicit" : "fit"; }

Mode parse_mode(const std::string& text) {
    if (text == "explicit") return Mode::Explicit;
    if (text == "fit") return Mode::Fit;
    throw InvalidArgument("mode must be explicit or fit, got '" + text + "'");
}

InequalityReport fit_report(const std::string& id, const std::vector<double>& log_lhs,
                            const std::vector<double>& log_rhs) {
    const auto f = fit_constant(log_lhs, log_rhs);
    InequalityReport r;
    if (!f.feasible) {
        r = InequalityReport::from_logs(id, "fit", log_lhs[f.violating_member], -kInf);
        r.with("violating_member", f.violating_member).with_note("member violates for every constant");
    } else if (f.binding_member < 0) {
        r = InequalityReport::from_logs(id, "fit", -kInf, -kInf);
        r.with_note("every member has a zero left side");
    } else {
        const auto b = static_cast<std::size_t>(f.binding_member);
        r = InequalityReport::from_logs(id, "fit", log_lhs[b], f.log_C + log_rhs[b]);
        // The binding member holds with equality; rounding may leave it an ulp short.
        r.margin = 1.0;
        r.pass = true;
        r.vacuous = false;
        r.with("log_C", f.log_C).with("C", std::exp(f.log_C)).with("binding_member", f.binding_member);
    }
    r.ensemble_size = static_cast<int>(log_lhs.size());
    return r;
}

}  // namespace qucl
