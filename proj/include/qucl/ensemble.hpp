#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qucl/solver.hpp"

namespace qucl {

enum class Provenance { Manufactured, Solved };
const char* provenance_name(Provenance p);

/// One solution of (-Delta + W.grad + V) u = 0 on the ensemble domain.
struct Member {
    int id = 0;
    Provenance provenance = Provenance::Manufactured;
    std::string name;
    ScalarField u;
    ScalarField V = ScalarField::constant(0.0);
    VectorField W;
    double residual = 0;  // 0 for closed forms, the solver's relative residual otherwise
};

struct Ensemble {
    DomainPtr domain;
    std::vector<Member> members;  // sorted by id

    std::size_t size() const { return members.size(); }
    /// Appends `other`, renumbering its ids after ours.
    void append(const Ensemble& other);
};

/// sum_k w_k e^{a_k.x} cos(b_k.x + phi_k) with a_k orthogonal to b_k and |a_k|^2 - |b_k|^2 = c,
/// so -Delta u + c u = 0 exactly. `terms` summands with positive weights; grid-sampled when `sample` is set.
Ensemble exponential_ensemble(const DomainPtr& domain, double c, int count, std::uint64_t seed, int terms = 3,
                              bool sample = false);

/// Dirichlet solutions with random trigonometric boundary data.
Ensemble solved_ensemble(const DomainPtr& domain, const ScalarField& V, int count, std::uint64_t seed,
                         const SolverOptions& options = {1e-10}, int workers = 0);

/// The boundary datum used by solved_ensemble for member `index` under `seed`.
ScalarField random_boundary_data(std::uint64_t seed, int index);

}  // namespace qucl
