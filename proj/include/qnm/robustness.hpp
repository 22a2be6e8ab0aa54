#pragma once

#include <optional>

#include "qnm/conic.hpp"
#include "qnm/hermitian.hpp"

// Generalized robustness of entanglement under the PPT relaxation: the
// separable set is replaced by the PPT cone, equivalently witnesses are
// restricted to decomposable ones W = P + Q^TB. Exact for 2x2, an outer
// relaxation (lower bound on the true R_G) for larger splits. Every report
// carries the relaxation label.

namespace qnm {

inline constexpr const char* kRelaxationLabel = "ppt-relaxation";

/// Entanglement witness with a decomposability certificate W = P + Q^TB.
struct WitnessOperator {
    HermitianOperator w;
    Matrix p;  // PSD
    Matrix q;  // PSD
};

struct RobustnessResult {
    double value = 0;       // max{0, -Tr(W rho)}, clamped
    double raw = 0;         // signed optimum before the clamp
    std::optional<WitnessOperator> witness;
    std::optional<Matrix> mixing;  // S = s*sigma, PSD
    double gap = 0;
    SolveStatus status = SolveStatus::NumericalFailure;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

/// min Tr(S) s.t. S >= 0 and (rho + S)^TB >= 0. Witness recovered from the
/// dual multipliers.
RobustnessResult rg_primal(const DensityOperator& rho, double tol = 1e-8);

/// max{0, -min Tr(W rho)} over decomposable W = P + Q^TB with W <= Id.
/// Mixing matrix recovered from the dual multipliers.
RobustnessResult rg_dual_witness(const DensityOperator& rho, double tol = 1e-8);

}  // namespace qnm
