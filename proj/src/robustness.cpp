#include "qnm/robustness.hpp"

#include <stdexcept>

namespace qnm {

namespace {
Split require_split(const DensityOperator& rho) {
    if (!rho.split()) throw std::invalid_argument("robustness: state must carry a split");
    return *rho.split();
}
}  // namespace

RobustnessResult rg_primal(const DensityOperator& rho, double tol) {
    const Split sp = require_split(rho);
    const int n = rho.dim();
    const Matrix rho_tb = partial_transpose_raw(rho.matrix(), sp.dA, sp.dB, Subsystem::B);
    const auto basis = hermitian_basis(n);

    SDProblem prob;
    const int vS = prob.add_variable(n);
    const int vY = prob.add_variable(n);
    prob.set_sense(Sense::Min);
    prob.add_objective(vS, Matrix::Identity(n, n));
    // Y = (rho + S)^TB, entrywise over the Hermitian basis.
    for (const auto& hm : basis) {
        const double rhs = (hm.adjoint() * rho_tb).trace().real();
        const int c = prob.add_constraint(rhs);
        prob.add_term(c, vY, hm);
        prob.add_term(c, vS, -partial_transpose_raw(hm, sp.dA, sp.dB, Subsystem::B));
    }

    SDPSolution sol = solve(prob, tol);
    RobustnessResult res;
    res.status = sol.status;
    res.gap = sol.gap;
    if (sol.status != SolveStatus::Optimal) return res;
    res.raw = sol.primal_value;
    res.value = std::max(0.0, res.raw);
    res.mixing = sol.variables[vS];

    // Dual multipliers give the optimal decomposable witness: W = Q^TB with
    // Q = -sum_m y_m H_m.
    Matrix v = Matrix::Zero(n, n);
    for (size_t m = 0; m < basis.size(); ++m) v += sol.dual_y(static_cast<long>(m)) * basis[m];
    const Matrix q = -v;
    const Matrix w = partial_transpose_raw(q, sp.dA, sp.dB, Subsystem::B);
    res.witness = WitnessOperator{HermitianOperator(w, sp), Matrix::Zero(n, n), q};
    return res;
}

RobustnessResult rg_dual_witness(const DensityOperator& rho, double tol) {
    const Split sp = require_split(rho);
    const int n = rho.dim();
    const Matrix rho_tb = partial_transpose_raw(rho.matrix(), sp.dA, sp.dB, Subsystem::B);
    const auto basis = hermitian_basis(n);

    SDProblem prob;
    const int vP = prob.add_variable(n);
    const int vQ = prob.add_variable(n);
    const int vT = prob.add_variable(n);  // slack for W <= Id
    prob.set_sense(Sense::Min);
    prob.add_objective(vP, rho.matrix());
    prob.add_objective(vQ, rho_tb);
    // P + Q^TB + T = Id.
    for (const auto& hm : basis) {
        const int c = prob.add_constraint(hm.trace().real());
        prob.add_term(c, vP, hm);
        prob.add_term(c, vQ, partial_transpose_raw(hm, sp.dA, sp.dB, Subsystem::B));
        prob.add_term(c, vT, hm);
    }

    SDPSolution sol = solve(prob, tol);
    RobustnessResult res;
    res.status = sol.status;
    res.gap = sol.gap;
    if (sol.status != SolveStatus::Optimal) return res;
    res.raw = -sol.primal_value;
    res.value = std::max(0.0, res.raw);

    const Matrix& p = sol.variables[vP];
    const Matrix& q = sol.variables[vQ];
    Matrix w = p + partial_transpose_raw(q, sp.dA, sp.dB, Subsystem::B);
    w = (w + w.adjoint().eval()) / 2.0;
    res.witness = WitnessOperator{HermitianOperator(w, sp), p, q};

    // Dual multipliers of the equality give the mixing matrix S = -G.
    Matrix g = Matrix::Zero(n, n);
    for (size_t m = 0; m < basis.size(); ++m) g += sol.dual_y(static_cast<long>(m)) * basis[m];
    res.mixing = (-g).eval();
    return res;
}

}  // namespace qnm
