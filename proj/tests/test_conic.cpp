#include "doctest.h"
#include "qnm/conic.hpp"
#include "qnm/random.hpp"

using namespace qnm;

TEST_CASE("real embedding round-trips and preserves spectra") {
    Rng rng(10);
    const Matrix h = random_hermitian(3, rng);
    const Eigen::MatrixXd s = real_embedding_raw(h);
    CHECK((s - s.transpose()).norm() < 1e-13);
    CHECK((from_real_embedding(s) - h).norm() < 1e-13);
    // doubled spectrum
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
    const Eigen::VectorXd evh = eigenvalues_desc(h);
    for (int i = 0; i < 3; ++i) {
        CHECK(es.eigenvalues()(5 - 2 * i) == doctest::Approx(evh(i)).epsilon(1e-10));
        CHECK(es.eigenvalues()(4 - 2 * i) == doctest::Approx(evh(i)).epsilon(1e-10));
    }
}

TEST_CASE("minimal trace subject to a normalization constraint") {
    // min Tr(X) s.t. <phi+ phi+^dag, X> = 1, X >= 0  -> X = phi+ projector, value 1
    SDProblem p;
    const int x = p.add_variable(4);
    p.add_objective(x, Matrix::Identity(4, 4));
    const int c = p.add_constraint(1.0);
    p.add_term(c, x, max_entangled(2).matrix());
    const SDPSolution sol = solve(p, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal_value == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(sol.gap < 1e-7);
}

TEST_CASE("smallest eigenvalue via a free-scalar SDP matches the eigensolver") {
    Rng rng(11);
    for (int rep = 0; rep < 5; ++rep) {
        const Matrix h =
            random_hermitian(4, rng);
        // max t s.t. H - t I = X >= 0
        SDProblem p;
        p.set_sense(Sense::Max);
        const int x = p.add_variable(4);
        const int t = p.add_free_scalar();
        p.add_objective_free(t, 1.0);
        const auto basis = hermitian_basis(4);
        for (const auto& e : basis) {
            const int c = p.add_constraint((e.adjoint() * h).trace().real());
            p.add_term(c, x, e);
            p.add_term_free(c, t, e.trace().real());
        }
        const SDPSolution sol = solve(p, 1e-9);
        REQUIRE(sol.status == SolveStatus::Optimal);
        CHECK(sol.primal_value == doctest::Approx(min_eigenvalue(h)).epsilon(1e-7));
    }
}

TEST_CASE("complex data is handled exactly") {
    // min <C, X> over unit-trace PSD X: value is the smallest eigenvalue of C.
    Rng rng(12);
    const Matrix c = random_hermitian(3, rng);
    SDProblem p;
    const int x = p.add_variable(3);
    p.add_objective(x, c);
    const int con = p.add_constraint(1.0);
    p.add_term(con, x, Matrix::Identity(3, 3));
    const SDPSolution sol = solve(p, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.primal_value == doctest::Approx(min_eigenvalue(c)).epsilon(1e-7));
    // the minimizer is Hermitian and PSD
    const Matrix xm = sol.variables[0];
    CHECK((xm - xm.adjoint()).norm() < 1e-9);
    CHECK(min_eigenvalue(xm) > -1e-8);
}

TEST_CASE("weak duality holds at the reported solution") {
    Rng rng(13);
    const Matrix c = random_hermitian(4, rng);
    SDProblem p;
    const int x = p.add_variable(4);
    p.add_objective(x, c + 3.0 * Matrix::Identity(4, 4));  // keep it bounded
    const int con = p.add_constraint(1.0);
    p.add_term(con, x, Matrix::Identity(4, 4));
    const SDPSolution sol = solve(p, 1e-9);
    REQUIRE(sol.status == SolveStatus::Optimal);
    CHECK(sol.dual_value <= sol.primal_value + 1e-7);
    CHECK(sol.gap < 1e-7);
}

TEST_CASE("an infeasible problem is flagged, not silently solved") {
    SDProblem p;
    const int x = p.add_variable(2);
    p.add_objective(x, Matrix::Identity(2, 2));
    const int c = p.add_constraint(-1.0);  // Tr(X) = -1 impossible for X >= 0
    p.add_term(c, x, Matrix::Identity(2, 2));
    const SDPSolution sol = solve(p, 1e-9);
    CHECK(sol.status != SolveStatus::Optimal);
}

TEST_CASE("solves are deterministic") {
    Rng rng(14);
    const Matrix c = random_hermitian(3, rng);
    auto build = [&] {
        SDProblem p;
        const int x = p.add_variable(3);
        p.add_objective(x, c);
        const int con = p.add_constraint(1.0);
        p.add_term(con, x, Matrix::Identity(3, 3));
        return p;
    };
    const SDPSolution a = solve(build(), 1e-9);
    const SDPSolution b = solve(build(), 1e-9);
    CHECK(a.primal_value == b.primal_value);
    CHECK(a.iterations == b.iterations);
    CHECK((a.variables[0] - b.variables[0]).norm() == 0.0);
}

TEST_CASE("problem dump is valid JSON-ish and mentions sizes") {
    SDProblem p;
    p.add_variable(2);
    p.add_free_scalar();
    p.add_constraint(0.5);
    const std::string d = p.dump();
    CHECK(d.find("constraints") != std::string::npos);
}
