#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qnm/hermitian.hpp"

// Semidefinite programming over complex Hermitian PSD variables.
//
// Complex variables are handled through the real symmetric embedding
// [[Re, -Im], [Im, Re]]; all internal solving is real. The solver is a dense
// primal-dual interior-point method (HKM direction, Mehrotra
// predictor-corrector), adequate for the small dense problems this project
// generates (blocks up to ~64x64, a few hundred constraints).

namespace qnm {

/// 2n x 2n real symmetric [[Re, -Im], [Im, Re]]; PSD iff input is PSD, each
/// eigenvalue appears with doubled multiplicity.
Eigen::MatrixXd real_embedding(const HermitianOperator& h);
Eigen::MatrixXd real_embedding_raw(const Matrix& h);
/// Structure-averaged inverse of the embedding.
Matrix from_real_embedding(const Eigen::MatrixXd& s);

enum class Sense { Min, Max };
enum class SolveStatus { Optimal, Infeasible, NumericalFailure };

std::string to_string(SolveStatus s);

/// Linear objective over Hermitian PSD matrix variables and nonnegative-free
/// scalars, with affine equality constraints in trace pairings.
class SDProblem {
  public:
    /// New complex Hermitian PSD variable of the given dimension.
    int add_variable(int dim);
    /// New free real scalar variable.
    int add_free_scalar();

    void set_sense(Sense s) { sense_ = s; }
    Sense sense() const { return sense_; }

    /// Accumulate Tr(c X_var) into the objective. c must be Hermitian.
    void add_objective(int var, const Matrix& c);
    void add_objective_free(int fvar, double coeff);

    /// New equality constraint sum_k Tr(A_k X_k) + sum_l f_l u_l = rhs.
    int add_constraint(double rhs);
    void add_term(int constraint, int var, const Matrix& a);
    void add_term_free(int constraint, int fvar, double coeff);

    /// Constrains Tr(E_rc^dag X_var) = value for every entry of the given
    /// Hermitian target minus the accumulated affine terms; convenience used
    /// by the formulations: X_var == target + sum of listed (coeff, var, map).
    int num_variables() const { return static_cast<int>(dims_.size()); }
    int num_constraints() const { return static_cast<int>(rhs_.size()); }
    int num_free() const { return n_free_; }

    /// Debug dump (objective and constraint list) as a JSON string.
    std::string dump() const;

  private:
    friend struct IpmSolver;
    struct Term {
        int constraint;
        int var;
        Matrix a;
    };
    Sense sense_ = Sense::Min;
    std::vector<int> dims_;
    int n_free_ = 0;
    std::vector<std::pair<int, Matrix>> obj_;       // (var, C)
    std::vector<std::pair<int, double>> obj_free_;  // (fvar, coeff)
    std::vector<double> rhs_;
    std::vector<Term> terms_;
    std::vector<std::tuple<int, int, double>> free_terms_;  // (constraint, fvar, coeff)
};

struct SDPSolution {
    SolveStatus status = SolveStatus::NumericalFailure;
    double primal_value = 0;
    double dual_value = 0;
    std::vector<Matrix> variables;  // complex Hermitian values
    std::vector<double> free_values;
    Eigen::VectorXd dual_y;
    double gap = 0;              // |primal - dual|
    double primal_residual = 0;  // max constraint violation
    double dual_residual = 0;
    int iterations = 0;

    bool optimal() const { return status == SolveStatus::Optimal; }
};

SDPSolution solve(const SDProblem& p, double tol = 1e-8);

}  // namespace qnm
