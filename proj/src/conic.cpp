#include "qnm/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace qnm {

Eigen::MatrixXd real_embedding_raw(const Matrix& h) {
    const long n = h.rows();
    Eigen::MatrixXd s(2 * n, 2 * n);
    s.topLeftCorner(n, n) = h.real();
    s.bottomRightCorner(n, n) = h.real();
    s.topRightCorner(n, n) = -h.imag();
    s.bottomLeftCorner(n, n) = h.imag();
    return s;
}

Eigen::MatrixXd real_embedding(const HermitianOperator& h) {
    return real_embedding_raw(h.matrix());
}

Matrix from_real_embedding(const Eigen::MatrixXd& s) {
    const long n = s.rows() / 2;
    Eigen::MatrixXd re = (s.topLeftCorner(n, n) + s.bottomRightCorner(n, n)) / 2.0;
    Eigen::MatrixXd im = (s.bottomLeftCorner(n, n) - s.topRightCorner(n, n)) / 2.0;
    Matrix out = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
    return ((out + out.adjoint().eval()) / 2.0).eval();
}

namespace {
void check_hermitian(const Matrix& a, const char* what) {
    if (a.rows() != a.cols() || (a - a.adjoint().eval()).cwiseAbs().maxCoeff() > 1e-11)
        throw std::invalid_argument(std::string("SDProblem: ") + what + " must be Hermitian");
}
}  // namespace

int SDProblem::add_variable(int dim) {
    if (dim < 1) throw std::invalid_argument("SDProblem: variable dim must be >= 1");
    dims_.push_back(dim);
    return static_cast<int>(dims_.size()) - 1;
}

int SDProblem::add_free_scalar() { return n_free_++; }

void SDProblem::add_objective(int var, const Matrix& c) {
    check_hermitian(c, "objective coefficient");
    if (c.rows() != dims_.at(var)) throw std::invalid_argument("SDProblem: objective dim mismatch");
    obj_.emplace_back(var, c);
}

void SDProblem::add_objective_free(int fvar, double coeff) {
    if (fvar < 0 || fvar >= n_free_) throw std::invalid_argument("SDProblem: bad free var");
    obj_free_.emplace_back(fvar, coeff);
}

int SDProblem::add_constraint(double rhs) {
    rhs_.push_back(rhs);
    return static_cast<int>(rhs_.size()) - 1;
}

void SDProblem::add_term(int constraint, int var, const Matrix& a) {
    check_hermitian(a, "constraint coefficient");
    if (a.rows() != dims_.at(var))
        throw std::invalid_argument("SDProblem: constraint dim mismatch");
    terms_.push_back({constraint, var, a});
}

void SDProblem::add_term_free(int constraint, int fvar, double coeff) {
    if (fvar < 0 || fvar >= n_free_) throw std::invalid_argument("SDProblem: bad free var");
    free_terms_.emplace_back(constraint, fvar, coeff);
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Optimal: return "optimal";
        case SolveStatus::Infeasible: return "infeasible";
        case SolveStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// Interior-point solver.

struct IpmSolver {
    using Md = Eigen::MatrixXd;
    using Vd = Eigen::VectorXd;

    struct SparseEntry {
        int r, c;
        double v;
    };

    const SDProblem& p;
    double tol;
    int nblocks = 0;
    int m = 0;  // constraints
    int nf = 0; // free scalars
    double sense_sign = 1.0;

    std::vector<int> bdim;                         // embedded block sizes (2n)
    std::vector<Md> C;                             // embedded objective per block
    std::vector<std::vector<Md>> A;                // A[i][j] dense embedded (may be empty)
    std::vector<std::vector<std::vector<SparseEntry>>> Asp;  // triplets of A[i][j]
    Md F;                                          // m x nf
    Vd b, f;
    double total_n = 0;

    explicit IpmSolver(const SDProblem& prob, double tolerance) : p(prob), tol(tolerance) {
        sense_sign = (p.sense_ == Sense::Max) ? -1.0 : 1.0;
        nblocks = static_cast<int>(p.dims_.size());
        m = static_cast<int>(p.rhs_.size());
        nf = p.n_free_;
        bdim.resize(nblocks);
        C.resize(nblocks);
        for (int j = 0; j < nblocks; ++j) {
            bdim[j] = 2 * p.dims_[j];
            C[j] = Md::Zero(bdim[j], bdim[j]);
            total_n += bdim[j];
        }
        for (const auto& [var, c] : p.obj_) C[var] += sense_sign * real_embedding_raw(c) / 2.0;
        A.assign(m, std::vector<Md>(nblocks));
        Asp.assign(m, std::vector<std::vector<SparseEntry>>(nblocks));
        for (const auto& t : p.terms_) {
            Md e = real_embedding_raw(t.a) / 2.0;
            if (A[t.constraint][t.var].size() == 0)
                A[t.constraint][t.var] = e;
            else
                A[t.constraint][t.var] += e;
        }
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < nblocks; ++j)
                if (A[i][j].size() != 0)
                    for (int r = 0; r < bdim[j]; ++r)
                        for (int c2 = 0; c2 < bdim[j]; ++c2)
                            if (A[i][j](r, c2) != 0.0) Asp[i][j].push_back({r, c2, A[i][j](r, c2)});
        F = Md::Zero(m, std::max(nf, 1));
        for (const auto& [con, fv, coeff] : p.free_terms_) F(con, fv) += coeff;
        b = Vd::Zero(m);
        for (int i = 0; i < m; ++i) b(i) = p.rhs_[i];
        f = Vd::Zero(std::max(nf, 1));
        for (const auto& [fv, coeff] : p.obj_free_) f(fv) += sense_sign * coeff;
    }

    static double sparse_dot(const std::vector<SparseEntry>& s, const Md& g) {
        double acc = 0;
        for (const auto& e : s) acc += e.v * g(e.r, e.c);
        return acc;
    }

    // Max alpha in (0, 1] keeping X + alpha*D positive definite (0.98 fraction
    // to the boundary).
    static double max_step(const Md& x, const Md& d) {
        Eigen::LLT<Md> llt(x);
        if (llt.info() != Eigen::Success) return 0.0;
        const Md l = llt.matrixL();
        Md w = l.triangularView<Eigen::Lower>().solve(d);
        w = l.triangularView<Eigen::Lower>().solve(w.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Md> es((w + w.transpose()) / 2.0, Eigen::EigenvaluesOnly);
        const double lmin = es.eigenvalues()(0);
        if (lmin >= -1e-14) return 1.0;
        return std::min(1.0, 0.98 / (-lmin));
    }

    SDPSolution run() {
        SDPSolution sol;
        sol.variables.resize(nblocks);
        sol.free_values.assign(nf, 0.0);
        if (m == 0 && nblocks == 0) {
            sol.status = SolveStatus::Optimal;
            return sol;
        }

        double scale = 1.0;
        for (int j = 0; j < nblocks; ++j) scale = std::max(scale, C[j].cwiseAbs().maxCoeff());
        if (m > 0) scale = std::max(scale, b.cwiseAbs().maxCoeff());
        const double xi = 10.0 * scale;

        std::vector<Md> X(nblocks), Z(nblocks);
        for (int j = 0; j < nblocks; ++j) {
            X[j] = xi * Md::Identity(bdim[j], bdim[j]);
            Z[j] = xi * Md::Identity(bdim[j], bdim[j]);
        }
        Vd y = Vd::Zero(m), u = Vd::Zero(std::max(nf, 1));

        std::vector<Md> Zinv(nblocks), Rd(nblocks), DXa(nblocks), DZa(nblocks), DX(nblocks),
            DZ(nblocks);
        Md M(m, m);
        Vd rp(m), h(m), rf(std::max(nf, 1));

        const int max_iter = 100;
        double best_err = std::numeric_limits<double>::infinity();
        for (int iter = 0; iter < max_iter; ++iter) {
            // Residuals and merit quantities.
            for (int i = 0; i < m; ++i) {
                double ax = 0;
                for (int j = 0; j < nblocks; ++j)
                    if (!Asp[i][j].empty()) ax += sparse_dot(Asp[i][j], X[j]);
                rp(i) = b(i) - ax;
            }
            if (nf > 0) rp -= F.leftCols(nf) * u.head(nf);
            double dres = 0;
            for (int j = 0; j < nblocks; ++j) {
                Rd[j] = C[j] - Z[j];
                for (int i = 0; i < m; ++i)
                    if (A[i][j].size() != 0) Rd[j] -= y(i) * A[i][j];
                dres = std::max(dres, Rd[j].cwiseAbs().maxCoeff());
            }
            rf.setZero();
            if (nf > 0) {
                rf.head(nf) = f.head(nf) - F.leftCols(nf).transpose() * y;
                dres = std::max(dres, rf.cwiseAbs().maxCoeff());
            }
            double mu = 0;
            for (int j = 0; j < nblocks; ++j) mu += (X[j].array() * Z[j].array()).sum();
            mu /= total_n;

            double pobj = 0;
            for (int j = 0; j < nblocks; ++j) pobj += (C[j].array() * X[j].array()).sum();
            if (nf > 0) pobj += f.head(nf).dot(u.head(nf));
            const double dobj = b.dot(y);
            const double pres = (m > 0) ? rp.cwiseAbs().maxCoeff() : 0.0;
            const double rel_gap =
                std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            const double bnorm = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
            const double err = pres / bnorm + dres + rel_gap;

            if (err < best_err) {
                best_err = err;
                sol.primal_value = sense_sign * pobj;
                sol.dual_value = sense_sign * dobj;
                sol.gap = std::abs(pobj - dobj);
                sol.primal_residual = pres;
                sol.dual_residual = dres;
                sol.dual_y = sense_sign * y;
                for (int j = 0; j < nblocks; ++j) sol.variables[j] = from_real_embedding(X[j]);
                for (int l = 0; l < nf; ++l) sol.free_values[l] = u(l);
                sol.iterations = iter;
            }
            if (pres / bnorm <= tol && dres <= tol && rel_gap <= tol) {
                sol.status = SolveStatus::Optimal;
                return sol;
            }
            double xnorm = 0;
            for (int j = 0; j < nblocks; ++j) xnorm = std::max(xnorm, X[j].cwiseAbs().maxCoeff());
            if (xnorm > 1e12 * scale || !std::isfinite(err)) break;

            // Schur complement for the HKM direction.
            for (int j = 0; j < nblocks; ++j) {
                Eigen::LLT<Md> llt(Z[j]);
                if (llt.info() != Eigen::Success) {
                    sol.status = SolveStatus::NumericalFailure;
                    return sol;
                }
                Zinv[j] = llt.solve(Md::Identity(bdim[j], bdim[j]));
            }
            std::vector<std::vector<Md>> W(m);  // sym(Zinv * A_k * X) per block
            for (int k = 0; k < m; ++k) {
                W[k].resize(nblocks);
                for (int j = 0; j < nblocks; ++j)
                    if (A[k][j].size() != 0) {
                        Md g = Zinv[j] * A[k][j] * X[j];
                        W[k][j] = (g + g.transpose()) / 2.0;
                    }
            }
            for (int i = 0; i < m; ++i)
                for (int k = 0; k <= i; ++k) {
                    double acc = 0;
                    for (int j = 0; j < nblocks; ++j)
                        if (!Asp[i][j].empty() && A[k][j].size() != 0)
                            acc += sparse_dot(Asp[i][j], W[k][j]);
                    M(i, k) = acc;
                    M(k, i) = acc;
                }

            auto solve_kkt = [&](const Vd& g, const Vd& rfree, Vd& dy, Vd& du) -> bool {
                Md Mreg = M + 1e-13 * (1.0 + M.diagonal().cwiseAbs().maxCoeff()) *
                                    Md::Identity(m, m);
                Eigen::LDLT<Md> ldlt(Mreg);
                if (ldlt.info() != Eigen::Success) return false;
                if (nf == 0) {
                    dy = ldlt.solve(g);
                    // iterative refinement against the unregularized system
                    for (int r = 0; r < 2; ++r) dy += ldlt.solve(g - M * dy);
                    du = Vd::Zero(1);
                    return true;
                }
                const Md Fm = F.leftCols(nf);
                const Md MiF = ldlt.solve(Fm);
                Md small = Fm.transpose() * MiF;
                small += 1e-13 * (1.0 + small.diagonal().cwiseAbs().maxCoeff()) *
                         Md::Identity(nf, nf);
                Eigen::LDLT<Md> sldlt(small);
                if (sldlt.info() != Eigen::Success) return false;
                auto bordered = [&](const Vd& g1, const Vd& g2, Vd& oy, Vd& ou) {
                    const Vd Mig = ldlt.solve(g1);
                    ou = sldlt.solve(Fm.transpose() * Mig - g2);
                    oy = ldlt.solve(g1 - Fm * ou);
                };
                Vd du_n(nf);
                bordered(g, rfree.head(nf), dy, du_n);
                for (int r = 0; r < 2; ++r) {  // refinement of the bordered system
                    const Vd e1 = g - M * dy - Fm * du_n;
                    const Vd e2 = rfree.head(nf) - Fm.transpose() * dy;
                    Vd cy(m), cu(nf);
                    bordered(e1, e2, cy, cu);
                    dy += cy;
                    du_n += cu;
                }
                du = Vd::Zero(std::max(nf, 1));
                du.head(nf) = du_n;
                return true;
            };

            auto direction = [&](double sigma_mu, const std::vector<Md>* corr,
                                 std::vector<Md>& dX, std::vector<Md>& dZ, Vd& dy,
                                 Vd& du) -> bool {
                for (int i = 0; i < m; ++i) {
                    double acc = 0;
                    for (int j = 0; j < nblocks; ++j)
                        if (!Asp[i][j].empty()) {
                            Md g = sigma_mu * Zinv[j] - X[j] - Zinv[j] * Rd[j] * X[j];
                            if (corr) g -= (*corr)[j];
                            acc += sparse_dot(Asp[i][j], (g + g.transpose()).eval() / 2.0);
                        }
                    h(i) = acc;
                }
                Vd g = rp - h;
                if (!solve_kkt(g, rf, dy, du)) return false;
                for (int j = 0; j < nblocks; ++j) {
                    dZ[j] = Rd[j];
                    for (int i = 0; i < m; ++i)
                        if (A[i][j].size() != 0) dZ[j] -= dy(i) * A[i][j];
                    Md t = sigma_mu * Zinv[j] - X[j] - Zinv[j] * dZ[j] * X[j];
                    if (corr) t -= (*corr)[j];
                    dX[j] = (t + t.transpose()) / 2.0;
                }
                return true;
            };

            Vd dy_a(m), du_a(std::max(nf, 1));
            if (!direction(0.0, nullptr, DXa, DZa, dy_a, du_a)) {
                sol.status = SolveStatus::NumericalFailure;
                return sol;
            }
            double ap = 1.0, ad = 1.0;
            for (int j = 0; j < nblocks; ++j) {
                ap = std::min(ap, max_step(X[j], DXa[j]));
                ad = std::min(ad, max_step(Z[j], DZa[j]));
            }
            double mu_aff = 0;
            for (int j = 0; j < nblocks; ++j)
                mu_aff += ((X[j] + ap * DXa[j]).array() * (Z[j] + ad * DZa[j]).array()).sum();
            mu_aff /= total_n;
            double sigma = std::pow(std::max(0.0, mu_aff / mu), 3);
            sigma = std::clamp(sigma, 1e-8, 1.0);

            std::vector<Md> corr(nblocks);
            for (int j = 0; j < nblocks; ++j) corr[j] = Zinv[j] * DZa[j] * DXa[j];

            Vd dy(m), du(std::max(nf, 1));
            if (!direction(sigma * mu, &corr, DX, DZ, dy, du)) {
                sol.status = SolveStatus::NumericalFailure;
                return sol;
            }
            ap = 1.0;
            ad = 1.0;
            for (int j = 0; j < nblocks; ++j) {
                ap = std::min(ap, max_step(X[j], DX[j]));
                ad = std::min(ad, max_step(Z[j], DZ[j]));
            }
            ap = std::min(1.0, 0.98 * ap / 0.98);  // max_step already applies 0.98
            ad = std::min(1.0, ad);
            if (ap < 1e-10 && ad < 1e-10) break;  // stalled
            for (int j = 0; j < nblocks; ++j) {
                X[j] += ap * DX[j];
                Z[j] += ad * DZ[j];
            }
            y += ad * dy;
            if (nf > 0) u.head(nf) += ap * du.head(nf);
        }

        // Not converged: classify.
        const double bnorm = 1.0 + (m > 0 ? b.cwiseAbs().maxCoeff() : 0.0);
        if (sol.primal_residual / bnorm > 1e-5)
            sol.status = SolveStatus::Infeasible;
        else
            sol.status = SolveStatus::NumericalFailure;
        return sol;
    }
};

SDPSolution solve(const SDProblem& p, double tol) {
    IpmSolver ipm(p, tol);
    return ipm.run();
}

std::string SDProblem::dump() const {
    nlohmann::json j;
    j["sense"] = sense_ == Sense::Min ? "min" : "max";
    j["variables"] = dims_;
    j["free_scalars"] = n_free_;
    j["num_constraints"] = rhs_.size();
    nlohmann::json cons = nlohmann::json::array();
    for (size_t i = 0; i < rhs_.size(); ++i) {
        nlohmann::json c;
        c["rhs"] = rhs_[i];
        nlohmann::json ts = nlohmann::json::array();
        for (const auto& t : terms_)
            if (t.constraint == static_cast<int>(i))
                ts.push_back({{"var", t.var}, {"norm", t.a.norm()}});
        c["terms"] = ts;
        cons.push_back(c);
    }
    j["constraints"] = cons;
    return j.dump(2);
}

}  // namespace qnm
