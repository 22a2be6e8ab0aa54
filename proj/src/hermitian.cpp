#include "qnm/hermitian.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qnm {

HermitianOperator::HermitianOperator(Matrix m, std::optional<Split> split)
    : m_(std::move(m)), split_(split) {
    if (m_.rows() < 1 || m_.rows() != m_.cols()) {
        throw std::invalid_argument("HermitianOperator: matrix must be square, dim >= 1");
    }
    const double dev = (m_ - m_.adjoint().eval()).cwiseAbs().maxCoeff();
    if (dev > kHermitianTol) {
        throw std::invalid_argument("HermitianOperator: matrix deviates from Hermitian by " +
                                    std::to_string(dev));
    }
    m_ = ((m_ + m_.adjoint().eval()) / 2.0).eval();
    if (split_) {
        if (split_->dA < 1 || split_->dB < 1 ||
            static_cast<long>(split_->dA) * split_->dB != m_.rows()) {
            throw std::invalid_argument("HermitianOperator: split dA*dB != dim");
        }
    }
}

DensityOperator::DensityOperator(Matrix m, std::optional<Split> split)
    : HermitianOperator(std::move(m), split) {
    const double mineig = min_eigenvalue(matrix());
    if (mineig < -kPsdTol) {
        throw std::invalid_argument("DensityOperator: not PSD, min eigenvalue " +
                                    std::to_string(mineig));
    }
    const double tr = matrix().trace().real();
    if (std::abs(tr - 1.0) > 1e-10) {
        throw std::invalid_argument("DensityOperator: trace != 1 (got " + std::to_string(tr) + ")");
    }
}

DensityOperator::DensityOperator(const HermitianOperator& h)
    : DensityOperator(h.matrix(), h.split()) {}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Matrix partial_trace_raw(const Matrix& x, int dA, int dB, Subsystem keep) {
    if (x.rows() != static_cast<long>(dA) * dB)
        throw std::invalid_argument("partial_trace: dimension mismatch");
    if (keep == Subsystem::A) {
        Matrix out = Matrix::Zero(dA, dA);
        for (int i = 0; i < dA; ++i)
            for (int j = 0; j < dA; ++j)
                for (int b = 0; b < dB; ++b) out(i, j) += x(i * dB + b, j * dB + b);
        return out;
    }
    Matrix out = Matrix::Zero(dB, dB);
    for (int i = 0; i < dB; ++i)
        for (int j = 0; j < dB; ++j)
            for (int a = 0; a < dA; ++a) out(i, j) += x(a * dB + i, a * dB + j);
    return out;
}

Matrix partial_transpose_raw(const Matrix& x, int dA, int dB, Subsystem on) {
    if (x.rows() != static_cast<long>(dA) * dB)
        throw std::invalid_argument("partial_transpose: dimension mismatch");
    Matrix out(x.rows(), x.cols());
    for (int a1 = 0; a1 < dA; ++a1)
        for (int b1 = 0; b1 < dB; ++b1)
            for (int a2 = 0; a2 < dA; ++a2)
                for (int b2 = 0; b2 < dB; ++b2) {
                    if (on == Subsystem::B)
                        out(a1 * dB + b1, a2 * dB + b2) = x(a1 * dB + b2, a2 * dB + b1);
                    else
                        out(a1 * dB + b1, a2 * dB + b2) = x(a2 * dB + b1, a1 * dB + b2);
                }
    return out;
}

namespace {
Split require_split(const HermitianOperator& x, const char* op) {
    if (!x.split()) throw std::invalid_argument(std::string(op) + ": operator has no split");
    return *x.split();
}
}  // namespace

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b) {
    return HermitianOperator(kron(a.matrix(), b.matrix()), Split{a.dim(), b.dim()});
}

HermitianOperator partial_trace(const HermitianOperator& x, Subsystem keep) {
    const Split s = require_split(x, "partial_trace");
    return HermitianOperator(partial_trace_raw(x.matrix(), s.dA, s.dB, keep));
}

HermitianOperator partial_transpose(const HermitianOperator& x, Subsystem on) {
    const Split s = require_split(x, "partial_transpose");
    return HermitianOperator(partial_transpose_raw(x.matrix(), s.dA, s.dB, on), s);
}

double trace_norm_raw(const Matrix& x) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(x, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().sum();
}

double trace_norm(const HermitianOperator& x) { return trace_norm_raw(x.matrix()); }

Vector max_entangled_ket(int d) {
    if (d < 2) throw std::invalid_argument("max_entangled: d must be >= 2");
    Vector v = Vector::Zero(static_cast<long>(d) * d);
    for (int j = 0; j < d; ++j) v(j * d + j) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

DensityOperator max_entangled(int d) {
    const Vector v = max_entangled_ket(d);
    return DensityOperator((v * v.adjoint()).eval(), Split{d, d});
}

std::vector<Matrix> hermitian_basis(int n) {
    std::vector<Matrix> basis;
    basis.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        Matrix m = Matrix::Zero(n, n);
        m(i, i) = 1.0;
        basis.push_back(m);
    }
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            Matrix m = Matrix::Zero(n, n);
            m(i, j) = inv_sqrt2;
            m(j, i) = inv_sqrt2;
            basis.push_back(m);
            Matrix mi = Matrix::Zero(n, n);
            mi(i, j) = Complex(0, inv_sqrt2);
            mi(j, i) = Complex(0, -inv_sqrt2);
            basis.push_back(mi);
        }
    return basis;
}

Eigen::VectorXd eigenvalues_desc(const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues().reverse();
}

double min_eigenvalue(const Matrix& herm) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace qnm
