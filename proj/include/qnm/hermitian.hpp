#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

// Dense bipartite linear algebra for quantum objects.
//
// Convention used everywhere: a bipartite operator on C^dA (x) C^dB stores
// the first factor as the most significant index (row = a*dB + b). For
// channel-related objects the first factor is the channel output and the
// second the ancilla.

namespace qnm {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;

struct Split {
    int dA = 0;
    int dB = 0;
};

enum class Subsystem { A, B };

/// Hermitian matrix with an optional bipartite split. The constructor
/// enforces hermiticity to 1e-12 and dA*dB == dim when a split is given.
class HermitianOperator {
  public:
    explicit HermitianOperator(Matrix m, std::optional<Split> split = std::nullopt);

    int dim() const { return static_cast<int>(m_.rows()); }
    const Matrix& matrix() const { return m_; }
    const std::optional<Split>& split() const { return split_; }

    HermitianOperator with_split(Split s) const { return HermitianOperator(m_, s); }

  private:
    Matrix m_;
    std::optional<Split> split_;
};

/// Unit-trace positive semidefinite HermitianOperator.
class DensityOperator : public HermitianOperator {
  public:
    explicit DensityOperator(Matrix m, std::optional<Split> split = std::nullopt);
    explicit DensityOperator(const HermitianOperator& h);
};

// Raw-matrix helpers.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix partial_trace_raw(const Matrix& x, int dA, int dB, Subsystem keep);
Matrix partial_transpose_raw(const Matrix& x, int dA, int dB, Subsystem on);

HermitianOperator tensor(const HermitianOperator& a, const HermitianOperator& b);
HermitianOperator partial_trace(const HermitianOperator& x, Subsystem keep);
HermitianOperator partial_transpose(const HermitianOperator& x, Subsystem on = Subsystem::B);

/// Sum of absolute eigenvalues.
double trace_norm(const HermitianOperator& x);
double trace_norm_raw(const Matrix& x);

/// |phi+> = sum_j |jj>/sqrt(d) as a density operator with split (d, d).
DensityOperator max_entangled(int d);
/// The ket itself, length d*d.
Vector max_entangled_ket(int d);

/// Orthonormal Hermitian basis of the n x n Hermitian matrices (n^2 elements):
/// diagonal units, then (E_ij + E_ji)/sqrt(2) and i(E_ij - E_ji)/sqrt(2), i<j.
std::vector<Matrix> hermitian_basis(int n);

/// Eigenvalues in descending order (deterministic ordering for Kraus extraction).
Eigen::VectorXd eigenvalues_desc(const Matrix& herm);

double min_eigenvalue(const Matrix& herm);

}  // namespace qnm
