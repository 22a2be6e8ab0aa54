#pragma once

#include <memory>
#include <mutex>
#include <vector>

#include "qnm/hermitian.hpp"

namespace qnm {

// CPTP map on a d-dimensional system, stored in Kraus and/or Choi form.
// Whichever form is absent is computed on first use and cached.
//
// Choi convention: J(Phi) = (Phi (x) Id)(phi+), trace one, on (output, ancilla)
// with split (d, d). The exact inversion carries a factor d and a transpose on
// the input slot: Phi(X) = d * Tr_A(J * (Id (x) X^T)).
class QuantumChannel {
  public:
    static QuantumChannel from_kraus(std::vector<Matrix> kraus);
    static QuantumChannel from_choi(const DensityOperator& joint);
    static QuantumChannel identity(int dim);

    int dim() const { return dim_; }

    const std::vector<Matrix>& kraus() const;
    /// Trace-normalized Choi matrix on d^2 with split (d, d).
    const Matrix& choi() const;
    DensityOperator choi_state() const;

    DensityOperator apply(const DensityOperator& rho) const;
    Matrix apply_raw(const Matrix& x) const;
    /// Same map evaluated through the Choi matrix (dual-path oracle).
    Matrix apply_via_choi(const Matrix& x) const;
    /// Heisenberg picture: sum_i K_i^dag W K_i.
    HermitianOperator adjoint_apply(const HermitianOperator& w) const;

    /// Channel on d^2 acting as this on the first factor, identity on the second.
    QuantumChannel extend_to_ancilla() const;

    friend QuantumChannel compose(const QuantumChannel& outer, const QuantumChannel& inner);

  private:
    QuantumChannel() = default;
    void ensure_kraus() const;
    void ensure_choi() const;

    int dim_ = 0;
    mutable std::vector<Matrix> kraus_;
    mutable Matrix choi_;  // size 0 when absent
    mutable bool has_kraus_ = false;
    mutable bool has_choi_ = false;
    mutable std::shared_ptr<std::mutex> cache_mutex_ = std::make_shared<std::mutex>();
};

/// J = (Phi (x) Id)(phi+); checks the CPTP invariant of the input.
DensityOperator choi_from_kraus(const std::vector<Matrix>& kraus);
/// Eigendecomposition-based extraction; Kraus count = rank of J (eigs > 1e-10).
std::vector<Matrix> kraus_from_choi(const DensityOperator& joint);

/// Validates sum_i K_i^dag K_i = Id to 1e-10.
void check_cptp(const std::vector<Matrix>& kraus, double tol = 1e-10);
/// Validates PSD, trace 1 and Tr_out(J) = Id/d to 1e-10.
void check_choi(const DensityOperator& joint, double tol = 1e-10);

/// Time grid with one channel per sample. times[0] == 0 requires channels[0]
/// to be the identity channel to 1e-10.
struct ChannelTrajectory {
    std::vector<double> times;
    std::vector<QuantumChannel> channels;

    ChannelTrajectory(std::vector<double> t, std::vector<QuantumChannel> c);
    int dim() const { return channels.front().dim(); }
    size_t size() const { return times.size(); }
    /// Grid index of t; throws if t is not a sample time.
    size_t index_of(double t) const;
};

}  // namespace qnm
