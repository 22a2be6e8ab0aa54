#pragma once

#include "qnm/channel.hpp"
#include "qnm/hermitian.hpp"
#include "qnm/robustness.hpp"

// Interval non-Markovianity witnesses: the observable
// W(t2, t1) = (Phi_t2^dag (x) Id)(W_t2) - (Phi_t1^dag (x) Id)(W_t1)
// whose expectation value in |phi+> reads off the entanglement change of the
// Choi trajectory, and the positive-map representation W = (Id (x) L)(phi+).

namespace qnm {

struct IntervalWitness {
    double t1 = 0;
    double t2 = 0;
    HermitianOperator op;  // on d (x) d with split (d, d)
};

/// Block form of a linear map L on d x d matrices: blocks[i*d+j] = L(E_ij).
/// Extracted from a witness so that W = (Id (x) L)(phi+).
class PositiveMapForm {
  public:
    PositiveMapForm(int d, std::vector<Matrix> blocks);

    int map_dim() const { return d_; }
    const Matrix& block(int i, int j) const { return blocks_[static_cast<size_t>(i) * d_ + j]; }

    Matrix apply(const Matrix& x) const;
    /// Hilbert-Schmidt adjoint L^dag.
    Matrix apply_adjoint(const Matrix& y) const;
    /// (Id (x) L^dag)(rho) on a (d, d)-split operator.
    Matrix apply_adjoint_second_slot(const Matrix& rho) const;

    /// max_ij |Tr L(E_ij) - delta_ij|; zero iff L is trace preserving.
    double trace_preservation_deviation() const;

  private:
    int d_;
    std::vector<Matrix> blocks_;
};

/// w1, w2 are the optimal robustness witnesses at the two sample times.
IntervalWitness interval_witness(const ChannelTrajectory& traj, double t1, double t2,
                                 const WitnessOperator& w1, const WitnessOperator& w2);

/// max{0, -<phi+| W(t2,t1) |phi+>}.
double witnessed_nm(const IntervalWitness& iw);
/// The raw expectation <phi+| W(t2,t1) |phi+> before the clamp.
double interval_expectation(const IntervalWitness& iw);

/// Block extraction L(E_ij) = d * (<i| (x) Id) W (|j> (x) Id).
PositiveMapForm witness_to_map(const WitnessOperator& w);

/// <phi+| (Id (x) L^dag)(rho) |phi+>; equals Tr(W rho) for the source witness.
double expectation_via_map(const PositiveMapForm& mf, const DensityOperator& rho);

}  // namespace qnm
