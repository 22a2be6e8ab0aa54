#include "qnm/witness_nm.hpp"

#include <cmath>
#include <stdexcept>

namespace qnm {

PositiveMapForm::PositiveMapForm(int d, std::vector<Matrix> blocks)
    : d_(d), blocks_(std::move(blocks)) {
    if (static_cast<int>(blocks_.size()) != d_ * d_)
        throw std::invalid_argument("PositiveMapForm: need d^2 blocks");
    for (const auto& b : blocks_)
        if (b.rows() != d_ || b.cols() != d_)
            throw std::invalid_argument("PositiveMapForm: block dim mismatch");
}

Matrix PositiveMapForm::apply(const Matrix& x) const {
    if (x.rows() != d_ || x.cols() != d_)
        throw std::invalid_argument("PositiveMapForm: input dim mismatch");
    Matrix out = Matrix::Zero(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) out += x(i, j) * block(i, j);
    return out;
}

Matrix PositiveMapForm::apply_adjoint(const Matrix& y) const {
    if (y.rows() != d_ || y.cols() != d_)
        throw std::invalid_argument("PositiveMapForm: input dim mismatch");
    Matrix out = Matrix::Zero(d_, d_);
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) out(i, j) = (block(i, j).adjoint() * y).trace();
    return out;
}

Matrix PositiveMapForm::apply_adjoint_second_slot(const Matrix& rho) const {
    if (rho.rows() != static_cast<long>(d_) * d_)
        throw std::invalid_argument("PositiveMapForm: bipartite dim mismatch");
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j)
            out.block(i * d_, j * d_, d_, d_) =
                apply_adjoint(rho.block(i * d_, j * d_, d_, d_));
    return out;
}

double PositiveMapForm::trace_preservation_deviation() const {
    double dev = 0;
    for (int i = 0; i < d_; ++i)
        for (int j = 0; j < d_; ++j) {
            const Complex tr = block(i, j).trace();
            dev = std::max(dev, std::abs(tr - (i == j ? Complex(1) : Complex(0))));
        }
    return dev;
}

IntervalWitness interval_witness(const ChannelTrajectory& traj, double t1, double t2,
                                 const WitnessOperator& w1, const WitnessOperator& w2) {
    if (t1 > t2) throw std::invalid_argument("interval_witness: t1 must be <= t2");
    const size_t i1 = traj.index_of(t1);
    const size_t i2 = traj.index_of(t2);
    const HermitianOperator a2 =
        traj.channels[i2].extend_to_ancilla().adjoint_apply(w2.w);
    const HermitianOperator a1 =
        traj.channels[i1].extend_to_ancilla().adjoint_apply(w1.w);
    const int d = traj.dim();
    return IntervalWitness{t1, t2,
                           HermitianOperator(a2.matrix() - a1.matrix(), Split{d, d})};
}

double interval_expectation(const IntervalWitness& iw) {
    const int d2 = iw.op.dim();
    const int d = static_cast<int>(std::lround(std::sqrt(static_cast<double>(d2))));
    const Vector phi = max_entangled_ket(d);
    return (phi.adjoint() * iw.op.matrix() * phi)(0).real();
}

double witnessed_nm(const IntervalWitness& iw) {
    return std::max(0.0, -interval_expectation(iw));
}

PositiveMapForm witness_to_map(const WitnessOperator& w) {
    if (!w.w.split() || w.w.split()->dA != w.w.split()->dB)
        throw std::invalid_argument("witness_to_map: witness must have a (d, d) split");
    const int d = w.w.split()->dA;
    std::vector<Matrix> blocks(static_cast<size_t>(d) * d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            blocks[static_cast<size_t>(i) * d + j] =
                static_cast<double>(d) * w.w.matrix().block(i * d, j * d, d, d);
    return PositiveMapForm(d, std::move(blocks));
}

double expectation_via_map(const PositiveMapForm& mf, const DensityOperator& rho) {
    const int d = mf.map_dim();
    if (rho.dim() != d * d)
        throw std::invalid_argument("expectation_via_map: dimension mismatch");
    const Matrix mapped = mf.apply_adjoint_second_slot(rho.matrix());
    const Vector phi = max_entangled_ket(d);
    return (phi.adjoint() * mapped * phi)(0).real();
}

}  // namespace qnm
