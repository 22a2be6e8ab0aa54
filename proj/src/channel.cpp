#include "qnm/channel.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace qnm {

void check_cptp(const std::vector<Matrix>& kraus, double tol) {
    if (kraus.empty()) throw std::invalid_argument("channel: empty Kraus list");
    const long d = kraus.front().rows();
    Matrix acc = Matrix::Zero(d, d);
    for (const auto& k : kraus) {
        if (k.rows() != d || k.cols() != d)
            throw std::invalid_argument("channel: Kraus operators must be square, equal dims");
        acc += k.adjoint() * k;
    }
    const double dev = (acc - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw std::invalid_argument("channel: not trace preserving, deviation " +
                                    std::to_string(dev));
}

void check_choi(const DensityOperator& joint, double tol) {
    if (!joint.split() || joint.split()->dA != joint.split()->dB)
        throw std::invalid_argument("choi: state must carry a (d, d) split");
    const int d = joint.split()->dA;
    const Matrix marg = partial_trace_raw(joint.matrix(), d, d, Subsystem::B);
    const double dev = (marg - Matrix::Identity(d, d) / d).cwiseAbs().maxCoeff();
    if (dev > tol)
        throw std::invalid_argument("choi: ancilla marginal is not Id/d, deviation " +
                                    std::to_string(dev));
}

DensityOperator choi_from_kraus(const std::vector<Matrix>& kraus) {
    check_cptp(kraus);
    const int d = static_cast<int>(kraus.front().rows());
    const Vector phi = max_entangled_ket(d);
    Matrix j = Matrix::Zero(d * d, d * d);
    const Matrix id = Matrix::Identity(d, d);
    for (const auto& k : kraus) {
        const Vector v = kron(k, id) * phi;
        j += v * v.adjoint();
    }
    return DensityOperator(j, Split{d, d});
}

std::vector<Matrix> kraus_from_choi(const DensityOperator& joint) {
    check_choi(joint);
    const int d = joint.split()->dA;
    Eigen::SelfAdjointEigenSolver<Matrix> es(joint.matrix());
    std::vector<Matrix> kraus;
    // Descending eigenvalue order for reproducible extraction.
    for (long idx = es.eigenvalues().size() - 1; idx >= 0; --idx) {
        const double lam = es.eigenvalues()(idx);
        if (lam <= 1e-10) continue;
        const Vector v = es.eigenvectors().col(idx);
        Matrix k(d, d);
        for (int s = 0; s < d; ++s)
            for (int a = 0; a < d; ++a) k(s, a) = v(s * d + a);
        kraus.push_back(std::sqrt(lam * d) * k);
    }
    return kraus;
}

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus) {
    check_cptp(kraus);
    QuantumChannel c;
    c.dim_ = static_cast<int>(kraus.front().rows());
    c.kraus_ = std::move(kraus);
    c.has_kraus_ = true;
    return c;
}

QuantumChannel QuantumChannel::from_choi(const DensityOperator& joint) {
    check_choi(joint);
    QuantumChannel c;
    c.dim_ = joint.split()->dA;
    c.choi_ = joint.matrix();
    c.has_choi_ = true;
    return c;
}

QuantumChannel QuantumChannel::identity(int dim) {
    return from_kraus({Matrix::Identity(dim, dim)});
}

void QuantumChannel::ensure_kraus() const {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (has_kraus_) return;
    kraus_ = kraus_from_choi(DensityOperator(choi_, Split{dim_, dim_}));
    has_kraus_ = true;
}

void QuantumChannel::ensure_choi() const {
    std::lock_guard<std::mutex> lock(*cache_mutex_);
    if (has_choi_) return;
    choi_ = choi_from_kraus(kraus_).matrix();
    has_choi_ = true;
}

const std::vector<Matrix>& QuantumChannel::kraus() const {
    ensure_kraus();
    return kraus_;
}

const Matrix& QuantumChannel::choi() const {
    ensure_choi();
    return choi_;
}

DensityOperator QuantumChannel::choi_state() const {
    return DensityOperator(choi(), Split{dim_, dim_});
}

Matrix QuantumChannel::apply_raw(const Matrix& x) const {
    if (x.rows() != dim_ || x.cols() != dim_)
        throw std::invalid_argument("apply: dimension mismatch");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const auto& k : kraus()) out += k * x * k.adjoint();
    return out;
}

Matrix QuantumChannel::apply_via_choi(const Matrix& x) const {
    if (x.rows() != dim_ || x.cols() != dim_)
        throw std::invalid_argument("apply: dimension mismatch");
    const Matrix big = choi() * kron(Matrix::Identity(dim_, dim_), x.transpose());
    return static_cast<double>(dim_) * partial_trace_raw(big, dim_, dim_, Subsystem::A);
}

DensityOperator QuantumChannel::apply(const DensityOperator& rho) const {
    return DensityOperator(apply_raw(rho.matrix()), rho.split());
}

HermitianOperator QuantumChannel::adjoint_apply(const HermitianOperator& w) const {
    if (w.dim() != dim_) throw std::invalid_argument("adjoint_apply: dimension mismatch");
    Matrix out = Matrix::Zero(dim_, dim_);
    for (const auto& k : kraus()) out += k.adjoint() * w.matrix() * k;
    return HermitianOperator(out, w.split());
}

QuantumChannel QuantumChannel::extend_to_ancilla() const {
    std::vector<Matrix> ext;
    const Matrix id = Matrix::Identity(dim_, dim_);
    for (const auto& k : kraus()) ext.push_back(kron(k, id));
    return from_kraus(std::move(ext));
}

QuantumChannel compose(const QuantumChannel& outer, const QuantumChannel& inner) {
    if (outer.dim() != inner.dim()) throw std::invalid_argument("compose: dimension mismatch");
    std::vector<Matrix> prod;
    for (const auto& ko : outer.kraus())
        for (const auto& ki : inner.kraus()) prod.push_back(ko * ki);
    return QuantumChannel::from_kraus(std::move(prod));
}

ChannelTrajectory::ChannelTrajectory(std::vector<double> t, std::vector<QuantumChannel> c)
    : times(std::move(t)), channels(std::move(c)) {
    if (times.empty() || times.size() != channels.size())
        throw std::invalid_argument("trajectory: times/channels length mismatch");
    for (size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0 || (i > 0 && times[i] <= times[i - 1]))
            throw std::invalid_argument("trajectory: times must be strictly increasing, >= 0");
        if (channels[i].dim() != channels.front().dim())
            throw std::invalid_argument("trajectory: inconsistent channel dims");
    }
    if (times.front() == 0.0) {
        const int d = channels.front().dim();
        const double dev =
            (channels.front().choi() - max_entangled(d).matrix()).cwiseAbs().maxCoeff();
        if (dev > 1e-10)
            throw std::invalid_argument("trajectory: channel at t=0 is not the identity");
    }
}

size_t ChannelTrajectory::index_of(double t) const {
    for (size_t i = 0; i < times.size(); ++i)
        if (times[i] == t) return i;
    throw std::invalid_argument("trajectory: time not on the sample grid");
}

}  // namespace qnm
