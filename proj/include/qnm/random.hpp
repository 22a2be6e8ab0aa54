#pragma once

#include <random>

#include "qnm/channel.hpp"
#include "qnm/hermitian.hpp"

// Seeded random fixtures for verification suites and tests.

namespace qnm {

using Rng = std::mt19937_64;

inline Matrix random_gaussian(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = Complex(n(rng), n(rng));
    return g;
}

inline Matrix random_hermitian(int dim, Rng& rng) {
    const Matrix g = random_gaussian(dim, dim, rng);
    return (g + g.adjoint()) / 2.0;
}

/// Hilbert-Schmidt-ish random density operator: G G^dag normalized.
inline DensityOperator random_state(int dim, Rng& rng, std::optional<Split> split = std::nullopt) {
    const Matrix g = random_gaussian(dim, dim, rng);
    Matrix rho = g * g.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(rho, split);
}

/// Haar random unitary via QR with phase-fixed R diagonal.
inline Matrix random_unitary(int dim, Rng& rng) {
    const Matrix g = random_gaussian(dim, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(dim, dim);
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < dim; ++j) {
        const Complex d = r(j, j);
        q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : Complex(1, 0);
    }
    return q;
}

/// Random CPTP channel from a Haar-ish isometry cut into kraus_count blocks.
inline QuantumChannel random_channel(int dim, int kraus_count, Rng& rng) {
    const Matrix g = random_gaussian(dim * kraus_count, dim, rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    const Matrix v = qr.householderQ() * Matrix::Identity(dim * kraus_count, dim);
    std::vector<Matrix> kraus;
    for (int i = 0; i < kraus_count; ++i) kraus.push_back(v.middleRows(i * dim, dim));
    return QuantumChannel::from_kraus(std::move(kraus));
}

}  // namespace qnm
