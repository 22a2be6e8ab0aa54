#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"
#include "qnm/channel.hpp"
#include "qnm/measure.hpp"

// Two impurity atoms in a double-well superlattice, dephasing through a BEC
// environment. Time-dependent decay rates gamma1(t), gamma2(t) come from
// oscillatory k-integrals over the Bogoliubov spectrum; the master equation
// has Lindblad operators sz1 -/+ sz2 with rates (gamma1 -/+ gamma2)/2, so the
// channel is exact two-qubit pure dephasing in the computational basis.
//
// All trajectory-facing quantities are dimensionless: times in units of
// t0 = 2 m_E sigma^2 / hbar (independent of a_E, so one grid serves a whole
// a_E sweep), rates in 1/t0.

namespace qnm::bec {

struct BECParams {
    double a_E;      // BEC scattering length (m)
    double a_SE;     // system-environment scattering length (m)
    double lambda;   // lattice wavelength (m)
    double n0;       // condensate density (m^-3)
    double m_S;      // impurity mass (kg)
    double m_E;      // condensate atom mass (kg)
    double sigma;    // lattice-site variance parameter (m); not fixed by the
                     // physical setup here, defaults to L/2 = lambda/8
    double D;        // impurity separation (m), D >= 4L

    double L() const { return lambda / 4.0; }
    double g_E() const;
    double g_SE() const;
    double m_SE() const;
    /// Time unit t0 = 2 m_E sigma^2 / hbar (s).
    double t0() const;
    /// Dimensionless Bogoliubov parameter c = 2 n0 g_E / (hbar / t0).
    double bogoliubov_c() const;
    /// Rate prefactor in units of 1/t0.
    double rate_prefactor() const;

    void validate() const;  // throws on nonpositive inputs or D < 4L
};

/// 23Na impurities in a 87Rb condensate: lambda = 600 nm, n0 = 1e20 m^-3,
/// a_Rb = 99 a0, a_SE = 55 a0, a_E = ae_over_arb * a_Rb, D = 4L, sigma = L/2.
BECParams preset_na_rb(double ae_over_arb = 0.2);
/// a_Rb = 99 a0 in meters.
double a_rb();

BECParams params_from_json(const nlohmann::json& j);
nlohmann::json to_json(const BECParams& p);

/// Decay rates at dimensionless time tau, in units of 1/t0. Adaptive
/// Gauss-Kronrod quadrature of the k-integrals, absolute error <= 1e-10.
std::pair<double, double> gamma_rates(const BECParams& p, double tau);
double gamma1(const BECParams& p, double tau);
double gamma2(const BECParams& p, double tau);

/// Cumulative integrals int_0^tau gamma ds (dimensionless), evaluated by the
/// closed-form time integral inside the k-quadrature.
double gamma1_integral(const BECParams& p, double tau);
double gamma2_integral(const BECParams& p, double tau);

struct RateTable {
    std::vector<double> times;   // dimensionless tau grid
    std::vector<double> gamma1;  // 1/t0 units
    std::vector<double> gamma2;
    std::vector<double> Gamma1;  // cumulative integrals
    std::vector<double> Gamma2;
};

RateTable integrated_rates(const BECParams& p, const std::vector<double>& grid);

/// Quadrature test hook: cumulative integral of an arbitrary rate function
/// over the grid (adaptive composite on each interval).
std::vector<double> integrate_rate(const std::function<double(double)>& rate,
                                   const std::vector<double>& grid);

/// Coherence decay factors F(m, n) = exp(-Theta_mn) for the two-qubit
/// dephasing channel at cumulative exponents (Gamma1, Gamma2).
Eigen::Matrix4d coherence_factors(double Gamma1, double Gamma2);

/// Exact dephasing channel at grid time tau (tau must be on rt.times).
QuantumChannel bec_channel(const BECParams& p, const RateTable& rt, double tau);

/// Trajectory over the whole rate-table grid.
ChannelTrajectory bec_trajectory(const BECParams& p, const RateTable& rt);

/// Uniform n-sample grid on [0, tau_max].
std::vector<double> uniform_grid(double tau_max, int samples);

/// Dimensionless horizon: last time |gamma1| still exceeds 1% of its peak,
/// scanned on (0, 60] with step 0.25.
double calibrate_tmax(const BECParams& p);

struct SweepPoint {
    double value = 0;  // a_E / a_Rb or D / L
    NonMarkovReport report;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::string parameter;  // "a_E_over_aRb" or "D_over_L"
    std::vector<SweepPoint> points;
};

SweepResult sweep_ae(const BECParams& base, const std::vector<double>& ae_over_arb,
                     const std::vector<double>& grid, double threshold = 1e-6,
                     double tol = 1e-8, int workers = 1);
SweepResult sweep_D(const BECParams& base, const std::vector<double>& d_over_L,
                    const std::vector<double>& grid, double threshold = 1e-6,
                    double tol = 1e-8, int workers = 1);

/// Summary CSV: (parameter, nm_total, n_increments) rows.
std::string sweep_to_csv(const SweepResult& s);

}  // namespace qnm::bec
