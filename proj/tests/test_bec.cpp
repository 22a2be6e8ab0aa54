#include "doctest.h"
#include "qnm/bec.hpp"
#include "qnm/constants.hpp"
#include "qnm/robustness.hpp"

using namespace qnm;
using namespace qnm::bec;

namespace {

// Independent composite-Simpson oracle for the k-integrals, written against
// the integrand directly (no shared quadrature code with the implementation).
double simpson_gamma1(const BECParams& p, double tau, int n = 20001) {
    const double c = p.bogoliubov_c();
    const double los = p.L() / p.sigma;
    const double xmax = 12.0, h = xmax / (n - 1);
    auto f = [&](double x) {
        if (x <= 0) return 0.0;
        const double w = std::sqrt(x * x * (x * x + c));
        const double s = 2 * x * los;
        const double br = 1.0 - std::sin(s) / s;
        return x * x * std::exp(-x * x / 2) / (x * x + c) * std::sin(tau * w) / 2.0 * br;
    };
    double acc = f(0) + f(xmax);
    for (int i = 1; i < n - 1; ++i) acc += f(i * h) * (i % 2 ? 4.0 : 2.0);
    return p.rate_prefactor() * acc * h / 3.0;
}

}  // namespace

TEST_CASE("preset encodes the documented sodium-in-rubidium setup") {
    const auto p = preset_na_rb(0.2);
    CHECK(p.lambda == doctest::Approx(600e-9));
    CHECK(p.L() == doctest::Approx(150e-9));
    CHECK(p.sigma == doctest::Approx(75e-9));
    CHECK(p.D == doctest::Approx(4 * p.L()));
    CHECK(p.a_SE == doctest::Approx(55 * constants::bohr_radius));
    CHECK(p.a_E == doctest::Approx(0.2 * 99 * constants::bohr_radius));
    CHECK(p.m_S == doctest::Approx(23 * constants::atomic_mass_unit));
    CHECK(p.m_E == doctest::Approx(87 * constants::atomic_mass_unit));
    // derived scales
    CHECK(p.t0() == doctest::Approx(2 * p.m_E * p.sigma * p.sigma / constants::hbar));
    CHECK(p.m_SE() == doctest::Approx(p.m_S * p.m_E / (p.m_S + p.m_E)));
    CHECK(p.bogoliubov_c() > 0);
    p.validate();
}

TEST_CASE("parameter validation") {
    auto p = preset_na_rb();
    p.D = 3.9 * p.L();
    CHECK_THROWS(p.validate());
    p = preset_na_rb();
    p.a_E = -1e-10;
    CHECK_THROWS(p.validate());
    CHECK_THROWS(gamma1(preset_na_rb(), -0.5));
}

TEST_CASE("gamma1 matches an independent Simpson quadrature") {
    const auto p = preset_na_rb(0.2);
    for (double tau : {0.5, 2.0, 8.0}) {
        const double ref = simpson_gamma1(p, tau);
        CHECK(gamma1(p, tau) == doctest::Approx(ref).epsilon(1e-7));
    }
    CHECK(gamma1(p, 0.0) == doctest::Approx(0.0));
    CHECK(gamma2(p, 0.0) == doctest::Approx(0.0));
}

TEST_CASE("gamma2 vanishes as the impurity separation grows") {
    auto p = preset_na_rb(0.2);
    const double g1 = std::abs(gamma1(p, 2.0));
    p.D = 1000 * p.L();
    CHECK(std::abs(gamma2(p, 2.0)) < 1e-3 * g1);
}

TEST_CASE("closed-form cumulative integral matches per-interval quadrature of gamma") {
    const auto p = preset_na_rb(0.3);
    const auto grid = uniform_grid(6.0, 13);
    const auto rt = integrated_rates(p, grid);
    const auto acc1 = integrate_rate([&](double t) { return gamma1(p, t); }, grid);
    const auto acc2 = integrate_rate([&](double t) { return gamma2(p, t); }, grid);
    for (size_t i = 0; i < grid.size(); ++i) {
        CHECK(rt.Gamma1[i] == doctest::Approx(acc1[i]).epsilon(1e-8));
        CHECK(rt.Gamma2[i] == doctest::Approx(acc2[i]).epsilon(1e-8));
    }
    CHECK(rt.Gamma1[0] == 0.0);
}

TEST_CASE("integrate_rate reproduces an analytic antiderivative") {
    const auto grid = uniform_grid(3.0, 7);
    const auto acc = integrate_rate([](double t) { return std::cos(2 * t); }, grid);
    for (size_t i = 0; i < grid.size(); ++i)
        CHECK(acc[i] == doctest::Approx(std::sin(2 * grid[i]) / 2.0).epsilon(1e-12));
}

TEST_CASE("coherence factors: identity at zero, symmetric, PSD, population-safe") {
    CHECK((coherence_factors(0, 0) - Eigen::Matrix4d::Ones()).norm() < 1e-14);
    const Eigen::Matrix4d f = coherence_factors(0.3, 0.1);
    CHECK((f - f.transpose()).norm() < 1e-14);
    for (int m = 0; m < 4; ++m) CHECK(f(m, m) == doctest::Approx(1.0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(f);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // the pair (01, 10) decoheres through gamma1 - gamma2 only
    CHECK(f(1, 2) == doctest::Approx(std::exp(-0.5 * (0.3 - 0.1) / 2 * 16)));
    // (00, 11) through gamma1 + gamma2
    CHECK(f(0, 3) == doctest::Approx(std::exp(-0.5 * (0.3 + 0.1) / 2 * 16)));
}

TEST_CASE("bec channel is an exact dephasing CPTP map") {
    const auto p = preset_na_rb(0.5);
    const auto grid = uniform_grid(4.0, 5);
    const auto rt = integrated_rates(p, grid);
    const auto ch = bec_channel(p, rt, grid[3]);
    check_choi(ch.choi_state());
    check_cptp(ch.kraus());
    // populations are untouched
    Matrix rho = Matrix::Zero(4, 4);
    rho(1, 1) = 0.25;
    rho(2, 2) = 0.75;
    CHECK((ch.apply_raw(rho) - rho).norm() < 1e-12);
    CHECK_THROWS(bec_channel(p, rt, 0.123456));  // off-grid
}

TEST_CASE("master-equation propagation agrees with the closed-form channel") {
    // RK4 on d rho / dt = sum_pm (g1 -/+ g2)/2 (L rho L - rho) elementwise for
    // dephasing: d rho_mn / dt = -theta'_mn(t) rho_mn with
    // theta'_mn = (g1-g2)/2 * dm^2 / 2 + (g1+g2)/2 * dp^2 / 2.
    const auto p = preset_na_rb(0.8);
    const double tau_end = 3.0;
    const auto grid = uniform_grid(tau_end, 4);
    const auto rt = integrated_rates(p, grid);
    static const double ap[4] = {2, 0, 0, -2}, am[4] = {0, 2, -2, 0};
    Matrix rho = Matrix::Constant(4, 4, Complex(0.25, 0));  // |++><++| like, all coherences
    const int steps = 4000;
    const double h = tau_end / steps;
    auto deriv = [&](double t, const Matrix& r) {
        const double g1 = gamma1(p, t), g2 = gamma2(p, t);
        Matrix d(4, 4);
        for (int m = 0; m < 4; ++m)
            for (int n = 0; n < 4; ++n) {
                const double dm = am[m] - am[n], dp = ap[m] - ap[n];
                d(m, n) = -0.5 * ((g1 - g2) / 2 * dm * dm + (g1 + g2) / 2 * dp * dp) * r(m, n);
            }
        return d;
    };
    for (int s = 0; s < steps; ++s) {
        const double t = s * h;
        const Matrix k1 = deriv(t, rho);
        const Matrix k2 = deriv(t + h / 2, rho + h / 2 * k1);
        const Matrix k3 = deriv(t + h / 2, rho + h / 2 * k2);
        const Matrix k4 = deriv(t + h, rho + h * k3);
        rho += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const auto ch = bec_channel(p, rt, tau_end);
    CHECK((ch.apply_raw(Matrix::Constant(4, 4, Complex(0.25, 0))) - rho).norm() < 1e-6);
}

TEST_CASE("trajectory starts at the identity and decays from R_G = 3") {
    const auto p = preset_na_rb(0.2);
    const auto grid = uniform_grid(2.0, 3);
    const auto traj = bec_trajectory(p, integrated_rates(p, grid));
    CHECK(traj.dim() == 4);
    CHECK((traj.channels[0].choi() - max_entangled(4).matrix()).norm() < 1e-12);
    const double rg0 = rg_primal(traj.channels[0].choi_state()).value;
    const double rg1 = rg_primal(traj.channels[2].choi_state()).value;
    CHECK(rg0 == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(rg1 < rg0);
}

TEST_CASE("grid helpers and calibration") {
    const auto g = uniform_grid(5.0, 11);
    REQUIRE(g.size() == 11);
    CHECK(g.front() == 0.0);
    CHECK(g.back() == doctest::Approx(5.0));
    CHECK_THROWS(uniform_grid(5.0, 1));
    CHECK_THROWS(integrated_rates(preset_na_rb(), {0.5, 1.0}));  // must start at 0
    CHECK_THROWS(integrated_rates(preset_na_rb(), {0.0, 1.0, 1.0}));

    const double tmax = calibrate_tmax(preset_na_rb(0.2));
    CHECK(tmax > 0.0);
    CHECK(tmax <= 60.0);
    // past the horizon the rate really is small relative to its peak
    const auto p = preset_na_rb(0.2);
    double peak = 0;
    for (double t = 0.25; t <= tmax; t += 0.25) peak = std::max(peak, std::abs(gamma1(p, t)));
    CHECK(std::abs(gamma1(p, tmax + 10.0)) < 0.05 * peak);
}

TEST_CASE("sweeps validate their input") {
    const auto p = preset_na_rb();
    const auto grid = uniform_grid(1.0, 3);
    CHECK_THROWS(sweep_ae(p, {}, grid));
    CHECK_THROWS(sweep_D(p, {3.0}, grid));  // D < 4L
}

TEST_CASE("a tiny a_E sweep runs and reports finite totals") {
    const auto p = preset_na_rb();
    const auto grid = uniform_grid(4.0, 6);
    const auto res = sweep_ae(p, {0.1, 1.0}, grid, 1e-6, 1e-8, 2);
    REQUIRE(res.points.size() == 2);
    for (const auto& pt : res.points) {
        CHECK(!pt.failed);
        CHECK(std::isfinite(pt.report.total));
        CHECK(pt.report.total >= 0.0);
    }
    const std::string csv = sweep_to_csv(res);
    CHECK(csv.rfind("a_E_over_aRb,nm_total,n_increments\n", 0) == 0);
}
