#include "qnm/bec.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "qnm/constants.hpp"
#include "qnm/serialization.hpp"

namespace qnm::bec {

using boost::math::quadrature::gauss_kronrod;

namespace {

constexpr double kXMax = 12.0;  // Gaussian envelope e^{-x^2/2} < 1e-31 beyond
constexpr int kMaxDepth = 15;
constexpr double kAbsTol = 1e-10;

double sinc(double z) {
    if (std::abs(z) < 1e-8) return 1.0 - z * z / 6.0;
    return std::sin(z) / z;
}

struct Kernel {
    double c;          // Bogoliubov parameter
    double prefactor;  // rate units 1/t0
    double l_over_sigma;
    double d_over_sigma;

    double envelope(double x) const { return x * x * std::exp(-x * x / 2.0) / (x * x + c); }
    double dispersion(double x) const { return std::sqrt(x * x * (x * x + c)); }
    double bracket1(double x) const { return 1.0 - sinc(2.0 * x * l_over_sigma); }
    double bracket2(double x) const {
        return sinc(2.0 * x * (d_over_sigma + l_over_sigma)) +
               sinc(2.0 * x * (d_over_sigma - l_over_sigma)) - 2.0 * sinc(2.0 * x * d_over_sigma);
    }
};

Kernel make_kernel(const BECParams& p) {
    p.validate();
    return Kernel{p.bogoliubov_c(), p.rate_prefactor(), p.L() / p.sigma, p.D / p.sigma};
}

double integrate_checked(const std::function<double(double)>& f) {
    double error = 0;
    const double v =
        gauss_kronrod<double, 15>::integrate(f, 0.0, kXMax, kMaxDepth, 1e-12, &error);
    if (error > kAbsTol && error > 1e-8 * std::abs(v))
        throw std::runtime_error("bec: quadrature did not converge, error estimate " +
                                 std::to_string(error));
    return v;
}

// sin * cos product evaluated as sin(E t / hbar)/2 to reduce cancellation.
double rate_integral(const Kernel& k, double tau, bool second) {
    auto f = [&](double x) {
        if (x < 1e-12) return 0.0;
        const double br = second ? k.bracket2(x) : k.bracket1(x);
        return k.envelope(x) * std::sin(tau * k.dispersion(x)) / 2.0 * br;
    };
    const double scale = second ? k.prefactor / 2.0 : k.prefactor;
    return scale * integrate_checked(f);
}

// int_0^tau sin(w s) ds = (1 - cos(w tau)) / w, exact in time.
double cumulative_integral(const Kernel& k, double tau, bool second) {
    auto f = [&](double x) {
        if (x < 1e-12) return 0.0;
        const double w = k.dispersion(x);
        const double br = second ? k.bracket2(x) : k.bracket1(x);
        return k.envelope(x) * (1.0 - std::cos(tau * w)) / (2.0 * w) * br;
    };
    const double scale = second ? k.prefactor / 2.0 : k.prefactor;
    return scale * integrate_checked(f);
}

}  // namespace

double BECParams::g_E() const {
    return 4.0 * M_PI * constants::hbar * constants::hbar * a_E / m_E;
}

double BECParams::m_SE() const { return m_S * m_E / (m_S + m_E); }

double BECParams::g_SE() const {
    return 2.0 * M_PI * constants::hbar * constants::hbar * a_SE / m_SE();
}

double BECParams::t0() const { return 2.0 * m_E * sigma * sigma / constants::hbar; }

double BECParams::bogoliubov_c() const { return 2.0 * n0 * g_E() * t0() / constants::hbar; }

double BECParams::rate_prefactor() const {
    const double t = t0();
    return g_SE() * g_SE() * n0 * t * t /
           (constants::hbar * constants::hbar * M_PI * M_PI * sigma * sigma * sigma);
}

void BECParams::validate() const {
    if (a_E <= 0 || a_SE <= 0 || lambda <= 0 || n0 <= 0 || m_S <= 0 || m_E <= 0 || sigma <= 0)
        throw std::invalid_argument("bec: all physical parameters must be positive");
    if (D < 4.0 * L() - 1e-15 * lambda)
        throw std::invalid_argument("bec: impurity separation requires D >= 4L");
}

double a_rb() { return 99.0 * constants::bohr_radius; }

BECParams preset_na_rb(double ae_over_arb) {
    BECParams p;
    p.a_E = ae_over_arb * a_rb();
    p.a_SE = 55.0 * constants::bohr_radius;
    p.lambda = 600e-9;
    p.n0 = 1e20;
    p.m_S = 23.0 * constants::atomic_mass_unit;
    p.m_E = 87.0 * constants::atomic_mass_unit;
    p.sigma = p.L() / 2.0;
    p.D = 4.0 * p.L();
    return p;
}

BECParams params_from_json(const nlohmann::json& j) {
    BECParams p = preset_na_rb();
    auto get = [&](const char* key, double& target) {
        if (j.contains(key)) target = j.at(key).get<double>();
    };
    if (j.contains("a_E_over_aRb")) p.a_E = j.at("a_E_over_aRb").get<double>() * a_rb();
    get("a_E", p.a_E);
    get("a_SE", p.a_SE);
    get("lambda", p.lambda);
    get("n0", p.n0);
    get("m_S", p.m_S);
    get("m_E", p.m_E);
    if (j.contains("sigma_over_L"))
        p.sigma = j.at("sigma_over_L").get<double>() * p.L();
    get("sigma", p.sigma);
    if (j.contains("D_over_L")) p.D = j.at("D_over_L").get<double>() * p.L();
    get("D", p.D);
    p.validate();
    return p;
}

nlohmann::json to_json(const BECParams& p) {
    return nlohmann::json{{"a_E", p.a_E},     {"a_SE", p.a_SE}, {"lambda", p.lambda},
                          {"n0", p.n0},       {"m_S", p.m_S},   {"m_E", p.m_E},
                          {"sigma", p.sigma}, {"D", p.D},       {"t0", p.t0()}};
}

double gamma1(const BECParams& p, double tau) {
    if (tau < 0) throw std::invalid_argument("bec: tau must be >= 0");
    return rate_integral(make_kernel(p), tau, false);
}

double gamma2(const BECParams& p, double tau) {
    if (tau < 0) throw std::invalid_argument("bec: tau must be >= 0");
    return rate_integral(make_kernel(p), tau, true);
}

std::pair<double, double> gamma_rates(const BECParams& p, double tau) {
    return {gamma1(p, tau), gamma2(p, tau)};
}

double gamma1_integral(const BECParams& p, double tau) {
    return cumulative_integral(make_kernel(p), tau, false);
}

double gamma2_integral(const BECParams& p, double tau) {
    return cumulative_integral(make_kernel(p), tau, true);
}

RateTable integrated_rates(const BECParams& p, const std::vector<double>& grid) {
    if (grid.empty() || grid.front() != 0.0)
        throw std::invalid_argument("bec: grid must start at 0");
    for (size_t i = 1; i < grid.size(); ++i)
        if (grid[i] <= grid[i - 1])
            throw std::invalid_argument("bec: grid must be strictly increasing");
    const Kernel k = make_kernel(p);
    RateTable rt;
    rt.times = grid;
    for (double tau : grid) {
        rt.gamma1.push_back(rate_integral(k, tau, false));
        rt.gamma2.push_back(rate_integral(k, tau, true));
        rt.Gamma1.push_back(cumulative_integral(k, tau, false));
        rt.Gamma2.push_back(cumulative_integral(k, tau, true));
    }
    return rt;
}

std::vector<double> integrate_rate(const std::function<double(double)>& rate,
                                   const std::vector<double>& grid) {
    std::vector<double> out;
    out.push_back(0.0);
    double acc = 0;
    for (size_t i = 1; i < grid.size(); ++i) {
        double error = 0;
        acc += gauss_kronrod<double, 15>::integrate(rate, grid[i - 1], grid[i], kMaxDepth, 1e-12,
                                                    &error);
        out.push_back(acc);
    }
    return out;
}

Eigen::Matrix4d coherence_factors(double Gamma1, double Gamma2) {
    // sigma_z eigenvalue sums/differences per basis state 00, 01, 10, 11.
    static const double ap[4] = {2, 0, 0, -2};
    static const double am[4] = {0, 2, -2, 0};
    const double cm = (Gamma1 - Gamma2) / 2.0;
    const double cp = (Gamma1 + Gamma2) / 2.0;
    Eigen::Matrix4d f;
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) {
            const double dm = am[m] - am[n];
            const double dp = ap[m] - ap[n];
            f(m, n) = std::exp(-0.5 * (cm * dm * dm + cp * dp * dp));
        }
    return f;
}

namespace {
size_t grid_index(const RateTable& rt, double tau) {
    for (size_t i = 0; i < rt.times.size(); ++i)
        if (rt.times[i] == tau) return i;
    throw std::invalid_argument("bec: time not on the rate-table grid");
}

QuantumChannel dephasing_channel(double Gamma1, double Gamma2) {
    const Eigen::Matrix4d f = coherence_factors(Gamma1, Gamma2);
    Matrix j = Matrix::Zero(16, 16);
    for (int m = 0; m < 4; ++m)
        for (int n = 0; n < 4; ++n) j(m * 4 + m, n * 4 + n) = f(m, n) / 4.0;
    return QuantumChannel::from_choi(DensityOperator(j, Split{4, 4}));
}
}  // namespace

QuantumChannel bec_channel(const BECParams& p, const RateTable& rt, double tau) {
    p.validate();
    const size_t i = grid_index(rt, tau);
    return dephasing_channel(rt.Gamma1[i], rt.Gamma2[i]);
}

ChannelTrajectory bec_trajectory(const BECParams& p, const RateTable& rt) {
    p.validate();
    std::vector<QuantumChannel> channels;
    for (size_t i = 0; i < rt.times.size(); ++i)
        channels.push_back(dephasing_channel(rt.Gamma1[i], rt.Gamma2[i]));
    return ChannelTrajectory(rt.times, std::move(channels));
}

std::vector<double> uniform_grid(double tau_max, int samples) {
    if (samples < 2 || tau_max <= 0)
        throw std::invalid_argument("bec: need samples >= 2 and tau_max > 0");
    std::vector<double> g(samples);
    for (int i = 0; i < samples; ++i) g[i] = tau_max * i / (samples - 1);
    return g;
}

double calibrate_tmax(const BECParams& p) {
    const Kernel k = make_kernel(p);
    const double step = 0.25, horizon = 60.0;
    std::vector<double> vals;
    double peak = 0;
    for (double tau = step; tau <= horizon + 1e-12; tau += step) {
        vals.push_back(std::abs(rate_integral(k, tau, false)));
        peak = std::max(peak, vals.back());
    }
    double tmax = horizon;
    for (size_t i = vals.size(); i-- > 0;) {
        if (vals[i] >= 0.01 * peak) {
            tmax = step * static_cast<double>(i + 2);
            break;
        }
    }
    return std::min(tmax, horizon);
}

namespace {
SweepResult run_sweep(const std::string& parameter, const BECParams& base,
                      const std::vector<double>& values,
                      const std::function<BECParams(double)>& make_params,
                      const std::vector<double>& grid, double threshold, double tol,
                      int workers) {
    if (values.empty()) throw std::invalid_argument("bec: empty sweep list");
    SweepResult res;
    res.parameter = parameter;
    for (double v : values) {
        SweepPoint pt;
        pt.value = v;
        try {
            const BECParams p = make_params(v);
            const RateTable rt = integrated_rates(p, grid);
            const ChannelTrajectory traj = bec_trajectory(p, rt);
            pt.report = nm_total(traj, threshold, tol, workers);
            pt.failed = pt.report.partial;
        } catch (const std::exception& e) {
            pt.failed = true;
            pt.error = e.what();
        }
        res.points.push_back(std::move(pt));
    }
    return res;
}
}  // namespace

SweepResult sweep_ae(const BECParams& base, const std::vector<double>& ae_over_arb,
                     const std::vector<double>& grid, double threshold, double tol,
                     int workers) {
    return run_sweep(
        "a_E_over_aRb", base, ae_over_arb,
        [&](double v) {
            BECParams p = base;
            p.a_E = v * a_rb();
            p.validate();
            return p;
        },
        grid, threshold, tol, workers);
}

SweepResult sweep_D(const BECParams& base, const std::vector<double>& d_over_L,
                    const std::vector<double>& grid, double threshold, double tol,
                    int workers) {
    for (double v : d_over_L)
        if (v < 4.0) throw std::invalid_argument("bec: sweep requires D >= 4L");
    return run_sweep(
        "D_over_L", base, d_over_L,
        [&](double v) {
            BECParams p = base;
            p.D = v * p.L();
            p.validate();
            return p;
        },
        grid, threshold, tol, workers);
}

std::string sweep_to_csv(const SweepResult& s) {
    std::ostringstream out;
    out << s.parameter << ",nm_total,n_increments\n";
    for (const auto& pt : s.points) {
        out << format_double(pt.value) << ",";
        if (pt.failed && pt.report.times.empty())
            out << "nan,0";
        else
            out << format_double(pt.report.total) << "," << pt.report.increments.size();
        out << "\n";
    }
    return out.str();
}

}  // namespace qnm::bec
