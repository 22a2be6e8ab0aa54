#include "qnm/measure.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "qnm/serialization.hpp"

namespace qnm {

void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn) {
    workers = std::max(1, workers);
    if (workers == 1 || n <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    const int nthreads = std::min<size_t>(workers, n);
    for (int t = 0; t < nthreads; ++t)
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i);
        });
    for (auto& th : pool) th.join();
}

std::vector<RobustnessResult> trajectory_robustness(const ChannelTrajectory& traj, double tol,
                                                    int workers, bool dual_route) {
    std::vector<RobustnessResult> out(traj.size());
    parallel_for(traj.size(), workers, [&](size_t i) {
        const DensityOperator choi = traj.channels[i].choi_state();
        out[i] = dual_route ? rg_dual_witness(choi, tol) : rg_primal(choi, tol);
    });
    return out;
}

NonMarkovReport assemble_report(const ChannelTrajectory& traj,
                                const std::vector<RobustnessResult>& rg, double threshold) {
    NonMarkovReport rep;
    rep.times = traj.times;
    rep.threshold = threshold;
    rep.rg_values.resize(rg.size(), 0.0);
    for (size_t i = 0; i < rg.size(); ++i) {
        if (rg[i].status != SolveStatus::Optimal) {
            rep.partial = true;
            rep.failed_samples.push_back(i);
            continue;
        }
        rep.rg_values[i] = rg[i].value;
    }
    for (size_t i = 0; i + 1 < rg.size(); ++i) {
        if (rg[i].status != SolveStatus::Optimal || rg[i + 1].status != SolveStatus::Optimal)
            continue;
        const double delta = rg[i + 1].value - rg[i].value;
        if (delta > threshold) {
            rep.increments.push_back({rep.times[i], rep.times[i + 1], delta});
            rep.total += delta;
        }
    }
    return rep;
}

NonMarkovReport nm_total(const ChannelTrajectory& traj, double threshold, double tol,
                         int workers) {
    return assemble_report(traj, trajectory_robustness(traj, tol, workers), threshold);
}

double diamond_distance(const QuantumChannel& c1, const QuantumChannel& c2, double tol) {
    if (c1.dim() != c2.dim()) throw std::invalid_argument("diamond_distance: dim mismatch");
    const int d = c1.dim();
    const int n = d * d;  // Choi dimension
    const Matrix ju = static_cast<double>(d) * (c1.choi() - c2.choi());

    SDProblem prob;
    const int vB = prob.add_variable(2 * n);  // [[Y0, -J], [-J, Y1]]
    const int vU0 = prob.add_variable(d);
    const int vU1 = prob.add_variable(d);
    const int vT0 = prob.add_variable(1);
    const int vT1 = prob.add_variable(1);
    prob.set_sense(Sense::Min);
    prob.add_objective(vT0, 0.5 * Matrix::Identity(1, 1));
    prob.add_objective(vT1, 0.5 * Matrix::Identity(1, 1));

    // Off-diagonal blocks of B pinned to -J.
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            Matrix gs = Matrix::Zero(2 * n, 2 * n);
            gs(r, n + c) = inv_sqrt2;
            gs(n + c, r) = inv_sqrt2;
            int con = prob.add_constraint((gs.adjoint() * [&] {
                                              Matrix k = Matrix::Zero(2 * n, 2 * n);
                                              k.topRightCorner(n, n) = -ju;
                                              k.bottomLeftCorner(n, n) = -ju.adjoint();
                                              return k;
                                          }())
                                              .trace()
                                              .real());
            prob.add_term(con, vB, gs);
            Matrix ga = Matrix::Zero(2 * n, 2 * n);
            ga(r, n + c) = Complex(0, inv_sqrt2);
            ga(n + c, r) = Complex(0, -inv_sqrt2);
            con = prob.add_constraint((ga.adjoint() * [&] {
                                          Matrix k = Matrix::Zero(2 * n, 2 * n);
                                          k.topRightCorner(n, n) = -ju;
                                          k.bottomLeftCorner(n, n) = -ju.adjoint();
                                          return k;
                                      }())
                                          .trace()
                                          .real());
            prob.add_term(con, vB, ga);
        }

    // Tr_out(Y_a) + U_a - t_a * Id = 0 over a Hermitian basis of the input space.
    const auto basis = hermitian_basis(d);
    const Matrix id_out = Matrix::Identity(d, d);
    for (int a = 0; a < 2; ++a) {
        for (const auto& h : basis) {
            const int con = prob.add_constraint(0.0);
            Matrix big = Matrix::Zero(2 * n, 2 * n);
            big.block(a * n, a * n, n, n) = kron(id_out, h);
            prob.add_term(con, vB, big);
            prob.add_term(con, a == 0 ? vU0 : vU1, h);
            prob.add_term(con, a == 0 ? vT0 : vT1,
                          -h.trace().real() * Matrix::Identity(1, 1));
        }
    }

    SDPSolution sol = solve(prob, tol);
    if (sol.status != SolveStatus::Optimal)
        throw std::runtime_error("diamond_distance: SDP did not reach optimality (" +
                                 to_string(sol.status) + ")");
    return std::max(0.0, sol.primal_value);
}

namespace {
double clamped_increase(const RobustnessResult& a, const RobustnessResult& b) {
    return std::max(0.0, b.value - a.value);
}
}  // namespace

ContinuityCheck continuity_check(const ChannelTrajectory& trajA, const ChannelTrajectory& trajB,
                                 double t1, double t2, double tol) {
    const size_t a1 = trajA.index_of(t1), a2 = trajA.index_of(t2);
    const size_t b1 = trajB.index_of(t1), b2 = trajB.index_of(t2);
    const RobustnessResult ra1 = rg_primal(trajA.channels[a1].choi_state(), tol);
    const RobustnessResult ra2 = rg_primal(trajA.channels[a2].choi_state(), tol);
    const RobustnessResult rb1 = rg_primal(trajB.channels[b1].choi_state(), tol);
    const RobustnessResult rb2 = rg_primal(trajB.channels[b2].choi_state(), tol);

    ContinuityCheck cc;
    cc.lhs = std::abs(clamped_increase(ra1, ra2) - clamped_increase(rb1, rb2));
    const double dsq = static_cast<double>(trajA.dim()) * trajA.dim();
    cc.rhs = dsq * (diamond_distance(trajA.channels[a1], trajB.channels[b1], tol) +
                    diamond_distance(trajA.channels[a2], trajB.channels[b2], tol));
    cc.satisfied = cc.lhs <= cc.rhs + 1e-8;
    return cc;
}

nlohmann::json report_to_json(const NonMarkovReport& r) {
    nlohmann::json j;
    j["total"] = r.total;
    j["threshold"] = r.threshold;
    j["relaxation_label"] = r.relaxation_label;
    j["partial"] = r.partial;
    j["failed_samples"] = r.failed_samples;
    nlohmann::json incs = nlohmann::json::array();
    for (const auto& inc : r.increments)
        incs.push_back({{"t1", inc.t1}, {"t2", inc.t2}, {"delta", inc.delta}});
    j["increments"] = incs;
    j["times"] = r.times;
    j["rg_values"] = r.rg_values;
    return j;
}

std::string report_to_csv(const NonMarkovReport& r) {
    std::ostringstream out;
    out << "time,rg_value,increment_flag\n";
    for (size_t i = 0; i < r.times.size(); ++i) {
        int flag = 0;
        for (const auto& inc : r.increments)
            if (inc.t2 == r.times[i]) flag = 1;
        out << format_double(r.times[i]) << "," << format_double(r.rg_values[i]) << "," << flag
            << "\n";
    }
    return out.str();
}

void write_report(const NonMarkovReport& r, const std::string& csv_path,
                  const std::string& json_path) {
    std::ofstream csv(csv_path);
    if (!csv) throw std::runtime_error("cannot write " + csv_path);
    csv << report_to_csv(r);
    write_json_file(json_path, report_to_json(r));
}

}  // namespace qnm
