#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "qnm/channel.hpp"
#include "qnm/robustness.hpp"

// Total non-Markovianity of a channel trajectory as the sum of positive
// increments of the generalized robustness of the Choi state, the diamond
// distance SDP, and the continuity-bound audit.

namespace qnm {

struct Increment {
    double t1 = 0;
    double t2 = 0;
    double delta = 0;  // R_G(t2) - R_G(t1) > threshold
};

struct NonMarkovReport {
    std::vector<double> times;
    std::vector<double> rg_values;
    std::vector<Increment> increments;
    double total = 0;
    double threshold = 0;
    std::string relaxation_label = kRelaxationLabel;
    bool partial = false;                // true if any sample solve failed
    std::vector<size_t> failed_samples;  // indices with non-optimal solves
};

struct ContinuityCheck {
    double lhs = 0;  // |N_Phi(t1,t2) - N_Lambda(t1,t2)|
    double rhs = 0;  // d^2 * (dd(t1) + dd(t2))
    bool satisfied = false;
};

/// R_G of the Choi state at every sample (primal route). Samples run on up to
/// `workers` threads; results are deterministic regardless of worker count.
std::vector<RobustnessResult> trajectory_robustness(const ChannelTrajectory& traj,
                                                    double tol = 1e-8, int workers = 1,
                                                    bool dual_route = false);

NonMarkovReport nm_total(const ChannelTrajectory& traj, double threshold = 1e-6,
                         double tol = 1e-8, int workers = 1);

/// Report assembly from precomputed per-sample robustness values.
NonMarkovReport assemble_report(const ChannelTrajectory& traj,
                                const std::vector<RobustnessResult>& rg, double threshold);

/// Diamond distance ||c1 - c2||_diamond in [0, 2] via the standard SDP on the
/// Choi matrix of the difference map.
double diamond_distance(const QuantumChannel& c1, const QuantumChannel& c2, double tol = 1e-8);

/// Theorem-style continuity audit with the provable prefactor
/// d^2 = dim(S) * dim(A).
ContinuityCheck continuity_check(const ChannelTrajectory& trajA, const ChannelTrajectory& trajB,
                                 double t1, double t2, double tol = 1e-8);

nlohmann::json report_to_json(const NonMarkovReport& r);
/// CSV with columns time, rg_value, increment_flag (%.12e formatting).
std::string report_to_csv(const NonMarkovReport& r);
void write_report(const NonMarkovReport& r, const std::string& csv_path,
                  const std::string& json_path);

/// Simple deterministic index-parallel map helper.
void parallel_for(size_t n, int workers, const std::function<void(size_t)>& fn);

}  // namespace qnm
