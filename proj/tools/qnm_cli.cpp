// qnm: non-Markovianity quantification via the generalized robustness of the
// Choi trajectory. Subcommands: robustness | nm | bec-sweep | verify.
//
// Exit codes: 0 success, 1 validation error, 2 solver failure, 3 partial results.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qnm/bec.hpp"
#include "qnm/measure.hpp"
#include "qnm/random.hpp"
#include "qnm/robustness.hpp"
#include "qnm/serialization.hpp"
#include "qnm/witness_nm.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kSolverFailure = 2;
constexpr int kPartial = 3;

namespace fs = std::filesystem;

std::string out_dir_env_or(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("QNM_OUT_DIR")) return env;
    return ".";
}

void write_text(const fs::path& path, const std::string& body) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << body;
}

nlohmann::json robustness_to_json(const qnm::RobustnessResult& r) {
    nlohmann::json j;
    j["value"] = r.value;
    j["raw"] = r.raw;
    j["gap"] = r.gap;
    j["status"] = qnm::to_string(r.status);
    j["relaxation"] = qnm::kRelaxationLabel;
    if (r.witness)
        j["witness"] = qnm::matrix_to_json(r.witness->w.matrix(), r.witness->w.split());
    return j;
}

int cmd_robustness(const std::string& state_path, const std::string& route, double tol,
                   const std::string& out_path) {
    qnm::DensityOperator rho = [&] {
        try {
            return qnm::density_from_json(qnm::load_json_file(state_path));
        } catch (const std::exception& e) {
            throw CLI::ValidationError("state", e.what());
        }
    }();
    if (!rho.split()) throw CLI::ValidationError("state", "state JSON needs a bipartite split");
    const qnm::RobustnessResult r =
        route == "dual" ? qnm::rg_dual_witness(rho, tol) : qnm::rg_primal(rho, tol);
    const nlohmann::json j = robustness_to_json(r);
    if (out_path == "-")
        std::cout << j.dump(2) << "\n";
    else
        qnm::write_json_file(out_path, j);
    if (r.status != qnm::SolveStatus::Optimal) {
        std::cerr << "solver did not reach optimality: " << qnm::to_string(r.status) << "\n";
        return kSolverFailure;
    }
    return kOk;
}

int cmd_nm(const std::string& traj_path, double threshold, double tol, int workers,
           const std::string& out_dir) {
    const qnm::ChannelTrajectory traj = [&] {
        try {
            return qnm::trajectory_from_json(qnm::load_json_file(traj_path));
        } catch (const std::exception& e) {
            throw CLI::ValidationError("trajectory", e.what());
        }
    }();
    const qnm::NonMarkovReport rep = qnm::nm_total(traj, threshold, tol, workers);
    const fs::path dir = out_dir_env_or(out_dir);
    fs::create_directories(dir);
    qnm::write_report(rep, (dir / "nm_report.csv").string(), (dir / "nm_report.json").string());
    std::cout << "nm_total " << qnm::format_double(rep.total) << " (" << rep.increments.size()
              << " increments, " << qnm::kRelaxationLabel << ")\n";
    if (rep.partial) {
        std::cerr << rep.failed_samples.size() << " sample solves failed; report is partial\n";
        return kPartial;
    }
    return kOk;
}

int cmd_bec_sweep(const std::string& preset_path, const std::string& sweep,
                  std::vector<double> values, int grid_samples, double tmax, double sigma_over_L,
                  double threshold, double tol, int workers, const std::string& out_dir) {
    qnm::bec::BECParams base = qnm::bec::preset_na_rb();
    if (!preset_path.empty()) {
        try {
            base = qnm::bec::params_from_json(qnm::load_json_file(preset_path));
        } catch (const std::exception& e) {
            throw CLI::ValidationError("preset", e.what());
        }
    }
    if (sigma_over_L > 0) base.sigma = sigma_over_L * base.L();
    base.validate();

    if (values.empty()) {
        if (sweep == "ae")
            for (int i = 0; i < 20; ++i) values.push_back(0.01 + (0.3 - 0.01) * i / 19.0);
        else
            values = {4, 6, 8, 10};
    }
    if (grid_samples < 2) throw CLI::ValidationError("--grid", "need at least 2 samples");
    if (tmax <= 0) tmax = qnm::bec::calibrate_tmax(base);
    const std::vector<double> grid = qnm::bec::uniform_grid(tmax, grid_samples);

    const qnm::bec::SweepResult res =
        sweep == "ae" ? qnm::bec::sweep_ae(base, values, grid, threshold, tol, workers)
                      : qnm::bec::sweep_D(base, values, grid, threshold, tol, workers);

    const fs::path dir = out_dir_env_or(out_dir);
    fs::create_directories(dir);
    write_text(dir / ("sweep_" + sweep + ".csv"), qnm::bec::sweep_to_csv(res));
    nlohmann::json meta = qnm::bec::to_json(base);
    meta["tmax"] = tmax;
    meta["grid_samples"] = grid_samples;
    meta["sweep"] = res.parameter;
    qnm::write_json_file((dir / "sweep_params.json").string(), meta);
    bool any_failed = false;
    for (size_t i = 0; i < res.points.size(); ++i) {
        const auto& pt = res.points[i];
        char tag[32];
        std::snprintf(tag, sizeof(tag), "point_%02zu", i);
        if (pt.failed && pt.report.times.empty()) {
            any_failed = true;
            std::cerr << res.parameter << " = " << pt.value << " failed: " << pt.error << "\n";
            continue;
        }
        any_failed = any_failed || pt.failed;
        qnm::write_report(pt.report, (dir / (std::string(tag) + ".csv")).string(),
                          (dir / (std::string(tag) + ".json")).string());
        std::cout << res.parameter << " " << qnm::format_double(pt.value) << " nm_total "
                  << qnm::format_double(pt.report.total) << "\n";
    }
    return any_failed ? kPartial : kOk;
}

// ---- verify -----------------------------------------------------------------

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

qnm::ChannelTrajectory dephasing_semigroup(double rate, const std::vector<double>& times) {
    std::vector<qnm::QuantumChannel> chs;
    for (double t : times) {
        const double f = std::exp(-rate * t);
        qnm::Matrix j(4, 4);
        j << 0.5, 0, 0, 0.5 * f, 0, 0, 0, 0, 0, 0, 0, 0, 0.5 * f, 0, 0, 0.5;
        chs.push_back(qnm::QuantumChannel::from_choi(qnm::DensityOperator(j, qnm::Split{2, 2})));
    }
    return qnm::ChannelTrajectory(times, std::move(chs));
}

qnm::QuantumChannel depolarizing_qubit(double p) {
    const qnm::Complex i(0, 1);
    qnm::Matrix X(2, 2), Y(2, 2), Z(2, 2), I2 = qnm::Matrix::Identity(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, -i, i, 0;
    Z << 1, 0, 0, -1;
    return qnm::QuantumChannel::from_kraus({std::sqrt(1 - 3 * p / 4) * I2, std::sqrt(p / 4) * X,
                                            std::sqrt(p / 4) * Y, std::sqrt(p / 4) * Z});
}

std::vector<Check> run_verify(bool quick, double tol, const std::string& bound_factor) {
    std::vector<Check> checks;
    auto push = [&](const std::string& name, bool pass, const std::string& detail) {
        checks.push_back({name, pass, detail});
    };
    char buf[128];

    {  // ground truth: R_G(phi+(2)) = 1 both routes; full run adds d = 4.
        const auto phi2 = qnm::max_entangled(2);
        const double p = qnm::rg_primal(phi2, tol).value;
        const double d = qnm::rg_dual_witness(phi2, tol).value;
        bool ok = std::abs(p - 1) <= 1e-6 && std::abs(d - 1) <= 1e-6;
        std::snprintf(buf, sizeof(buf), "primal %.3e dual %.3e vs 1", p, d);
        std::string detail = buf;
        if (!quick) {
            const auto phi4 = qnm::max_entangled(4);
            const double p4 = qnm::rg_primal(phi4, tol).value;
            ok = ok && std::abs(p4 - 3) <= 1e-6;
            std::snprintf(buf, sizeof(buf), "; d=4 primal %.3e vs 3", p4);
            detail += buf;
        }
        push("robustness-ground-truth", ok, detail);
    }

    {  // strong duality on random states
        qnm::Rng rng(7);
        const int n2 = quick ? 5 : 12, n4 = quick ? 0 : 4;
        double worst = 0;
        bool ok = true;
        for (int k = 0; k < n2 + n4; ++k) {
            const int d = k < n2 ? 2 : 4;
            const auto rho = qnm::random_state(d * d, rng, qnm::Split{d, d});
            const auto rp = qnm::rg_primal(rho, tol);
            const auto rd = qnm::rg_dual_witness(rho, tol);
            ok = ok && rp.optimal() && rd.optimal();
            worst = std::max(worst, std::abs(rp.raw - rd.raw));
        }
        std::snprintf(buf, sizeof(buf), "max |primal - dual| = %.3e over %d states", worst,
                      n2 + n4);
        push("strong-duality", ok && worst <= 1e-6, buf);
    }

    {  // map-form identity on random witnesses/states
        qnm::Rng rng(11);
        double worst = 0;
        for (int k = 0; k < 10; ++k) {
            const auto rho = qnm::random_state(4, rng, qnm::Split{2, 2});
            const auto r = qnm::rg_primal(rho, tol);
            if (!r.witness) continue;
            const auto mf = qnm::witness_to_map(*r.witness);
            const auto probe = qnm::random_state(4, rng, qnm::Split{2, 2});
            const double lhs = (r.witness->w.matrix() * probe.matrix()).trace().real();
            const double rhs = qnm::expectation_via_map(mf, probe);
            worst = std::max(worst, std::abs(lhs - rhs));
        }
        std::snprintf(buf, sizeof(buf), "max |Tr(W rho) - map form| = %.3e", worst);
        push("map-form-identity", worst <= 1e-9, buf);
    }

    {  // unitary trajectory has zero measure
        qnm::Rng rng(3);
        std::vector<double> times;
        std::vector<qnm::QuantumChannel> chs;
        for (int k = 0; k < 8; ++k) {
            times.push_back(k * 0.5);
            const qnm::Matrix u =
                k == 0 ? qnm::Matrix::Identity(2, 2) : qnm::random_unitary(2, rng);
            chs.push_back(qnm::QuantumChannel::from_kraus({u}));
        }
        const auto rep = qnm::nm_total(qnm::ChannelTrajectory(times, std::move(chs)), 1e-8, tol);
        std::snprintf(buf, sizeof(buf), "nm_total = %.3e on 8 unitary samples", rep.total);
        push("zero-unitary", !rep.partial && rep.total <= 1e-8, buf);
    }

    {  // diamond distance ground truth
        const double dd =
            qnm::diamond_distance(qnm::QuantumChannel::identity(2), depolarizing_qubit(1.0), tol);
        std::snprintf(buf, sizeof(buf), "distance(id, depolarizing) = %.9f vs 1.5", dd);
        push("diamond-depolarizing", std::abs(dd - 1.5) <= 1e-6, buf);
    }

    {  // continuity bound audit on random channel pairs
        qnm::Rng rng(23);
        const int trials = quick ? 5 : 20;
        int violations = 0;
        double tightest = 1e9;
        for (int k = 0; k < trials; ++k) {
            std::vector<double> times = {0, 1};
            auto mk = [&](qnm::Rng& r) {
                std::vector<qnm::QuantumChannel> c;
                c.push_back(qnm::QuantumChannel::identity(2));
                c.push_back(qnm::random_channel(2, 2, r));
                return qnm::ChannelTrajectory(times, std::move(c));
            };
            const auto ta = mk(rng), tb = mk(rng);
            auto cc = qnm::continuity_check(ta, tb, 0, 1, tol);
            if (bound_factor == "d") cc.rhs /= ta.dim();  // deliberate fault injection
            tightest = std::min(tightest, cc.rhs - cc.lhs);
            if (cc.lhs > cc.rhs + 1e-8) ++violations;
        }
        std::snprintf(buf, sizeof(buf), "%d/%d violations, min slack %.3e (factor %s)",
                      violations, trials, tightest, bound_factor.c_str());
        push("continuity-bound", violations == 0, buf);
    }

    if (!quick) {
        {  // constant-rate dephasing semigroup has zero measure
            const auto rep =
                qnm::nm_total(dephasing_semigroup(0.7, qnm::bec::uniform_grid(5.0, 50)), 1e-8, tol);
            std::snprintf(buf, sizeof(buf), "nm_total = %.3e on 50 semigroup samples", rep.total);
            push("zero-semigroup", !rep.partial && rep.total <= 1e-8, buf);
        }
        {  // interval-witness identity on a BEC pair
            const auto p = qnm::bec::preset_na_rb(1.0);
            const auto grid = qnm::bec::uniform_grid(8.0, 9);
            const auto traj = qnm::bec::bec_trajectory(p, qnm::bec::integrated_rates(p, grid));
            const auto r1 = qnm::rg_dual_witness(traj.channels[3].choi_state(), tol);
            const auto r2 = qnm::rg_dual_witness(traj.channels[6].choi_state(), tol);
            const auto iw =
                qnm::interval_witness(traj, grid[3], grid[6], *r1.witness, *r2.witness);
            const double mismatch =
                std::abs((r2.value - r1.value) + qnm::interval_expectation(iw));
            std::snprintf(buf, sizeof(buf), "|Delta R_G + <phi+|W|phi+>| = %.3e", mismatch);
            push("witness-interval-identity", mismatch <= 1e-6, buf);
        }
    }
    return checks;
}

int cmd_verify(bool quick, double tol, const std::string& bound_factor,
               const std::string& out_path) {
    const std::vector<Check> checks = run_verify(quick, tol, bound_factor);
    bool all = true;
    nlohmann::json j = nlohmann::json::array();
    for (const auto& c : checks) {
        all = all && c.pass;
        std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << "  " << c.detail << "\n";
        j.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    }
    if (!out_path.empty()) qnm::write_json_file(out_path, j);
    std::cout << (all ? "verify: all checks passed\n" : "verify: FAILURES present\n");
    return all ? kOk : kValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-Markovianity quantification via generalized robustness (PPT relaxation)"};
    app.require_subcommand(1);

    double tol = 1e-8, threshold = 1e-6, tmax = 0, sigma_over_L = 0;
    int workers = 1, grid_samples = 100;
    std::string state_path, traj_path, preset_path, out = "-", out_dir, route = "primal",
                sweep = "ae", bound_factor = "d2", verify_out;
    std::vector<double> values;
    bool quick = false;

    auto* rob = app.add_subcommand("robustness", "Generalized robustness of a bipartite state");
    rob->add_option("state", state_path, "state JSON file")->required();
    rob->add_option("--route", route, "primal | dual")
        ->check(CLI::IsMember({"primal", "dual"}));
    rob->add_option("--tol", tol, "solver tolerance");
    rob->add_option("--out", out, "output JSON path, - for stdout");

    auto* nm = app.add_subcommand("nm", "Non-Markovianity of a channel trajectory");
    nm->add_option("trajectory", traj_path, "trajectory JSON file")->required();
    nm->add_option("--tol", tol, "solver tolerance");
    nm->add_option("--threshold", threshold, "increment threshold");
    nm->add_option("--parallel", workers, "worker threads");
    nm->add_option("--out", out_dir, "output directory");

    auto* sw = app.add_subcommand("bec-sweep", "Impurity-in-BEC dephasing parameter sweep");
    sw->add_option("--preset", preset_path, "preset JSON file (default: built-in Na-in-Rb)");
    sw->add_option("--sweep", sweep, "ae | D")->check(CLI::IsMember({"ae", "D"}));
    sw->add_option("--values", values, "sweep values (a_E/a_Rb or D/L)");
    sw->add_option("--grid", grid_samples, "time samples");
    sw->add_option("--tmax", tmax, "dimensionless horizon (0 = auto-calibrate)");
    sw->add_option("--sigma", sigma_over_L, "site width sigma in units of L (0 = preset)");
    sw->add_option("--tol", tol, "solver tolerance");
    sw->add_option("--threshold", threshold, "increment threshold");
    sw->add_option("--parallel", workers, "worker threads");
    sw->add_option("--out", out_dir, "output directory");

    auto* vf = app.add_subcommand("verify", "Built-in identity and bound suites");
    vf->add_flag("--quick", quick, "fast subset");
    vf->add_option("--tol", tol, "solver tolerance");
    vf->add_option("--bound-factor", bound_factor, "continuity prefactor: d2 | d (fault fixture)")
        ->check(CLI::IsMember({"d2", "d"}));
    vf->add_option("--out", verify_out, "machine-readable report JSON");

    CLI11_PARSE(app, argc, argv);

    try {
        if (rob->parsed()) return cmd_robustness(state_path, route, tol, out);
        if (nm->parsed()) return cmd_nm(traj_path, threshold, tol, workers, out_dir);
        if (sw->parsed())
            return cmd_bec_sweep(preset_path, sweep, values, grid_samples, tmax, sigma_over_L,
                                 threshold, tol, workers, out_dir);
        if (vf->parsed()) return cmd_verify(quick, tol, bound_factor, verify_out);
    } catch (const CLI::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kValidation;
}
