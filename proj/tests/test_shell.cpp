#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "qnm/measure.hpp"
#include "qnm/random.hpp"
#include "qnm/serialization.hpp"

using namespace qnm;
namespace fs = std::filesystem;

namespace {

const char* cli = QNM_CLI_PATH;

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string cmd = std::string(cli) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (size_t n = fread(buf, 1, sizeof(buf), pipe)) out.append(buf, n);
    const int status = pclose(pipe);
    return {WEXITSTATUS(status), out};
}

fs::path tmpdir() {
    static const fs::path d = [] {
        fs::path p = fs::temp_directory_path() / "qnm_shell_tests";
        fs::create_directories(p);
        return p;
    }();
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("robustness command on phi+(2) reports value 1") {
    const fs::path state = tmpdir() / "phi2.json";
    write_json_file(state.string(), to_json(HermitianOperator(max_entangled(2).matrix(), Split{2, 2})));
    const fs::path out = tmpdir() / "phi2_result.json";
    const auto r = run("robustness " + state.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    const auto j = load_json_file(out.string());
    CHECK(std::abs(j["value"].get<double>() - 1.0) < 1e-6);
    CHECK(j["relaxation"] == "ppt-relaxation");

    const auto rd = run("robustness " + state.string() + " --route dual --out -");
    CHECK(rd.exit_code == 0);
}

TEST_CASE("robustness command on a product state reports value 0") {
    Rng rng(60);
    const auto a = random_state(2, rng);
    const auto b = random_state(2, rng);
    const fs::path state = tmpdir() / "prod.json";
    write_json_file(state.string(),
                    to_json(HermitianOperator(kron(a.matrix(), b.matrix()), Split{2, 2})));
    const fs::path out = tmpdir() / "prod_result.json";
    const auto r = run("robustness " + state.string() + " --out " + out.string());
    CHECK(r.exit_code == 0);
    CHECK(load_json_file(out.string())["value"].get<double>() < 1e-6);
}

TEST_CASE("robustness command rejects a non-PSD matrix with exit 1") {
    Matrix z(2, 2);
    z << 1, 0, 0, -1;  // trace 0, not PSD
    const fs::path state = tmpdir() / "bad.json";
    write_json_file(state.string(), matrix_to_json(z, Split{1, 2}));
    CHECK(run("robustness " + state.string() + " --out -").exit_code == 1);
}

TEST_CASE("robustness command rejects malformed JSON with exit 1") {
    const fs::path state = tmpdir() / "garbage.json";
    std::ofstream(state) << "{not json";
    CHECK(run("robustness " + state.string() + " --out -").exit_code == 1);
}

TEST_CASE("nm command on a unitary trajectory reports zero total") {
    Rng rng(61);
    std::vector<double> times;
    std::vector<QuantumChannel> chs;
    for (int k = 0; k < 4; ++k) {
        times.push_back(k);
        chs.push_back(QuantumChannel::from_kraus(
            {k == 0 ? Matrix(Matrix::Identity(2, 2)) : random_unitary(2, rng)}));
    }
    const ChannelTrajectory traj(times, std::move(chs));
    const fs::path tf = tmpdir() / "unitary_traj.json";
    write_json_file(tf.string(), to_json(traj));
    const fs::path dir = tmpdir() / "unitary_out";
    const auto r = run("nm " + tf.string() + " --out " + dir.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("nm_total 0.000000000000e+00") != std::string::npos);
    CHECK(fs::exists(dir / "nm_report.csv"));
    CHECK(fs::exists(dir / "nm_report.json"));
}

TEST_CASE("nm command is deterministic across runs and worker counts") {
    Matrix j1(4, 4), j2(4, 4);
    j1 << 0.5, 0, 0, 0.2, 0, 0, 0, 0, 0, 0, 0, 0, 0.2, 0, 0, 0.5;
    j2 << 0.5, 0, 0, 0.4, 0, 0, 0, 0, 0, 0, 0, 0, 0.4, 0, 0, 0.5;
    const ChannelTrajectory traj(
        {0.0, 1.0, 2.0},
        {QuantumChannel::identity(2),
         QuantumChannel::from_choi(DensityOperator(j1, Split{2, 2})),
         QuantumChannel::from_choi(DensityOperator(j2, Split{2, 2}))});
    const fs::path tf = tmpdir() / "det_traj.json";
    write_json_file(tf.string(), to_json(traj));
    const fs::path d1 = tmpdir() / "det1", d2 = tmpdir() / "det2";
    CHECK(run("nm " + tf.string() + " --out " + d1.string() + " --parallel 1").exit_code == 0);
    CHECK(run("nm " + tf.string() + " --out " + d2.string() + " --parallel 3").exit_code == 0);
    CHECK(slurp(d1 / "nm_report.csv") == slurp(d2 / "nm_report.csv"));
    CHECK(!slurp(d1 / "nm_report.csv").empty());
}

TEST_CASE("nm command rejects a corrupted trajectory with exit 1") {
    nlohmann::json j;
    j["times"] = {0.0, 1.0};
    j["channels"] = {"nonsense", "entries"};
    const fs::path tf = tmpdir() / "corrupt_traj.json";
    write_json_file(tf.string(), j);
    CHECK(run("nm " + tf.string()).exit_code == 1);
}

TEST_CASE("bec-sweep writes summary and per-point files") {
    const fs::path dir = tmpdir() / "sweep_out";
    const auto r = run("bec-sweep --values 0.1 0.8 --grid 5 --tmax 4 --out " + dir.string() +
                       " --parallel 2");
    CHECK(r.exit_code == 0);
    const std::string csv = slurp(dir / "sweep_ae.csv");
    CHECK(csv.rfind("a_E_over_aRb,nm_total,n_increments\n", 0) == 0);
    CHECK(fs::exists(dir / "point_00.csv"));
    CHECK(fs::exists(dir / "point_01.json"));
    CHECK(fs::exists(dir / "sweep_params.json"));
    const std::string pt = slurp(dir / "point_00.csv");
    CHECK(pt.rfind("time,rg_value,increment_flag\n", 0) == 0);
}

TEST_CASE("bec-sweep rejects invalid D values with exit 1") {
    CHECK(run("bec-sweep --sweep D --values 2 --grid 4 --tmax 2").exit_code == 1);
}

TEST_CASE("verify --quick passes and honors the fault fixture flag") {
    const auto r = run("verify --quick");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("[FAIL]") == std::string::npos);
    CHECK(r.out.find("robustness-ground-truth") != std::string::npos);

    // injecting the weaker prefactor d is reported in the detail line
    const auto rf = run("verify --quick --bound-factor d");
    CHECK(rf.out.find("(factor d)") != std::string::npos);
}

TEST_CASE("unknown subcommand exits nonzero") {
    CHECK(run("frobnicate").exit_code != 0);
}
