#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "qnm/bec.hpp"
#include "qnm/measure.hpp"
#include "qnm/robustness.hpp"
#include "qnm/witness_nm.hpp"

namespace py = pybind11;
using namespace qnm;

namespace {

DensityOperator state_from_array(const Matrix& m, int dA, int dB) {
    return DensityOperator(m, Split{dA, dB});
}

ChannelTrajectory traj_from_chois(const std::vector<double>& times,
                                  const std::vector<Matrix>& chois) {
    std::vector<QuantumChannel> chs;
    for (const auto& j : chois) {
        const int d = static_cast<int>(std::lround(std::sqrt(double(j.rows()))));
        chs.push_back(QuantumChannel::from_choi(DensityOperator(j, Split{d, d})));
    }
    return ChannelTrajectory(times, std::move(chs));
}

}  // namespace

PYBIND11_MODULE(_qnm, m) {
    m.doc() = "Non-Markovianity via generalized robustness of the Choi trajectory";

    py::class_<RobustnessResult>(m, "RobustnessResult")
        .def_readonly("value", &RobustnessResult::value)
        .def_readonly("raw", &RobustnessResult::raw)
        .def_readonly("gap", &RobustnessResult::gap)
        .def_property_readonly("optimal",
                               [](const RobustnessResult& r) { return r.optimal(); })
        .def_property_readonly("witness", [](const RobustnessResult& r) -> py::object {
            if (!r.witness) return py::none();
            return py::cast(Matrix(r.witness->w.matrix()));
        });

    py::class_<Increment>(m, "Increment")
        .def_readonly("t1", &Increment::t1)
        .def_readonly("t2", &Increment::t2)
        .def_readonly("delta", &Increment::delta);

    py::class_<NonMarkovReport>(m, "NonMarkovReport")
        .def_readonly("times", &NonMarkovReport::times)
        .def_readonly("rg_values", &NonMarkovReport::rg_values)
        .def_readonly("increments", &NonMarkovReport::increments)
        .def_readonly("total", &NonMarkovReport::total)
        .def_readonly("partial", &NonMarkovReport::partial)
        .def_readonly("relaxation_label", &NonMarkovReport::relaxation_label);

    m.def(
        "rg",
        [](const Matrix& rho, int dA, int dB, double tol, bool dual) {
            const auto st = state_from_array(rho, dA, dB);
            return dual ? rg_dual_witness(st, tol) : rg_primal(st, tol);
        },
        py::arg("rho"), py::arg("dA"), py::arg("dB"), py::arg("tol") = 1e-8,
        py::arg("dual") = false,
        "Generalized robustness of a bipartite state (PPT relaxation)");

    m.def(
        "nm_total",
        [](const std::vector<double>& times, const std::vector<Matrix>& chois, double threshold,
           double tol, int workers) {
            return nm_total(traj_from_chois(times, chois), threshold, tol, workers);
        },
        py::arg("times"), py::arg("chois"), py::arg("threshold") = 1e-6, py::arg("tol") = 1e-8,
        py::arg("workers") = 1,
        "Total non-Markovianity of a trajectory given trace-1 Choi matrices");

    m.def(
        "diamond_distance",
        [](const Matrix& choi1, const Matrix& choi2, double tol) {
            const int d = static_cast<int>(std::lround(std::sqrt(double(choi1.rows()))));
            return diamond_distance(QuantumChannel::from_choi(DensityOperator(choi1, Split{d, d})),
                                    QuantumChannel::from_choi(DensityOperator(choi2, Split{d, d})),
                                    tol);
        },
        py::arg("choi1"), py::arg("choi2"), py::arg("tol") = 1e-8);

    m.def("max_entangled", [](int d) { return Matrix(max_entangled(d).matrix()); }, py::arg("d"));

    auto bec = m.def_submodule("bec", "Two-impurity dephasing in a BEC environment");
    py::class_<qnm::bec::BECParams>(bec, "BECParams")
        .def_readwrite("a_E", &qnm::bec::BECParams::a_E)
        .def_readwrite("a_SE", &qnm::bec::BECParams::a_SE)
        .def_readwrite("sigma", &qnm::bec::BECParams::sigma)
        .def_readwrite("D", &qnm::bec::BECParams::D)
        .def_property_readonly("L", &qnm::bec::BECParams::L)
        .def_property_readonly("t0", &qnm::bec::BECParams::t0);
    bec.def("preset_na_rb", &qnm::bec::preset_na_rb, py::arg("ae_over_arb") = 0.2);
    bec.def("a_rb", &qnm::bec::a_rb);
    bec.def("gamma_rates", &qnm::bec::gamma_rates, py::arg("params"), py::arg("tau"));
    bec.def("calibrate_tmax", &qnm::bec::calibrate_tmax, py::arg("params"));
    bec.def(
        "trajectory_chois",
        [](const qnm::bec::BECParams& p, const std::vector<double>& grid) {
            const auto traj = qnm::bec::bec_trajectory(p, qnm::bec::integrated_rates(p, grid));
            std::vector<Matrix> out;
            for (const auto& c : traj.channels) out.push_back(c.choi());
            return out;
        },
        py::arg("params"), py::arg("grid"),
        "Trace-1 Choi matrices of the dephasing trajectory on the given tau grid");
    bec.def("uniform_grid", &qnm::bec::uniform_grid, py::arg("tau_max"), py::arg("samples"));
}
