#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "schwinger/basis.hpp"
#include "schwinger/dynamics.hpp"
#include "schwinger/entropy.hpp"
#include "schwinger/fragmentation.hpp"
#include "schwinger/jumps.hpp"
#include "schwinger/model.hpp"
#include "schwinger/spectral.hpp"

namespace py = pybind11;
using namespace schwinger;

namespace {

ModelParams make_params(int N, double J, double w, double m, double theta) {
  ModelParams p{N, J, w, m, theta};
  p.validate();
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Exact diagonalization of the lattice Schwinger model in random charge sectors";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);

  py::class_<ModelParams>(mod, "ModelParams")
      .def(py::init(&make_params), py::arg("N"), py::arg("J") = 1.0, py::arg("w") = 1.0, py::arg("m") = 0.0,
           py::arg("theta") = std::numbers::pi)
      .def_readonly("N", &ModelParams::num_sites)
      .def_readonly("J", &ModelParams::J)
      .def_readonly("w", &ModelParams::w)
      .def_readonly("m", &ModelParams::m)
      .def_readonly("theta", &ModelParams::theta);

  py::class_<ChargeSector>(mod, "ChargeSector")
      .def(py::init([](std::vector<int> q, std::uint64_t seed) { return make_sector(std::move(q), seed); }),
           py::arg("q"), py::arg("seed") = 0)
      .def_readonly("q", &ChargeSector::q)
      .def_readonly("seed", &ChargeSector::seed)
      .def("__repr__", [](const ChargeSector& s) { return format_sector(s); });

  mod.def("sample_charge_sectors", &sample_charge_sectors, py::arg("N"), py::arg("count"), py::arg("master_seed"));
  mod.def("enumerate_charge_sectors", &enumerate_charge_sectors, py::arg("N"));

  py::class_<HalfFillingBasis>(mod, "Basis")
      .def(py::init<int>(), py::arg("N"))
      .def("__len__", &HalfFillingBasis::size)
      .def_property_readonly("N", &HalfFillingBasis::num_sites)
      .def("config",
           [](const HalfFillingBasis& b, std::size_t i) {
             if (i >= b.size()) throw py::index_error("basis index out of range");
             return b[i].to_string(b.num_sites());
           })
      .def("index", [](const HalfFillingBasis& b, const std::string& s) {
        return b.index_of(SpinConfig::from_string(s));
      });

  py::class_<SectorHamiltonian>(mod, "Hamiltonian")
      .def(py::init([](const ModelParams& p, const ChargeSector& s, const HalfFillingBasis& b) {
             return build_hamiltonian(p, s, b);
           }),
           py::arg("params"), py::arg("sector"), py::arg("basis"))
      .def_property_readonly("dimension", &SectorHamiltonian::dimension)
      .def_readonly("diagonal", &SectorHamiltonian::diag)
      .def("dense", &SectorHamiltonian::dense)
      .def("eigenvalues", [](const SectorHamiltonian& h) {
        py::gil_scoped_release release;
        return eigenvalues(h);
      })
      .def("eigh", [](const SectorHamiltonian& h) {
        SpectralDecomposition s;
        {
          py::gil_scoped_release release;
          s = diagonalize(h);
        }
        return py::make_tuple(s.energies, s.vectors);
      });

  mod.def("sector_mean_r", [](const Eigen::VectorXd& e) {
    return sector_mean_r(e, default_r_window(e.size()));
  }, py::arg("energies"));

  mod.def(
      "entropies",
      [](const Eigen::VectorXcd& state, const HalfFillingBasis& b, int cut) {
        const auto t = entropy_decomposition(state, b, cut);
        return py::dict(py::arg("S_E") = t.S_E, py::arg("S_N") = t.S_N, py::arg("S_C") = t.S_C);
      },
      py::arg("state"), py::arg("basis"), py::arg("cut"));

  mod.def(
      "quench",
      [](const SectorHamiltonian& h, const HalfFillingBasis& b, double t_min, double t_max, int per_decade, int cut) {
        QuenchResult q;
        TimeGrid grid = TimeGrid::log(t_min, t_max, per_decade);
        {
          py::gil_scoped_release release;
          q = run_quench(h, diagonalize(h), b, basis_vector(b, vacuum_config(b.num_sites())), grid,
                         cut > 0 ? cut : b.num_sites() / 2);
        }
        py::dict d;
        d["t"] = grid.points;
        d["S_E"] = q.entropy.S_E;
        d["S_N"] = q.entropy.S_N;
        d["S_C"] = q.entropy.S_C;
        d["mu"] = q.mu;
        d["norm"] = q.norm;
        return d;
      },
      py::arg("hamiltonian"), py::arg("basis"), py::arg("t_min") = 1e-1, py::arg("t_max") = 1e12,
      py::arg("per_decade") = 20, py::arg("cut") = 0);

  mod.def(
      "krylov_dimensions",
      [](const SectorHamiltonian& h, const HalfFillingBasis& b) {
        std::vector<std::size_t> dims;
        for (const auto& r : fragmentation_rows(decompose_sector(h, b))) dims.push_back(r.dimension);
        return dims;
      },
      py::arg("hamiltonian"), py::arg("basis"));

  mod.def(
      "detect_jumps",
      [](const std::vector<double>& series, const std::vector<double>& times, double dlog, double min_step) {
        std::vector<std::pair<double, double>> out;
        for (const auto& e : detect_jumps(series, times, JumpOptions{dlog, min_step, 0.0})) {
          out.emplace_back(e.tau_J, e.height);
        }
        return out;
      },
      py::arg("series"), py::arg("times"), py::arg("dlog") = 0.25, py::arg("min_step") = 0.05);
}
