#include "multinorm/balancing.hpp"
#include "multinorm/body.hpp"
#include "multinorm/cli.hpp"
#include "multinorm/functionals.hpp"
#include "multinorm/norms.hpp"
#include "multinorm/errors.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace multinorm;

namespace {

std::vector<BodySpec> bodies(const std::vector<std::string>& descriptors) {
  std::vector<BodySpec> out;
  out.reserve(descriptors.size());
  for (const auto& d : descriptors) out.push_back(parse_body(d));
  return out;
}

py::tuple run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "multinorm");
  std::ostringstream out;
  std::ostringstream err;
  int code = 0;
  {
    py::gil_scoped_release release;
    code = cli::run(args, out, err);
  }
  return py::make_tuple(code, out.str(), err.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Monte Carlo estimators for multi-integral norms of convex bodies";

  py::register_exception<ArgumentError>(m, "ArgumentError", PyExc_ValueError);
  py::register_exception<CapacityError>(m, "CapacityError", PyExc_RuntimeError);

  py::class_<Estimate>(m, "Estimate")
      .def_readonly("value", &Estimate::value)
      .def_readonly("std_error", &Estimate::std_error)
      .def_readonly("n_samples", &Estimate::n_samples)
      .def("__repr__", [](const Estimate& e) {
        std::ostringstream s;
        s << "Estimate(value=" << e.value << ", std_error=" << e.std_error << ", n_samples=" << e.n_samples << ")";
        return s.str();
      });

  py::class_<BodySpec>(m, "Body")
      .def(py::init([](const std::string& d) { return parse_body(d); }), py::arg("descriptor"))
      .def_property_readonly("descriptor", &BodySpec::descriptor)
      .def_property_readonly("dim", &BodySpec::dim)
      .def_property_readonly("p", &BodySpec::p)
      .def_property_readonly("scale", &BodySpec::scale)
      .def("normalized", [](const BodySpec& b) { return normalize_to_volume_one(b); })
      .def("gauge", [](const BodySpec& b, const Vector& x) { return gauge(b, x); })
      .def("support", [](const BodySpec& b, const Vector& y) { return support(b, y); })
      .def("volume", [](const BodySpec& b) { return volume(b); })
      .def("isotropic_constant", [](const BodySpec& b) { return isotropic_constant(b); })
      .def("polar_radius", [](const BodySpec& b) { return polar_radius(b); })
      .def("__repr__", [](const BodySpec& b) { return "Body('" + b.descriptor() + "')"; });

  m.def(
      "estimate_norm",
      [](const std::vector<std::string>& C, const std::vector<double>& t, const std::string& K, std::size_t N,
         std::uint64_t seed) {
        const auto Cs = bodies(C);
        const BodySpec Kb = parse_body(K);
        const WeightVector w(t);
        py::gil_scoped_release release;
        return estimate_norm(Cs, w, Kb, N, RngStream{seed, 0});
      },
      py::arg("C"), py::arg("t"), py::arg("K"), py::arg("N") = 100000, py::arg("seed") = 42,
      "||t||_{C,K}; C is a list with one common body or one body per weight.");

  m.def(
      "estimate_M",
      [](const std::string& K, std::size_t N, std::uint64_t seed) {
        const BodySpec Kb = parse_body(K);
        py::gil_scoped_release release;
        return estimate_M(Kb, N, RngStream{seed, 0});
      },
      py::arg("K"), py::arg("N") = 100000, py::arg("seed") = 42);

  m.def(
      "q_n_cube",
      [](const std::vector<double>& t, int n, std::optional<int> cutoff) { return q_n_cube(WeightVector(t), n, cutoff); },
      py::arg("t"), py::arg("n"), py::arg("cutoff") = py::none());

  m.def(
      "density_at_zero", [](const std::vector<double>& t) { return density_at_zero_1d(WeightVector(t)); },
      py::arg("t"), "Density at 0 of sum t_j U_j, U_j uniform on [-1/2, 1/2], for unit t.");

  m.def(
      "min_signs",
      [](const Matrix& points, const std::string& K, const std::string& method, std::uint64_t seed) {
        const BodySpec Kb = parse_body(K);
        Engine eng = RngStream{seed, 0}.engine();
        const SignAssignment a = min_signs(points, Kb, parse_sign_method(method), eng);
        return py::make_tuple(a.signs, a.achieved);
      },
      py::arg("points"), py::arg("K"), py::arg("method") = "greedy", py::arg("seed") = 42,
      "Points are the columns of an n x s array. Returns (signs, achieved gauge).");

  m.def("run_cli", &run_cli, py::arg("args"),
        "Runs the command line front end in-process; returns (exit code, stdout, stderr).");
}
