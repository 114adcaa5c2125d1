#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "tunnelsplit/bohmian.hpp"
#include "tunnelsplit/check.hpp"
#include "tunnelsplit/config.hpp"
#include "tunnelsplit/decompose.hpp"
#include "tunnelsplit/error.hpp"
#include "tunnelsplit/oracle.hpp"
#include "tunnelsplit/timescales.hpp"

namespace py = pybind11;
using namespace tunnelsplit;

namespace {

template <class T>
py::array_t<T> to_array(const std::vector<T>& v) {
  py::array_t<T> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict field_dict(const GridField& f) {
  py::dict d;
  d["x"] = to_array(f.x);
  d["psi"] = to_array(f.psi);
  d["dpsi"] = to_array(f.dpsi);
  d["t"] = f.t;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Scattering on symmetric barriers split into transmission and reflection subensembles";
  m.attr("__version__") = TUNNELSPLIT_VERSION;

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<PotentialSpec>(m, "Potential")
      .def_static("rectangular", &make_rectangular, py::arg("V0"), py::arg("d"), py::arg("xc") = 0.0)
      .def_static(
          "from_segments",
          [](const std::vector<std::tuple<double, double, double>>& segs) {
            std::vector<Segment> s;
            for (const auto& [a, b, v] : segs) s.push_back({a, b, v});
            return PotentialSpec::from_segments(std::move(s));
          },
          py::arg("segments"), "List of (x_left, x_right, V).")
      .def_property_readonly("x_left", &PotentialSpec::x_left)
      .def_property_readonly("x_right", &PotentialSpec::x_right)
      .def_property_readonly("midpoint", &PotentialSpec::midpoint)
      .def("__call__", &PotentialSpec::value);

  m.def(
      "scattering",
      [](const PotentialSpec& pot, double E) {
        const auto amps = solve_full(pot, E).second;
        py::dict d;
        d["a"] = amps.a;
        d["b"] = amps.b;
        d["T"] = amps.T;
        d["R"] = amps.R;
        return d;
      },
      py::arg("potential"), py::arg("E"));

  m.def(
      "decompose",
      [](const PotentialSpec& pot, double E, const std::vector<double>& x) {
        const TruncatedPair tp = truncate(decompose(pot, E));
        const DecomposedState& d = tp.decomposition();
        std::vector<cplx> full, tr, ref, ttr, tref;
        for (double xi : x) {
          full.push_back(d.full.eval(xi).psi);
          tr.push_back(d.tr.eval(xi).psi);
          ref.push_back(d.ref.eval(xi).psi);
          ttr.push_back(tp.tilde_tr(xi).psi);
          tref.push_back(tp.tilde_ref(xi).psi);
        }
        py::dict out;
        out["E"] = d.E;
        out["T"] = d.amps.T;
        out["R"] = d.amps.R;
        out["a"] = d.amps.a;
        out["b"] = d.amps.b;
        out["c"] = d.c;
        out["alpha"] = d.alpha;
        out["beta"] = d.beta;
        out["full"] = to_array(full);
        out["tr"] = to_array(tr);
        out["ref"] = to_array(ref);
        out["tilde_tr"] = to_array(ttr);
        out["tilde_ref"] = to_array(tref);
        return out;
      },
      py::arg("potential"), py::arg("E"), py::arg("x") = std::vector<double>{},
      "Decomposition at one energy; wave functions sampled at x.");

  m.def(
      "packet_field",
      [](const PotentialSpec& pot, const std::string& family, double t, double x_min, double x_max,
         std::size_t n, double k0, double sigma_k, double x0) {
        const SpectralPacket p =
            build_packet(pot, parse_family(family), PacketParams{k0, sigma_k, x0, 512});
        py::dict d = field_dict(field_at(p, UniformGrid{x_min, x_max, n}, t));
        d["mean_transmission"] = mean_transmission(p);
        return d;
      },
      py::arg("potential"), py::arg("family"), py::arg("t"), py::arg("x_min"), py::arg("x_max"),
      py::arg("n"), py::arg("k0") = 1.0, py::arg("sigma_k") = 0.1, py::arg("x0") = -60.0);

  m.def(
      "norm",
      [](const std::vector<double>& x, const std::vector<cplx>& psi) {
        if (x.size() != psi.size() || x.size() < 2) throw DomainError("x and psi must match, n >= 2");
        GridField f;
        f.x = x;
        f.psi = psi;
        f.dpsi.assign(psi.size(), cplx{});
        return norm(f, 1.0);
      },
      py::arg("x"), py::arg("psi"));

  m.def("dwell_time",
        [](const PotentialSpec& pot, double E, const std::string& family) {
          return dwell_time(pot, E, parse_family(family));
        },
        py::arg("potential"), py::arg("E"), py::arg("family") = "full");
  m.def("group_delay", &group_delay, py::arg("potential"), py::arg("E"));
  m.def(
      "larmor_times",
      [](const PotentialSpec& pot, double E, double omega) {
        const LarmorTimes l = larmor_times(pot, E, omega);
        return py::make_tuple(l.tau_y, l.tau_z);
      },
      py::arg("potential"), py::arg("E"), py::arg("omega"));

  m.def(
      "trajectory",
      [](const PotentialSpec& pot, const std::string& family, double x_start, double k0,
         double sigma_k, double x0) {
        const SpectralPacket p =
            build_packet(pot, parse_family(family), PacketParams{k0, sigma_k, x0, 512});
        const Trajectory tr = integrate(p, x_start);
        std::vector<double> t, x;
        for (const auto& s : tr.samples) {
          t.push_back(s.t);
          x.push_back(s.x);
        }
        py::dict d;
        d["t"] = to_array(t);
        d["x"] = to_array(x);
        d["fate"] = std::string(to_string(tr.fate));
        return d;
      },
      py::arg("potential"), py::arg("family"), py::arg("x_start"), py::arg("k0") = 1.0,
      py::arg("sigma_k") = 0.1, py::arg("x0") = -60.0);

  m.def(
      "parse_config",
      [](const std::string& text) { return to_json(parse_config(text)).dump(); },
      py::arg("text"), "Validated configuration, defaults filled in, as a JSON string.");
  m.def("config_schema", [] { return std::string(config_schema()); });
}
