#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "teamtab/error.hpp"
#include "teamtab/hilbert.hpp"
#include "teamtab/json_io.hpp"
#include "teamtab/oracle.hpp"
#include "teamtab/parser.hpp"
#include "teamtab/semantics.hpp"
#include "teamtab/tableau.hpp"

namespace py = pybind11;
using namespace teamtab;

namespace {

ProveOptions options_for(std::uint64_t node_limit, bool trace) {
  ProveOptions o;
  o.node_limit = node_limit;
  o.record_trace = trace;
  return o;
}

}  // namespace

PYBIND11_MODULE(_teamtab, m) {
  m.doc() = "Team-semantics validity prover (native core)";

  static py::exception<Error> error(m, "TeamtabError");
  static py::exception<ParseError> parse_error(m, "ParseError", error.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ParseError& e) {
      py::set_error(parse_error, e.what());
    } catch (const Error& e) {
      const std::string msg = std::string(to_string(e.code())) + ": " + e.what();
      py::set_error(error, msg.c_str());
    }
  });

  py::class_<Formula>(m, "Formula")
      .def("__str__", [](const Formula& f) { return print(f); })
      .def("__repr__", [](const Formula& f) { return "Formula('" + print(f) + "')"; })
      .def("__eq__", [](const Formula& a, const Formula& b) { return a == b; })
      .def("__hash__", [](const Formula& f) { return f.hash(); })
      .def_property_readonly("logic", [](const Formula& f) { return std::string(to_string(classify(f))); })
      .def_property_readonly("vr", [](const Formula& f) { return vr(f); })
      .def_property_readonly("size", [](const Formula& f) { return size(f); })
      .def_property_readonly("modal_depth", [](const Formula& f) { return modal_depth(f); });

  m.def("parse", &parse, py::arg("text"));
  m.def("nnf_import", &nnf_import, py::arg("text"));
  m.def("eliminate_dep", &eliminate_dep, py::arg("phi"));
  m.def("dual", &dual, py::arg("phi"));
  m.def("root_size", [](const Formula& phi) { return root_for(phi).label.size(); }, py::arg("phi"));

  m.def("valid_prop", &valid_prop, py::arg("phi"));
  m.def(
      "search_modal_countermodel_json",
      [](const Formula& phi, std::size_t max_worlds) -> std::optional<std::string> {
        const auto cm = search_modal_countermodel(phi, max_worlds);
        if (!cm) return std::nullopt;
        return to_json(*cm).dump();
      },
      py::arg("phi"), py::arg("max_worlds") = 3);

  m.def(
      "prove_json",
      [](const Formula& phi, std::uint64_t node_limit, bool trace) {
        std::optional<Verdict> v;
        {
          py::gil_scoped_release release;
          v = prove(phi, options_for(node_limit, trace));
        }
        return serialize_proof(*v);
      },
      py::arg("phi"), py::arg("node_limit") = ProveOptions{}.node_limit, py::arg("trace") = false);

  m.def(
      "satisfies_team_json",
      [](const std::string& team, const Formula& phi) { return satisfies_prop(prop_team_from_json(parse_json(team)), phi); },
      py::arg("team"), py::arg("phi"));
  m.def(
      "satisfies_model_json",
      [](const std::string& model, const Formula& phi) {
        const ModalCountermodel km = model_from_json(parse_json(model));
        return satisfies_modal(km.model, km.team, phi);
      },
      py::arg("model"), py::arg("phi"));

  m.def(
      "certify_json",
      [](const Formula& phi) -> std::optional<std::string> {
        const auto c = build_certificate(phi);
        if (!c) return std::nullopt;
        return to_json(*c).dump();
      },
      py::arg("phi"));
  m.def(
      "check_certificate_json",
      [](const std::string& text) {
        const CheckResult r = check_certificate(certificate_from_json(parse_json(text)));
        return py::make_tuple(r.ok, r.diagnostic);
      },
      py::arg("certificate"));
}
