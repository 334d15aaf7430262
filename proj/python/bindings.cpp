// Python bindings. Scenes cross the boundary as JSON text; exact values as
// decimal or fraction strings.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "r4/arrangement.hpp"
#include "r4/ccd.hpp"
#include "r4/complexity.hpp"
#include "r4/engine.hpp"

namespace py = pybind11;
using namespace r4;

namespace {

py::dict report_dict(const IntersectionReport& r) {
  py::dict d;
  d["detected"] = r.detected;
  d["count"] = r.count;
  py::list pairs;
  for (const auto& p : r.pairs) {
    py::list w;
    for (std::size_t i = 0; i < 4; ++i) w.append(p.witness[i].str());
    pairs.append(py::make_tuple(p.a, p.b, w));
  }
  d["pairs"] = pairs;
  return d;
}

SetupInput input_of(const std::string& setup, const std::string& stored, const std::optional<std::string>& queries) {
  const Scene a = scene_from_json(stored);
  if (!queries) return setup_input(parse_setup(setup), a, nullptr);
  const Scene b = scene_from_json(*queries);
  return setup_input(parse_setup(setup), a, &b);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact intersection queries among simplices in four dimensions";

  py::register_exception<SchemaError>(m, "SchemaError", PyExc_ValueError);

  m.def(
      "generate",
      [](const std::string& kind, std::size_t n, int range, std::uint64_t seed) {
        return scene_to_json(generate_scene(parse_scene_kind(kind), n, range, seed));
      },
      py::arg("kind"), py::arg("n"), py::arg("range") = 1000, py::arg("seed") = 0);

  m.def(
      "oracle",
      [](const std::string& setup, const std::string& stored, const std::optional<std::string>& queries,
         const std::string& mode) { return report_dict(run_oracle(input_of(setup, stored, queries), parse_mode(mode))); },
      py::arg("setup"), py::arg("stored"), py::arg("queries") = py::none(), py::arg("mode") = "report");

  m.def(
      "query",
      [](const std::string& setup, const std::string& stored, const std::optional<std::string>& queries,
         const std::string& mode, const std::string& sigma, std::uint64_t seed) {
        const StructureRun run = run_structure(input_of(setup, stored, queries), parse_mode(mode),
                                               ExactScalar::parse_decimal(sigma), seed);
        py::dict d = report_dict(run.report);
        d["leafCutoff"] = run.budget.leafCutoff;
        d["nodesVisited"] = run.stats.nodesVisited;
        d["leafItemsScanned"] = run.stats.leafItemsScanned;
        return d;
      },
      py::arg("setup"), py::arg("stored"), py::arg("queries") = py::none(), py::arg("mode") = "report",
      py::arg("sigma") = "2", py::arg("seed") = 0);

  m.def(
      "collisions",
      [](const std::string& scene, bool useOracle) {
        const auto moving = scene_from_json(scene).moving();
        return report_dict(useOracle ? ccd_oracle(moving, QueryMode::Report)
                                     : detect_collisions(moving, QueryMode::Report));
      },
      py::arg("scene"), py::arg("oracle") = false);

  m.def(
      "k_counts",
      [](const std::string& scene, bool useOracle) {
        const auto t = scene_from_json(scene).tetrahedra();
        const KCounts k = useOracle ? arrangement_k_counts(t) : k_counts(t);
        return py::make_tuple(k.k2, k.k3, k.k4);
      },
      py::arg("scene"), py::arg("oracle") = false);

  m.def(
      "q_tradeoff_exponent",
      [](const std::string& sigma) { return q_tradeoff_exponent(ExactScalar::parse_decimal(sigma)).str(); },
      py::arg("sigma"));
  m.def(
      "batched_cost_exponent",
      [](const std::string& mu) {
        const auto b = batched_cost_exponent(ExactScalar::parse_decimal(mu));
        return py::make_tuple(b.first.str(), b.second.str(), b.exponent.str());
      },
      py::arg("mu"));
  m.def("batched_breakpoint", [] { return batched_breakpoint().str(); });
  m.def(
      "unfold_wide",
      [](const std::string& sigma, int log2Min, int log2Max) {
        const RecurrenceFit f = unfold_wide(ExactScalar::parse_decimal(sigma), log2Min, log2Max);
        return py::make_tuple(f.storage.exponent, f.query.exponent);
      },
      py::arg("sigma") = "2", py::arg("log2_min") = 10, py::arg("log2_max") = 24);
  m.def(
      "tradeoff_curve",
      [](double step) {
        py::list out;
        for (const auto& t : tradeoff_curve(step)) out.append(py::make_tuple(t.sigma, t.exponent, t.premature));
        return out;
      },
      py::arg("step") = 0.1);
}
