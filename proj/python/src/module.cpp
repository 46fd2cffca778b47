#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "pseudotoric/cli.hpp"
#include "pseudotoric/combinat.hpp"
#include "pseudotoric/errors.hpp"
#include "pseudotoric/numsym.hpp"
#include "pseudotoric/symverify.hpp"

namespace py = pybind11;
using namespace pseudotoric;

namespace {

// Reports cross the boundary as JSON text; the Python side decodes them.
std::string dump(const nlohmann::json& j) { return j.dump(); }

Family family_of(const std::string& name) { return parse_family(name); }

DivisorChoice divisor_of(Family f, int size, int j) { return j == 0 ? schubert_divisor(f, size) : make_divisor(f, size, j); }

class Model {
 public:
  Model(const std::string& family, int size, int j)
      : model_(build_chart(family_of(family), size), divisor_of(family_of(family), size, j)) {}

  int dimension() const { return model_.dimension(); }
  int torus_rank() const { return model_.torus_rank(); }
  int divisor() const { return model_.divisor().j; }
  std::string name() const { return model_.chart().name(); }
  std::vector<std::string> rho_names() const { return model_.rho_names(); }

  std::vector<Complex> sample(std::uint64_t seed) const { return model_.sample_point(seed).free; }
  Eigen::VectorXd rho(const std::vector<Complex>& z) const { return model_.rho(z); }
  Eigen::VectorXd moment_map(const std::vector<Complex>& z) const { return model_.moment_map(z); }
  Eigen::MatrixXd fubini_study(const std::vector<Complex>& z) const { return model_.fubini_study(model_.make_point(z)); }
  Eigen::MatrixXd base_form(const std::vector<Complex>& z) const { return model_.base_form(model_.make_point(z)); }

  py::dict residuals(const std::vector<Complex>& z) const {
    const auto p = model_.make_point(z);
    const auto frame = model_.fiber_frame(p);
    const auto prop = model_.horizontal_proportionality(p, frame);
    py::dict d;
    d["poisson"] = model_.poisson_residual(p).max_residual;
    d["lagrangian"] = model_.lagrangian_residual(p, frame).max_residual;
    d["special"] = model_.special_residual(p, frame, stated_vanishing_part(model_.chart())).max_residual;
    d["special-phase"] = model_.special_residual(p, frame, phase_vanishing_part(model_.chart())).max_residual;
    d["proportionality"] = prop.report.max_residual;
    d["scalar"] = prop.scalar;
    return d;
  }

 private:
  NumericModel model_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pseudotoric fibration verification toolkit";

  py::register_exception<ConfigurationError>(m, "ConfigurationError", PyExc_ValueError);
  py::register_exception<SamplingError>(m, "SamplingError", PyExc_RuntimeError);
  py::register_exception<NearSingularFiber>(m, "NearSingularFiber", PyExc_ArithmeticError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<EvaluationError>(m, "EvaluationError", PyExc_ZeroDivisionError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ZeroDivisionError);

  m.def("chart_descriptor", [](const std::string& family, int size) {
    return dump(chart_descriptor(build_chart(family_of(family), size)));
  });

  m.def(
      "verify_contraction_lemma",
      [](const std::string& family, int size) {
        py::gil_scoped_release release;
        return dump(to_json(verify_contraction_lemma(build_chart(family_of(family), size))));
      },
      py::arg("family"), py::arg("size"));

  m.def(
      "verify_dlog_identity",
      [](const std::string& family, int size, int j) {
        py::gil_scoped_release release;
        const Family f = family_of(family);
        return dump(to_json(verify_dlog_identity(build_chart(f, size), divisor_of(f, size, j))));
      },
      py::arg("family"), py::arg("size"), py::arg("j") = 0);

  m.def(
      "run_numeric_suite",
      [](const std::string& family, int size, int j, std::size_t samples, std::uint64_t seed, unsigned threads,
         double tol) {
        NumericSuiteRequest r;
        r.family = family_of(family);
        r.size = size;
        r.j = j;
        r.samples = samples;
        r.seed = seed;
        r.threads = threads;
        r.config.tol_first_order = tol;
        py::gil_scoped_release release;
        return dump(to_json(run_numeric_suite(r)));
      },
      py::arg("family"), py::arg("size"), py::arg("j") = 0, py::arg("samples") = 100, py::arg("seed") = 1,
      py::arg("threads") = 1, py::arg("tol") = 1e-6);

  m.def("term_count_table", [](const std::string& family, int lo, int hi) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : term_count_table(family_of(family), lo, hi)) rows.push_back(to_json(r));
    return dump(rows);
  });

  m.def("nonfree_components", [](const std::string& family, int size) {
    std::vector<std::pair<int, std::string>> out;
    for (const auto& c : nonfree_components(build_chart(family_of(family), size))) out.emplace_back(c.index, c.label());
    return out;
  });

  m.def(
      "wall_point_cloud",
      [](const std::string& family, int size, int j, int component, std::size_t samples, std::uint64_t seed) {
        const Family f = family_of(family);
        const auto chart = build_chart(f, size);
        const auto comps = nonfree_components(chart);
        WallRequest r;
        r.samples = samples;
        r.seed = seed;
        WallCloud cloud;
        {
          py::gil_scoped_release release;
          cloud = wall_point_cloud(chart, divisor_of(f, size, j), find_component(comps, component), r);
        }
        py::dict d;
        d["columns"] = cloud.columns;
        d["rows"] = cloud.rows;
        d["warning"] = cloud.empty_warning ? py::object(py::str(cloud.warning)) : py::object(py::none());
        return d;
      },
      py::arg("family"), py::arg("size"), py::arg("j"), py::arg("component"), py::arg("samples") = 500,
      py::arg("seed") = 1);

  m.def("rietsch_superpotential", [](int n) { return dump(to_json(rietsch_superpotential(n))); });
  m.def(
      "evaluate_superpotential",
      [](int n, const Eigen::MatrixXcd& frame, double q1, double q2) {
        return rietsch_superpotential(n).evaluate(flag_plucker(frame), q1, q2);
      },
      py::arg("n"), py::arg("frame"), py::arg("q1"), py::arg("q2"));
  m.def("flag_plucker", &flag_plucker);

  py::class_<Model>(m, "Model")
      .def(py::init<const std::string&, int, int>(), py::arg("family"), py::arg("size"), py::arg("j") = 0)
      .def_property_readonly("dimension", &Model::dimension)
      .def_property_readonly("torus_rank", &Model::torus_rank)
      .def_property_readonly("divisor", &Model::divisor)
      .def_property_readonly("name", &Model::name)
      .def_property_readonly("rho_names", &Model::rho_names)
      .def("sample", &Model::sample, py::arg("seed"))
      .def("rho", &Model::rho)
      .def("moment_map", &Model::moment_map)
      .def("fubini_study", &Model::fubini_study)
      .def("base_form", &Model::base_form)
      .def("residuals", &Model::residuals);

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    int code = 0;
    {
      py::gil_scoped_release release;
      code = cli::run_cli(args, out, err);
    }
    return py::make_tuple(code, out.str(), err.str());
  });
}
