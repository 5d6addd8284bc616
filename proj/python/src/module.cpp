// Python bindings: mesh/quadrature/FE primitives plus the experiment entry
// points, enough to script runs and postprocess tables from python.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mplg/experiment.hpp"
#include "mplg/verify.hpp"

namespace py = pybind11;
using namespace mplg;

namespace {

Point to_point(const std::vector<double>& x) {
  Point p = origin();
  for (std::size_t i = 0; i < x.size() && i < 3; ++i) p[i] = x[i];
  return p;
}

SchemeVariant variant_from_name(const std::string& name) {
  if (name == "mp2") return SchemeVariant::MassPreservingTwoStep;
  if (name == "rt1") return SchemeVariant::RuiTabataFirstOrder;
  if (name == "er2") return SchemeVariant::EwingRussellTwoStep;
  throw std::invalid_argument("unknown variant " + name);
}

py::dict csr_dict(const SparseMatrix& a) {
  py::dict d;
  d["shape"] = py::make_tuple(a.rows(), a.cols());
  d["indptr"] = std::vector<int>(a.row_offsets().begin(), a.row_offsets().end());
  d["indices"] =
      std::vector<int>(a.column_indices().begin(), a.column_indices().end());
  d["data"] = std::vector<double>(a.values().begin(), a.values().end());
  return d;
}

py::dict row_dict(const ConvergenceRow& row) {
  py::dict d;
  d["N"] = row.division;
  d["dt"] = row.dt;
  d["steps"] = row.steps;
  d["dofs"] = row.dofs;
  d["E_linf_L2"] = row.errors.e_linf_l2;
  d["E_l2_H10"] = row.errors.e_l2_h10;
  d["E_linf_H10"] = row.errors.e_linf_h10;
  d["E_mass"] = row.mass.e_mass;
  d["E_mass_prime"] = row.mass.e_mass_prime;
  d["E_mass_double_prime"] = row.mass.e_mass_double_prime;
  for (int k = 0; k < 3; ++k) {
    const char* names[3] = {"EOC_linf_L2", "EOC_l2_H10", "EOC_linf_H10"};
    if (row.eocs[k])
      d[names[k]] = *row.eocs[k];
    else
      d[names[k]] = py::none();
  }
  return d;
}

ExperimentConfig config_from_kwargs(int dim, int degree,
                                    const std::string& variant, double nu,
                                    double T,
                                    std::optional<std::pair<double, double>>
                                        coupling,
                                    std::vector<double> dt,
                                    std::vector<int> divisions, double cg_tol,
                                    bool allow_large) {
  ExperimentConfig config;
  config.dim = dim;
  config.degree = degree;
  config.variant = variant_from_name(variant);
  config.nu = nu;
  config.T = T;
  if (coupling) config.coupling = Coupling{coupling->first, coupling->second};
  config.dt_list = std::move(dt);
  config.divisions = std::move(divisions);
  config.cg_tol = cg_tol;
  config.allow_large = allow_large;
  return config;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "mass-preserving two-step Lagrange-Galerkin solver";
  m.attr("__version__") = "0.1.0";

  py::class_<MeshStatistics>(m, "MeshStatistics")
      .def_readonly("h", &MeshStatistics::h)
      .def_readonly("cell_count", &MeshStatistics::cell_count)
      .def_readonly("vertex_count", &MeshStatistics::vertex_count);

  py::class_<CellLocation>(m, "CellLocation")
      .def_readonly("cell_index", &CellLocation::cell_index)
      .def_readonly("inside", &CellLocation::inside)
      .def_property_readonly("barycentric", [](const CellLocation& loc) {
        return std::vector<double>(loc.barycentric.begin(),
                                   loc.barycentric.end());
      });

  py::class_<Mesh>(m, "Mesh")
      .def(py::init([](int dim, int division) {
             return build_box_mesh(dim, division);
           }),
           py::arg("dim"), py::arg("division"))
      .def_property_readonly("dim", &Mesh::dim)
      .def_property_readonly("division", &Mesh::division)
      .def_property_readonly("grid_h", &Mesh::grid_h)
      .def_property_readonly("cell_count", &Mesh::cell_count)
      .def_property_readonly("vertex_count", &Mesh::vertex_count)
      .def("statistics", &Mesh::statistics)
      .def("locate",
           [](const Mesh& mesh, const std::vector<double>& x) {
             return mesh.locate(to_point(x));
           })
      .def("vertex", [](const Mesh& mesh, int v) {
        const Point& p = mesh.vertex(v);
        return std::vector<double>(p.begin(), p.begin() + mesh.dim());
      });

  py::class_<QuadratureRule>(m, "QuadratureRule")
      .def_readonly("dim", &QuadratureRule::dim)
      .def_readonly("degree", &QuadratureRule::degree)
      .def_readonly("weights", &QuadratureRule::weights)
      .def_property_readonly("points", [](const QuadratureRule& rule) {
        std::vector<std::vector<double>> pts;
        for (const auto& p : rule.points)
          pts.emplace_back(p.begin(), p.begin() + rule.dim + 1);
        return pts;
      });
  m.def("simplex_rule", &simplex_rule, py::arg("dim"));
  m.def("facet_rule", &facet_rule, py::arg("dim"));

  py::class_<FESpace>(m, "FESpace")
      .def(py::init<const Mesh&, int>(), py::arg("mesh"), py::arg("degree"),
           py::keep_alive<1, 2>())
      .def_property_readonly("dof_count", &FESpace::dof_count)
      .def_property_readonly("degree", &FESpace::degree);

  py::class_<FEFunction>(m, "FEFunction")
      .def_readonly("coeffs", &FEFunction::coeffs);

  m.def(
      "interpolate",
      [](const FESpace& space, const std::function<double(std::vector<double>)>& f) {
        return interpolate(space, [&](const Point& p) {
          return f(std::vector<double>(p.begin(),
                                       p.begin() + space.mesh().dim()));
        });
      },
      py::keep_alive<0, 1>());
  m.def("evaluate", &evaluate);
  m.def("assemble_mass",
        [](const FESpace& space) { return csr_dict(assemble_mass(space)); });
  m.def("assemble_stiffness", [](const FESpace& space) {
    return csr_dict(assemble_stiffness(space));
  });
  m.def("discrete_norms", [](const FEFunction& fun) {
    const NormPair norms = discrete_norms(fun);
    return py::make_tuple(norms.l2, norms.h1_semi);
  });

  m.def(
      "cg_solve",
      [](const py::dict& csr, const std::vector<double>& b, double tol,
         int max_iter) {
        auto shape = csr["shape"].cast<std::pair<int, int>>();
        SparseMatrix a(shape.first, shape.second,
                       csr["indptr"].cast<std::vector<int>>(),
                       csr["indices"].cast<std::vector<int>>(),
                       csr["data"].cast<std::vector<double>>());
        const CgResult result =
            cg_solve(a, b, tol, max_iter, Preconditioner::Jacobi);
        py::dict out;
        out["x"] = result.x;
        out["iterations"] = result.iterations;
        out["residual"] = result.relative_residual;
        return out;
      },
      py::arg("csr"), py::arg("b"), py::arg("tol") = 1e-12,
      py::arg("max_iter") = 10000);

  m.def("gronwall_check", [](long long trials, unsigned long long seed) {
    const GronwallReport report = gronwall_check(trials, seed);
    py::dict d;
    d["trials"] = report.trials;
    d["violations"] = report.violations;
    d["root_property_violations"] = report.root_property_violations;
    return d;
  });

  m.def(
      "run_convergence",
      [](int dim, int degree, const std::string& variant, double nu, double T,
         std::optional<std::pair<double, double>> coupling,
         std::vector<double> dt, std::vector<int> divisions, double cg_tol,
         bool allow_large) {
        const ConvergenceTable table = run_convergence(config_from_kwargs(
            dim, degree, variant, nu, T, coupling, std::move(dt),
            std::move(divisions), cg_tol, allow_large));
        py::list rows;
        for (const auto& row : table.rows) rows.append(row_dict(row));
        return rows;
      },
      py::arg("dim") = 1, py::arg("degree") = 1, py::arg("variant") = "mp2",
      py::arg("nu") = 1e-2, py::arg("T") = 0.5,
      py::arg("coupling") = std::nullopt,
      py::arg("dt") = std::vector<double>{},
      py::arg("divisions") = std::vector<int>{}, py::arg("cg_tol") = 1e-12,
      py::arg("allow_large") = false);

  m.def(
      "run_single",
      [](int dim, int N, int degree, const std::string& variant, double nu,
         double T, std::optional<std::pair<double, double>> coupling,
         std::vector<double> dt, double cg_tol,
         const std::string& export_solution) {
        ExperimentConfig config = config_from_kwargs(
            dim, degree, variant, nu, T, coupling, std::move(dt), {N}, cg_tol,
            false);
        const RunResult result = run_single(config, N, export_solution);
        py::dict d;
        d["N"] = result.division;
        d["dt"] = result.dt;
        d["steps"] = result.steps;
        d["dofs"] = result.dofs;
        if (result.errors) {
          d["E_linf_L2"] = result.errors->e_linf_l2;
          d["E_l2_H10"] = result.errors->e_l2_h10;
          d["E_linf_H10"] = result.errors->e_linf_h10;
        }
        d["E_mass"] = result.mass.e_mass;
        d["E_mass_prime"] = result.mass.e_mass_prime;
        d["E_mass_double_prime"] = result.mass.e_mass_double_prime;
        d["gamma_min"] = result.diagnostics.gamma.min_value;
        d["gamma_max"] = result.diagnostics.gamma.max_value;
        return d;
      },
      py::arg("dim"), py::arg("N"), py::arg("degree") = 1,
      py::arg("variant") = "mp2", py::arg("nu") = 1e-2, py::arg("T") = 0.5,
      py::arg("coupling") = std::nullopt,
      py::arg("dt") = std::vector<double>{}, py::arg("cg_tol") = 1e-12,
      py::arg("export_solution") = std::string());

  m.def("verify_suite", [](const std::string& suite, long long trials,
                           unsigned long long seed) {
    std::vector<CheckResult> checks;
    if (suite == "quadrature")
      checks = verify_quadrature();
    else if (suite == "jacobian")
      checks = verify_jacobian(1000, seed);
    else if (suite == "gronwall")
      checks = verify_gronwall(trials, seed);
    else if (suite == "truncation")
      checks = verify_truncation();
    else if (suite == "conservation")
      checks = verify_conservation();
    else
      throw std::invalid_argument("unknown suite " + suite);
    py::list out;
    for (const auto& check : checks) {
      py::dict d;
      d["name"] = check.name;
      d["pass"] = check.pass;
      d["detail"] = check.detail;
      out.append(d);
    }
    return out;
  }, py::arg("suite"), py::arg("trials") = 10000, py::arg("seed") = 0);
}
