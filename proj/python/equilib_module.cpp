#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "equilib/convergence.hpp"
#include "equilib/io.hpp"
#include "equilib/scenario.hpp"
#include "equilib/verifier.hpp"

namespace py = pybind11;
using namespace equilib;

namespace {

DiscreteMeasure measure_from_array(const Eigen::VectorXd& w) {
  DiscreteMeasure m(w);
  validate_measure(m);
  return m;
}

}  // namespace

PYBIND11_MODULE(_equilib, m) {
  m.doc() = "Constrained minimal weighted-energy problems on point clouds";

  py::class_<PointCloud, std::shared_ptr<PointCloud>>(m, "PointCloud")
      .def(py::init<>())
      .def_readwrite("dim", &PointCloud::dim)
      .def_readwrite("points", &PointCloud::points)
      .def_readwrite("region", &PointCloud::region)
      .def("__len__", &PointCloud::size);

  py::class_<SubsetFamily>(m, "SubsetFamily")
      .def_readonly("stages", &SubsetFamily::stages);

  m.def("make_sphere", &make_sphere, py::arg("dim"), py::arg("radius"), py::arg("count"),
        py::arg("label") = "sphere");
  m.def("make_interval", &make_interval, py::arg("a"), py::arg("b"), py::arg("count"),
        py::arg("dim"), py::arg("label") = "interval");
  m.def("union_clouds", &union_clouds);
  m.def("nested_exhaustion",
        [](const PointCloud& cloud, const std::vector<double>& fractions) {
          return nested_exhaustion(std::make_shared<PointCloud>(cloud), fractions);
        });
  m.def("region_indices", &region_indices);
  m.def("min_pairwise_distance", &min_pairwise_distance);

  py::class_<KernelSpec>(m, "KernelSpec")
      .def_static("riesz", &KernelSpec::riesz, py::arg("alpha"), py::arg("dim"))
      .def_static("log_disk", &KernelSpec::log_disk)
      .def_static("green_ball", &KernelSpec::green_ball, py::arg("radius"), py::arg("dim"))
      .def("describe", &KernelSpec::describe);

  py::class_<KernelMatrix, std::shared_ptr<KernelMatrix>>(m, "KernelMatrix")
      .def_readonly("entries", &KernelMatrix::entries)
      .def_readonly("diag_h", &KernelMatrix::diag_h)
      .def("__len__", &KernelMatrix::size);

  m.def("kernel_value", &kernel_value);
  m.def("assemble", [](const KernelSpec& spec, const PointCloud& cloud) {
    return std::make_shared<KernelMatrix>(assemble(spec, std::make_shared<PointCloud>(cloud)));
  });
  m.def("check_pd", [](const Eigen::MatrixXd& mat) {
    const PdReport r = check_pd(mat);
    return py::make_tuple(r.positive_definite, r.min_pivot);
  });

  py::class_<DiscreteMeasure>(m, "DiscreteMeasure")
      .def(py::init(&measure_from_array))
      .def_readonly("weights", &DiscreteMeasure::weights)
      .def("total_mass", &DiscreteMeasure::total_mass)
      .def("__len__", &DiscreteMeasure::size);

  py::class_<FieldSpec>(m, "FieldSpec")
      .def_static("case_i", &FieldSpec::case_i)
      .def_static("case_ii", &FieldSpec::case_ii)
      .def_static("zero", &FieldSpec::zero);

  py::class_<Problem>(m, "Problem")
      .def_readonly("g", &Problem::g)
      .def_readonly("f", &Problem::f)
      .def_readonly("sigma", &Problem::sigma)
      .def_readonly("feasible", &Problem::feasible)
      .def_readonly("strictly_feasible", &Problem::strictly_feasible)
      .def_property_readonly("matrix", [](const Problem& p) { return p.matrix; })
      .def("__len__", &Problem::size);

  m.def("make_problem",
        [](std::shared_ptr<KernelMatrix> matrix, const Eigen::VectorXd& g,
           const FieldSpec& field, const DiscreteMeasure& sigma) {
          return make_problem(std::move(matrix), g, field, sigma);
        });

  m.def("energy", &energy);
  m.def("mutual_energy", &mutual_energy);
  m.def("potential", &potential);
  m.def("weighted_potential", &weighted_potential);
  m.def("weighted_energy", &weighted_energy);
  m.def("strong_distance", &strong_distance);

  py::class_<SolverOptions>(m, "SolverOptions")
      .def(py::init<>())
      .def_readwrite("max_iters", &SolverOptions::max_iters)
      .def_readwrite("gap_tol", &SolverOptions::gap_tol)
      .def_property(
          "algorithm",
          [](const SolverOptions& o) {
            return o.algorithm == Algorithm::ConditionalGradient ? "cg" : "pg";
          },
          [](SolverOptions& o, const std::string& v) {
            o.algorithm = v == "pg" ? Algorithm::ProjectedGradient
                                    : Algorithm::ConditionalGradient;
          });

  py::class_<Solution>(m, "Solution")
      .def_readonly("lambda_", &Solution::lambda)
      .def_readonly("value", &Solution::value)
      .def_readonly("gap", &Solution::gap)
      .def_readonly("iterations", &Solution::iterations)
      .def_readonly("ell", &Solution::ell)
      .def_readonly("L", &Solution::L)
      .def_readonly("converged", &Solution::converged);

  m.def("feasible_point", &feasible_point);
  m.def("lp_oracle", &lp_oracle);
  m.def("certificate_gap", &certificate_gap);
  m.def("project_box_hyperplane", &project_box_hyperplane);
  m.def("solve", &solve, py::arg("problem"), py::arg("options") = SolverOptions{},
        py::arg("start") = std::nullopt);

  py::class_<SupportSets>(m, "SupportSets")
      .def_readonly("s_lambda", &SupportSets::s_lambda)
      .def_readonly("s_residual", &SupportSets::s_residual)
      .def_readonly("eps_supp", &SupportSets::eps_supp);

  py::class_<VariationalReport>(m, "VariationalReport")
      .def_readonly("ell", &VariationalReport::ell)
      .def_readonly("L", &VariationalReport::L)
      .def_readonly("w", &VariationalReport::w)
      .def_readonly("passed", &VariationalReport::passed)
      .def_property_readonly("ineq1_violations",
                             [](const VariationalReport& r) {
                               std::vector<std::pair<int, double>> out;
                               for (const auto& v : r.ineq1_violations)
                                 out.emplace_back(v.index, v.margin);
                               return out;
                             })
      .def_property_readonly("ineq2_violations", [](const VariationalReport& r) {
        std::vector<std::pair<int, double>> out;
        for (const auto& v : r.ineq2_violations) out.emplace_back(v.index, v.margin);
        return out;
      });

  m.def("default_eps_supp", &default_eps_supp);
  m.def("default_eps_ineq", &default_eps_ineq);
  m.def("supports", &supports);
  m.def("ell_L", [](const Problem& p, const DiscreteMeasure& lam, double eps_supp) {
    const EllL e = ell_L(p, lam, eps_supp);
    return py::make_tuple(e.ell, e.L);
  });
  m.def("check_variational", &check_variational);
  m.def("violation_sets", &violation_sets);
  m.def("capacitary_distribution",
        [](const KernelMatrix& mat, const std::vector<int>& subset) {
          const CapacitaryResult r = capacitary_distribution(mat, subset);
          return py::make_tuple(r.theta, r.capacity);
        });
  m.def("capacity", &capacity);

  py::class_<StageResult>(m, "StageResult")
      .def_readonly("id", &StageResult::id)
      .def_readonly("value", &StageResult::value)
      .def_readonly("lambda_", &StageResult::lambda)
      .def_readonly("gap", &StageResult::gap)
      .def_readonly("feasible", &StageResult::feasible)
      .def_readonly("skipped", &StageResult::skipped);

  py::class_<FamilyRun>(m, "FamilyRun")
      .def_readonly("stages", &FamilyRun::stages)
      .def_readonly("limit_value", &FamilyRun::limit_value)
      .def_readonly("distances", &FamilyRun::distances)
      .def_readonly("monotone", &FamilyRun::monotone)
      .def_readonly("convex_bound_ok", &FamilyRun::convex_bound_ok)
      .def_readonly("final_value_diff", &FamilyRun::final_value_diff)
      .def_readonly("final_distance", &FamilyRun::final_distance);

  m.def("run_decreasing_family", &run_decreasing_family, py::arg("p_limit"),
        py::arg("family"), py::arg("sigma_schedule"), py::arg("options") = SolverOptions{});
  m.def("run_compact_exhaustion", &run_compact_exhaustion, py::arg("p"), py::arg("family"),
        py::arg("beta_schedule"), py::arg("options") = SolverOptions{});

  m.def("run_example", &cmd_example, py::arg("name"), py::arg("out_dir"),
        py::arg("overrides") = ScenarioOverrides{});
  py::class_<ScenarioOverrides>(m, "ScenarioOverrides").def(py::init<>());
  m.def("run_scenario_solve", [](const std::string& doc, const std::string& out_dir) {
    return cmd_solve(nlohmann::json::parse(doc), out_dir, {});
  });
  m.def("example1_scenario", []() { return example1_scenario().dump(2); });
  m.def("example2_scenario", []() { return example2_scenario().dump(2); });

  m.def("cloud_to_csv", &cloud_to_csv);
  m.def("cloud_from_csv", &cloud_from_csv);
  m.def("measure_to_csv", &measure_to_csv);
  m.def("measure_from_csv", &measure_from_csv);
}
