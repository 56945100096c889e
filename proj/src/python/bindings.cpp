#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lmcf/estimate.hpp"
#include "lmcf/flow.hpp"
#include "lmcf/geometry.hpp"
#include "lmcf/inequalities.hpp"
#include "lmcf/solutions.hpp"

namespace py = pybind11;
using namespace lmcf;

PYBIND11_MODULE(_core, m) {
  m.doc() = "Curve shortening flow laboratory: planar flows, exact solutions, "
            "evolution-equation residuals and mean curvature estimate audits.";

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init([](double x, double y) { return Vec2{x, y}; }))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("norm", &Vec2::norm)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
      });

  py::class_<Topology>(m, "Topology")
      .def_static("open", &Topology::open)
      .def_static("x_periodic", &Topology::x_periodic)
      .def_readonly("period", &Topology::period)
      .def("periodic", &Topology::periodic);

  py::class_<ScalarField>(m, "ScalarField")
      .def_readonly("values", &ScalarField::values)
      .def("__len__", &ScalarField::size)
      .def("__getitem__", [](const ScalarField& f, std::size_t i) { return f.values.at(i); });

  py::class_<PlanarCurve>(m, "PlanarCurve")
      .def(py::init<>())
      .def_readwrite("vertices", &PlanarCurve::vertices)
      .def_readwrite("topology", &PlanarCurve::topology)
      .def_readwrite("basepoint_index", &PlanarCurve::basepoint_index)
      .def("validate", &PlanarCurve::validate)
      .def("__len__", &PlanarCurve::size);

  py::enum_<SolutionKind>(m, "SolutionKind")
      .value("grim_reaper", SolutionKind::GrimReaper)
      .value("hairclip", SolutionKind::Hairclip)
      .value("line", SolutionKind::Line)
      .value("circle", SolutionKind::Circle)
      .value("sine_graph", SolutionKind::SineGraph);

  py::class_<SolutionSpec>(m, "SolutionSpec")
      .def(py::init<>())
      .def_readwrite("kind", &SolutionSpec::kind)
      .def_readwrite("time", &SolutionSpec::time)
      .def_readwrite("y_min", &SolutionSpec::y_min)
      .def_readwrite("y_max", &SolutionSpec::y_max)
      .def_readwrite("samples", &SolutionSpec::samples)
      .def_readwrite("amplitude", &SolutionSpec::amplitude)
      .def_readwrite("wavenumber", &SolutionSpec::wavenumber)
      .def_readwrite("periods", &SolutionSpec::periods)
      .def_readwrite("radius", &SolutionSpec::radius)
      .def_readwrite("line_from", &SolutionSpec::line_from)
      .def_readwrite("line_to", &SolutionSpec::line_to)
      .def_readwrite("basepoint", &SolutionSpec::basepoint)
      .def("canonical_theta_offset", &SolutionSpec::canonical_theta_offset)
      .def("calibration_delta", &SolutionSpec::calibration_delta);

  m.def("sample", &sample, py::arg("spec"));
  m.def("sample_at", &sample_at, py::arg("spec"), py::arg("t"));
  m.def("translator_residual", &translator_residual, py::arg("curve"), py::arg("v"));
  m.def("implicit_residual_hairclip", &implicit_residual_hairclip, py::arg("curve"),
        py::arg("t"));

  py::class_<GeometryReport>(m, "GeometryReport")
      .def_readonly("theta", &GeometryReport::theta)
      .def_readonly("cos_theta", &GeometryReport::cos_theta)
      .def_readonly("varphi", &GeometryReport::varphi)
      .def_readonly("kappa", &GeometryReport::kappa)
      .def_readonly("abs_h", &GeometryReport::abs_h)
      .def_readonly("distance_r", &GeometryReport::distance_r)
      .def_readonly("arclengths", &GeometryReport::arclengths)
      .def_readonly("winding_number", &GeometryReport::winding_number)
      .def_readonly("inf_cos_theta", &GeometryReport::inf_cos_theta);

  py::class_<InequalityAuditReport>(m, "InequalityAuditReport")
      .def_readonly("cos_h_violation_max", &InequalityAuditReport::cos_h_violation_max)
      .def_readonly("kato_violation_max", &InequalityAuditReport::kato_violation_max)
      .def_readonly("scal_abs_max", &InequalityAuditReport::scal_abs_max)
      .def_readonly("p_identity_abs_max", &InequalityAuditReport::p_identity_abs_max)
      .def_readonly("p_bound_violation_max", &InequalityAuditReport::p_bound_violation_max);

  m.def("geometry_report", &geometry_report, py::arg("curve"), py::arg("theta_offset") = 0.0);
  m.def("inequality_audit", &inequality_audit, py::arg("curve"), py::arg("theta_offset") = 0.0);
  m.def("curvature", &curvature, py::arg("curve"));
  m.def("gradient", &gradient, py::arg("field"), py::arg("curve"));
  m.def("gradient_norm", &gradient_norm, py::arg("field"), py::arg("curve"));
  m.def("laplacian", &laplacian, py::arg("field"), py::arg("curve"));
  m.def("tangent_angle", &tangent_angle, py::arg("curve"), py::arg("offset") = 0.0);
  m.def("arclength_and_distance", &arclength_and_distance, py::arg("curve"));

  py::enum_<Scheme>(m, "Scheme")
      .value("explicit_cfl", Scheme::ExplicitCfl)
      .value("fixed", Scheme::FixedEuler)
      .value("semi_implicit", Scheme::SemiImplicit);

  py::enum_<BoundaryPolicy>(m, "BoundaryPolicy")
      .value("pin_to_exact", BoundaryPolicy::PinToExact)
      .value("free_neumann", BoundaryPolicy::FreeNeumann)
      .value("periodic", BoundaryPolicy::Periodic);

  py::class_<FlowConfig>(m, "FlowConfig")
      .def(py::init<>())
      .def_readwrite("initial", &FlowConfig::initial)
      .def_readwrite("t_start", &FlowConfig::t_start)
      .def_readwrite("t_end", &FlowConfig::t_end)
      .def_readwrite("scheme", &FlowConfig::scheme)
      .def_readwrite("dt", &FlowConfig::dt)
      .def_readwrite("cfl_safety", &FlowConfig::cfl_safety)
      .def_readwrite("snapshot_stride", &FlowConfig::snapshot_stride)
      .def_readwrite("reparametrize_every", &FlowConfig::reparametrize_every)
      .def_readwrite("boundary", &FlowConfig::boundary)
      .def_readwrite("max_steps", &FlowConfig::max_steps);

  py::class_<FlowState>(m, "FlowState")
      .def_readonly("curve", &FlowState::curve)
      .def_readonly("time", &FlowState::time);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("states", &Trajectory::states)
      .def_readonly("config", &Trajectory::config)
      .def("__len__", &Trajectory::size);

  py::class_<ResidualReport>(m, "ResidualReport")
      .def_readonly("r1", &ResidualReport::r1)
      .def_readonly("r2", &ResidualReport::r2)
      .def_readonly("r3", &ResidualReport::r3);

  m.def("run", &run, py::arg("config"));
  m.def("step", &step, py::arg("state"), py::arg("dt"), py::arg("config"));
  m.def("evolution_residuals", &evolution_residuals, py::arg("trajectory"));
  m.def("total_length", &total_length, py::arg("curve"));
  m.def("polyline_hausdorff", &polyline_hausdorff, py::arg("a"), py::arg("b"));
  m.def("reparametrize_uniform", &reparametrize_uniform, py::arg("curve"));

  py::class_<CutoffSpec>(m, "CutoffSpec")
      .def(py::init<>())
      .def_readwrite("R", &CutoffSpec::R)
      .def_readwrite("T", &CutoffSpec::T)
      .def_readwrite("profile_power", &CutoffSpec::profile_power);

  py::class_<Cutoff>(m, "Cutoff")
      .def("value", &Cutoff::value, py::arg("r"), py::arg("t"))
      .def("d_dr", &Cutoff::d_dr, py::arg("r"), py::arg("t"))
      .def("d2_drr", &Cutoff::d2_drr, py::arg("r"), py::arg("t"))
      .def("d_dt", &Cutoff::d_dt, py::arg("r"), py::arg("t"));

  py::class_<CutoffAuditReport>(m, "CutoffAuditReport")
      .def_readonly("sup_dr_ratio", &CutoffAuditReport::sup_dr_ratio)
      .def_readonly("sup_drr_ratio", &CutoffAuditReport::sup_drr_ratio)
      .def_readonly("sup_dt_ratio", &CutoffAuditReport::sup_dt_ratio)
      .def_readonly("monotone", &CutoffAuditReport::monotone)
      .def_readonly("all_finite", &CutoffAuditReport::all_finite);

  m.def("build_cutoff", &build_cutoff, py::arg("spec"));
  m.def("audit_cutoff", &audit_cutoff, py::arg("spec"), py::arg("samples"));
  m.def("choose_b", &choose_b, py::arg("delta"));
  m.def("default_epsilon", &default_epsilon, py::arg("b"), py::arg("sup_varphi"));

  py::class_<CylinderSpec>(m, "CylinderSpec")
      .def(py::init<>())
      .def_readwrite("basepoint", &CylinderSpec::basepoint)
      .def_readwrite("R", &CylinderSpec::R)
      .def_readwrite("T", &CylinderSpec::T)
      .def_readwrite("center_time", &CylinderSpec::center_time);

  py::class_<SweepCell>(m, "SweepCell")
      .def_readonly("R", &SweepCell::R)
      .def_readonly("T", &SweepCell::T)
      .def_readonly("sup_ratio", &SweepCell::sup_ratio)
      .def_readonly("ratio_to_bound", &SweepCell::ratio_to_bound);

  py::class_<EstimateSweepResult>(m, "EstimateSweepResult")
      .def_readonly("grid", &EstimateSweepResult::grid)
      .def_readonly("fitted_c", &EstimateSweepResult::fitted_c)
      .def_readonly("fitted_c_small", &EstimateSweepResult::fitted_c_small)
      .def_readonly("fitted_c_large", &EstimateSweepResult::fitted_c_large)
      .def_readonly("scaling_ok", &EstimateSweepResult::scaling_ok);

  py::class_<CheckRow>(m, "CheckRow")
      .def_readonly("name", &CheckRow::name)
      .def_readonly("lhs", &CheckRow::lhs)
      .def_readonly("rhs", &CheckRow::rhs)
      .def_readonly("pass_", &CheckRow::pass);

  py::class_<MaxpointAuditReport>(m, "MaxpointAuditReport")
      .def_readonly("rows", &MaxpointAuditReport::rows)
      .def_readonly("argmax_vertex", &MaxpointAuditReport::argmax_vertex)
      .def_readonly("argmax_snapshot", &MaxpointAuditReport::argmax_snapshot)
      .def_readonly("psi_q_max", &MaxpointAuditReport::psi_q_max)
      .def_readonly("c_final", &MaxpointAuditReport::c_final)
      .def_readonly("trivial", &MaxpointAuditReport::trivial)
      .def("all_pass", &MaxpointAuditReport::all_pass);

  m.def("sup_ratio", &sup_ratio, py::arg("trajectory"), py::arg("cylinder"), py::arg("b"));
  m.def("sweep_and_fit", &sweep_and_fit, py::arg("trajectory"), py::arg("basepoint"),
        py::arg("r_list"), py::arg("t_list"), py::arg("b"), py::arg("center_time"),
        py::arg("profile_power") = 8);
  m.def("maxpoint_audit", &maxpoint_audit, py::arg("trajectory"), py::arg("cylinder"),
        py::arg("b"), py::arg("epsilon"), py::arg("profile_power") = 8);

  py::class_<SampleDomain>(m, "SampleDomain")
      .def(py::init<>())
      .def_readwrite("sample_count", &SampleDomain::sample_count)
      .def_readwrite("seed", &SampleDomain::seed)
      .def_readwrite("xyz_max", &SampleDomain::xyz_max);

  py::class_<LabReport>(m, "LabReport")
      .def_readonly("violations", &LabReport::violations)
      .def_readonly("stream_checksum", &LabReport::stream_checksum);

  m.def("young_check", &young_check, py::arg("domain"));
  m.def("amgm_mei_check", &amgm_mei_check, py::arg("domain"));
  m.def("curve_kato_check", &curve_kato_check, py::arg("curve"));

  m.attr("__version__") = "0.1.0";
}
