#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "heatbv/calculus.hpp"
#include "heatbv/field.hpp"
#include "heatbv/functionals.hpp"
#include "heatbv/heat.hpp"
#include "heatbv/limits.hpp"
#include "heatbv/oracle.hpp"
#include "heatbv/space.hpp"

namespace py = pybind11;
using namespace heatbv;

PYBIND11_MODULE(_heatbv, m) {
    m.doc() = "Heat-kernel nonlocal functionals on discrete metric measure spaces";

    py::enum_<GeometryKind>(m, "GeometryKind")
        .value("LineGrid", GeometryKind::LineGrid)
        .value("CircleGrid", GeometryKind::CircleGrid)
        .value("TorusGrid", GeometryKind::TorusGrid)
        .value("EuclideanGrid", GeometryKind::EuclideanGrid)
        .value("WeightedGraph", GeometryKind::WeightedGraph);

    py::class_<GeometryDescriptor>(m, "GeometryDescriptor")
        .def_static("line", &GeometryDescriptor::line, py::arg("a"), py::arg("b"), py::arg("n"))
        .def_static("circle", &GeometryDescriptor::circle, py::arg("length"), py::arg("n"))
        .def_static("torus", &GeometryDescriptor::torus, py::arg("length"), py::arg("n_per_axis"))
        .def_static("euclidean", &GeometryDescriptor::euclidean, py::arg("lo"), py::arg("hi"),
                    py::arg("n_per_axis"));

    py::class_<MetricMeasureSpace>(m, "MetricMeasureSpace")
        .def(py::init<const GeometryDescriptor&>())
        .def("__len__", &MetricMeasureSpace::size)
        .def_property_readonly("kind", &MetricMeasureSpace::kind)
        .def_property_readonly("total_mass", &MetricMeasureSpace::total_mass)
        .def_property_readonly("spacing", &MetricMeasureSpace::spacing)
        .def("weight", &MetricMeasureSpace::weight)
        .def("dist", &MetricMeasureSpace::dist)
        .def("position", &MetricMeasureSpace::position)
        .def("ball_mass", &MetricMeasureSpace::ball_mass, py::arg("center"), py::arg("r"));

    m.def("build_space", &build_space);

    py::class_<JumpProfile>(m, "JumpProfile")
        .def(py::init<>())
        .def_readwrite("breakpoints", &JumpProfile::breakpoints)
        .def_readwrite("values", &JumpProfile::values)
        .def_readwrite("periodic", &JumpProfile::periodic)
        .def_readwrite("period", &JumpProfile::period)
        .def("value_at", &JumpProfile::value_at);

    py::class_<FieldSpec>(m, "FieldSpec")
        .def_static("sine", &FieldSpec::sine, py::arg("amplitude"), py::arg("periods"),
                    py::arg("domain_length"))
        .def_static("linear", &FieldSpec::linear, py::arg("slope"), py::arg("offset") = 0.0)
        .def_static("constant", &FieldSpec::constant_field, py::arg("c"))
        .def_static("piecewise", &FieldSpec::piecewise)
        .def("value", &FieldSpec::value)
        .def("derivative", &FieldSpec::derivative);

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<>())
        .def_readwrite("values", &ScalarField::values)
        .def_property_readonly("sup_norm", &ScalarField::sup_norm);

    py::class_<IndicatorSet>(m, "IndicatorSet")
        .def_property_readonly("membership",
                               [](const IndicatorSet& e) {
                                   return std::vector<int>(e.membership.begin(),
                                                           e.membership.end());
                               })
        .def_property_readonly("exact_perimeter",
                               [](const IndicatorSet& e) { return e.exact_perimeter; })
        .def("as_field", &IndicatorSet::as_field)
        .def("orientations", &IndicatorSet::orientations);

    m.def("sample_field", &sample_field);
    m.def("indicator_halfline", &indicator_halfline);
    m.def("indicator_intervals", &indicator_intervals);
    m.def("complement", &complement);

    py::enum_<Backend>(m, "Backend")
        .value("ClosedFormGaussian", Backend::ClosedFormGaussian)
        .value("ImageSum", Backend::ImageSum)
        .value("Spectral", Backend::Spectral);

    py::class_<HeatKernelEngine>(m, "HeatKernelEngine")
        .def("kernel", &HeatKernelEngine::kernel, py::arg("t"), py::arg("i"), py::arg("j"))
        .def("apply",
             [](const HeatKernelEngine& e, double t, const std::vector<double>& f) {
                 return e.apply(t, f);
             })
        .def("row_mass", &HeatKernelEngine::row_mass)
        .def_property_readonly("backend", &HeatKernelEngine::backend);

    m.def(
        "make_engine",
        [](const MetricMeasureSpace& s, Backend b, std::size_t modes) {
            return make_engine(s, b, modes);
        },
        py::arg("space"), py::arg("backend"), py::arg("modes") = 0, py::keep_alive<0, 1>());
    m.def(
        "default_engine", [](const MetricMeasureSpace& s) { return default_engine(s); },
        py::keep_alive<0, 1>());

    py::class_<AxiomRow>(m, "AxiomRow")
        .def_readonly("t", &AxiomRow::t)
        .def_readonly("mass_defect", &AxiomRow::mass_defect)
        .def_readonly("self_adjoint_defect", &AxiomRow::self_adjoint_defect)
        .def_readonly("max_principle_defect", &AxiomRow::max_principle_defect)
        .def_readonly("pass_", &AxiomRow::pass);

    py::class_<AxiomReport>(m, "AxiomReport")
        .def_readonly("rows", &AxiomReport::rows)
        .def_readonly("pass_", &AxiomReport::pass);

    m.def("validate_axioms", &validate_axioms, py::arg("engine"), py::arg("ts"),
          py::arg("tolerance") = 1e-8);

    py::enum_<Path>(m, "Path")
        .value("DoubleSum", Path::DoubleSum)
        .value("HeatApply", Path::HeatApply)
        .value("GradientPairing", Path::GradientPairing)
        .value("LaplacianPairing", Path::LaplacianPairing);

    py::class_<FunctionalSample>(m, "FunctionalSample")
        .def_readonly("t", &FunctionalSample::t)
        .def_readonly("value", &FunctionalSample::value)
        .def_readonly("path", &FunctionalSample::path)
        .def_readonly("analytic", &FunctionalSample::analytic)
        .def_readonly("seconds", &FunctionalSample::seconds)
        .def_readonly("pairs", &FunctionalSample::pairs);

    py::class_<EvalOptions>(m, "EvalOptions")
        .def(py::init<>())
        .def_readwrite("window_margin_factor", &EvalOptions::window_margin_factor)
        .def_readwrite("t_max_hint", &EvalOptions::t_max_hint)
        .def_readwrite("prefer_analytic", &EvalOptions::prefer_analytic);

    m.def("sobolev_functional", &sobolev_functional, py::arg("engine"), py::arg("f"), py::arg("p"),
          py::arg("t"), py::arg("opts") = EvalOptions{});
    m.def("bv_functional", &bv_functional, py::arg("engine"), py::arg("f"), py::arg("t"),
          py::arg("opts") = EvalOptions{});
    m.def(
        "set_functional",
        [](const HeatKernelEngine& e, const IndicatorSet& s, double t, const EvalOptions& o) {
            auto r = set_functional(e, s, t, o);
            return std::make_pair(r.heat_apply, r.double_sum);
        },
        py::arg("engine"), py::arg("set"), py::arg("t"), py::arg("opts") = EvalOptions{});
    m.def("jump_functional", &jump_functional, py::arg("engine"), py::arg("f"), py::arg("g"),
          py::arg("t"), py::arg("opts") = EvalOptions{});
    m.def("polarization_g", &polarization_g, py::arg("engine"), py::arg("e"), py::arg("f"),
          py::arg("t"), py::arg("path") = Path::LaplacianPairing);
    m.def("ks_functional", &ks_functional, py::arg("space"), py::arg("f"), py::arg("p"),
          py::arg("r"));
    m.def("blowup_profile", &blowup_profile, py::arg("engine"), py::arg("set"), py::arg("x"),
          py::arg("t"), py::arg("analytic") = true);

    py::enum_<EnergyMethod>(m, "EnergyMethod")
        .value("Oracle", EnergyMethod::Oracle)
        .value("DiscreteSlope", EnergyMethod::DiscreteSlope)
        .value("Coarea", EnergyMethod::Coarea);

    py::class_<EnergyReport>(m, "EnergyReport")
        .def_readonly("p", &EnergyReport::p)
        .def_readonly("value", &EnergyReport::value)
        .def_readonly("method", &EnergyReport::method);

    m.def("cheeger_energy", &cheeger_energy, py::arg("space"), py::arg("f"), py::arg("p"),
          py::arg("method") = EnergyMethod::Oracle);
    m.def("total_variation", &total_variation);
    m.def("perimeter", &perimeter);

    py::class_<JumpData>(m, "JumpData")
        .def_readonly("jump_points", &JumpData::jump_points)
        .def_readonly("lower", &JumpData::lower)
        .def_readonly("upper", &JumpData::upper)
        .def_readonly("orientation", &JumpData::orientation)
        .def("total_variation", &JumpData::total_variation);

    m.def("jump_data", py::overload_cast<const ScalarField&>(&jump_data));

    py::class_<TLadder>(m, "TLadder")
        .def(py::init([](double t0, double rho, std::size_t k) {
                 TLadder l;
                 l.t0 = t0;
                 l.rho = rho;
                 l.k = k;
                 return l;
             }),
             py::arg("t0") = 1e-2, py::arg("rho") = 0.5, py::arg("k") = 6)
        .def("times", &TLadder::times);

    py::class_<ConvergenceCurve>(m, "ConvergenceCurve")
        .def_readonly("samples", &ConvergenceCurve::samples)
        .def_readonly("limit_estimate", &ConvergenceCurve::limit_estimate)
        .def_readonly("limit_stderr", &ConvergenceCurve::limit_stderr)
        .def_readonly("pass_", &ConvergenceCurve::pass)
        .def("rel_err", &ConvergenceCurve::rel_err);

    m.def("sweep",
          [](const MetricMeasureSpace& space, const TLadder& ladder,
             const std::function<FunctionalSample(double)>& fn) {
              return sweep(space, ladder, fn);
          });
    m.def("extrapolate", [](ConvergenceCurve& c) {
        extrapolate(c);
        return c;
    });
    m.def("apply_target", [](ConvergenceCurve& c, double target, double tol) {
        apply_target(c, target, tol);
        return c;
    });

    m.def("sobolev_constant", &sobolev_constant);
    m.def("target_sobolev", &target_sobolev);
    m.def("target_bv", &target_bv);
    m.def("target_jump_pairing", &target_jump_pairing, py::arg("f"), py::arg("g"),
          py::arg("position_tol") = 1e-9);
    m.def("target_blowup", &target_blowup);

    auto orc = m.def_submodule("oracle", "independent ground truths");
    orc.def("erfc", &oracle::erfc_rational);
    orc.def("erf", &oracle::erf_rational);
    orc.def("halfline_bv_exact", [](double t) { return oracle::halfline_bv_exact(t).value; });
    orc.def("quadrature_energy",
            [](const FieldSpec& f, double p, double lo, double hi, std::size_t n, bool periodic) {
                return oracle::quadrature_energy(f, p, lo, hi, n, periodic).value;
            });
    orc.def("pair_enumeration",
            [](const MetricMeasureSpace& s, const std::vector<double>& f, double p, double t) {
                return oracle::pair_enumeration(s, f, p, t).value;
            });
}
