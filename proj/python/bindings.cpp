#include <optional>
#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "arraymem/cli.hpp"
#include "arraymem/dynamics.hpp"
#include "arraymem/error.hpp"
#include "arraymem/geometry.hpp"
#include "arraymem/studies.hpp"

namespace py = pybind11;
using namespace arraymem;

namespace {

Eigen::MatrixXd positions_array(const Geometry& g) {
    Eigen::MatrixXd out(g.size(), 3);
    for (int a = 0; a < g.size(); ++a) out.row(a) = g.positions()[a].transpose();
    return out;
}

py::dict evaluation_dict(const RetrievalProblem::Evaluation& ev) {
    py::dict d;
    d["eta_max"] = ev.solution.eta_max;
    d["epsilon"] = 1.0 - ev.solution.eta_max;
    d["spin_wave"] = ev.solution.spin_wave;
    d["relative_gap"] = ev.solution.relative_gap;
    d["hermiticity"] = ev.k.hermiticity;
    d["prefactor"] = ev.k.prefactor;
    d["K"] = ev.k.K;
    return d;
}

} // namespace

PYBIND11_MODULE(_arraymem, m) {
    m.doc() = "Photon retrieval efficiency of subwavelength atomic arrays";

    auto base = py::register_exception<Error>(m, "Error");
    py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
    py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
    py::register_exception<DefectiveSpectrum>(m, "DefectiveSpectrum", base.ptr());
    py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

    py::enum_<Model>(m, "Model").value("TWO_LEVEL", Model::TwoLevel).value("ISOTROPIC", Model::Isotropic);
    py::enum_<Contraction>(m, "Contraction").value("FULL", Contraction::Full).value("X_ONLY", Contraction::XOnly);

    py::class_<Geometry>(m, "Geometry")
        .def_property_readonly("size", &Geometry::size)
        .def_property_readonly("linear_size", &Geometry::linear_size)
        .def_property_readonly("lattice_constant", &Geometry::lattice_constant)
        .def_property_readonly("holes", &Geometry::holes)
        .def_property_readonly("sigma", &Geometry::sigma)
        .def_property_readonly("positions", &positions_array);

    m.def("square_array", &build_square_array, py::arg("n"), py::arg("d"));
    m.def("remove_holes", &remove_holes, py::arg("geometry"), py::arg("holes"));
    m.def("apply_position_disorder", &apply_position_disorder, py::arg("geometry"), py::arg("sigma"),
          py::arg("seed"));

    m.def(
        "interaction_matrix",
        [](const Geometry& g, Model model) { return interaction_matrix(g, model).entries; }, py::arg("geometry"),
        py::arg("model") = Model::TwoLevel);

    m.def(
        "eigendecompose",
        [](const Geometry& g, Model model) {
            const SpectralDecomposition dec = eigendecompose(interaction_matrix(g, model));
            py::dict d;
            d["eigenvalues"] = dec.eigenvalues;
            d["eigenvectors"] = dec.eigenvectors;
            d["bilinear_condition"] = dec.bilinear_condition;
            d["completeness_residual"] = dec.completeness_residual;
            d["trace_residual"] = dec.trace_residual;
            d["min_decay"] = dec.min_decay;
            return d;
        },
        py::arg("geometry"), py::arg("model") = Model::TwoLevel);

    py::class_<DetectionMode>(m, "DetectionMode")
        .def(py::init<double, double, bool, double>(), py::arg("w0"), py::arg("amplitude") = 1.0,
             py::arg("two_sided") = true, py::arg("tolerance") = 1e-10)
        .def_property_readonly("w0", &DetectionMode::w0)
        .def_property_readonly("two_sided", &DetectionMode::two_sided)
        .def("norm", &DetectionMode::norm)
        .def("focus_value", &DetectionMode::focus_value)
        .def("field", [](const DetectionMode& mode, const Vec3& r) { return CVec3(detection_field(mode, r)); });

    m.def(
        "validate_projection",
        [](const DetectionMode& mode, const Vec3& position, const Vec3& orientation, double plane_z) {
            const ProjectionCheck p = validate_projection(mode, position, orientation, plane_z);
            py::dict d;
            d["numeric"] = p.numeric;
            d["closed_form"] = p.closed_form;
            d["relative_discrepancy"] = p.relative_discrepancy;
            return d;
        },
        py::arg("mode"), py::arg("position"), py::arg("orientation"), py::arg("plane_z"));

    py::class_<RetrievalProblem>(m, "RetrievalProblem")
        .def(py::init([](const Geometry& g, Model model, Contraction c) { return RetrievalProblem(g, model, c); }),
             py::arg("geometry"), py::arg("model") = Model::TwoLevel, py::arg("contraction") = Contraction::Full)
        .def(
            "evaluate",
            [](const RetrievalProblem& p, const DetectionMode& mode) {
                std::optional<RetrievalProblem::Evaluation> ev;
                {
                    py::gil_scoped_release release;
                    ev = p.evaluate(mode);
                }
                return evaluation_dict(*ev);
            },
            py::arg("mode"))
        .def("error", &RetrievalProblem::error, py::arg("w0"), py::arg("tolerance") = 1e-10)
        .def(
            "efficiency_of_spin_wave",
            [](const RetrievalProblem& p, const DetectionMode& mode, const Eigen::VectorXcd& s) {
                return efficiency_of_spin_wave(p.evaluate(mode).k, s);
            },
            py::arg("mode"), py::arg("spin_wave"))
        .def(
            "eta_finite_time",
            [](const RetrievalProblem& p, const DetectionMode& mode, const Eigen::VectorXcd& s, double window) {
                const auto ev = p.evaluate(mode);
                return eta_finite_time(p.decomposition(), ev.samples, s, window);
            },
            py::arg("mode"), py::arg("spin_wave"), py::arg("window"))
        .def_property_readonly("geometry", &RetrievalProblem::geometry);

    m.def(
        "max_efficiency",
        [](int n, double d, double w0, Model model, bool two_sided) {
            std::optional<RetrievalProblem::Evaluation> ev;
            {
                py::gil_scoped_release release;
                const RetrievalProblem p(build_square_array(n, d), model);
                ev = p.evaluate(DetectionMode(w0, 1.0, two_sided));
            }
            return evaluation_dict(*ev);
        },
        py::arg("n"), py::arg("d"), py::arg("w0"), py::arg("model") = Model::TwoLevel, py::arg("two_sided") = true);

    m.def(
        "optimal_waist",
        [](const RetrievalProblem& p, double tol) {
            OptimalWaist o;
            {
                py::gil_scoped_release release;
                o = optimal_waist(p, tol);
            }
            py::dict d;
            d["w0"] = o.w0;
            d["epsilon"] = o.epsilon;
            d["eta"] = o.eta;
            d["spin_wave"] = o.spin_wave;
            d["fallback"] = o.fallback;
            return d;
        },
        py::arg("problem"), py::arg("tolerance") = 1e-3);

    m.def(
        "scan_waist",
        [](int n, double d, const std::vector<double>& w0_list, Model model) {
            const WaistScan s = scan_waist(n, d, w0_list, model);
            std::vector<double> w, eps, clip;
            for (const auto& pt : s.points) {
                w.push_back(pt.w0);
                eps.push_back(pt.epsilon);
                clip.push_back(pt.clipping);
            }
            return py::make_tuple(w, eps, clip);
        },
        py::arg("n"), py::arg("d"), py::arg("w0_list"), py::arg("model") = Model::TwoLevel);

    m.def("clipping_term", &clipping_term);
    m.def("error_model", &error_model);
    m.def("scaling_estimate", &scaling_estimate);

    m.def(
        "run_cli",
        [](std::vector<std::string> args) {
            args.insert(args.begin(), "arraymem");
            std::vector<const char*> argv;
            for (const auto& a : args) argv.push_back(a.c_str());
            std::ostringstream out, err;
            const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"));
}
