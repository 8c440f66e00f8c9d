#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "tfred/cli.hpp"
#include "tfred/conditions.hpp"
#include "tfred/convergence.hpp"
#include "tfred/examples.hpp"
#include "tfred/manifold.hpp"

namespace py = pybind11;
using namespace tfred;

namespace {

// Examples are rebuilt per call; they are cheap and this keeps the Python side stateless.
struct Example {
    ExampleSystem ex;
    ReducedField rf;

    Example(const std::string& name, const ParamMap& params)
        : ex(get_example(name, params)), rf(make_reduced_field(ex.decomposition, ex.system)) {}
};

py::dict row_dict(const ConvergenceRow& r) {
    py::dict d;
    d["eps"] = r.eps;
    d["sup_err"] = r.sup_err;
    d["tail_err"] = r.tail_err;
    d["head_err"] = r.head_err;
    d["n_steps_full"] = r.n_steps_full;
    d["n_steps_reduced"] = r.n_steps_reduced;
    d["failed"] = r.failed;
    d["tail_ok"] = r.tail_ok;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Slow-fast reduction of perturbed ODE systems";

    py::register_exception<UnknownSystem>(m, "UnknownSystem", PyExc_KeyError);

    m.def("list_systems", [] { return Registry::builtin().names(); });
    m.def("default_params", [](const std::string& name) { return Registry::builtin().defaults(name); }, py::arg("name"));

    py::class_<Example>(m, "Example")
        .def(py::init<const std::string&, const ParamMap&>(), py::arg("name"), py::arg("params") = ParamMap{})
        .def_property_readonly("name", [](const Example& e) { return e.ex.system.name; })
        .def_property_readonly("dim", [](const Example& e) { return e.ex.system.dim; })
        .def_property_readonly("rank", [](const Example& e) { return e.ex.decomposition.rank; })
        .def_property_readonly("params", [](const Example& e) { return e.ex.system.params; })
        .def_property_readonly("initial_state", [](const Example& e) { return e.ex.initial_state; })
        .def_property_readonly("description", [](const Example& e) { return e.ex.description; })
        .def("h", [](const Example& e, const Vec& x, double eps) { return eval_h(e.ex.system, x, eps); },
             py::arg("x"), py::arg("eps"))
        .def("reduced_rhs", [](const Example& e, const Vec& x) { return reduced_rhs(e.rf, x); }, py::arg("x"))
        .def("closed_form_rhs", [](const Example& e, const Vec& x) { return oracle_reduced_rhs(e.ex, x); },
             py::arg("x"))
        .def("projection", [](const Example& e, const Vec& x) { return projection_Q(e.ex.decomposition, x); },
             py::arg("x"))
        .def("stationary_points",
             [](const Example& e) { return find_stationary_points(e.rf, e.ex.manifold); })
        .def("sample_manifold", [](const Example& e, std::size_t n) { return sample_manifold(e.ex.manifold, n).points; },
             py::arg("n"))
        .def("fast_fiber_project",
             [](const Example& e, const Vec& x) { return fast_fiber_project(e.ex.system, e.ex.manifold, x); },
             py::arg("x"))
        .def(
            "check",
            [](const Example& e, std::size_t samples, std::uint64_t seed) {
                RunConfig cfg;
                cfg.system = e.ex.system.name;
                cfg.samples = samples;
                cfg.seed = seed;
                const CheckResult r = run_checks(e.ex, cfg);
                py::dict verdicts;
                for (const auto& c : r.report.conditions) verdicts[py::str(c.name)] = verdict_name(c.verdict);
                return py::make_tuple(r.report.passed(), verdicts, r.report.to_text());
            },
            py::arg("samples") = 200, py::arg("seed") = 1)
        .def(
            "converge",
            [](const Example& e, const std::vector<double>& eps, double tau0, double T) {
                SweepOptions opt;
                opt.tau0 = tau0;
                opt.T = T;
                opt.record_timing = false;
                ConvergenceTable t;
                {
                    py::gil_scoped_release release;
                    t = convergence_sweep(e.ex.system, e.rf, e.ex.manifold, e.ex.initial_state, eps, opt);
                }
                py::dict d;
                py::list rows;
                for (const auto& r : t.rows) rows.append(row_dict(r));
                d["rows"] = rows;
                d["passed"] = t.passed();
                d["slope"] = t.empirical_slope();
                d["csv"] = t.to_csv();
                return d;
            },
            py::arg("eps") = std::vector<double>{1e-1, 1e-2, 1e-3, 1e-4}, py::arg("tau0") = 0.1, py::arg("T") = 50.0);

    m.def("hurwitz_computed",
          [](double a, double b, double c, double d) {
              const HurwitzTriple h = maltose_hurwitz_computed(a, b, c, d);
              return py::make_tuple(h.A1, h.H2, h.A3);
          });

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::ostringstream out, err;
            const int code = run_cli(args, out, err, Registry::builtin());
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command line front end; returns (exit code, stdout, stderr).");
}
