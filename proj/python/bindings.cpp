#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "mirrorsim/analyses.hpp"
#include "mirrorsim/fourier.hpp"
#include "mirrorsim/power.hpp"
#include "mirrorsim/runner.hpp"

namespace py = pybind11;
using namespace mirrorsim;

namespace {

// Signal name -> value at an operating point.
py::dict op_values(const Circuit& c, const Solution& s, const Tolerances& tol) {
    Solver solver(c, tol);
    const auto names = signal_names(c);
    const auto values = sample_signals(solver, s, {});
    py::dict out;
    for (std::size_t i = 0; i < names.size(); ++i) out[py::str(names[i])] = values[i];
    return out;
}

Tolerances make_tol(std::optional<double> reltol) {
    Tolerances t;
    if (reltol) t.reltol = *reltol;
    return t;
}

}  // namespace

PYBIND11_MODULE(_mirrorsim, m) {
    m.doc() = "SPICE-subset simulator for BJT current mirrors and memristors";

    static py::exception<NetlistError> netlist_error(m, "NetlistError", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<AnalysisError>(m, "AnalysisError", PyExc_RuntimeError);
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const NetlistError& e) {
            std::ostringstream msg;
            if (e.line() > 0) msg << "line " << e.line() << ": ";
            msg << e.what();
            PyErr_SetString(netlist_error.ptr(), msg.str().c_str());
        }
    });

    m.def("parse_value", [](const std::string& token) { return parse_value(token); },
          "Parse a number with an engineering suffix, e.g. '9.3k'.");

    py::class_<Circuit>(m, "Circuit")
        .def_readonly("title", &Circuit::title)
        .def_readonly("node_names", &Circuit::node_names)
        .def_property_readonly("components",
                               [](const Circuit& c) {
                                   std::vector<std::string> names;
                                   for (const auto& comp : c.components) names.push_back(comp.name);
                                   return names;
                               })
        .def("to_netlist", [](const Circuit& c) { return to_netlist(c); })
        .def("__eq__", [](const Circuit& a, const Circuit& b) { return a == b; })
        .def("__repr__", [](const Circuit& c) {
            return "<Circuit '" + c.title + "' with " + std::to_string(c.components.size()) + " components>";
        });

    m.def("load_circuit", [](const std::string& text) { return load_circuit(text); }, py::arg("text"),
          "Parse and elaborate netlist text.");

    py::class_<Trace>(m, "Trace")
        .def_readonly("axis_name", &Trace::axis_name)
        .def_readonly("axis", &Trace::axis)
        .def_readonly("names", &Trace::names)
        .def("signal", [](const Trace& t, const std::string& name) { return t.signal(name); })
        .def("__len__", &Trace::size)
        .def("__getitem__", [](const Trace& t, const std::string& name) { return t.signal(name); });

    m.def(
        "operating_point",
        [](const Circuit& c, std::optional<double> reltol) {
            const auto tol = make_tol(reltol);
            return op_values(c, run_op(c, tol), tol);
        },
        py::arg("circuit"), py::arg("reltol") = py::none(), "DC operating point as {signal: value}.");

    m.def(
        "dc_sweep",
        [](const Circuit& c, const std::string& source, double start, double stop, double step,
           std::optional<double> reltol) {
            return run_dc_sweep(c, DcSweepDirective{source, start, stop, step}, make_tol(reltol));
        },
        py::arg("circuit"), py::arg("source"), py::arg("start"), py::arg("stop"), py::arg("step"),
        py::arg("reltol") = py::none());

    m.def(
        "transient",
        [](const Circuit& c, double tstep, double tstop, double tstart, std::optional<double> reltol) {
            return run_transient(c, TranDirective{tstep, tstop, tstart}, make_tol(reltol));
        },
        py::arg("circuit"), py::arg("tstep"), py::arg("tstop"), py::arg("tstart") = 0.0,
        py::arg("reltol") = py::none());

    py::class_<FourierReport>(m, "FourierReport")
        .def_readonly("signal", &FourierReport::signal)
        .def_readonly("fundamental", &FourierReport::fundamental)
        .def_readonly("nharmonics", &FourierReport::nharmonics)
        .def_readonly("dc", &FourierReport::dc)
        .def_readonly("magnitudes", &FourierReport::magnitudes)
        .def_readonly("phases_deg", &FourierReport::phases_deg)
        .def_readonly("thd_requested", &FourierReport::thd_requested)
        .def_readonly("thd_full", &FourierReport::thd_full);

    m.def(
        "fourier",
        [](const Trace& t, const std::string& signal, double fundamental, int nharmonics) {
            return fourier_analysis(t, signal, fundamental, nharmonics);
        },
        py::arg("trace"), py::arg("signal"), py::arg("fundamental"), py::arg("nharmonics") = 9);

    py::class_<PowerReport>(m, "PowerReport")
        .def_readonly("delivered", &PowerReport::delivered)
        .def_readonly("dissipated", &PowerReport::dissipated)
        .def_readonly("imbalance", &PowerReport::imbalance)
        .def_readonly("window_start", &PowerReport::window_start)
        .def_readonly("window_end", &PowerReport::window_end)
        .def_property_readonly("entries",
                               [](const PowerReport& r) {
                                   py::dict d;
                                   for (const auto& e : r.entries) d[py::str(e.component)] = e.power;
                                   return d;
                               })
        .def("balanced", &PowerReport::balanced, py::arg("rel") = 1e-3);

    m.def(
        "power",
        [](const Circuit& c, const Trace& t, std::optional<double> fundamental) {
            return power_report(c, t, fundamental);
        },
        py::arg("circuit"), py::arg("trace"), py::arg("fundamental") = py::none(),
        "Average power of every component over a transient trace.");
    m.def(
        "op_power", [](const Circuit& c) { return power_report(c, run_op(c)); }, py::arg("circuit"),
        "Power of every component at the DC operating point.");

    m.def(
        "run",
        [](const std::filesystem::path& input, const std::filesystem::path& output_dir, const std::string& formats,
           std::optional<double> tstep, std::optional<double> reltol) {
            RunConfig cfg;
            cfg.input = input;
            cfg.output_dir = output_dir;
            cfg.tstep = tstep;
            cfg.reltol = reltol;
            if (!parse_formats(formats, cfg)) throw py::value_error("unknown format list '" + formats + "'");
            std::ostringstream err;
            const auto outcome = run(cfg, err);
            return py::make_tuple(outcome.exit_code, outcome.files, err.str());
        },
        py::arg("input"), py::arg("output_dir") = ".", py::arg("formats") = "csv,text", py::arg("tstep") = py::none(),
        py::arg("reltol") = py::none(), "Same as the `run` command; returns (exit_code, files, diagnostics).");

    m.def(
        "compare",
        [](const std::filesystem::path& a, const std::filesystem::path& b, const std::string& metric) {
            if (metric != "thd" && metric != "power") throw py::value_error("metric must be 'thd' or 'power'");
            std::ostringstream err;
            const auto out = compare(a, b, metric == "thd" ? Metric::Thd : Metric::Power, err);
            py::dict d;
            d["exit_code"] = out.exit_code;
            d["verdict"] = out.verdict;
            d["table"] = out.table;
            d["diagnostics"] = err.str();
            return d;
        },
        py::arg("a"), py::arg("b"), py::arg("metric") = "thd");
}
