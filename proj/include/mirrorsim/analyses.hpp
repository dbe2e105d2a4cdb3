#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorsim/netlist.hpp"
#include "mirrorsim/solver.hpp"

namespace mirrorsim {

class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Sweep- or time-indexed signals. Signal names follow SPICE accessor style:
/// V(node), I(part), Ic/Ib/Ie(bjt), x(memristor), P(part).
struct Trace {
    std::string axis_name;
    std::vector<double> axis;
    std::vector<std::string> names;
    std::vector<std::vector<double>> series;

    std::size_t size() const { return axis.size(); }
    /// Case-insensitive lookup.
    std::optional<std::size_t> find(std::string_view name) const;
    /// Throws AnalysisError naming the missing signal.
    const std::vector<double>& signal(std::string_view name) const;
};

/// Names of every signal recorded for a circuit, in column order.
std::vector<std::string> signal_names(const Circuit& circuit);

/// Evaluates every signal at one solution, in signal_names order.
std::vector<double> sample_signals(const Solver& solver, const Solution& s, const StepContext& ctx);

/// Operating point; throws ConvergenceError when no operating point is found.
Solution run_op(const Circuit& circuit, const Tolerances& tol = {});

/// DC sweep, warm-started point to point. Axis is the swept source value.
Trace run_dc_sweep(const Circuit& circuit, const DcSweepDirective& d, const Tolerances& tol = {});

/// Called after each accepted transient point with (time, solution, context).
using StepObserver = std::function<void(double, const Solution&, const StepContext&)>;

struct TransientOptions {
    std::optional<double> tstep_override;
    StepObserver observer;
};

/// Fixed-step trapezoidal transient from the t = 0 operating point.
Trace run_transient(const Circuit& circuit, const TranDirective& d, const Tolerances& tol = {},
                    const TransientOptions& opts = {});

}  // namespace mirrorsim
