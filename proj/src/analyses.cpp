#include "mirrorsim/analyses.hpp"

#include <cmath>
#include <iostream>

namespace mirrorsim {

std::optional<std::size_t> Trace::find(std::string_view name) const {
    const std::string key = to_lower(name);
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (to_lower(names[i]) == key) return i;
    }
    return std::nullopt;
}

const std::vector<double>& Trace::signal(std::string_view name) const {
    auto idx = find(name);
    if (!idx) throw AnalysisError("signal '" + std::string(name) + "' is not in the trace");
    return series[*idx];
}

std::vector<std::string> signal_names(const Circuit& circuit) {
    std::vector<std::string> names;
    for (std::size_t k = 1; k < circuit.node_count(); ++k) names.push_back("V(" + circuit.node_names[k] + ")");
    for (const auto& c : circuit.components) {
        if (c.is<Bjt>()) {
            names.push_back("Ic(" + c.name + ")");
            names.push_back("Ib(" + c.name + ")");
            names.push_back("Ie(" + c.name + ")");
        } else {
            names.push_back("I(" + c.name + ")");
            if (c.is<Memristor>()) names.push_back("x(" + c.name + ")");
        }
    }
    for (const auto& c : circuit.components) names.push_back("P(" + c.name + ")");
    return names;
}

std::vector<double> sample_signals(const Solver& solver, const Solution& s, const StepContext& ctx) {
    const Circuit& circuit = solver.circuit();
    std::vector<double> out;
    for (std::size_t k = 1; k < circuit.node_count(); ++k) out.push_back(s.node_voltages[k]);
    const auto cur = solver.currents(s, ctx);
    std::size_t mem = 0;
    for (std::size_t ci = 0; ci < circuit.components.size(); ++ci) {
        const auto& c = circuit.components[ci];
        if (c.is<Bjt>()) {
            out.insert(out.end(), cur[ci].terminal.begin(), cur[ci].terminal.end());
        } else {
            out.push_back(cur[ci].branch());
            if (c.is<Memristor>()) out.push_back(s.mem_states[mem++]);
        }
    }
    // Absorbed power: sum over terminals of V(node) * I(into terminal).
    for (std::size_t ci = 0; ci < circuit.components.size(); ++ci) {
        const auto& nodes = circuit.components[ci].nodes;
        double p = 0.0;
        for (std::size_t t = 0; t < nodes.size(); ++t) p += s.node_voltages[nodes[t]] * cur[ci].terminal[t];
        out.push_back(p);
    }
    return out;
}

Solution run_op(const Circuit& circuit, const Tolerances& tol) { return Solver(circuit, tol).solve_op(); }

namespace {

void set_source_dc(Component& c, double value) {
    if (auto* v = std::get_if<VoltageSource>(&c.data)) v->dc = value;
    else if (auto* i = std::get_if<CurrentSource>(&c.data)) i->dc = value;
}

Trace empty_trace(const Circuit& circuit, std::string axis_name) {
    Trace t;
    t.axis_name = std::move(axis_name);
    t.names = signal_names(circuit);
    t.series.resize(t.names.size());
    return t;
}

void append(Trace& t, double axis, const std::vector<double>& values) {
    t.axis.push_back(axis);
    for (std::size_t i = 0; i < values.size(); ++i) t.series[i].push_back(values[i]);
}

}  // namespace

Trace run_dc_sweep(const Circuit& circuit, const DcSweepDirective& d, const Tolerances& tol) {
    Circuit work = circuit;
    Component* src = nullptr;
    for (auto& c : work.components) {
        if (to_lower(c.name) == to_lower(d.source)) src = &c;
    }
    if (!src || !(src->is<VoltageSource>() || src->is<CurrentSource>())) {
        throw AnalysisError("sweep source '" + d.source + "' not found");
    }

    const auto points = static_cast<std::size_t>(std::llround((d.stop - d.start) / d.step)) + 1;
    Trace trace = empty_trace(work, src->name);
    Solver solver(work, tol);
    Solution prev;
    for (std::size_t k = 0; k < points; ++k) {
        const double value = k + 1 == points ? d.stop : d.start + static_cast<double>(k) * d.step;
        set_source_dc(*src, value);
        Solution s;
        if (k > 0) s = solver.newton_solve(prev);
        if (!s.converged) {
            try {
                s = solver.solve_op();
            } catch (const ConvergenceError& e) {
                throw ConvergenceError("DC sweep failed at " + src->name + " = " + format_double(value) + ": " +
                                       e.what());
            }
        }
        append(trace, value, sample_signals(solver, s, {}));
        prev = std::move(s);
    }
    return trace;
}

Trace run_transient(const Circuit& circuit, const TranDirective& d, const Tolerances& tol,
                    const TransientOptions& opts) {
    const double tstep = opts.tstep_override.value_or(d.tstep);
    if (!(tstep > 0)) throw AnalysisError("transient step must be positive");

    Solver solver(circuit, tol);
    Trace trace = empty_trace(circuit, "time");

    StepContext ctx0;
    ctx0.transient = true;
    ctx0.time = 0.0;
    Solution cur;
    try {
        cur = solver.solve_op(ctx0);
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(std::string("transient initial operating point: ") + e.what());
    }
    std::vector<double> rates = solver.memristor_rates(cur);

    const double record_from = d.tstart - 1e-9 * tstep;
    auto record = [&](double t, const Solution& s, const StepContext& ctx) {
        if (t >= record_from) append(trace, t, sample_signals(solver, s, ctx));
        if (opts.observer) opts.observer(t, s, ctx);
    };
    record(0.0, cur, ctx0);

    // One trapezoidal step from (t0, cur) to t1; returns false on Newton failure.
    auto step = [&](double t0, double t1, Solution& state, std::vector<double>& state_rates) {
        StepContext ctx;
        ctx.transient = true;
        ctx.time = t1;
        ctx.h = t1 - t0;
        ctx.prev_states = state.mem_states;
        ctx.prev_rates = state_rates;
        Solution next = solver.newton_solve(state, ctx);
        if (!next.converged) return false;
        if (next.state_clamp > 1e-12) {
            std::clog << "warning: memristor state clamped into [0,1] by " << next.state_clamp << " at t=" << t1
                      << "\n";
        }
        state_rates = solver.memristor_rates(next);
        state = std::move(next);
        return true;
    };

    const auto steps = static_cast<std::size_t>(std::ceil(d.tstop / tstep - 1e-9));
    for (std::size_t n = 1; n <= steps; ++n) {
        const double t0 = static_cast<double>(n - 1) * tstep;
        const double t1 = n == steps ? d.tstop : static_cast<double>(n) * tstep;
        if (!step(t0, t1, cur, rates)) {
            // Retry this interval as four quarter steps, then resume the nominal step.
            const double h = (t1 - t0) / 4.0;
            for (int q = 1; q <= 4; ++q) {
                const double a = t0 + (q - 1) * h;
                const double b = q == 4 ? t1 : t0 + q * h;
                if (!step(a, b, cur, rates)) {
                    throw ConvergenceError("transient Newton failure at t = " + format_double(b));
                }
            }
        }
        StepContext ctx;
        ctx.transient = true;
        ctx.time = t1;
        record(t1, cur, ctx);
    }
    return trace;
}

}  // namespace mirrorsim
