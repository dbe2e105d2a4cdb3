#include "mirrorsim/power.hpp"

#include <algorithm>
#include <cmath>

#include "mirrorsim/fourier.hpp"

namespace mirrorsim {

const PowerEntry* PowerReport::find(std::string_view component) const {
    const std::string key = to_lower(component);
    for (const auto& e : entries) {
        if (to_lower(e.component) == key) return &e;
    }
    return nullptr;
}

bool PowerReport::balanced(double rel) const {
    return imbalance <= rel * std::max(std::abs(delivered), std::abs(dissipated));
}

double piecewise_linear_mean(const std::vector<double>& axis, const std::vector<double>& values, double a, double b) {
    if (!(b > a)) throw AnalysisError("averaging window is empty");
    // Integrate the interpolant exactly: breakpoints are a, b and every sample inside.
    std::vector<double> ts{a};
    for (double t : axis) {
        if (t > a && t < b) ts.push_back(t);
    }
    ts.push_back(b);
    double integral = 0.0;
    double prev_v = interpolate(axis, values, ts.front());
    for (std::size_t k = 1; k < ts.size(); ++k) {
        const double v = interpolate(axis, values, ts[k]);
        integral += 0.5 * (v + prev_v) * (ts[k] - ts[k - 1]);
        prev_v = v;
    }
    return integral / (b - a);
}

AveragingWindow averaging_window(const Trace& trace, std::optional<double> fundamental) {
    if (trace.size() < 2) throw AnalysisError("trace too short to average");
    const double start = trace.axis.front();
    const double end = trace.axis.back();
    if (fundamental && *fundamental > 0) {
        const double period = 1.0 / *fundamental;
        const double cycles = std::floor((end - start) / period + 1e-9);
        if (cycles >= 1) return {end - cycles * period, end};
    }
    return {start, end};
}

namespace {

std::vector<std::string> terminal_current_names(const Component& c) {
    if (c.is<Bjt>()) return {"Ic(" + c.name + ")", "Ib(" + c.name + ")", "Ie(" + c.name + ")"};
    return {"I(" + c.name + ")"};
}

std::vector<double> instantaneous_power(const Circuit& circuit, const Trace& trace, const Component& c) {
    auto node_series = [&](NodeIndex n) -> const std::vector<double>* {
        if (n == kGround) return nullptr;
        return &trace.signal("V(" + circuit.node_names[n] + ")");
    };
    const auto names = terminal_current_names(c);
    std::vector<const std::vector<double>*> currents;
    for (const auto& n : names) currents.push_back(&trace.signal(n));

    std::vector<double> p(trace.size(), 0.0);
    for (std::size_t j = 0; j < trace.size(); ++j) {
        double acc = 0.0;
        if (c.is<Bjt>()) {
            for (std::size_t t = 0; t < 3; ++t) {
                if (const auto* v = node_series(c.nodes[t])) acc += (*v)[j] * (*currents[t])[j];
            }
        } else {
            const auto* vp = node_series(c.nodes[0]);
            const auto* vm = node_series(c.nodes[1]);
            const double v = (vp ? (*vp)[j] : 0.0) - (vm ? (*vm)[j] : 0.0);
            acc = v * (*currents[0])[j];
        }
        p[j] = acc;
    }
    return p;
}

bool is_source(const Component& c) { return c.is<VoltageSource>() || c.is<CurrentSource>(); }

void finish(PowerReport& r) {
    r.delivered = 0.0;
    r.dissipated = 0.0;
    for (const auto& e : r.entries) (e.is_source ? r.delivered : r.dissipated) += e.power;
    r.imbalance = std::abs(r.delivered - r.dissipated);
}

}  // namespace

double average_power(const Circuit& circuit, const Trace& trace, std::string_view component,
                     std::optional<double> fundamental) {
    const Component* c = circuit.find_component(component);
    if (!c) throw AnalysisError("no component named '" + std::string(component) + "'");
    const auto w = averaging_window(trace, fundamental);
    return piecewise_linear_mean(trace.axis, instantaneous_power(circuit, trace, *c), w.start, w.end);
}

PowerReport power_report(const Circuit& circuit, const Solution& op, const Tolerances& tol) {
    Solver solver(circuit, tol);
    const auto cur = solver.currents(op);
    PowerReport r;
    for (std::size_t ci = 0; ci < circuit.components.size(); ++ci) {
        const auto& c = circuit.components[ci];
        double absorbed = 0.0;
        for (std::size_t t = 0; t < c.nodes.size(); ++t) absorbed += op.node_voltages[c.nodes[t]] * cur[ci].terminal[t];
        r.entries.push_back({c.name, is_source(c) ? -absorbed : absorbed, is_source(c)});
    }
    finish(r);
    return r;
}

PowerReport power_report(const Circuit& circuit, const Trace& trace, std::optional<double> fundamental) {
    const auto w = averaging_window(trace, fundamental);
    PowerReport r;
    r.transient = true;
    r.window_start = w.start;
    r.window_end = w.end;
    for (const auto& c : circuit.components) {
        const double absorbed = piecewise_linear_mean(trace.axis, instantaneous_power(circuit, trace, c), w.start, w.end);
        r.entries.push_back({c.name, is_source(c) ? -absorbed : absorbed, is_source(c)});
    }
    finish(r);
    return r;
}

}  // namespace mirrorsim
