#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mirrorsim/analyses.hpp"

namespace mirrorsim {

struct PowerEntry {
    std::string component;
    /// Dissipated power for passive parts; delivered power for sources.
    double power = 0.0;
    bool is_source = false;
};

struct PowerReport {
    std::vector<PowerEntry> entries;
    double delivered = 0.0;   // sum over sources
    double dissipated = 0.0;  // sum over passive parts
    double imbalance = 0.0;   // |delivered - dissipated|
    double window_start = 0.0;
    double window_end = 0.0;
    bool transient = false;

    const PowerEntry* find(std::string_view component) const;
    /// imbalance <= rel * max(delivered, dissipated); an all-zero report balances.
    bool balanced(double rel = 1e-3) const;
};

/// Averaging window: the last whole number of fundamental periods when a
/// fundamental is given (and fits), otherwise the full trace.
struct AveragingWindow {
    double start;
    double end;
};
AveragingWindow averaging_window(const Trace& trace, std::optional<double> fundamental);

/// Trapezoidal mean of v(t)*i(t) of one component (absorbed, dissipation-positive).
double average_power(const Circuit& circuit, const Trace& trace, std::string_view component,
                     std::optional<double> fundamental = std::nullopt);

/// DC report from an operating point.
PowerReport power_report(const Circuit& circuit, const Solution& op, const Tolerances& tol = {});

/// Transient report averaged over averaging_window.
PowerReport power_report(const Circuit& circuit, const Trace& trace, std::optional<double> fundamental = std::nullopt);

/// Mean of a piecewise-linear series over [a, b].
double piecewise_linear_mean(const std::vector<double>& axis, const std::vector<double>& values, double a, double b);

}  // namespace mirrorsim
