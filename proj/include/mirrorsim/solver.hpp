#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mirrorsim/devices.hpp"
#include "mirrorsim/linalg.hpp"
#include "mirrorsim/netlist.hpp"

namespace mirrorsim {

struct Tolerances {
    double reltol = 1e-3;
    double abstol = 1e-12;  // A
    double vntol = 1e-6;    // V
    int max_iter = 100;
    double gmin = 1e-12;    // S, across every BJT junction
    /// Absolute tolerance on memristor state updates (dimensionless).
    double xtol = 1e-9;
};

/// Converged (or last attempted) solver state.
struct Solution {
    std::vector<double> node_voltages;    // indexed by NodeIndex, [0] is ground
    std::vector<double> branch_currents;  // one per voltage source, component order
    std::vector<double> mem_states;       // one per memristor, component order
    bool converged = false;
    int iterations = 0;
    /// 0: direct Newton, 1: gmin stepping, 2: source stepping.
    int continuation = 0;
    /// Infinity-norm of each Newton update, in order.
    std::vector<double> step_norms;
    /// Largest amount a memristor state was pulled back into [0, 1] by the last update.
    double state_clamp = 0.0;
    std::string failure;
};

/// Unknown layout: node voltages (ground excluded), voltage-source branch
/// currents, then memristor states when a transient step is being solved.
struct SystemMatrix {
    DenseMatrix matrix;
    std::vector<double> rhs;
};

/// Per-solve settings that are not tolerances.
struct StepContext {
    bool transient = false;     // SIN sources evaluated at `time`
    double time = 0.0;
    double h = 0.0;             // trapezoidal step; > 0 adds memristor state rows
    std::span<const double> prev_states;
    std::span<const double> prev_rates;
    double source_scale = 1.0;  // source stepping
    double node_shunt = 0.0;    // gmin stepping, node-to-ground

    bool integrating() const { return transient && h > 0; }
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Terminal currents of one component; each entry is the current flowing from
/// the node into the corresponding terminal.
struct ComponentCurrents {
    std::vector<double> terminal;
    /// For two-terminal parts: current from n+ through the part to n-.
    double branch() const { return terminal.front(); }
};

class Solver {
public:
    Solver(const Circuit& circuit, Tolerances tol = {});

    const Circuit& circuit() const { return circuit_; }
    const Tolerances& tolerances() const { return tol_; }

    /// All-zero guess with memristor states at their initial values.
    Solution zero_solution() const;

    std::size_t unknown_count(bool transient) const;
    std::string unknown_name(std::size_t index) const;

    /// Linearizes every device around `guess` (BJT junctions taken as given).
    SystemMatrix assemble(const Solution& guess, const StepContext& ctx = {}) const;

    /// Newton iteration with junction limiting. Never throws on non-convergence;
    /// inspect Solution::converged.
    Solution newton_solve(const Solution& initial, const StepContext& ctx = {}) const;

    /// gmin stepping from 1e-3 S down to the device gmin, then source stepping
    /// if needed. Throws ConvergenceError if neither reaches an operating point.
    Solution gmin_stepping(const StepContext& ctx = {}) const;

    /// Zero-guess Newton, falling back to gmin_stepping.
    Solution solve_op(const StepContext& ctx = {}) const;

    /// Value of an independent source under the context (SIN evaluated in transient).
    double source_value(const Component& c, const StepContext& ctx) const;

    /// Device currents at a solution, gmin shunts included.
    std::vector<ComponentCurrents> currents(const Solution& s, const StepContext& ctx = {}) const;

    /// Largest KCL violation ratio |sum| / (abstol + reltol * max|i|) over all nodes.
    double kcl_violation(const Solution& s, const StepContext& ctx = {}) const;

    /// Memristor state rates dx/dt at a solution.
    std::vector<double> memristor_rates(const Solution& s) const;

private:
    struct JunctionState {
        double vbe = 0.0;
        double vbc = 0.0;
    };

    Solution newton_impl(const Solution& initial, const StepContext& ctx) const;
    Solution solve_linear_circuit(const StepContext& ctx) const;
    void stamp(SystemMatrix& sys, const Solution& at, const std::vector<JunctionState>& junctions,
               const StepContext& ctx) const;

    const Circuit& circuit_;
    Tolerances tol_;
    std::size_t n_nodes_ = 0;
    std::vector<std::size_t> vsrc_slot_;  // component index -> branch slot (or npos)
    std::vector<std::size_t> mem_slot_;   // component index -> memristor slot (or npos)
    std::vector<std::size_t> vsrc_components_;
    std::vector<std::size_t> mem_components_;
    std::vector<std::size_t> bjt_components_;
    std::vector<double> vcrit_;  // per BJT
    bool linear_ = true;
};

/// Convenience: directly solve the operating point of a circuit.
Solution solve_operating_point(const Circuit& circuit, const Tolerances& tol = {});

}  // namespace mirrorsim
