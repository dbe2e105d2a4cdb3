#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mirrorsim/analyses.hpp"
#include "mirrorsim/fourier.hpp"
#include "mirrorsim/power.hpp"

namespace mirrorsim {

enum ExitCode : int {
    kExitOk = 0,
    kExitParse = 1,
    kExitConvergence = 2,
    kExitIo = 3,
};

struct RunConfig {
    std::filesystem::path input;
    std::filesystem::path output_dir = ".";
    std::optional<double> tstep;
    std::optional<double> reltol;
    bool csv = true;
    bool svg = false;
    bool text = true;
};

/// Parses "csv,svg,text" into the format flags of `config`. Returns false on an unknown name.
bool parse_formats(const std::string& list, RunConfig& config);

/// Everything one netlist's directives produce.
struct SimulationResults {
    std::optional<Solution> op;
    std::vector<Trace> sweeps;
    std::vector<Trace> transients;
    std::vector<FourierReport> fourier;
    std::optional<PowerReport> op_power;
    std::optional<PowerReport> tran_power;
};

/// Runs the directives in order. Throws NetlistError for directive/signal
/// mismatches, ConvergenceError or AnalysisError when an analysis fails.
SimulationResults simulate(const Circuit& circuit, const Tolerances& tol = {},
                           std::optional<double> tstep_override = std::nullopt);

/// Static checks that need the signal list: .four targets exist and have a .tran to analyse.
void check_directives(const Circuit& circuit);

struct RunOutcome {
    int exit_code = kExitOk;
    std::vector<std::filesystem::path> files;
};

/// Reads, simulates and writes `<stem>.<analysis>.<ext>` artifacts.
/// Diagnostics go to `err` as `file:line: message`.
RunOutcome run(const RunConfig& config, std::ostream& err);

enum class Metric { Thd, Power };

struct CompareOutcome {
    int exit_code = kExitOk;
    std::string table;
    /// "equal", "<a> < <b>", "<b> < <a>" or "mixed".
    std::string verdict;
};

/// Simulates both netlists (concurrently) and tabulates the metric side by side.
CompareOutcome compare(const std::filesystem::path& a, const std::filesystem::path& b, Metric metric,
                       std::ostream& err, const Tolerances& tol = {});

}  // namespace mirrorsim
