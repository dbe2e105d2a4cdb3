#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "mirrorsim/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"mirrorsim: SPICE-subset simulator for BJT current mirrors and memristors"};
    app.require_subcommand(1);

    mirrorsim::RunConfig config;
    std::string formats = "csv,text";
    double tstep = 0.0;
    double reltol = 0.0;
    auto* run = app.add_subcommand("run", "Simulate a netlist and write its reports");
    run->add_option("file", config.input, "Netlist (.cir)")->required();
    run->add_option("-o,--output", config.output_dir, "Output directory");
    run->add_option("--tstep", tstep, "Override the transient step (s)")->check(CLI::PositiveNumber);
    run->add_option("--reltol", reltol, "Override the relative tolerance")->check(CLI::PositiveNumber);
    run->add_option("--format", formats, "Comma-separated: csv,svg,text");

    std::string file_a, file_b, metric = "thd";
    auto* cmp = app.add_subcommand("compare", "Run two netlists and compare THD or power");
    cmp->add_option("a", file_a, "First netlist")->required();
    cmp->add_option("b", file_b, "Second netlist")->required();
    cmp->add_option("--metric", metric, "thd or power")->check(CLI::IsMember({"thd", "power"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    if (*run) {
        if (tstep > 0) config.tstep = tstep;
        if (reltol > 0) config.reltol = reltol;
        if (!mirrorsim::parse_formats(formats, config)) {
            std::cerr << "unknown --format list '" << formats << "'\n";
            return mirrorsim::kExitParse;
        }
        const auto outcome = mirrorsim::run(config, std::cerr);
        for (const auto& f : outcome.files) std::cout << "wrote " << f.string() << '\n';
        return outcome.exit_code;
    }

    const auto m = metric == "power" ? mirrorsim::Metric::Power : mirrorsim::Metric::Thd;
    const auto outcome = mirrorsim::compare(file_a, file_b, m, std::cerr);
    std::cout << outcome.table;
    return outcome.exit_code;
}
