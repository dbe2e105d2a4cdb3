#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "mirrorsim/analyses.hpp"
#include "mirrorsim/fourier.hpp"
#include "mirrorsim/power.hpp"

namespace mirrorsim {

/// `axis` column then one column per signal; shortest round-trip decimals.
void write_csv(std::ostream& os, const Trace& trace);

void write_op_text(std::ostream& os, const Circuit& circuit, const Solution& op, const Tolerances& tol = {});
void write_fourier_text(std::ostream& os, const std::vector<FourierReport>& reports);
void write_power_text(std::ostream& os, const PowerReport& report);

struct SvgSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

/// Static line plot: one polyline per series plus axes and range labels.
void write_svg(std::ostream& os, const std::string& title, const std::string& x_label,
               const std::vector<SvgSeries>& series);

}  // namespace mirrorsim
