#include "mirrorsim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mirrorsim {

void write_csv(std::ostream& os, const Trace& trace) {
    os << "axis";
    for (const auto& n : trace.names) os << ',' << n;
    os << '\n';
    for (std::size_t j = 0; j < trace.size(); ++j) {
        os << format_double(trace.axis[j]);
        for (const auto& s : trace.series) os << ',' << format_double(s[j]);
        os << '\n';
    }
}

namespace {

std::string fixed(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, fmt, v);
    return buf;
}

}  // namespace

void write_op_text(std::ostream& os, const Circuit& circuit, const Solution& op, const Tolerances& tol) {
    static const char* kMethods[] = {"direct Newton", "gmin stepping", "source stepping"};
    os << "Operating point: " << circuit.title << '\n';
    os << "converged in " << op.iterations << " iterations (" << kMethods[std::clamp(op.continuation, 0, 2)]
       << ")\n\n";
    Solver solver(circuit, tol);
    const auto names = signal_names(circuit);
    const auto values = sample_signals(solver, op, {});
    std::size_t width = 0;
    for (const auto& n : names) width = std::max(width, n.size());
    for (std::size_t i = 0; i < names.size(); ++i) {
        os << names[i] << std::string(width - names[i].size() + 2, ' ') << format_double(values[i]) << '\n';
    }
}

void write_fourier_text(std::ostream& os, const std::vector<FourierReport>& reports) {
    for (const auto& r : reports) {
        os << "Fourier analysis of " << r.signal << '\n';
        os << "fundamental " << format_double(r.fundamental) << " Hz, " << r.nharmonics << " harmonics\n";
        os << "DC component " << format_double(r.dc) << "\n\n";
        os << "harmonic  frequency(Hz)  magnitude        normalized    phase(deg)\n";
        const double c1 = r.magnitudes.front();
        for (std::size_t k = 0; k < r.magnitudes.size(); ++k) {
            const double c = r.magnitudes[k];
            os << fixed("%8.0f", static_cast<double>(k + 1)) << "  " << fixed("%13.6g", r.fundamental * (k + 1))
               << "  " << fixed("%-15.9g", c) << "  " << fixed("%-12.6g", c / c1) << "  "
               << fixed("%.4f", r.phases_deg[k]) << '\n';
        }
        os << "\nTHD (harmonics 2.." << r.nharmonics << "): " << fixed("%.6f", r.thd_requested) << " %\n";
        os << "THD (full spectrum):  " << fixed("%.6f", r.thd_full) << " %\n\n";
    }
}

void write_power_text(std::ostream& os, const PowerReport& r) {
    if (r.transient) {
        os << "Average power over [" << format_double(r.window_start) << ", " << format_double(r.window_end)
           << "] s\n";
    } else {
        os << "Power at the DC operating point\n";
    }
    os << "(passive parts: dissipated; sources: delivered)\n\n";
    std::size_t width = 9;
    for (const auto& e : r.entries) width = std::max(width, e.component.size());
    for (const auto& e : r.entries) {
        os << e.component << std::string(width - e.component.size() + 2, ' ') << (e.is_source ? "source   " : "passive  ")
           << fixed("%.9g", e.power) << " W\n";
    }
    os << "\ndelivered total   " << fixed("%.9g", r.delivered) << " W\n";
    os << "dissipated total  " << fixed("%.9g", r.dissipated) << " W\n";
    os << "imbalance         " << fixed("%.3g", r.imbalance) << " W\n";
}

void write_svg(std::ostream& os, const std::string& title, const std::string& x_label,
               const std::vector<SvgSeries>& series) {
    constexpr double W = 800, H = 500, L = 90, R = 20, T = 40, B = 60;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) xmin = std::min(xmin, v), xmax = std::max(xmax, v);
        for (double v : s.y) ymin = std::min(ymin, v), ymax = std::max(ymax, v);
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = ymin + 1;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * (W - L - R); };
    auto py = [&](double y) { return H - B - (y - ymin) / (ymax - ymin) * (H - T - B); };

    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
    os << "<text x=\"" << L << "\" y=\"" << H - B + 18 << "\" text-anchor=\"middle\">" << fixed("%.4g", xmin) << "</text>\n";
    os << "<text x=\"" << W - R << "\" y=\"" << H - B + 18 << "\" text-anchor=\"end\">" << fixed("%.4g", xmax) << "</text>\n";
    os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 20 << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << H - B << "\" text-anchor=\"end\">" << fixed("%.4g", ymin) << "</text>\n";
    os << "<text x=\"" << L - 6 << "\" y=\"" << T + 10 << "\" text-anchor=\"end\">" << fixed("%.4g", ymax) << "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& s = series[i];
        const char* color = kColors[i % std::size(kColors)];
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t j = 0; j < s.x.size(); ++j) os << fixed("%.2f", px(s.x[j])) << ',' << fixed("%.2f", py(s.y[j])) << ' ';
        os << "\"/>\n";
        os << "<text x=\"" << W - R - 4 << "\" y=\"" << T + 16 * (i + 1) << "\" text-anchor=\"end\" fill=\"" << color
           << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
}

}  // namespace mirrorsim
