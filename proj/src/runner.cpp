#include "mirrorsim/runner.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>

#include "mirrorsim/report.hpp"

namespace mirrorsim {

namespace fs = std::filesystem;

bool parse_formats(const std::string& list, RunConfig& config) {
    config.csv = config.svg = config.text = false;
    std::stringstream ss(list);
    std::string item;
    bool any = false;
    while (std::getline(ss, item, ',')) {
        item = to_lower(item);
        if (item == "csv") config.csv = true;
        else if (item == "svg") config.svg = true;
        else if (item == "text" || item == "txt") config.text = true;
        else return false;
        any = true;
    }
    return any;
}

namespace {

std::optional<double> first_fundamental(const Circuit& c) {
    for (const auto& d : c.directives) {
        if (const auto* f = std::get_if<FourDirective>(&d)) return f->fundamental;
    }
    return std::nullopt;
}

template <class T> bool has_directive(const Circuit& c) {
    return std::any_of(c.directives.begin(), c.directives.end(),
                       [](const Directive& d) { return std::holds_alternative<T>(d); });
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw fs::filesystem_error("cannot open input", p, std::make_error_code(std::errc::no_such_file_or_directory));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void diagnose(std::ostream& err, const fs::path& file, const NetlistError& e) {
    err << file.string();
    if (e.line() > 0) err << ':' << e.line();
    err << ": " << e.what() << '\n';
}

}  // namespace

void check_directives(const Circuit& circuit) {
    const auto names = signal_names(circuit);
    std::set<std::string> known;
    for (const auto& n : names) known.insert(to_lower(n));
    for (const auto& d : circuit.directives) {
        const auto* f = std::get_if<FourDirective>(&d);
        if (!f) continue;
        if (!has_directive<TranDirective>(circuit)) throw NetlistError(0, ".four needs a .tran directive");
        for (const auto& s : f->signals) {
            if (!known.contains(to_lower(s))) throw NetlistError(0, ".four signal '" + s + "' does not exist");
        }
    }
}

SimulationResults simulate(const Circuit& circuit, const Tolerances& tol, std::optional<double> tstep_override) {
    check_directives(circuit);
    SimulationResults r;
    const auto fundamental = first_fundamental(circuit);
    for (const auto& d : circuit.directives) {
        if (std::holds_alternative<OpDirective>(d)) {
            r.op = run_op(circuit, tol);
            r.op_power = power_report(circuit, *r.op, tol);
        } else if (const auto* dc = std::get_if<DcSweepDirective>(&d)) {
            r.sweeps.push_back(run_dc_sweep(circuit, *dc, tol));
        } else if (const auto* tr = std::get_if<TranDirective>(&d)) {
            TransientOptions opts;
            opts.tstep_override = tstep_override;
            r.transients.push_back(run_transient(circuit, *tr, tol, opts));
            if (r.transients.size() == 1) r.tran_power = power_report(circuit, r.transients.front(), fundamental);
        }
    }
    for (const auto& d : circuit.directives) {
        if (const auto* f = std::get_if<FourDirective>(&d)) {
            auto reports = fourier_analysis(r.transients.front(), *f);
            r.fourier.insert(r.fourier.end(), reports.begin(), reports.end());
        }
    }
    return r;
}

namespace {

std::vector<SvgSeries> sweep_series(const Circuit& c, const Trace& t) {
    std::vector<SvgSeries> out;
    for (const auto& comp : c.components) {
        std::string name;
        if (comp.is<Bjt>()) name = "Ic(" + comp.name + ")";
        else if (comp.is<Resistor>() || comp.is<Memristor>()) name = "I(" + comp.name + ")";
        else continue;
        out.push_back({name, t.axis, t.signal(name)});
    }
    return out;
}

std::vector<SvgSeries> tran_series(const Circuit& c, const Trace& t) {
    std::vector<SvgSeries> out;
    for (const auto& d : c.directives) {
        if (const auto* f = std::get_if<FourDirective>(&d)) {
            for (const auto& s : f->signals) out.push_back({s, t.axis, t.signal(s)});
        }
    }
    if (out.empty()) {
        for (std::size_t k = 1; k < c.node_count(); ++k) {
            const std::string n = "V(" + c.node_names[k] + ")";
            out.push_back({n, t.axis, t.signal(n)});
        }
    }
    return out;
}

class ArtifactWriter {
public:
    ArtifactWriter(fs::path dir, std::string stem) : dir_(std::move(dir)), stem_(std::move(stem)) {}

    template <class Fn> void write(const std::string& suffix, Fn&& body) {
        const fs::path p = dir_ / (stem_ + "." + suffix);
        std::ofstream out(p, std::ios::binary);
        if (!out) throw fs::filesystem_error("cannot write", p, std::make_error_code(std::errc::io_error));
        body(out);
        out.close();
        if (!out) throw fs::filesystem_error("write failed", p, std::make_error_code(std::errc::io_error));
        files.push_back(p);
    }

    std::vector<fs::path> files;

private:
    fs::path dir_;
    std::string stem_;
};

std::string numbered(const std::string& base, std::size_t index) {
    return index == 0 ? base : base + std::to_string(index + 1);
}

}  // namespace

RunOutcome run(const RunConfig& config, std::ostream& err) {
    RunOutcome outcome;
    std::string text;
    try {
        text = read_file(config.input);
    } catch (const std::exception&) {
        err << config.input.string() << ": cannot read input file\n";
        outcome.exit_code = kExitIo;
        return outcome;
    }

    Circuit circuit;
    try {
        circuit = load_circuit(text);
        check_directives(circuit);
    } catch (const NetlistError& e) {
        diagnose(err, config.input, e);
        outcome.exit_code = kExitParse;
        return outcome;
    }

    Tolerances tol;
    if (config.reltol) tol.reltol = *config.reltol;

    SimulationResults results;
    try {
        results = simulate(circuit, tol, config.tstep);
    } catch (const NetlistError& e) {
        diagnose(err, config.input, e);
        outcome.exit_code = kExitParse;
        return outcome;
    } catch (const std::exception& e) {
        err << config.input.string() << ": " << e.what() << '\n';
        outcome.exit_code = kExitConvergence;
        return outcome;
    }

    try {
        fs::create_directories(config.output_dir);
        ArtifactWriter w(config.output_dir, config.input.stem().string());
        if (config.text && results.op) {
            w.write("op.txt", [&](std::ostream& os) { write_op_text(os, circuit, *results.op, tol); });
        }
        for (std::size_t i = 0; i < results.sweeps.size(); ++i) {
            const Trace& t = results.sweeps[i];
            if (config.csv) w.write(numbered("dc", i) + ".csv", [&](std::ostream& os) { write_csv(os, t); });
            if (config.svg) {
                w.write(numbered("dc", i) + ".svg", [&](std::ostream& os) {
                    write_svg(os, circuit.title + " (DC sweep)", t.axis_name + " (V)", sweep_series(circuit, t));
                });
            }
        }
        for (std::size_t i = 0; i < results.transients.size(); ++i) {
            const Trace& t = results.transients[i];
            if (config.csv) w.write(numbered("tran", i) + ".csv", [&](std::ostream& os) { write_csv(os, t); });
            if (config.svg) {
                w.write(numbered("tran", i) + ".svg", [&](std::ostream& os) {
                    write_svg(os, circuit.title + " (transient)", "time (s)", tran_series(circuit, t));
                });
                // i-v loops of each memristor
                std::vector<SvgSeries> loops;
                for (const auto& c : circuit.components) {
                    if (!c.is<Memristor>()) continue;
                    std::vector<double> v(t.size());
                    const auto* vp = c.nodes[0] == kGround ? nullptr : &t.signal("V(" + circuit.node_names[c.nodes[0]] + ")");
                    const auto* vm = c.nodes[1] == kGround ? nullptr : &t.signal("V(" + circuit.node_names[c.nodes[1]] + ")");
                    for (std::size_t j = 0; j < t.size(); ++j) v[j] = (vp ? (*vp)[j] : 0.0) - (vm ? (*vm)[j] : 0.0);
                    loops.push_back({"I(" + c.name + ") vs V", v, t.signal("I(" + c.name + ")")});
                }
                if (!loops.empty()) {
                    w.write(numbered("tran", i) + ".iv.svg", [&](std::ostream& os) {
                        write_svg(os, circuit.title + " (memristor i-v)", "voltage across memristor (V)", loops);
                    });
                }
            }
        }
        if (config.text && !results.fourier.empty()) {
            w.write("four.txt", [&](std::ostream& os) { write_fourier_text(os, results.fourier); });
        }
        if (config.text && (results.op_power || results.tran_power)) {
            w.write("power.txt", [&](std::ostream& os) {
                if (results.op_power) write_power_text(os, *results.op_power);
                if (results.op_power && results.tran_power) os << "\n";
                if (results.tran_power) write_power_text(os, *results.tran_power);
            });
        }
        outcome.files = std::move(w.files);
    } catch (const std::exception& e) {
        err << config.output_dir.string() << ": " << e.what() << '\n';
        outcome.exit_code = kExitIo;
        return outcome;
    }
    return outcome;
}

// ---------------------------------------------------------------------------
// compare
// ---------------------------------------------------------------------------

namespace {

std::string cell(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

struct Table {
    std::vector<std::vector<std::string>> rows;

    std::string render() const {
        std::vector<std::size_t> width;
        for (const auto& r : rows) {
            width.resize(std::max(width.size(), r.size()), 0);
            for (std::size_t i = 0; i < r.size(); ++i) width[i] = std::max(width[i], r[i].size());
        }
        std::ostringstream os;
        for (const auto& r : rows) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                os << r[i];
                if (i + 1 < r.size()) os << std::string(width[i] - r[i].size() + 3, ' ');
            }
            os << '\n';
        }
        return os.str();
    }
};

std::string verdict_for(const std::vector<std::pair<double, double>>& pairs, const std::string& la,
                        const std::string& lb) {
    const bool all_equal = std::all_of(pairs.begin(), pairs.end(), [](auto p) { return p.first == p.second; });
    if (all_equal) return "equal";
    if (std::all_of(pairs.begin(), pairs.end(), [](auto p) { return p.second < p.first; })) return lb + " < " + la;
    if (std::all_of(pairs.begin(), pairs.end(), [](auto p) { return p.first < p.second; })) return la + " < " + lb;
    return "mixed";
}

}  // namespace

CompareOutcome compare(const fs::path& a, const fs::path& b, Metric metric, std::ostream& err,
                       const Tolerances& tol) {
    CompareOutcome out;
    Circuit ca, cb;
    for (auto [path, circuit] : {std::pair{&a, &ca}, std::pair{&b, &cb}}) {
        std::string text;
        try {
            text = read_file(*path);
        } catch (const std::exception&) {
            err << path->string() << ": cannot read input file\n";
            out.exit_code = kExitIo;
            return out;
        }
        try {
            *circuit = load_circuit(text);
            check_directives(*circuit);
        } catch (const NetlistError& e) {
            diagnose(err, *path, e);
            out.exit_code = kExitParse;
            return out;
        }
        const bool ok = metric == Metric::Thd
                            ? has_directive<TranDirective>(*circuit) && has_directive<FourDirective>(*circuit)
                            : has_directive<OpDirective>(*circuit) || has_directive<TranDirective>(*circuit);
        if (!ok) {
            err << path->string() << ": "
                << (metric == Metric::Thd ? "thd comparison needs .tran and .four directives"
                                          : "power comparison needs a .op or .tran directive")
                << '\n';
            out.exit_code = kExitConvergence;
            return out;
        }
    }

    SimulationResults ra, rb;
    try {
        auto fa = std::async(std::launch::async, [&] { return simulate(ca, tol); });
        auto fb = std::async(std::launch::async, [&] { return simulate(cb, tol); });
        ra = fa.get();
        rb = fb.get();
    } catch (const std::exception& e) {
        err << "compare: " << e.what() << '\n';
        out.exit_code = kExitConvergence;
        return out;
    }

    std::string la = a.filename().string();
    std::string lb = b.filename().string();
    if (la == lb) {
        la = "A:" + la;
        lb = "B:" + lb;
    }
    Table table;
    table.rows.push_back({"metric", la, lb});
    std::vector<std::pair<double, double>> decisive;

    if (metric == Metric::Thd) {
        const std::size_t n = std::min(ra.fourier.size(), rb.fourier.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto& fa = ra.fourier[i];
            const auto& fb = rb.fourier[i];
            const std::string sig = fa.signal == fb.signal ? fa.signal : fa.signal + " / " + fb.signal;
            table.rows.push_back({"THD 2.." + std::to_string(fa.nharmonics) + " " + sig + " (%)",
                                  cell(fa.thd_requested), cell(fb.thd_requested)});
            table.rows.push_back({"THD full " + sig + " (%)", cell(fa.thd_full), cell(fb.thd_full)});
            if (i == 0) {
                decisive.push_back({fa.thd_requested, fb.thd_requested});
                decisive.push_back({fa.thd_full, fb.thd_full});
            }
        }
    } else {
        const PowerReport& pa = ra.tran_power ? *ra.tran_power : *ra.op_power;
        const PowerReport& pb = rb.tran_power ? *rb.tran_power : *rb.op_power;
        std::vector<std::string> names;
        for (const auto* rep : {&pa, &pb}) {
            for (const auto& e : rep->entries) {
                if (std::none_of(names.begin(), names.end(), [&](const std::string& n) { return to_lower(n) == to_lower(e.component); })) {
                    names.push_back(e.component);
                }
            }
        }
        for (const auto& n : names) {
            const auto* ea = pa.find(n);
            const auto* eb = pb.find(n);
            table.rows.push_back({"P(" + n + ") (W)", ea ? cell(ea->power) : "-", eb ? cell(eb->power) : "-"});
        }
        table.rows.push_back({"delivered total (W)", cell(pa.delivered), cell(pb.delivered)});
        table.rows.push_back({"dissipated total (W)", cell(pa.dissipated), cell(pb.dissipated)});
        decisive.push_back({pa.dissipated, pb.dissipated});
    }

    out.verdict = decisive.empty() ? "mixed" : verdict_for(decisive, la, lb);
    out.table = table.render() + "verdict: " + out.verdict + "\n";
    return out;
}

}  // namespace mirrorsim
