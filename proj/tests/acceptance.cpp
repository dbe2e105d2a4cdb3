// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failed criteria.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "mirrorsim/analyses.hpp"
#include "mirrorsim/devices.hpp"
#include "mirrorsim/fourier.hpp"
#include "mirrorsim/netlist.hpp"
#include "mirrorsim/power.hpp"
#include "mirrorsim/runner.hpp"

using namespace mirrorsim;
namespace fs = std::filesystem;

namespace {

const fs::path kCorpus = MIRRORSIM_CORPUS_DIR;
constexpr double kPi = std::numbers::pi;

std::string read_text(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Circuit corpus(const std::string& name) { return load_circuit(read_text(kCorpus / name)); }

template <class D> const D& first(const Circuit& c) {
    for (const auto& d : c.directives) {
        if (const auto* p = std::get_if<D>(&d)) return *p;
    }
    throw std::runtime_error("directive missing");
}

struct Verdict {
    bool pass;
    std::string detail;
};

std::string num(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

double nearest(const Trace& t, const std::string& signal, double axis_value) {
    const auto& s = t.signal(signal);
    std::size_t best = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (std::abs(t.axis[j] - axis_value) < std::abs(t.axis[best] - axis_value)) best = j;
    }
    return s[best];
}

std::string memristor_netlist(double amp, double freq, bool window, double skip_periods, double periods) {
    std::ostringstream os;
    os << "memristor drive\n.model MJ MEMR(RON=100 ROFF=16k D=10n UV=1e-14 P=1 XINIT=0.5"
       << (window ? "" : " WINDOW=0") << ")\nV1 a 0 SIN(0 " << amp << ' ' << freq << ")\nM1 a 0 MJ\n.tran "
       << 1e-3 / freq << ' ' << (skip_periods + periods) / freq << ' ' << skip_periods / freq << '\n';
    return os.str();
}

double lobe_area(const std::vector<double>& v, const std::vector<double>& i) {
    double total = 0.0, lobe = 0.0;
    for (std::size_t k = 1; k < v.size(); ++k) {
        lobe += v[k - 1] * i[k] - v[k] * i[k - 1];
        if ((v[k - 1] < 0) != (v[k] < 0)) {
            total += std::abs(lobe) / 2;
            lobe = 0.0;
        }
    }
    return total + std::abs(lobe) / 2;
}

Verdict basic_mirror() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto c = corpus("basic_cm.cir");
    const auto sweep = run_dc_sweep(c, first<DcSweepDirective>(c));
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    const auto& ic = sweep.signal("Ic(Q2)");
    for (std::size_t j = 0; j < sweep.size(); ++j) {
        if (sweep.axis[j] < 1.0 - 1e-9 || sweep.axis[j] > 9.0 + 1e-9) continue;
        worst = std::max(worst, std::abs(ic[j] - 1e-3) / 1e-3);
    }
    const double rout = 0.2 / (nearest(sweep, "Ic(Q2)", 5.1) - nearest(sweep, "Ic(Q2)", 4.9));
    const bool pass = sweep.size() == 101 && worst <= 0.07 && rout >= 80e3 && rout <= 120e3 && seconds < 1.0;
    return {pass, "max deviation " + num(100 * worst, 4) + " %, Rout " + num(rout / 1e3, 5) + " kOhm, " +
                      num(seconds * 1e3, 3) + " ms"};
}

Verdict widlar_oracle() {
    const auto c = corpus("widlar.cir");
    const auto op = run_op(c);
    Solver solver(c);
    const auto names = signal_names(c);
    const auto values = sample_signals(solver, op, {});
    const double sim = values[std::find(names.begin(), names.end(), "Ic(Q2)") - names.begin()];

    // Reference current set by the design: (Vcc - 0.7 V) / Rin.
    const double re = c.find_component("Re")->as<Resistor>().resistance;
    const double iin = (10.0 - 0.7) / c.find_component("Rin")->as<Resistor>().resistance;
    double lo = 1e-12, hi = iin;
    for (int k = 0; k < 200; ++k) {
        const double mid = 0.5 * (lo + hi);
        const double f = kThermalVoltage * std::log(iin / mid) - mid * re;
        (f > 0 ? lo : hi) = mid;
    }
    const double oracle = 0.5 * (lo + hi);
    const double err = std::abs(sim - oracle) / oracle;
    return {err <= 0.02, "simulated " + num(sim * 1e6) + " uA, oracle " + num(oracle * 1e6) + " uA, error " +
                             num(100 * err, 3) + " %"};
}

Verdict memristor_fingerprints() {
    const auto c = corpus("memristor_sine.cir");
    const auto t = run_transient(c, first<TranDirective>(c));
    const auto& v = t.signal("V(n001)");
    const auto& i = t.signal("I(Mem1)");
    const double r_on = c.find_component("Mem1")->as<Memristor>().params.r_on;
    bool bounded = true, pinched = true;
    int zeros = 0;
    for (std::size_t j = 0; j < t.size(); ++j) {
        if (std::abs(i[j]) > std::abs(v[j]) / r_on * (1 + 1e-12)) bounded = false;
        if (std::abs(v[j]) < 1e-10) {
            ++zeros;
            if (std::abs(i[j]) > Tolerances{}.abstol) pinched = false;
        }
    }
    auto area = [](double f) {
        const auto cc = load_circuit(memristor_netlist(1.0, f, true, 1.0, 1.0));
        const auto tr = run_transient(cc, first<TranDirective>(cc));
        return lobe_area(tr.signal("V(a)"), tr.signal("I(M1)"));
    };
    const double a1 = area(1.0), a10 = area(10.0);
    const bool pass = bounded && pinched && zeros >= 4 && a10 < a1;
    return {pass, std::string(bounded ? "|i|<=|v|/Ron" : "BOUND VIOLATED") + ", " + std::to_string(zeros) +
                      " zero crossings " + (pinched ? "pinched" : "NOT PINCHED") + ", lobe area f " + num(a1) +
                      " vs 10f " + num(a10)};
}

Verdict joglekar_closed_form() {
    const double amp = 0.2, freq = 1.0;
    const auto c = load_circuit(memristor_netlist(amp, freq, false, 0.0, 2.0));
    const auto t = run_transient(c, first<TranDirective>(c));
    const auto& x = t.signal("x(M1)");
    const double k = 1e-14 * 100 / (10e-9 * 10e-9);
    const double m0 = 100 * 0.5 + 16e3 * 0.5, dr = 16e3 - 100;
    const double w = 2 * kPi * freq;
    double worst = 0.0;
    bool interior = true;
    for (std::size_t j = 0; j < t.size(); ++j) {
        const double phi = amp / w * (1 - std::cos(w * t.axis[j]));
        const double q = (m0 - std::sqrt(m0 * m0 - 2 * dr * k * phi)) / (dr * k);
        const double expected = 0.5 + k * q;
        if (!(expected > 0 && expected < 1 && x[j] > 0 && x[j] < 1)) interior = false;
        worst = std::max(worst, std::abs(x[j] - expected) / expected);
    }
    return {interior && worst <= 5e-3, "max relative error " + num(worst, 3)};
}

Verdict thd_calibration() {
    Trace sq;
    sq.names = {"V(s)"};
    sq.series.resize(1);
    const std::size_t n = 200001;
    for (std::size_t j = 0; j < n; ++j) {
        const double time = 2e-3 * static_cast<double>(j) / static_cast<double>(n - 1);
        sq.axis.push_back(time);
        sq.series[0].push_back(std::sin(2 * kPi * 1e3 * time) >= 0 ? 1.0 : -1.0);
    }
    const double square = fourier_analysis(sq, "V(s)", 1e3, 9).thd_requested;

    const auto c = load_circuit("sine into resistor\nV1 a 0 SIN(0 1 1k)\nR1 a 0 1k\n.tran 10u 3m\n");
    const auto t = run_transient(c, first<TranDirective>(c));
    const double sine = fourier_analysis(t, "I(R1)", 1e3, 9).thd_requested;
    return {std::abs(square - 42.9) <= 0.5 && sine < 0.05,
            "square " + num(square, 5) + " %, sine through resistor " + num(sine, 3) + " %"};
}

Verdict thd_inequality() {
    const auto a = corpus("widlar.cir");
    const auto b = corpus("widlar_mem.cir");
    const auto ra = simulate(a);
    const auto rb = simulate(b);
    const auto& fa = ra.fourier.at(0);
    const auto& fb = rb.fourier.at(0);
    const bool pass = fb.thd_requested < fa.thd_requested && fb.thd_full < fa.thd_full;
    return {pass, "requested " + num(fb.thd_requested) + " % < " + num(fa.thd_requested) + " %, full " +
                      num(fb.thd_full) + " % < " + num(fa.thd_full) + " %"};
}

Verdict energy_conservation() {
    double worst = 0.0;
    int reports = 0;
    bool all = true;
    for (const char* name : {"basic_cm.cir", "widlar.cir", "widlar_mem.cir", "memristor_sine.cir"}) {
        const auto c = corpus(name);
        const auto r = simulate(c);
        for (const auto* p : {r.op_power ? &*r.op_power : nullptr, r.tran_power ? &*r.tran_power : nullptr}) {
            if (!p) continue;
            ++reports;
            all = all && p->balanced(1e-3);
            const double scale = std::max(std::abs(p->delivered), std::abs(p->dissipated));
            if (scale > 0) worst = std::max(worst, p->imbalance / scale);
        }
        // Every sweep point is a converged operating point as well.
        for (const auto& d : c.directives) {
            const auto* dc = std::get_if<DcSweepDirective>(&d);
            if (!dc) continue;
            Circuit copy = c;
            for (double v : {dc->start, 0.5 * (dc->start + dc->stop), dc->stop}) {
                for (auto& comp : copy.components) {
                    if (to_lower(comp.name) == to_lower(dc->source) && comp.is<VoltageSource>()) {
                        comp.data = VoltageSource{v, std::nullopt};
                    }
                }
                const auto p = power_report(copy, run_op(copy));
                ++reports;
                all = all && p.balanced(1e-3);
                const double scale = std::max(std::abs(p.delivered), std::abs(p.dissipated));
                if (scale > 0) worst = std::max(worst, p.imbalance / scale);
            }
        }
    }
    return {all, std::to_string(reports) + " reports, worst imbalance " + num(worst, 3) + " relative"};
}

Verdict numerical_hygiene() {
    constexpr double eps = std::numeric_limits<double>::epsilon();
    auto matches = [&](double analytic, double fp, double fm, double h) {
        const double fd = (fp - fm) / (2 * h);
        const double noise = 8 * eps * std::max(std::abs(fp), std::abs(fm)) / h;
        return std::abs(analytic - fd) <= 1e-5 * std::max(std::abs(analytic), std::abs(fd)) + noise;
    };
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> vj(-1.0, 0.85), vm(-2.0, 2.0), xs(0.01, 0.99);
    int bad = 0;
    for (int i = 0; i < 1000; ++i) {
        BjtParams p;
        if (i % 2) p.vaf = 100.0;
        const double vbe = vj(rng), vbc = vj(rng), h = 1e-6 * kThermalVoltage;
        const auto r = eval_bjt(vbe, vbc, p);
        const auto ep = eval_bjt(vbe + h, vbc, p), em = eval_bjt(vbe - h, vbc, p);
        const auto cp = eval_bjt(vbe, vbc + h, p), cm = eval_bjt(vbe, vbc - h, p);
        if (!(matches(r.dic_dvbe, ep.ic, em.ic, h) && matches(r.dic_dvbc, cp.ic, cm.ic, h) &&
              matches(r.dib_dvbe, ep.ib, em.ib, h) && matches(r.dib_dvbc, cp.ib, cm.ib, h))) {
            ++bad;
        }
        MemristorParams mp;
        mp.p = 1 + i % 3;
        const double v = vm(rng), x = xs(rng), hv = 1e-6, hx = 1e-7;
        const auto m = eval_memristor(v, x, mp);
        const auto vp = eval_memristor(v + hv, x, mp), vn = eval_memristor(v - hv, x, mp);
        const auto xp = eval_memristor(v, x + hx, mp), xn = eval_memristor(v, x - hx, mp);
        if (!(matches(m.di_dv, vp.i, vn.i, hv) && matches(m.di_dx, xp.i, xn.i, hx) &&
              matches(m.ddxdt_dv, vp.dx_dt, vn.dx_dt, hv) && matches(m.ddxdt_dx, xp.dx_dt, xn.dx_dt, hx))) {
            ++bad;
        }
    }

    double worst = 0.0;
    for (const char* name : {"memristor_sine.cir", "widlar.cir", "widlar_mem.cir"}) {
        const auto c = corpus(name);
        const auto& d = first<TranDirective>(c);
        const auto coarse = run_transient(c, d);
        TransientOptions half;
        half.tstep_override = d.tstep / 2;
        const auto fine = run_transient(c, d, {}, half);
        for (std::size_t s = 0; s < coarse.names.size(); ++s) {
            double peak = 0.0, diff = 0.0;
            for (std::size_t j = 0; j < coarse.size(); ++j) {
                peak = std::max(peak, std::abs(coarse.series[s][j]));
                diff = std::max(diff,
                                std::abs(coarse.series[s][j] - interpolate(fine.axis, fine.series[s], coarse.axis[j])));
            }
            if (peak > 0) worst = std::max(worst, diff / peak);
        }
    }
    return {bad == 0 && worst < 5e-3, std::to_string(bad) + " partial mismatches in 2000 points, tstep halving moves " +
                                          num(100 * worst, 3) + " % of peak"};
}

Verdict parser_exactness() {
    bool ok = parse_value("9.3k") == 9300.0 && std::abs(parse_value("1m") - 1e-3) <= 1e-18 &&
              parse_value("2meg") == 2e6 && std::abs(parse_value("10u") - 1e-5) <= 1e-20;
    const std::pair<const char*, double> table[] = {{"f", 1e-15}, {"p", 1e-12}, {"n", 1e-9}, {"u", 1e-6}, {"m", 1e-3},
                                                    {"k", 1e3},   {"meg", 1e6}, {"g", 1e9},  {"t", 1e12}};
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> mant(-1000.0, 1000.0);
    int checked = 0;
    for (int i = 0; i < 900; ++i) {
        const auto& [suffix, scale] = table[i % 9];
        const double m = mant(rng);
        std::ostringstream tok;
        tok << std::setprecision(17) << m << suffix;
        const double got = parse_value(tok.str());
        if (std::abs(got - m * scale) > 1e-14 * std::abs(m * scale)) ok = false;
        ++checked;
    }
    int round_trips = 0;
    for (const char* name : {"basic_cm.cir", "widlar.cir", "widlar_mem.cir", "memristor_sine.cir"}) {
        const auto c = corpus(name);
        if (load_circuit(to_netlist(c)) == c) ++round_trips;
    }
    return {ok && round_trips == 4,
            "worked examples ok, " + std::to_string(checked) + " suffix samples, " + std::to_string(round_trips) +
                "/4 corpus round-trips"};
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Verdict()>> criteria[] = {
        {"basic current mirror", basic_mirror},
        {"Widlar oracle", widlar_oracle},
        {"memristor fingerprints", memristor_fingerprints},
        {"Joglekar closed form", joglekar_closed_form},
        {"THD calibration", thd_calibration},
        {"THD inequality", thd_inequality},
        {"energy conservation", energy_conservation},
        {"numerical hygiene", numerical_hygiene},
        {"parser exactness", parser_exactness},
    };
    int failures = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        Verdict v;
        try {
            v = check();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        if (!v.pass) ++failures;
        std::cout << "criterion " << index << " [" << (v.pass ? "PASS" : "FAIL") << "] " << name << ": " << v.detail
                  << std::endl;
    }
    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria failed") << std::endl;
    return failures;
}
