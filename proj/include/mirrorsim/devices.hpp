#pragma once

#include "mirrorsim/netlist.hpp"

namespace mirrorsim {

/// Thermal voltage at 27 degC.
inline constexpr double kThermalVoltage = 0.025852;

/// Largest exp() argument evaluated exactly; beyond it the exponential is
/// continued linearly so the junction equations stay C1 and finite.
inline constexpr double kMaxExpArg = 80.0;

struct BjtParams {
    double is_sat = 1e-14;
    double bf = 100.0;
    double vaf = std::numeric_limits<double>::infinity();
    double br = 1.0;
    double vt = kThermalVoltage;

    static BjtParams from_model(const BjtModel& m) { return {m.is_sat, m.bf, m.vaf, m.br, kThermalVoltage}; }
};

struct MemristorParams {
    double r_on = 100.0;
    double r_off = 16e3;
    double d = 10e-9;
    double mu_v = 1e-14;
    int p = 1;
    double x_init = 0.5;
    bool window = true;

    static MemristorParams from_model(const MemristorModel& m) {
        return {m.r_on, m.r_off, m.d, m.mu_v, m.p, m.x_init, m.window};
    }
    /// Drift coefficient mu_v * r_on / d^2, in 1/C.
    double drift_gain() const { return mu_v * r_on / (d * d); }
    double memristance(double x) const { return r_on * x + r_off * (1.0 - x); }
};

/// Linearization of a BJT at (vbe, vbc). Currents flow into the terminals.
struct BjtEval {
    double ic = 0.0;
    double ib = 0.0;
    double ie = 0.0;
    double dic_dvbe = 0.0;
    double dic_dvbc = 0.0;
    double dib_dvbe = 0.0;
    double dib_dvbc = 0.0;
    double icc = 0.0;  // forward diode current is_sat * f(vbe)
    double iec = 0.0;  // reverse diode current is_sat * f(vbc)
};

/// Linearization of a memristor. `i` flows from n+ through the device to n-.
struct MemristorEval {
    double i = 0.0;
    double di_dv = 0.0;
    double di_dx = 0.0;
    double dx_dt = 0.0;
    double ddxdt_di = 0.0;  // at fixed x
    double ddxdt_dv = 0.0;  // total, through i
    double ddxdt_dx = 0.0;  // total, including i's dependence on x
};

/// exp(arg) - 1 with the linear continuation above kMaxExpArg, and its derivative in arg.
struct ExpResult {
    double value;
    double slope;
};
ExpResult limited_expm1(double arg);

BjtEval eval_bjt(double vbe, double vbc, const BjtParams& params);

double window_joglekar(double x, int p);
/// d/dx of the Joglekar window.
double window_joglekar_slope(double x, int p);

MemristorEval eval_memristor(double v, double x, const MemristorParams& params);

/// Critical voltage vt * ln(vt / (sqrt(2) * is_sat)) of a junction.
double junction_vcrit(double vt, double is_sat);

/// SPICE pnjlim: damps large forward excursions of an exponential junction voltage.
double limit_junction_voltage(double v_new, double v_old, double vt, double vcrit);

}  // namespace mirrorsim
