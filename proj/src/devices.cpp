#include "mirrorsim/devices.hpp"

#include <cmath>

namespace mirrorsim {

ExpResult limited_expm1(double arg) {
    if (arg <= kMaxExpArg) return {std::expm1(arg), std::exp(arg)};
    const double edge = std::exp(kMaxExpArg);
    return {edge * (1.0 + (arg - kMaxExpArg)) - 1.0, edge};
}

BjtEval eval_bjt(double vbe, double vbc, const BjtParams& p) {
    const ExpResult fe = limited_expm1(vbe / p.vt);
    const ExpResult fc = limited_expm1(vbc / p.vt);

    BjtEval r;
    r.icc = p.is_sat * fe.value;
    r.iec = p.is_sat * fc.value;
    const double gcc = p.is_sat * fe.slope / p.vt;
    const double gec = p.is_sat * fc.slope / p.vt;

    // Early factor on the transport current; 1/inf == 0 removes it.
    const double inv_vaf = 1.0 / p.vaf;
    const double early = 1.0 - vbc * inv_vaf;
    const double transport = (r.icc - r.iec) * early;

    r.ic = transport - r.iec / p.br;
    r.ib = r.icc / p.bf + r.iec / p.br;
    r.ie = -(r.ic + r.ib);

    r.dic_dvbe = gcc * early;
    r.dic_dvbc = -gec * early - (r.icc - r.iec) * inv_vaf - gec / p.br;
    r.dib_dvbe = gcc / p.bf;
    r.dib_dvbc = gec / p.br;
    return r;
}

double window_joglekar(double x, int p) {
    const double u = 2.0 * x - 1.0;
    return 1.0 - std::pow(u, 2 * p);
}

double window_joglekar_slope(double x, int p) {
    const double u = 2.0 * x - 1.0;
    return -2.0 * (2 * p) * std::pow(u, 2 * p - 1);
}

MemristorEval eval_memristor(double v, double x, const MemristorParams& p) {
    MemristorEval r;
    const double m = p.memristance(x);
    const double dm_dx = p.r_on - p.r_off;
    r.i = v / m;
    r.di_dv = 1.0 / m;
    r.di_dx = -v * dm_dx / (m * m);

    const double k = p.drift_gain();
    const double w = p.window ? window_joglekar(x, p.p) : 1.0;
    const double dw_dx = p.window ? window_joglekar_slope(x, p.p) : 0.0;
    r.dx_dt = k * r.i * w;
    r.ddxdt_di = k * w;
    r.ddxdt_dv = k * w * r.di_dv;
    r.ddxdt_dx = k * (r.di_dx * w + r.i * dw_dx);
    return r;
}

double junction_vcrit(double vt, double is_sat) { return vt * std::log(vt / (std::sqrt(2.0) * is_sat)); }

double limit_junction_voltage(double v_new, double v_old, double vt, double vcrit) {
    if (v_new > vcrit && std::abs(v_new - v_old) > 2.0 * vt) {
        if (v_old > 0) {
            const double arg = 1.0 + (v_new - v_old) / vt;
            return arg > 0 ? v_old + vt * std::log(arg) : vcrit;
        }
        return vt * std::log(v_new / vt);
    }
    return v_new;
}

}  // namespace mirrorsim
