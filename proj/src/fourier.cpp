#include "mirrorsim/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

namespace mirrorsim {

double interpolate(const std::vector<double>& axis, const std::vector<double>& values, double t) {
    if (t <= axis.front()) return values.front();
    if (t >= axis.back()) return values.back();
    const auto it = std::upper_bound(axis.begin(), axis.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - axis.begin());
    const std::size_t lo = hi - 1;
    const double w = (t - axis[lo]) / (axis[hi] - axis[lo]);
    return values[lo] + w * (values[hi] - values[lo]);
}

FourierReport fourier_analysis(const Trace& trace, const std::string& signal, double fundamental, int nharmonics) {
    if (!(fundamental > 0)) throw AnalysisError("Fourier fundamental must be positive");
    if (nharmonics < 2) throw AnalysisError("Fourier analysis needs at least 2 harmonics");
    if (trace.size() < 2) throw AnalysisError("trace too short for Fourier analysis");
    const double period = 1.0 / fundamental;
    const double t_end = trace.axis.back();
    const double t_begin = t_end - period;
    if (t_begin < trace.axis.front() - 1e-12 * period) {
        throw AnalysisError("trace is shorter than one fundamental period");
    }
    const auto& values = trace.signal(signal);

    constexpr std::size_t n = kFourierPoints;
    std::vector<double> window(n);
    for (std::size_t j = 0; j < n; ++j) {
        window[j] = interpolate(trace.axis, values, t_begin + period * static_cast<double>(j) / n);
    }

    // Direct DFT; c_k = 2|X_k|/N except the Nyquist bin.
    const std::size_t nyquist = n / 2;
    std::vector<std::complex<double>> bins(nyquist + 1);
    for (std::size_t k = 0; k <= nyquist; ++k) {
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t j = 0; j < n; ++j) {
            const double angle = -2.0 * std::numbers::pi * static_cast<double>(k * j % n) / n;
            acc += window[j] * std::complex<double>(std::cos(angle), std::sin(angle));
        }
        bins[k] = acc;
    }

    FourierReport r;
    r.signal = signal;
    r.fundamental = fundamental;
    r.nharmonics = nharmonics;
    r.dc = bins[0].real() / n;
    auto magnitude = [&](std::size_t k) {
        return (k == nyquist ? 1.0 : 2.0) * std::abs(bins[k]) / static_cast<double>(n);
    };
    const double c1 = magnitude(1);
    if (!(c1 > 0)) throw AnalysisError("fundamental component of '" + signal + "' is zero; THD undefined");

    double requested = 0.0;
    for (int k = 1; k <= nharmonics; ++k) {
        const auto kk = static_cast<std::size_t>(k);
        const double c = kk <= nyquist ? magnitude(kk) : 0.0;
        r.magnitudes.push_back(c);
        // X_k = (N/2) c (sin phi - i cos phi) for c sin(k w t + phi)
        const double phase = kk <= nyquist ? std::atan2(bins[kk].real(), -bins[kk].imag()) : 0.0;
        r.phases_deg.push_back(phase * 180.0 / std::numbers::pi);
        if (k >= 2) requested += c * c;
    }
    double full = 0.0;
    double power = r.dc * r.dc;
    for (std::size_t k = 1; k <= nyquist; ++k) {
        const double c = magnitude(k);
        if (k >= 2) full += c * c;
        power += (k == nyquist ? c * c : c * c / 2.0);
    }
    r.thd_requested = 100.0 * std::sqrt(requested) / c1;
    r.thd_full = 100.0 * std::sqrt(full) / c1;
    double ms = 0.0;
    for (double v : window) ms += v * v;
    r.mean_square = ms / n;
    r.sum_harmonic_power = power;
    return r;
}

std::vector<FourierReport> fourier_analysis(const Trace& trace, const FourDirective& d) {
    std::vector<FourierReport> out;
    for (const auto& s : d.signals) out.push_back(fourier_analysis(trace, s, d.fundamental, d.nharmonics));
    return out;
}

}  // namespace mirrorsim
