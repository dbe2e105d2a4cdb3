#pragma once

#include <string>
#include <vector>

#include "mirrorsim/analyses.hpp"

namespace mirrorsim {

/// Number of equidistant points the last fundamental period is resampled to.
inline constexpr std::size_t kFourierPoints = 1024;

struct FourierReport {
    std::string signal;
    double fundamental = 0.0;
    int nharmonics = 9;
    double dc = 0.0;
    std::vector<double> magnitudes;  // [k-1] holds harmonic k, k = 1..nharmonics
    std::vector<double> phases_deg;  // sine-referenced, like SPICE .four
    double thd_requested = 0.0;      // % over harmonics 2..nharmonics
    double thd_full = 0.0;           // % over harmonics 2..Nyquist of the resampled window
    double mean_square = 0.0;        // of the resampled window
    double sum_harmonic_power = 0.0; // dc^2 + sum of c_k^2 / 2 over every bin
};

/// Harmonic analysis of one signal over the final fundamental period.
FourierReport fourier_analysis(const Trace& trace, const std::string& signal, double fundamental, int nharmonics = 9);

/// One report per signal named by the directive.
std::vector<FourierReport> fourier_analysis(const Trace& trace, const FourDirective& d);

/// Linear interpolation of (axis, values) at t; axis strictly increasing.
double interpolate(const std::vector<double>& axis, const std::vector<double>& values, double t);

}  // namespace mirrorsim
