#pragma once

#include <optional>
#include <string>
#include <vector>

#include "biphoton/types.hpp"

namespace biphoton::patterns {

// sinc(x) = sin(x)/x with sinc(0) = 1, so the first zero sits at x = pi.
// This is NOT the normalized sin(pi x)/(pi x) convention; swapping them would
// silently rescale every width in the toolkit.
double sinc(double x);

// All formulas take sin(theta), not theta. Angles in rad, lengths in m.
// Every function returns a value in [0, 1] and equals 1 at theta = 0.
double classical_single_slit(double theta, double a, double lambda);
double classical_double_slit(double theta, double a, double b, double lambda);
double biphoton_interference(double theta, double b, double lambda);
double biphoton_diffraction(double theta, double a, double lambda);
double biphoton_double_slit(double theta, double a, double b, double lambda);
// n = 1 reduces exactly to classical_double_slit, n = 2 to biphoton_double_slit.
double nphoton_double_slit(double theta, int n, double a, double b, double lambda);

// Grid evaluation with provenance meta attached.
Pattern classical_pattern(const std::vector<double>& grid, double a, double b, double lambda);
Pattern biphoton_pattern(const std::vector<double>& grid, double a, double b, double lambda);
Pattern nphoton_pattern(const std::vector<double>& grid, int n, double a, double b, double lambda);
Pattern single_slit_pattern(const std::vector<double>& grid, double a, double lambda);

struct PatternMetrics {
    std::optional<double> fringe_period;      // rad; absent for single-slit data
    std::optional<double> envelope_first_zero; // rad
    std::optional<double> envelope_fwhm;       // rad, full width
    std::vector<std::string> warnings;         // e.g. undersampled grid
};

// Fringe period from the dominant spectral peak (Hann-windowed periodogram,
// golden-section refined; ties break toward the lower frequency). Envelope
// quantities from the fringe-maxima envelope; the first zero is located as the
// pattern minimum bracketed by the two fringe maxima flanking the envelope dip.
PatternMetrics pattern_metrics(const Pattern& p);

// Dominant fringe frequency (cycles per rad of theta) of sampled data over
// [f_lo, f_hi]; the metrics path scans 6/span .. Nyquist. Exposed for the
// fitter's periodogram initialization. Returns nullopt when no interior
// spectral maximum exists in the band.
std::optional<double> dominant_fringe_frequency(const std::vector<double>& theta,
                                                const std::vector<double>& value,
                                                double f_lo, double f_hi);

} // namespace biphoton::patterns
