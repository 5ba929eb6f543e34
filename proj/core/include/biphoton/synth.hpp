#pragma once

#include <cstdint>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "biphoton/types.hpp"

namespace biphoton::synth {

// Thrown when a downstream consumer (e.g. the comparison report) requires a
// converged fit and Levenberg-Marquardt stopped without one.
class FitNotConverged : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct CountRecord {
    double theta = 0.0;            // rad
    std::uint64_t counts = 0;
    double integration_time = 0.0; // s, > 0
};

struct FitResult {
    double lambda_eff = 0.0; // m
    double a_eff = 0.0;      // m
    double b_eff = 0.0;      // m
    double amplitude = 0.0;  // counts/s at pattern peak
    double background = 0.0; // counts/s
    double residual_norm = 0.0;
    bool converged = false;
    std::vector<double> covariance_diag; // variances of the free parameters
    std::vector<std::string> free_names; // order matching covariance_diag
};

// Poisson draws with mean (peak_rate * value[i] + background_rate) * time.
// Requires a peak-one pattern; reproducible by seed.
std::vector<CountRecord> simulate_counts(const Pattern& pattern, double peak_rate,
                                         double background_rate, double integration_time,
                                         std::uint64_t seed);

// Weighted least squares (weights 1/max(counts,1)) of
//   rate(theta) = A sinc^2((pi a/lambda) sin theta) cos^2((pi b/lambda) sin theta) + B
// against counts/integration_time. The model depends only on a/lambda and
// b/lambda, so lambda_eff is meaningful only with a and b fixed to the mask
// (the default `fixed` = {"a","b"}); freeing them is allowed but degenerate.
// Initialization: background from a low percentile, fringe frequency from a
// band-restricted periodogram (f = b/lambda, lambda in 50 nm .. 10 um), then
// Levenberg-Marquardt refinement.
// Data must span >= 8 fringe periods, else InvalidParameter.
FitResult fit_pattern(const std::vector<CountRecord>& data, const SlitMask& mask,
                      const std::set<std::string>& fixed = {"a", "b"});

struct ComparisonReport {
    double period_ratio = 0.0;        // quantum / classical, data-level
    double period_ratio_sigma = 0.0;
    double envelope_zero_ratio = 0.0; // data-level
    double envelope_zero_ratio_sigma = 0.0;
    double lambda_ratio = 0.0;        // from the two fits
    double lambda_ratio_sigma = 0.0;
    FitResult quantum_fit;
    FitResult classical_fit;
};

// Factor-2 (or factor-N) comparison: fringe-period, envelope-zero, and
// fitted-wavelength ratios with 1-sigma uncertainties propagated from the
// fit covariances (the envelope-zero sigma also carries the dip locator's
// smoothing resolution). Period and envelope-zero ratios are measured on the
// counts themselves, not on the fits; locating the envelope dip needs the
// noise floor below ~0.3% of the peak, roughly peak counts >= 1000 per bin.
// Noisier data throws InvalidParameter rather than returning a wrong dip.
ComparisonReport quantum_classical_comparison(const std::vector<CountRecord>& quantum,
                                              const std::vector<CountRecord>& classical,
                                              const SlitMask& mask);

} // namespace biphoton::synth
