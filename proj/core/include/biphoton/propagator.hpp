#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "biphoton/types.hpp"

namespace biphoton::propagator {

// One sampled pair history: born at x0 in the crystal plane, photons leave at
// equal-and-opposite angles +-alpha (degenerate collinear matching) and reach
// the slit plane at x0 +- D tan(alpha).
struct BiphotonAmplitude {
    double birth_position; // m
    double signal_offset;  // m at the slit plane
    double idler_offset;   // m
    double phase;          // pump phase at birth_position, rad
};

BiphotonAmplitude make_amplitude(const OpticalSetup& setup, double x0, double alpha);

struct PropagationResult {
    Pattern pattern;
    int quadrature_order = 0;     // final Gauss-Legendre order per dimension
    double estimated_error = 0.0; // RMS change on the last refinement
};

// Raised when order doubling exhausts the refinement budget; carries the last
// (unconverged) estimate so callers can inspect it.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, PropagationResult last)
        : std::runtime_error(what), last_(std::move(last)) {}
    const PropagationResult& last_estimate() const { return last_; }

private:
    PropagationResult last_;
};

// Joint two-photon detection amplitude at symmetric detector angle theta:
//   integral over birth position and emission angle of
//   T(x_s) T(x_i) exp(i k (x_s + x_i) sin theta) exp(i phi(x0))
// with T the slit indicator and k = 2 pi / signal wavelength. Both-photons-
// through-different-slits paths are part of the integrand; they only become
// negligible when the same-slit condition holds. Unnormalized.
std::complex<double> joint_amplitude(const OpticalSetup& setup, double theta,
                                     int order = 64);

// |joint_amplitude|^2 over the detection grid, peak-normalized, Gauss-Legendre
// order doubled until the pattern RMS-stabilizes below tol. An all-zero
// pattern (fully blocked mask) is returned as AbsoluteRate zeros.
PropagationResult coincidence_pattern_numeric(const OpticalSetup& setup,
                                              double tol = 1e-8,
                                              int max_order = 1024);

struct MonteCarloResult {
    Pattern pattern;                    // peak-normalized (zeros if blocked)
    std::vector<double> standard_error; // per grid point, same normalization
    std::uint64_t n_samples = 0;
};

// Independent oracle for the quadrature: averages sampled pair contributions
// over uniform (birth position, emission angle) draws, zeroing masked samples.
// Bit-reproducible for identical (setup, n_samples, seed).
MonteCarloResult monte_carlo_pattern(const OpticalSetup& setup,
                                     std::uint64_t n_samples, std::uint64_t seed);

struct NarrowingPoint {
    double distance;    // m, crystal-to-slit D
    double width_ratio; // quantum envelope_first_zero / classical same mask
    double fwhm_ratio;  // same from envelope FWHM; approaches ~1/sqrt(2) far out
};

// Sweep of the quantum/classical width ratio against crystal-to-slit distance.
// Starts at 0.5 (factor-2 narrowing) and degrades as pairs start straddling
// different slits.
std::vector<NarrowingPoint> narrowing_ratio_vs_distance(const OpticalSetup& setup,
                                                        const std::vector<double>& d_values);

} // namespace biphoton::propagator
