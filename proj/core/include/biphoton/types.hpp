#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace biphoton {

// Transverse pump phase at the crystal output face, radians as a function of
// transverse position (m). Constant by default; a linear ramp is available
// for sensitivity studies.
struct PumpPhaseProfile {
    double offset = 0.0;          // rad
    double slope = 0.0;           // rad per meter of transverse position
    double operator()(double x) const { return offset + slope * x; }
    bool is_constant() const { return slope == 0.0; }
};

struct SpdcSource {
    double pump_wavelength = 0.0;   // m
    double signal_wavelength = 0.0; // m
    double idler_wavelength = 0.0;  // m
    double emission_spread = 0.0;   // rad, full range of pair emission angles
    double pump_beam_width = 0.0;   // m, transverse extent of the birth zone
    double pair_amplitude = 0.05;   // dimensionless epsilon, perturbative regime
    PumpPhaseProfile pump_phase_profile{};
};

struct SlitMask {
    double slit_width = 0.0;           // m, symbol a
    double slit_separation = 0.0;      // m, symbol b, center to center
    int n_slits = 2;                   // 1 or 2
    double distance_from_crystal = 0.0; // m, symbol D; 0 = at the crystal face
};

struct DetectionGeometry {
    std::vector<double> theta_grid;     // rad, strictly increasing
    int photon_number = 2;              // 1 classical, 2 coincidence, N>=3 N-fold
    double propagation_distance = 4.0;  // m, slit plane to detector
};

struct OpticalSetup {
    SpdcSource source;
    SlitMask mask;
    DetectionGeometry detection;
};

enum class Normalization { PeakOne, AbsoluteRate };

// Provenance travels with every pattern: which formula or engine produced it,
// with what parameters/seed. Ordered map so serialization is deterministic.
using PatternMeta = std::map<std::string, std::string>;

struct Pattern {
    std::vector<double> theta;  // rad
    std::vector<double> value;  // nonnegative; max == 1 (1e-12) when PeakOne
    Normalization normalization = Normalization::PeakOne;
    PatternMeta meta;
};

// Throws InvalidParameter naming the violated invariant.
Pattern make_pattern(std::vector<double> theta, std::vector<double> value,
                     Normalization norm, PatternMeta meta);

enum class Severity { Pass, Warn, Fail };

struct Finding {
    std::string id;        // invariant or condition name
    Severity severity = Severity::Pass;
    std::string detail;
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool passed() const; // no Fail findings
};

// One finding per declared invariant and per physical validity condition.
// Pure: never throws, never mutates; hard invariant violations are Fail,
// regime conditions (same-slit, diffraction, erasure, far-field) are Warn.
ValidationReport validate_setup(const OpticalSetup& setup);

// Throws InvalidParameter with the first Fail finding if the setup is bad.
void ensure_valid(const OpticalSetup& setup);

// CLI default: +-8 mrad, 1601 points; >= 10 samples per quantum fringe of the
// reference geometry and covers both classical and quantum envelopes.
std::vector<double> default_theta_grid();
std::vector<double> linspace_grid(double lo, double hi, std::size_t n);

} // namespace biphoton
