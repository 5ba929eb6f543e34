#include "biphoton/types.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "biphoton/errors.hpp"
#include "biphoton/phase_matching.hpp"
#include "biphoton/units.hpp"

namespace biphoton {
namespace {

Finding finding(std::string id, bool ok, Severity bad, std::string detail) {
    return Finding{std::move(id), ok ? Severity::Pass : bad, std::move(detail)};
}

std::string num(double v) { return units::format_double(v); }

} // namespace

Pattern make_pattern(std::vector<double> theta, std::vector<double> value,
                     Normalization norm, PatternMeta meta) {
    if (theta.size() != value.size())
        throw InvalidParameter("pattern: theta and value lengths differ");
    if (theta.empty()) throw InvalidParameter("pattern: empty grid");
    for (double v : value)
        if (!(v >= 0.0)) throw InvalidParameter("pattern: value[i] >= 0 violated");
    if (norm == Normalization::PeakOne) {
        const double peak = *std::max_element(value.begin(), value.end());
        if (std::fabs(peak - 1.0) > 1e-12)
            throw InvalidParameter("pattern: peak-one normalization violated (max = " +
                                   num(peak) + ")");
    }
    return Pattern{std::move(theta), std::move(value), norm, std::move(meta)};
}

bool ValidationReport::passed() const {
    return std::none_of(findings.begin(), findings.end(),
                        [](const Finding& f) { return f.severity == Severity::Fail; });
}

ValidationReport validate_setup(const OpticalSetup& setup) {
    const auto& src = setup.source;
    const auto& mask = setup.mask;
    const auto& det = setup.detection;
    ValidationReport report;
    auto add = [&report](Finding f) { report.findings.push_back(std::move(f)); };

    const bool wl_ok = src.pump_wavelength > 0 && src.signal_wavelength > 0 &&
                       src.idler_wavelength > 0;
    add(finding("source-wavelengths-positive", wl_ok, Severity::Fail,
                "pump = " + num(src.pump_wavelength) + ", signal = " +
                    num(src.signal_wavelength) + ", idler = " + num(src.idler_wavelength)));
    add(finding("emission-spread-nonnegative", src.emission_spread >= 0, Severity::Fail,
                "emission_spread = " + num(src.emission_spread)));
    add(finding("pump-beam-width-positive", src.pump_beam_width > 0, Severity::Fail,
                "pump_beam_width = " + num(src.pump_beam_width)));
    add(finding("perturbative-regime",
                src.pair_amplitude > 0 && src.pair_amplitude <= 0.1, Severity::Fail,
                "pair_amplitude = " + num(src.pair_amplitude) + ", need 0 < eps <= 0.1"));

    if (wl_ok) {
        const bool cons = phasematch::energy_conserved(src.signal_wavelength,
                                                       src.idler_wavelength,
                                                       src.pump_wavelength);
        // A coincidence setup needs a physically consistent pair source; for
        // first-order detection the source spectrum is informational only.
        const double mismatch = std::fabs((1.0 / src.signal_wavelength +
                                           1.0 / src.idler_wavelength -
                                           1.0 / src.pump_wavelength) *
                                          src.pump_wavelength);
        add(finding("energy-conservation", cons,
                    det.photon_number >= 2 ? Severity::Fail : Severity::Warn,
                    "|1/ls + 1/li - 1/lp| = " + num(mismatch) + " of 1/lp (tol 1e-6)"));
    } else {
        add(Finding{"energy-conservation", Severity::Warn, "not evaluated: invalid wavelengths"});
    }

    add(finding("slit-width-positive", mask.slit_width > 0, Severity::Fail,
                "slit_width = " + num(mask.slit_width)));
    add(finding("n-slits-range", mask.n_slits == 1 || mask.n_slits == 2, Severity::Fail,
                "n_slits = " + std::to_string(mask.n_slits)));
    const bool sep_ok = mask.n_slits != 2 || mask.slit_separation > mask.slit_width;
    add(finding("slit-separation-exceeds-width", sep_ok, Severity::Fail,
                "b = " + num(mask.slit_separation) + ", a = " + num(mask.slit_width)));
    add(finding("crystal-distance-nonnegative", mask.distance_from_crystal >= 0,
                Severity::Fail, "distance_from_crystal = " + num(mask.distance_from_crystal)));

    const bool increasing = std::is_sorted(det.theta_grid.begin(), det.theta_grid.end()) &&
                            std::adjacent_find(det.theta_grid.begin(), det.theta_grid.end()) ==
                                det.theta_grid.end() &&
                            !det.theta_grid.empty();
    add(finding("theta-grid-strictly-increasing", increasing, Severity::Fail,
                det.theta_grid.empty()
                    ? std::string("grid is empty")
                    : (increasing ? std::to_string(det.theta_grid.size()) +
                                        " strictly increasing points"
                                  : std::string("grid not strictly increasing"))));
    double max_abs_theta = 0.0;
    for (double t : det.theta_grid) max_abs_theta = std::max(max_abs_theta, std::fabs(t));
    add(finding("theta-grid-paraxial", max_abs_theta < 0.5, Severity::Fail,
                "max |theta| = " + num(max_abs_theta) + ", limit 0.5 rad"));
    add(finding("photon-number-positive", det.photon_number >= 1, Severity::Fail,
                "photon_number = " + std::to_string(det.photon_number)));
    add(finding("propagation-distance-positive", det.propagation_distance > 0,
                Severity::Fail, "propagation_distance = " + num(det.propagation_distance)));

    if (mask.slit_width > 0 && src.signal_wavelength > 0 && det.propagation_distance > 0) {
        const double fresnel = mask.slit_width * mask.slit_width / src.signal_wavelength /
                               det.propagation_distance;
        add(finding("far-field-regime", fresnel <= 0.1, Severity::Warn,
                    "(a^2/lambda)/L = " + num(fresnel)));
    } else {
        add(Finding{"far-field-regime", Severity::Warn, "not evaluated: invalid geometry"});
    }

    // Operating-regime conditions; failures mean the factor-2 result is not
    // expected, not that the setup is unusable.
    if (src.emission_spread >= 0 && mask.slit_width > 0 && mask.slit_separation > 0 &&
        mask.distance_from_crystal >= 0 && src.signal_wavelength > 0) {
        const auto same = phasematch::check_same_slit(src.emission_spread,
                                                      mask.slit_separation,
                                                      mask.distance_from_crystal);
        add(finding("same-slit-condition", same.passed, Severity::Warn,
                    "(b/D)/dtheta = " + num(same.ratio)));
        const auto diff = phasematch::check_diffraction(src.emission_spread, mask.slit_width,
                                                        mask.distance_from_crystal);
        add(finding("diffraction-condition", diff.passed, Severity::Warn,
                    "(a/D)/dtheta = " + num(diff.ratio)));
        if (src.emission_spread > 0) {
            const auto erase = phasematch::check_erasure(src.emission_spread,
                                                         src.signal_wavelength,
                                                         mask.slit_separation);
            add(finding("erasure-condition", erase.passed, Severity::Warn,
                        "divergence = " + num(src.emission_spread) + ", lambda/b = " +
                            num(src.signal_wavelength / mask.slit_separation)));
        } else {
            add(Finding{"erasure-condition", Severity::Warn,
                        "zero divergence cannot erase first-order fringes"});
        }
    } else {
        add(Finding{"same-slit-condition", Severity::Warn, "not evaluated: invalid geometry"});
        add(Finding{"diffraction-condition", Severity::Warn, "not evaluated: invalid geometry"});
        add(Finding{"erasure-condition", Severity::Warn, "not evaluated: invalid geometry"});
    }

    return report;
}

void ensure_valid(const OpticalSetup& setup) {
    const auto report = validate_setup(setup);
    for (const auto& f : report.findings)
        if (f.severity == Severity::Fail)
            throw InvalidParameter("invalid setup: " + f.id + " (" + f.detail + ")");
}

std::vector<double> linspace_grid(double lo, double hi, std::size_t n) {
    if (n < 2 || !(hi > lo)) throw InvalidParameter("grid needs hi > lo and >= 2 points");
    std::vector<double> g(n);
    const double step = (hi - lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) g[i] = lo + static_cast<double>(i) * step;
    g.back() = hi;
    return g;
}

std::vector<double> default_theta_grid() { return linspace_grid(-8e-3, 8e-3, 1601); }

} // namespace biphoton
