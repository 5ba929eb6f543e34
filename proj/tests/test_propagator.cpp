#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "biphoton/errors.hpp"
#include "biphoton/patterns.hpp"
#include "biphoton/propagator.hpp"
#include "test_setups.hpp"

using namespace biphoton;
using namespace biphoton::propagator;

namespace {

double rms_difference(const std::vector<double>& x, const std::vector<double>& y) {
    double acc = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) acc += (x[i] - y[i]) * (x[i] - y[i]);
    return std::sqrt(acc / static_cast<double>(x.size()));
}

OpticalSetup coarse_setup(std::size_t points = 161) {
    auto s = reference_setup();
    s.detection.theta_grid = linspace_grid(-8e-3, 8e-3, points);
    return s;
}

} // namespace

TEST_SUITE("propagator") {

TEST_CASE("pair histories land at x0 +- D tan(alpha)") {
    const auto s = reference_setup();
    const auto amp = make_amplitude(s, 1e-4, 2e-3);
    CHECK(amp.birth_position == 1e-4);
    const double walk = 2.5e-3 * std::tan(2e-3);
    CHECK(amp.signal_offset == doctest::Approx(1e-4 + walk).epsilon(1e-14));
    CHECK(amp.idler_offset == doctest::Approx(1e-4 - walk).epsilon(1e-14));
    CHECK(amp.phase == 0.0);
}

TEST_CASE("pump phase profile rides along with the birth position") {
    auto s = reference_setup();
    s.source.pump_phase_profile = {0.5, 100.0};
    const auto amp = make_amplitude(s, 2e-4, 0.0);
    CHECK(amp.phase == doctest::Approx(0.5 + 100.0 * 2e-4).epsilon(1e-14));
}

TEST_CASE("mask at the crystal face reproduces the closed-form pair pattern") {
    auto s = coarse_setup(801);
    s.mask.distance_from_crystal = 0.0;
    const auto res = coincidence_pattern_numeric(s);
    const auto closed = patterns::biphoton_pattern(s.detection.theta_grid, s.mask.slit_width,
                                                   s.mask.slit_separation,
                                                   s.source.signal_wavelength);
    CHECK(rms_difference(res.pattern.value, closed.value) < 1e-6);
    CHECK(res.estimated_error < 1e-8);
}

TEST_CASE("zero emission spread collapses to the closed form at any distance") {
    auto s = coarse_setup(401);
    s.source.emission_spread = 0.0;
    s.mask.distance_from_crystal = 20e-3;
    const auto res = coincidence_pattern_numeric(s);
    const auto closed = patterns::biphoton_pattern(s.detection.theta_grid, s.mask.slit_width,
                                                   s.mask.slit_separation,
                                                   s.source.signal_wavelength);
    CHECK(rms_difference(res.pattern.value, closed.value) < 1e-6);
}

TEST_CASE("joint amplitude ratio matches the closed form at the crystal face") {
    auto s = reference_setup();
    s.mask.distance_from_crystal = 0.0;
    const double norm = std::norm(joint_amplitude(s, 0.0));
    REQUIRE(norm > 0.0);
    for (double theta : {0.5e-3, 1.7e-3, 3.0e-3, 6.2e-3}) {
        const double ratio = std::norm(joint_amplitude(s, theta)) / norm;
        const double expected = patterns::biphoton_double_slit(
            theta, s.mask.slit_width, s.mask.slit_separation, s.source.signal_wavelength);
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-9).scale(1e-12));
    }
}

TEST_CASE("numeric pattern at the working distance converges and stays normalized") {
    const auto res = coincidence_pattern_numeric(coarse_setup());
    CHECK(res.quadrature_order >= 8);
    CHECK(res.estimated_error < 1e-8);
    CHECK(res.pattern.normalization == Normalization::PeakOne);
    const double peak = *std::max_element(res.pattern.value.begin(), res.pattern.value.end());
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(res.pattern.meta.count("quadrature_order") == 1);
}

TEST_CASE("exhausted refinement budget raises with the last estimate attached") {
    try {
        (void)coincidence_pattern_numeric(coarse_setup(), 1e-18, 16);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.last_estimate().pattern.value.size() == 161);
        CHECK(e.last_estimate().quadrature_order == 16);
        CHECK(e.last_estimate().estimated_error >= 1e-18);
    }
}

TEST_CASE("fully blocked mask yields absolute-rate zeros, not a bogus peak") {
    // A 1 um pump at the mask plane sits entirely in the opaque strip between
    // the slits (inner slit edges at +-0.135 mm), so nothing is transmitted.
    auto s = coarse_setup(33);
    s.mask.distance_from_crystal = 0.0;
    s.source.pump_beam_width = 1e-6;
    const auto res = coincidence_pattern_numeric(s);
    CHECK(res.pattern.normalization == Normalization::AbsoluteRate);
    for (double v : res.pattern.value) CHECK(v == 0.0);
    const auto mc = monte_carlo_pattern(s, 10000, 3);
    CHECK(mc.pattern.normalization == Normalization::AbsoluteRate);
    for (double v : mc.pattern.value) CHECK(v == 0.0);
}

TEST_CASE("photon_number other than 2 is rejected by the pair propagator") {
    auto s = coarse_setup(33);
    s.detection.photon_number = 1;
    CHECK_THROWS_AS(coincidence_pattern_numeric(s), InvalidParameter);
    CHECK_THROWS_AS(monte_carlo_pattern(s, 10000, 1), InvalidParameter);
}

TEST_CASE("monte carlo needs a meaningful sample count") {
    CHECK_THROWS_AS(monte_carlo_pattern(coarse_setup(33), 999, 1), InvalidParameter);
}

TEST_CASE("monte carlo is bit-reproducible for identical seeds") {
    const auto s = coarse_setup(81);
    const auto r1 = monte_carlo_pattern(s, 20000, 42);
    const auto r2 = monte_carlo_pattern(s, 20000, 42);
    CHECK(r1.pattern.value == r2.pattern.value);
    CHECK(r1.standard_error == r2.standard_error);
    const auto r3 = monte_carlo_pattern(s, 20000, 43);
    CHECK(r1.pattern.value != r3.pattern.value);
}

TEST_CASE("monte carlo agrees with quadrature within 3 standard errors") {
    const auto s = coarse_setup();
    const auto mc = monte_carlo_pattern(s, 200000, 7);
    const auto quad = coincidence_pattern_numeric(s);
    REQUIRE(mc.pattern.value.size() == quad.pattern.value.size());
    for (std::size_t i = 0; i < mc.pattern.value.size(); ++i) {
        const double se = mc.standard_error[i];
        if (se > 0.0)
            CHECK(std::fabs(mc.pattern.value[i] - quad.pattern.value[i]) <= 3.0 * se);
    }
}

TEST_CASE("monte carlo error bars shrink like 1/sqrt(n)") {
    const auto s = coarse_setup(41);
    const auto small = monte_carlo_pattern(s, 50000, 11);
    const auto large = monte_carlo_pattern(s, 200000, 11);
    std::vector<double> ratios;
    for (std::size_t i = 0; i < small.standard_error.size(); ++i)
        if (small.standard_error[i] > 0.0 && large.standard_error[i] > 0.0)
            ratios.push_back(large.standard_error[i] / small.standard_error[i]);
    REQUIRE(ratios.size() > 20);
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
    const double median = ratios[ratios.size() / 2];
    // quadrupling n halves the error; allow 20 percent
    CHECK(median == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("narrowing ratio starts at one half and degrades monotonically") {
    auto s = coarse_setup(801);
    s.detection.theta_grid = linspace_grid(-10e-3, 10e-3, 1001);
    const std::vector<double> dv{0.0, 1.25e-3, 2.5e-3, 5e-3, 10e-3};
    const auto points = narrowing_ratio_vs_distance(s, dv);
    REQUIRE(points.size() == dv.size());
    CHECK(points[0].distance == 0.0);
    CHECK(points[0].width_ratio == doctest::Approx(0.5).epsilon(2e-2));
    for (std::size_t i = 1; i < points.size(); ++i)
        CHECK(points[i].width_ratio >= points[i - 1].width_ratio - 1e-9);
}

TEST_CASE("zero spread pins the narrowing ratio at one half for any distance") {
    auto s = coarse_setup();
    s.detection.theta_grid = linspace_grid(-10e-3, 10e-3, 1001);
    s.source.emission_spread = 0.0;
    const auto points = narrowing_ratio_vs_distance(s, {0.0, 10e-3, 40e-3});
    for (const auto& p : points)
        CHECK(p.width_ratio == doctest::Approx(0.5).epsilon(2e-2));
}

TEST_CASE("narrowing sweep validates its distance axis") {
    auto s = coarse_setup(33);
    CHECK_THROWS_AS(narrowing_ratio_vs_distance(s, {1e-3, 0.5e-3}), InvalidParameter);
    CHECK_THROWS_AS(narrowing_ratio_vs_distance(s, {-1e-3, 0.5e-3}), InvalidParameter);
    CHECK_THROWS_AS(narrowing_ratio_vs_distance(s, {}), InvalidParameter);
}

} // TEST_SUITE
