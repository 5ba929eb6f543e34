#include "doctest.h"

#include <algorithm>
#include <string>

#include "biphoton/errors.hpp"
#include "biphoton/types.hpp"
#include "test_setups.hpp"

using namespace biphoton;

namespace {

const Finding* find_finding(const ValidationReport& r, const std::string& id) {
    for (const auto& f : r.findings)
        if (f.id == id) return &f;
    return nullptr;
}

} // namespace

TEST_SUITE("core_model") {

TEST_CASE("default grid is symmetric, strictly increasing, 1601 points") {
    const auto g = default_theta_grid();
    REQUIRE(g.size() == 1601);
    CHECK(g.front() == doctest::Approx(-8e-3).epsilon(1e-14));
    CHECK(g.back() == doctest::Approx(8e-3).epsilon(1e-14));
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(g[800] == doctest::Approx(0.0).scale(1e-9));
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == doctest::Approx(-g[g.size() - 1 - i]).scale(1e-15));
}

TEST_CASE("linspace endpoints are exact") {
    const auto g = linspace_grid(-1e-2, 1e-2, 7);
    REQUIRE(g.size() == 7);
    CHECK(g.front() == -1e-2);
    CHECK(g.back() == 1e-2);
}

TEST_CASE("make_pattern enforces the peak-one contract") {
    std::vector<double> th{0.0, 1.0, 2.0};
    CHECK_NOTHROW(make_pattern(th, {0.25, 1.0, 0.5}, Normalization::PeakOne, {}));
    CHECK_THROWS_AS(make_pattern(th, {0.25, 0.9, 0.5}, Normalization::PeakOne, {}),
                    InvalidParameter);
    CHECK_THROWS_AS(make_pattern(th, {0.25, 1.0 + 1e-9, 0.5}, Normalization::PeakOne, {}),
                    InvalidParameter);
    // AbsoluteRate carries raw magnitudes, any nonnegative peak is fine
    CHECK_NOTHROW(make_pattern(th, {7.0, 21.5, 3.0}, Normalization::AbsoluteRate, {}));
}

TEST_CASE("make_pattern rejects malformed data") {
    CHECK_THROWS_AS(make_pattern({0.0, 1.0}, {1.0}, Normalization::PeakOne, {}),
                    InvalidParameter);
    CHECK_THROWS_AS(make_pattern({}, {}, Normalization::PeakOne, {}), InvalidParameter);
    CHECK_THROWS_AS(make_pattern({0.0, 1.0}, {-0.1, 1.0}, Normalization::PeakOne, {}),
                    InvalidParameter);
}

TEST_CASE("reference setup validates cleanly") {
    const auto report = validate_setup(reference_setup());
    CHECK(report.passed());
    REQUIRE(!report.findings.empty());
    for (const char* id : {"same-slit-condition", "diffraction-condition", "erasure-condition",
                           "energy-conservation", "perturbative-regime"}) {
        const auto* f = find_finding(report, id);
        REQUIRE_MESSAGE(f != nullptr, id);
        CHECK(f->severity == Severity::Pass);
    }
    CHECK_NOTHROW(ensure_valid(reference_setup()));
}

TEST_CASE("hard invariant violations are Fail findings") {
    auto s = reference_setup();
    s.source.signal_wavelength = -916e-9;
    const auto report = validate_setup(s);
    CHECK(!report.passed());
    const auto* f = find_finding(report, "source-wavelengths-positive");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Fail);
}

TEST_CASE("ensure_valid names the violated invariant") {
    auto s = reference_setup();
    s.mask.slit_width = 0.5e-3; // wider than the separation
    try {
        ensure_valid(s);
        FAIL("expected InvalidParameter");
    } catch (const InvalidParameter& e) {
        CHECK(std::string(e.what()).find("slit-separation-exceeds-width") != std::string::npos);
    }
}

TEST_CASE("pair amplitude outside the perturbative regime is a hard failure") {
    auto s = reference_setup();
    s.source.pair_amplitude = 0.5;
    CHECK(!validate_setup(s).passed());
    s.source.pair_amplitude = 0.0;
    CHECK(!validate_setup(s).passed());
    s.source.pair_amplitude = 0.1;
    CHECK(validate_setup(s).passed());
}

TEST_CASE("energy mismatch severity depends on photon number") {
    auto s = reference_setup();
    s.source.signal_wavelength = 900e-9; // no longer degenerate with 458 nm pump

    s.detection.photon_number = 2;
    auto report = validate_setup(s);
    const auto* pair = find_finding(report, "energy-conservation");
    REQUIRE(pair != nullptr);
    CHECK(pair->severity == Severity::Fail);

    // A single-photon (classical) run has no pair to conserve; advisory only.
    s.detection.photon_number = 1;
    report = validate_setup(s);
    const auto* single = find_finding(report, "energy-conservation");
    REQUIRE(single != nullptr);
    CHECK(single->severity == Severity::Warn);
    CHECK(report.passed());
}

TEST_CASE("non-monotone detection grid is rejected") {
    auto s = reference_setup();
    s.detection.theta_grid = {0.0, 1e-3, 1e-3};
    CHECK(!validate_setup(s).passed());
    s.detection.theta_grid = {1e-3, 0.0};
    CHECK(!validate_setup(s).passed());
    s.detection.theta_grid.clear();
    CHECK(!validate_setup(s).passed());
}

TEST_CASE("condition violations warn without failing validation") {
    auto s = reference_setup();
    s.mask.distance_from_crystal = 80e-3; // (b/D)/dtheta drops to 1
    const auto report = validate_setup(s);
    CHECK(report.passed());
    const auto* f = find_finding(report, "same-slit-condition");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Warn);
}

TEST_CASE("zero emission spread cannot erase first-order fringes") {
    auto s = reference_setup();
    s.source.emission_spread = 0.0;
    const auto report = validate_setup(s);
    CHECK(report.passed());
    const auto* f = find_finding(report, "erasure-condition");
    REQUIRE(f != nullptr);
    CHECK(f->severity == Severity::Warn);
}

TEST_CASE("validate_setup is pure") {
    auto s = reference_setup();
    s.source.pump_beam_width = -1.0;
    const auto grid_before = s.detection.theta_grid;
    (void)validate_setup(s);
    CHECK(s.source.pump_beam_width == -1.0);
    CHECK(s.detection.theta_grid == grid_before);
}

} // TEST_SUITE
