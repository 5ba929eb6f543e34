#include "doctest.h"

#include <cmath>
#include <vector>

#include "biphoton/patterns.hpp"
#include "biphoton/types.hpp"

using namespace biphoton;
using namespace biphoton::patterns;

// Reference geometry: a = 0.13 mm, b = 0.4 mm, lambda = 916 nm.
namespace {
constexpr double kA = 0.13e-3;
constexpr double kB = 0.4e-3;
constexpr double kLambda = 916e-9;

// Angles where the closed forms vanish exactly: the formulas act on
// sin(theta), so the zeros sit at arcsin of the sine-space positions.
const double kClassicalEnvelopeZero = std::asin(kLambda / kA);        // 7.04621e-3
const double kQuantumEnvelopeZero = std::asin(kLambda / (2.0 * kA));  // 3.52308e-3
const double kClassicalFringeZero = std::asin(kLambda / (2.0 * kB));  // first cos^2 null
const double kQuantumFringeZero = std::asin(kLambda / (4.0 * kB));

Pattern quantum_reference() {
    return biphoton_pattern(default_theta_grid(), kA, kB, kLambda);
}
Pattern classical_reference() {
    return classical_pattern(default_theta_grid(), kA, kB, kLambda);
}
} // namespace

TEST_SUITE("patterns") {

TEST_CASE("sinc convention: sin(x)/x with first zero at pi") {
    CHECK(sinc(0.0) == 1.0);
    CHECK(std::fabs(sinc(3.141592653589793)) < 1e-15);
    CHECK(sinc(1.5) == doctest::Approx(std::sin(1.5) / 1.5).epsilon(1e-15));
    CHECK(sinc(-2.0) == sinc(2.0));
    CHECK(sinc(1e-12) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("all closed forms peak at 1 on axis") {
    CHECK(classical_single_slit(0.0, kA, kLambda) == 1.0);
    CHECK(classical_double_slit(0.0, kA, kB, kLambda) == 1.0);
    CHECK(biphoton_interference(0.0, kB, kLambda) == 1.0);
    CHECK(biphoton_diffraction(0.0, kA, kLambda) == 1.0);
    CHECK(biphoton_double_slit(0.0, kA, kB, kLambda) == 1.0);
    for (int n = 1; n <= 4; ++n) CHECK(nphoton_double_slit(0.0, n, kA, kB, kLambda) == 1.0);
}

TEST_CASE("closed forms stay within [0, 1] and are even in theta") {
    for (double theta : default_theta_grid()) {
        const double v = biphoton_double_slit(theta, kA, kB, kLambda);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        CHECK(v == doctest::Approx(biphoton_double_slit(-theta, kA, kB, kLambda)).epsilon(1e-14));
        const double c = classical_double_slit(theta, kA, kB, kLambda);
        CHECK(c >= 0.0);
        CHECK(c <= 1.0);
    }
}

TEST_CASE("envelope and fringe zeros sit at the arcsin positions") {
    CHECK(classical_single_slit(kClassicalEnvelopeZero, kA, kLambda) < 1e-20);
    CHECK(classical_double_slit(kClassicalFringeZero, kA, kB, kLambda) < 1e-20);
    CHECK(biphoton_diffraction(kQuantumEnvelopeZero, kA, kLambda) < 1e-20);
    CHECK(biphoton_interference(kQuantumFringeZero, kB, kLambda) < 1e-20);
}

TEST_CASE("pair pattern factorizes into interference times diffraction") {
    for (double theta : default_theta_grid())
        CHECK(biphoton_double_slit(theta, kA, kB, kLambda) ==
              doctest::Approx(biphoton_interference(theta, kB, kLambda) *
                              biphoton_diffraction(theta, kA, kLambda))
                  .epsilon(1e-14));
}

TEST_CASE("N-photon pattern equals the classical pattern at lambda/N") {
    for (int n = 1; n <= 4; ++n)
        for (double theta : default_theta_grid()) {
            const double lhs = nphoton_double_slit(theta, n, kA, kB, kLambda);
            const double rhs = classical_double_slit(theta, kA, kB, kLambda / n);
            CHECK(std::fabs(lhs - rhs) <= 1e-12);
        }
}

TEST_CASE("N = 1 and N = 2 reduce bitwise to the named forms") {
    for (double theta : default_theta_grid()) {
        CHECK(nphoton_double_slit(theta, 1, kA, kB, kLambda) ==
              classical_double_slit(theta, kA, kB, kLambda));
        CHECK(nphoton_double_slit(theta, 2, kA, kB, kLambda) ==
              biphoton_double_slit(theta, kA, kB, kLambda));
    }
}

TEST_CASE("grid builders return peak-one patterns with provenance") {
    const auto p = quantum_reference();
    REQUIRE(p.theta.size() == 1601);
    CHECK(p.normalization == Normalization::PeakOne);
    double peak = 0.0;
    for (double v : p.value) peak = std::max(peak, v);
    CHECK(peak == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(p.meta.count("source") == 1);
    CHECK(p.meta.count("lambda_m") == 1);
}

TEST_CASE("pair-pattern metrics: fringe period and envelope widths") {
    const auto m = pattern_metrics(quantum_reference());
    REQUIRE(m.fringe_period.has_value());
    REQUIRE(m.envelope_first_zero.has_value());
    REQUIRE(m.envelope_fwhm.has_value());
    // Fringe spacing lambda/2b, envelope zero at arcsin(lambda/2a), FWHM of
    // sinc^2 at 0.886 lambda/(2a); measurement tolerances from the estimator
    // resolution, not the physics.
    CHECK(*m.fringe_period == doctest::Approx(kLambda / (2.0 * kB)).epsilon(5e-3));
    CHECK(*m.envelope_first_zero == doctest::Approx(kQuantumEnvelopeZero).epsilon(1e-2));
    CHECK(*m.envelope_fwhm ==
          doctest::Approx(0.8858929413789287 * kLambda / (2.0 * kA)).epsilon(2e-2));
    CHECK(m.warnings.empty());
}

TEST_CASE("classical metrics land on the single-photon widths") {
    const auto m = pattern_metrics(classical_reference());
    REQUIRE(m.fringe_period.has_value());
    REQUIRE(m.envelope_first_zero.has_value());
    CHECK(*m.fringe_period == doctest::Approx(kLambda / kB).epsilon(5e-3));
    CHECK(*m.envelope_first_zero == doctest::Approx(kClassicalEnvelopeZero).epsilon(1e-2));
    CHECK(*m.envelope_fwhm ==
          doctest::Approx(0.8858929413789287 * kLambda / kA).epsilon(2e-2));
}

TEST_CASE("pair metrics are half the classical metrics") {
    const auto q = pattern_metrics(quantum_reference());
    const auto c = pattern_metrics(classical_reference());
    CHECK(*q.fringe_period / *c.fringe_period == doctest::Approx(0.5).epsilon(1e-2));
    CHECK(*q.envelope_first_zero / *c.envelope_first_zero ==
          doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("single-slit metrics have no fringe period") {
    const auto m = pattern_metrics(single_slit_pattern(default_theta_grid(), kA, kLambda));
    CHECK(!m.fringe_period.has_value());
    REQUIRE(m.envelope_first_zero.has_value());
    CHECK(*m.envelope_first_zero == doctest::Approx(kClassicalEnvelopeZero).epsilon(1e-2));
    REQUIRE(m.envelope_fwhm.has_value());
    CHECK(*m.envelope_fwhm ==
          doctest::Approx(0.8858929413789287 * kLambda / kA).epsilon(5e-3));
}

TEST_CASE("degenerate inputs yield absent metrics with warnings") {
    auto flat = make_pattern(linspace_grid(-8e-3, 8e-3, 101), std::vector<double>(101, 1.0),
                             Normalization::PeakOne, {});
    auto m = pattern_metrics(flat);
    CHECK(!m.fringe_period.has_value());
    CHECK(!m.envelope_first_zero.has_value());
    CHECK(!m.warnings.empty());

    auto tiny = make_pattern({0.0, 1e-3, 2e-3}, {1.0, 0.5, 0.25}, Normalization::PeakOne, {});
    m = pattern_metrics(tiny);
    CHECK(!m.fringe_period.has_value());
    CHECK(!m.warnings.empty());
}

TEST_CASE("undersampled grids are flagged") {
    const auto coarse = classical_pattern(linspace_grid(-8e-3, 8e-3, 41), kA, kB, kLambda);
    const auto m = pattern_metrics(coarse);
    CHECK(!m.warnings.empty());
}

TEST_CASE("dominant_fringe_frequency recovers a synthetic tone") {
    const auto grid = linspace_grid(-8e-3, 8e-3, 1601);
    const double f0 = 873.0; // cycles per rad
    std::vector<double> v;
    v.reserve(grid.size());
    for (double t : grid) v.push_back(0.5 + 0.5 * std::cos(2.0 * 3.141592653589793 * f0 * t));
    const auto f = dominant_fringe_frequency(grid, v, 400.0, 5000.0);
    REQUIRE(f.has_value());
    CHECK(*f == doctest::Approx(f0).epsilon(1e-3));

    const std::vector<double> flat(grid.size(), 1.0);
    CHECK(!dominant_fringe_frequency(grid, flat, 400.0, 5000.0).has_value());
}

} // TEST_SUITE
