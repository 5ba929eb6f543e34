#include "biphoton/random.hpp"

#include <cmath>

#include "biphoton/errors.hpp"

namespace biphoton::rng {
namespace {

// Knuth multiplication method: count uniforms until their product drops
// below e^-mean. Exact, but cost grows linearly with the mean.
std::uint64_t poisson_knuth(double mean, std::mt19937_64& g) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double prod = uniform01(g);
    while (prod > limit) {
        ++k;
        prod *= uniform01(g);
    }
    return k;
}

// Hormann's PTRS transformed-rejection sampler (W. Hormann, "The transformed
// rejection method for generating Poisson random variables", 1993). Exact for
// mean >= 10; used here above 30 where Knuth gets slow.
std::uint64_t poisson_ptrs(double mean, std::mt19937_64& g) {
    const double slam = std::sqrt(mean);
    const double loglam = std::log(mean);
    const double b = 0.931 + 2.53 * slam;
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double vr = 0.9277 - 3.6224 / (b - 2.0);

    for (;;) {
        const double u = uniform01(g) - 0.5;
        const double v = uniform01(g);
        const double us = 0.5 - std::fabs(u);
        const double k = std::floor((2.0 * a / us + b) * u + mean + 0.43);
        if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
        if (k < 0.0 || (us < 0.013 && v > us)) continue;
        if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
            k * loglam - mean - std::lgamma(k + 1.0))
            return static_cast<std::uint64_t>(k);
    }
}

} // namespace

std::uint64_t poisson(double mean, std::mt19937_64& g) {
    if (mean < 0.0 || !std::isfinite(mean)) throw InvalidParameter("poisson mean must be finite and nonnegative");
    if (mean == 0.0) return 0;
    if (mean <= 30.0) return poisson_knuth(mean, g);
    return poisson_ptrs(mean, g);
}

} // namespace biphoton::rng
