#include "biphoton/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "biphoton/errors.hpp"
#include "biphoton/patterns.hpp"
#include "biphoton/random.hpp"
#include "biphoton/units.hpp"

namespace biphoton::propagator {
namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on [-1, 1], Newton iteration on the Legendre
// recurrence. Cached per order; the convergence loop reuses orders heavily.
struct GlRule {
    std::vector<double> x, w;
};

const GlRule& gl_rule(int n) {
    static std::map<int, GlRule> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;

    GlRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / pp;
            x -= dx;
            if (std::fabs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return cache.emplace(n, std::move(r)).first->second;
}

struct Interval {
    double lo, hi;
};

std::vector<Interval> slit_intervals(const SlitMask& mask) {
    const double a = mask.slit_width;
    if (mask.n_slits == 1) return {{-0.5 * a, 0.5 * a}};
    const double c = 0.5 * mask.slit_separation;
    return {{-c - 0.5 * a, -c + 0.5 * a}, {c - 0.5 * a, c + 0.5 * a}};
}

struct Geometry {
    std::vector<Interval> slits;
    double half_pump;   // w/2
    double walk;        // h = D tan(dtheta/2); transverse walk at the slit plane
    double D;
    double dtheta;
    double k;           // 2 pi / signal wavelength
    PumpPhaseProfile phase;
    bool collapsed;     // D = 0 or dtheta = 0: both photons cross at x0
};

Geometry build_geometry(const OpticalSetup& setup) {
    Geometry g;
    g.slits = slit_intervals(setup.mask);
    g.half_pump = 0.5 * setup.source.pump_beam_width;
    g.D = setup.mask.distance_from_crystal;
    g.dtheta = setup.source.emission_spread;
    g.walk = g.D * std::tan(0.5 * g.dtheta);
    g.k = 2.0 * kPi / setup.source.signal_wavelength;
    g.phase = setup.source.pump_phase_profile;
    g.collapsed = (g.walk == 0.0);
    return g;
}

// Emission-angle measure reaching slit pair (s -> sj, i -> sl) from x0. The
// window in u = D tan(alpha) is an intersection of linear constraints; inside
// one x0 piece the active constraints do not change, so this is smooth there.
double alpha_measure(const Geometry& g, const Interval& sj, const Interval& sl, double x0) {
    const double L = std::max({sj.lo - x0, x0 - sl.hi, -g.walk});
    const double U = std::min({sj.hi - x0, x0 - sl.lo, g.walk});
    if (U <= L) return 0.0;
    return std::atan(U / g.D) - std::atan(L / g.D);
}

// x0 values where the active constraint set of some (j,l) window changes;
// quadrature pieces must not straddle these kinks.
std::vector<double> breakpoints(const Geometry& g) {
    std::vector<double> bp{-g.half_pump, g.half_pump};
    auto push = [&bp, &g](double x) {
        if (x > -g.half_pump && x < g.half_pump) bp.push_back(x);
    };
    for (const auto& sj : g.slits)
        for (const auto& sl : g.slits) {
            for (double e : {sj.lo, sj.hi, sl.lo, sl.hi}) {
                push(e - g.walk);
                push(e + g.walk);
                push(e);
            }
            push(0.5 * (sj.lo + sl.lo));
            push(0.5 * (sj.lo + sl.hi));
            push(0.5 * (sj.hi + sl.lo));
            push(0.5 * (sj.hi + sl.hi));
        }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end(),
                         [](double p, double q) { return std::fabs(q - p) < 1e-18; }),
             bp.end());
    return bp;
}

// One smooth segment, split into panels short enough that the e^{i 2 k x0 sin
// theta} oscillation stays resolved (>= 8 nodes per cycle at the given order).
template <typename Weight>
std::complex<double> integrate_segment(const Geometry& g, double lo, double hi,
                                       double sin_theta, int order, Weight&& weight) {
    const GlRule& rule = gl_rule(order);
    const double osc = std::fabs(2.0 * g.k * sin_theta) / (2.0 * kPi); // cycles per meter
    const double max_len = (osc > 0.0) ? order / (8.0 * osc) : (hi - lo);
    const int panels = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_len)));

    std::complex<double> acc{0.0, 0.0};
    for (int p = 0; p < panels; ++p) {
        const double pa = lo + (hi - lo) * p / panels;
        const double pb = lo + (hi - lo) * (p + 1) / panels;
        const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
        for (int i = 0; i < order; ++i) {
            const double x = mid + half * rule.x[i];
            const double m = weight(x);
            if (m <= 0.0) continue;
            const double ph = 2.0 * g.k * x * sin_theta + g.phase(x);
            acc += (rule.w[i] * half * m) * std::complex<double>(std::cos(ph), std::sin(ph));
        }
    }
    return acc;
}

std::complex<double> amplitude_at(const Geometry& g, double theta, int order) {
    const double s = std::sin(theta);
    std::complex<double> acc{0.0, 0.0};

    if (g.collapsed) {
        // Both photons cross the mask at the birth position: Eq.-(8)-style
        // two-term sum smeared over the pump width.
        const double measure = (g.dtheta > 0.0) ? g.dtheta : 1.0;
        for (const auto& slit : g.slits) {
            const double lo = std::max(slit.lo, -g.half_pump);
            const double hi = std::min(slit.hi, g.half_pump);
            if (hi <= lo) continue;
            acc += integrate_segment(g, lo, hi, s, order,
                                     [measure](double) { return measure; });
        }
        return acc;
    }

    const auto bp = breakpoints(g);
    for (const auto& sj : g.slits)
        for (const auto& sl : g.slits)
            for (std::size_t p = 0; p + 1 < bp.size(); ++p) {
                const double lo = bp[p], hi = bp[p + 1];
                // Probe the middle: the window is either empty or open on the
                // whole piece, never partially.
                if (alpha_measure(g, sj, sl, 0.5 * (lo + hi)) <= 0.0) continue;
                acc += integrate_segment(g, lo, hi, s, order, [&](double x0) {
                    return alpha_measure(g, sj, sl, x0);
                });
            }
    return acc;
}

void require_coincidence(const OpticalSetup& setup) {
    ensure_valid(setup);
    if (setup.detection.photon_number != 2)
        throw InvalidParameter("joint amplitude requires detection.photon_number = 2");
}

std::vector<double> intensities(const Geometry& g, const std::vector<double>& grid,
                                int order) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) v[i] = std::norm(amplitude_at(g, grid[i], order));
    return v;
}

double rms_diff(const std::vector<double>& p, const std::vector<double>& q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = p[i] - q[i];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(p.size()));
}

std::vector<double> normalized(std::vector<double> v) {
    const double peak = *std::max_element(v.begin(), v.end());
    if (peak > 0.0)
        for (double& x : v) x /= peak;
    return v;
}

} // namespace

BiphotonAmplitude make_amplitude(const OpticalSetup& setup, double x0, double alpha) {
    const double walk = setup.mask.distance_from_crystal * std::tan(alpha);
    return BiphotonAmplitude{x0, x0 + walk, x0 - walk,
                             setup.source.pump_phase_profile(x0)};
}

std::complex<double> joint_amplitude(const OpticalSetup& setup, double theta, int order) {
    require_coincidence(setup);
    return amplitude_at(build_geometry(setup), theta, order);
}

PropagationResult coincidence_pattern_numeric(const OpticalSetup& setup, double tol,
                                              int max_order) {
    require_coincidence(setup);
    const Geometry g = build_geometry(setup);
    const auto& grid = setup.detection.theta_grid;

    PatternMeta meta{{"source", "numeric"},
                     {"lambda_m", units::format_double(setup.source.signal_wavelength)},
                     {"D_m", units::format_double(g.D)},
                     {"delta_theta_rad", units::format_double(g.dtheta)}};

    std::vector<double> prev;
    int order = 8;
    for (; order <= max_order; order *= 2) {
        std::vector<double> cur = normalized(intensities(g, grid, order));
        if (*std::max_element(cur.begin(), cur.end()) <= 0.0) {
            meta["quadrature_order"] = std::to_string(order);
            return PropagationResult{
                make_pattern(grid, std::move(cur), Normalization::AbsoluteRate, meta), order,
                0.0};
        }
        if (!prev.empty()) {
            const double err = rms_diff(cur, prev);
            if (err < tol) {
                meta["quadrature_order"] = std::to_string(order);
                meta["estimated_error"] = units::format_double(err);
                return PropagationResult{
                    make_pattern(grid, std::move(cur), Normalization::PeakOne, meta), order,
                    err};
            }
        }
        prev = std::move(cur);
    }

    meta["quadrature_order"] = std::to_string(max_order);
    PropagationResult last{make_pattern(grid, std::move(prev), Normalization::PeakOne, meta),
                           max_order, tol};
    throw ConvergenceError("quadrature did not stabilize below tolerance at max order " +
                               std::to_string(max_order),
                           std::move(last));
}

MonteCarloResult monte_carlo_pattern(const OpticalSetup& setup, std::uint64_t n_samples,
                                     std::uint64_t seed) {
    require_coincidence(setup);
    if (n_samples < 1000) throw InvalidParameter("monte_carlo_pattern needs n_samples >= 1000");
    const Geometry g = build_geometry(setup);
    const auto& grid = setup.detection.theta_grid;
    const std::size_t nt = grid.size();

    std::vector<double> sin_t(nt);
    for (std::size_t t = 0; t < nt; ++t) sin_t[t] = std::sin(grid[t]);

    // Independent oracle: no same-slit shortcut, the phase uses the literal
    // k (x_s + x_i) sin(theta) with both offsets propagated to the slit plane.
    std::vector<double> sum_re(nt, 0.0), sum_im(nt, 0.0);
    std::vector<double> sum_re2(nt, 0.0), sum_im2(nt, 0.0), sum_reim(nt, 0.0);

    constexpr std::uint64_t kChunk = 65536;
    const std::uint64_t chunks = (n_samples + kChunk - 1) / kChunk;
    const double w = setup.source.pump_beam_width;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        auto eng = rng::substream(seed, c);
        const std::uint64_t count = std::min(kChunk, n_samples - c * kChunk);
        for (std::uint64_t j = 0; j < count; ++j) {
            const double x0 = (rng::uniform01(eng) - 0.5) * w;
            const double alpha = (rng::uniform01(eng) - 0.5) * g.dtheta;
            const double walk = g.D * std::tan(alpha);
            const double xs = x0 + walk, xi = x0 - walk;
            bool pass_s = false, pass_i = false;
            for (const auto& slit : g.slits) {
                pass_s = pass_s || (xs >= slit.lo && xs <= slit.hi);
                pass_i = pass_i || (xi >= slit.lo && xi <= slit.hi);
            }
            if (!(pass_s && pass_i)) continue;
            const double coef = g.k * (xs + xi);
            const double ph0 = g.phase(x0);
            for (std::size_t t = 0; t < nt; ++t) {
                const double ph = coef * sin_t[t] + ph0;
                const double re = std::cos(ph), im = std::sin(ph);
                sum_re[t] += re;
                sum_im[t] += im;
                sum_re2[t] += re * re;
                sum_im2[t] += im * im;
                sum_reim[t] += re * im;
            }
        }
    }

    const double n = static_cast<double>(n_samples);
    std::vector<double> raw(nt), se(nt);
    for (std::size_t t = 0; t < nt; ++t) {
        const double mr = sum_re[t] / n, mi = sum_im[t] / n;
        const double vr = std::max(0.0, (sum_re2[t] / n - mr * mr)) / (n - 1.0) * n;
        const double vi = std::max(0.0, (sum_im2[t] / n - mi * mi)) / (n - 1.0) * n;
        const double cv = (sum_reim[t] / n - mr * mi) / (n - 1.0) * n;
        const double var_mr = vr / n, var_mi = vi / n, cov_m = cv / n;
        // Unbiased |mean|^2 (E|z|^2 = |Ez|^2 + Var(z-bar)); delta-method error
        // with the second-order term so near-zero points keep a sane sigma.
        raw[t] = std::max(0.0, mr * mr + mi * mi - var_mr - var_mi);
        const double var_I = 4.0 * (mr * mr * var_mr + mi * mi * var_mi +
                                    2.0 * mr * mi * cov_m) +
                             2.0 * (var_mr * var_mr + var_mi * var_mi + 2.0 * cov_m * cov_m);
        se[t] = std::sqrt(std::max(0.0, var_I));
    }

    const double peak = *std::max_element(raw.begin(), raw.end());
    PatternMeta meta{{"source", "monte-carlo"},
                    {"seed", std::to_string(seed)},
                    {"n_samples", std::to_string(n_samples)},
                    {"lambda_m", units::format_double(setup.source.signal_wavelength)},
                    {"D_m", units::format_double(g.D)},
                    {"delta_theta_rad", units::format_double(g.dtheta)}};
    MonteCarloResult out;
    out.n_samples = n_samples;
    if (peak <= 0.0) {
        out.pattern = make_pattern(grid, std::move(raw), Normalization::AbsoluteRate, meta);
        out.standard_error = std::move(se);
        return out;
    }
    for (double& x : raw) x /= peak;
    for (double& x : se) x /= peak;
    out.pattern = make_pattern(grid, std::move(raw), Normalization::PeakOne, meta);
    out.standard_error = std::move(se);
    return out;
}

std::vector<NarrowingPoint> narrowing_ratio_vs_distance(const OpticalSetup& setup,
                                                        const std::vector<double>& d_values) {
    require_coincidence(setup);
    if (d_values.empty()) throw InvalidParameter("d_values is empty");
    for (std::size_t i = 0; i < d_values.size(); ++i) {
        if (d_values[i] < 0) throw InvalidParameter("d_values must be nonnegative");
        if (i > 0 && d_values[i] <= d_values[i - 1])
            throw InvalidParameter("d_values must be increasing");
    }

    const auto classical = patterns::classical_pattern(
        setup.detection.theta_grid, setup.mask.slit_width, setup.mask.slit_separation,
        setup.source.signal_wavelength);
    const auto cm = patterns::pattern_metrics(classical);
    if (!cm.envelope_first_zero || !cm.envelope_fwhm)
        throw InvalidParameter("classical reference metrics not resolvable on this grid");

    std::vector<NarrowingPoint> out;
    out.reserve(d_values.size());
    for (double D : d_values) {
        OpticalSetup s = setup;
        s.mask.distance_from_crystal = D;
        const auto result = coincidence_pattern_numeric(s);
        const auto qm = patterns::pattern_metrics(result.pattern);
        if (!qm.envelope_first_zero || !qm.envelope_fwhm)
            throw InvalidParameter("quantum envelope metrics not resolvable at D = " +
                                   units::format_double(D));
        out.push_back(NarrowingPoint{D, *qm.envelope_first_zero / *cm.envelope_first_zero,
                                     *qm.envelope_fwhm / *cm.envelope_fwhm});
    }
    return out;
}

} // namespace biphoton::propagator
