#include "biphoton/phase_matching.hpp"

#include <cmath>
#include <limits>

#include "biphoton/errors.hpp"

namespace biphoton::phasematch {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
    if (!(v > 0.0)) throw InvalidParameter(std::string(name) + " must be > 0");
}
} // namespace

bool energy_conserved(double lambda_s, double lambda_i, double lambda_p) {
    require_positive(lambda_s, "lambda_s");
    require_positive(lambda_i, "lambda_i");
    require_positive(lambda_p, "lambda_p");
    const double lhs = 1.0 / lambda_s + 1.0 / lambda_i;
    const double rhs = 1.0 / lambda_p;
    return std::fabs(lhs - rhs) <= 1e-6 * rhs;
}

double transverse_matched_internal_angle(double k_s, double alpha_s, double k_i) {
    require_positive(k_s, "k_s");
    require_positive(k_i, "k_i");
    const double s = k_s * std::sin(alpha_s) / k_i;
    if (std::fabs(s) > 1.0)
        throw UnphysicalKinematics("transverse matching has no real solution: |k_s sin(alpha_s)| > k_i");
    return std::asin(s);
}

double exit_angle(double lambda_s, double beta_s, double lambda_i) {
    require_positive(lambda_s, "lambda_s");
    require_positive(lambda_i, "lambda_i");
    const double s = (lambda_i / lambda_s) * std::sin(beta_s);
    if (std::fabs(s) > 1.0)
        throw UnphysicalKinematics("exit angle has no real solution: |(lambda_i/lambda_s) sin(beta_s)| > 1");
    return std::asin(s);
}

std::string condition_name(ConditionId id) {
    switch (id) {
    case ConditionId::SameSlit: return "same-slit";
    case ConditionId::Diffraction: return "diffraction";
    case ConditionId::Erasure: return "erasure";
    }
    return "unknown";
}

ConditionReport check_same_slit(double delta_theta, double b, double D,
                                double threshold_ratio) {
    require_positive(b, "b");
    if (delta_theta < 0) throw InvalidParameter("delta_theta must be >= 0");
    if (D < 0) throw InvalidParameter("D must be >= 0");
    const double ratio = (D == 0.0 || delta_theta == 0.0) ? kInf : (b / D) / delta_theta;
    // inclusive threshold, with slack for rounding in the ratio itself
    return ConditionReport{ConditionId::SameSlit, ratio, threshold_ratio,
                           ratio >= threshold_ratio * (1.0 - 1e-12)};
}

ConditionReport check_diffraction(double delta_theta, double a, double D,
                                  double threshold_ratio) {
    require_positive(a, "a");
    if (delta_theta < 0) throw InvalidParameter("delta_theta must be >= 0");
    if (D < 0) throw InvalidParameter("D must be >= 0");
    const double ratio = (D == 0.0 || delta_theta == 0.0) ? kInf : (a / D) / delta_theta;
    return ConditionReport{ConditionId::Diffraction, ratio, threshold_ratio,
                           ratio >= threshold_ratio * (1.0 - 1e-12)};
}

ConditionReport check_erasure(double divergence, double lambda, double b) {
    require_positive(divergence, "divergence");
    require_positive(lambda, "lambda");
    require_positive(b, "b");
    const double fringe = lambda / b;
    return ConditionReport{ConditionId::Erasure, divergence / fringe, 1.0,
                           divergence > fringe};
}

} // namespace biphoton::phasematch
