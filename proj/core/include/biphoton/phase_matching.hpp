#pragma once

#include <string>

namespace biphoton::phasematch {

// True iff |1/ls + 1/li - 1/lp| <= 1e-6 * (1/lp). The degenerate reference
// operating point (916 + 916 -> 458 nm) satisfies this exactly.
bool energy_conserved(double lambda_s, double lambda_i, double lambda_p);

// Transverse wavevector conservation inside the crystal:
// k_s sin(alpha_s) = k_i sin(alpha_i). Same sign convention as alpha_s;
// the opposite-side-of-pump geometry is encoded by the caller.
double transverse_matched_internal_angle(double k_s, double alpha_s, double k_i);

// Exit angles after refraction at the crystal face:
// sin(beta_i) = (lambda_i / lambda_s) sin(beta_s). Degenerate wavelengths
// give equal and opposite exit angles.
double exit_angle(double lambda_s, double beta_s, double lambda_i);

enum class ConditionId { SameSlit, Diffraction, Erasure };

// "Much less than" operationalized as a ratio >= threshold (default 10); the
// erasure condition is a strict inequality instead of a ratio threshold.
struct ConditionReport {
    ConditionId condition_id;
    double ratio;           // +inf encodes D = 0 or delta_theta = 0
    double threshold_ratio;
    bool passed;
};

std::string condition_name(ConditionId id);

// Both photons must pass the same slit: delta_theta << b/D.
ConditionReport check_same_slit(double delta_theta, double b, double D,
                                double threshold_ratio = 10.0);
// Pair spread small against the slit width: delta_theta << a/D.
ConditionReport check_diffraction(double delta_theta, double a, double D,
                                  double threshold_ratio = 10.0);
// First-order fringes wash out only when the collection divergence exceeds
// one fringe: divergence > lambda/b, strict.
ConditionReport check_erasure(double divergence, double lambda, double b);

} // namespace biphoton::phasematch
