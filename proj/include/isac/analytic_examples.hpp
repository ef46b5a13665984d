#pragma once

#include "isac/channel.hpp"

#include <cstdint>

namespace isac {

/// Y = S X with S ~ Bernoulli(q), perfect feedback Z = Y, Hamming distortion.
SdmcSpec binary_multiplicative_spec(double q);

/// q H_b(min(D / min(q, 1 − q), 1/2)).
double binary_multiplicative_cd(double q, double distortion);

/// Y = X if S = 0 and "?" (index 2) if S = 1, S ~ Bernoulli(p), Z = Y.
SdmcSpec erasure_channel_spec(double p);
/// ψ(x, z) = 1{z = ?}.
MappingTable erasure_psi();

struct GaussianQuantConfig {
  Index pam_points = 16;
  Index noise_points = 50;
  Index state_points = 8000;
  double power = 10.0;
  double feedback_variance = 1.0;
  double noise_halfwidth = 6.0;  // in standard deviations
  /// Upper tail mass of S² beyond the last quantizer cell.
  double state_tail = 1e-6;

  static GaussianQuantConfig reduced() {
    GaussianQuantConfig c;
    c.pam_points = 8;
    c.noise_points = 25;
    c.state_points = 500;
    return c;
  }
};

void validate(const GaussianQuantConfig& cfg);

/// Quantized Rayleigh-fading channel Y = S X + N, Z = Y + N_fb.
///
/// Inputs are M-PAM points (2m − 1 − M) κ with κ = √(3P / (M² − 1)). The noise
/// grid has spacing h = 2w / (n − 1) on ±w standard deviations; outputs live
/// on the lattice (k + 1/2) h, with S X snapped to the nearest multiple of h
/// (ties downward). N_fb is quantized on integer multiples of h within ±w σ_fb,
/// so Z shares the output lattice. S² is quantized on an equal-spaced grid of
/// `state_points` cells; each cell yields the two states ±√(midpoint) with
/// half its mass. Distortion is (s − ŝ)² with Ŝ = S, cost is x², B = P.
/// Throws InstanceTooLarge beyond 1e8 stored law entries.
SdmcSpec gaussian_quantized_spec(const GaussianQuantConfig& cfg);

struct GaussianAnchors {
  double capacity_no_estimation = 0.0;  // ½ E[log2(1 + S² P)]
  double d_max = 0.0;                   // (1 + σ²) E[1 / (1 + X² + σ²)], X ~ N(0, P)
  double d_min = 0.0;                   // (1 + σ²) / (1 + P + σ²)
  double r_min = 0.0;                   // I(X;Y|S) for X uniform on ±√P
};

GaussianAnchors gaussian_analytic_anchors(double power, double feedback_variance,
                                          std::size_t mc_samples, std::uint64_t seed);

/// P(s1, s2) with (0,0) ↦ 1 − q, (0,1) ↦ 0, (1,1) ↦ qγ, (1,0) ↦ q(1 − γ).
Eigen::MatrixXd degraded_state_pmf(double q, double gamma);

/// Y_k = S_k X, Z = (Y1, Y2) indexed y1 * 2 + y2, Hamming distortions.
SdmbcSpec binary_bc_spec(double q, double gamma);
/// Y1 = S1 X, Y2 = S2 (1 − X), Z = (Y1, Y2).
SdmbcSpec flipped_bc_spec(double q, double gamma);

/// Y_k = X if S_k = 0 else "?", Z_k = Y_k if E_k = 0 else "?", with
/// P(e1, s1, e2, s2) = P_E1S1(e1, s1) P_E2S2(e2, s2) given as [e][s] tables.
/// Ternary symbols use index 2 for "?"; Z is indexed z1 * 3 + z2.
SdmbcSpec erasure_bc_spec(const Eigen::Matrix2d& p_e1s1, const Eigen::Matrix2d& p_e2s2);
/// ψ_k(x, z) = 1{z_k = ?}.
MappingTable erasure_bc_psi(int receiver);

/// Dueck BC with X = (x0, x1, x2) indexed x0 * 4 + x1 * 2 + x2, S_k ~ Bernoulli(q)
/// i.i.d., Y_k = (X0, Y_k') indexed x0 * 2 + y_k', Y_k' = S_k (X_k ⊕ N),
/// N ~ Bernoulli(1/2), Z = (Y1', Y2') indexed y1' * 2 + y2'.
SdmbcSpec dueck_bc_spec(double q);

/// Single-receiver view of the Dueck BC for receiver k: input (x1, x2)
/// indexed x1 * 2 + x2, state S_k, output and feedback (Y1', Y2').
SdmcSpec dueck_reduction_spec(double q, int receiver);

/// t = P(X1 ≠ X2) for a pmf over the Dueck reduction inputs.
double dueck_t(const Eigen::Ref<const Pmf>& p_x);

}  // namespace isac
