#pragma once

#include "isac/channel.hpp"
#include "isac/estimator.hpp"
#include "isac/rng.hpp"

#include <cstdint>

namespace isac {

struct TrialReport {
  std::size_t n_samples = 0;
  double empirical_value = 0.0;
  double analytic_value = 0.0;
  double std_error = 0.0;
  double z_score = 0.0;
  bool pass = false;  // |z| ≤ 4
};

/// Draws (S, X, Z) i.i.d., applies the optimal estimator and compares the
/// empirical distortion with the analytic one.
TrialReport simulate_distortion(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x,
                                std::size_t n, std::uint64_t seed);
TrialReport simulate_distortion(const SdmcSpec& spec, const EstimatorTable& est,
                                const Eigen::Ref<const Pmf>& p_x, std::size_t n,
                                std::uint64_t seed);

struct BruteForceResult {
  double rate = 0.0;
  Pmf input_pmf;
  std::size_t lattice_points = 0;
  std::size_t feasible_points = 0;
};

/// max I(X;Y|S) over the simplex lattice of spacing grid_step subject to
/// Σ P_X c ≤ D and Σ P_X b ≤ B. Needs |X| ≤ 4.
BruteForceResult brute_force_tradeoff(const SdmcSpec& spec, double distortion, double budget,
                                      double grid_step);

struct ExhaustiveResult {
  Eigen::MatrixXi table;
  double distortion = 0.0;
  std::size_t tables = 0;
};

/// Enumerates every deterministic table X x Z -> Ŝ (at most 10^6 of them).
ExhaustiveResult exhaustive_estimator_search(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x);

/// Random channel with Dirichlet rows; `zero_fraction` of law entries are
/// zeroed before renormalizing. Distortion and cost entries are uniform on
/// [0, 1].
SdmcSpec random_spec(Rng& rng, Index input_size, Index state_size, Index output_size,
                     Index feedback_size, double zero_fraction = 0.0);

}  // namespace isac
