#pragma once

#include "isac/channel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace isac {

/// Optimal symbol-wise estimator ŝ*(x, z) and its per-input cost c(x).
struct EstimatorTable {
  Eigen::MatrixXi table;  // input_size x feedback_size
  Eigen::VectorXd cost;   // c(x) = E[d(S, ŝ*(x, Z)) | X = x]

  Index input_size() const { return table.rows(); }
  Index feedback_size() const { return table.cols(); }
};

/// P(s | x, z). Throws ZeroProbabilityObservation when P(z | x) = 0.
Pmf posterior_state(const SdmcSpec& spec, Index x, Index z);

/// Ties go to the smallest estimate index (relative tolerance 1e-12).
/// Feedback symbols that cannot occur under x map to index 0.
EstimatorTable build_estimator(const SdmcSpec& spec);

inline double expected_distortion(const EstimatorTable& est, const Eigen::Ref<const Pmf>& p_x) {
  return est.cost.dot(p_x);
}

/// Σ_{x,s,z} P_X P_S P(z|s,x) d(s, table(x,z)) for an arbitrary table.
double table_distortion(const SdmcSpec& spec, const Eigen::MatrixXi& table,
                        const Eigen::Ref<const Pmf>& p_x);

/// Per-input distortion of an arbitrary table.
Eigen::VectorXd table_cost(const SdmcSpec& spec, const Eigen::MatrixXi& table);

/// b ≤ B up to a relative rounding slack of 1e-12.
inline bool affordable(double cost, double budget) {
  return cost <= budget + 1e-12 * std::max(1.0, std::abs(budget));
}

struct DminResult {
  double distortion = 0.0;
  Pmf input_pmf;
};

/// min Σ P_X c subject to Σ P_X b ≤ B. Throws Infeasible if B < min b.
DminResult d_min(const Eigen::VectorXd& c, const Eigen::VectorXd& b, double budget);
DminResult d_min(const SdmcSpec& spec, const EstimatorTable& est, double budget);
DminResult d_min(const SdmcSpec& spec, double budget);

/// Distortion of the best feedback-blind constant estimate.
double d_trivial(const SdmcSpec& spec);

/// Per-receiver estimators built from the marginal posteriors P(s_k | x, z).
std::pair<EstimatorTable, EstimatorTable> build_bc_estimators(const SdmbcSpec& spec);

}  // namespace isac
