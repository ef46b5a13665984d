#pragma once

#include "isac/channel.hpp"
#include "isac/estimator.hpp"

#include <optional>
#include <vector>

namespace isac {

struct BaConfig {
  double mu = 0.0;
  double budget = kInf;
  int max_iters = 10000;
  /// Stop once F = I − μ D improves by less than this ...
  double convergence_eps = 1e-10;
  /// ... and no input probability moved by more than this (0 disables).
  double pmf_eps = 1e-12;
  /// Dual step α_ℓ = lambda_step0 / ℓ, warm-started from the previous λ;
  /// bisection finishes whatever the subgradient steps leave.
  double lambda_step0 = 1.0;
  int lambda_subgradient_iters = 20;
  /// Tolerance on |Σ b P_X − B| when the cost constraint is active.
  double lambda_eps = 1e-12;
  /// Treat the cost constraint as an equality (λ may be negative).
  bool cost_equality = false;
  std::optional<Pmf> initial_pmf;
  /// Inputs allowed to carry mass; empty means all.
  std::vector<bool> support;
  bool record_trace = false;
};

struct TradeoffPoint {
  double mu = 0.0;
  double budget = kInf;
  double rate = 0.0;
  double distortion = 0.0;
  double cost = 0.0;
  double lambda = 0.0;
  Pmf input_pmf;
  int iterations = 0;
  bool converged = false;
  /// F(P_X) = I − μ D after every outer iteration (when requested).
  std::vector<double> objective_trace;
};

/// I(X; Y | S) in bits.
double conditional_mutual_information(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x);

/// Q(x | y, s) = P_X(x) P(y|x,s) / P(y|s), held implicitly through P_X and
/// the output law P(y | s). Rows with P(y|s) = 0 are uniform and unused.
struct QTable {
  Pmf p_x;
  Eigen::MatrixXd p_y_given_s;  // state_size x output_size

  double operator()(const SdmcSpec& spec, Index x, Index y, Index s) const;
  bool used(Index y, Index s) const { return p_y_given_s(s, y) > 0.0; }
};

QTable q_update(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x);

/// P*(x) ∝ exp2(g(x)), g(x) = Σ P_S P(y|x,s) log2 Q(x|y,s) − λ b(x) − μ c(x).
/// Throws DegenerateUpdate if every g(x) is −∞.
Pmf p_update(const SdmcSpec& spec, const EstimatorTable& est, const QTable& q, double mu,
             double lambda);

/// Alternating maximization for one penalty μ, with the dual variable of
/// the cost constraint adjusted inside every outer iteration.
class TradeoffSolver {
 public:
  explicit TradeoffSolver(const SdmcSpec& spec);
  TradeoffSolver(const SdmcSpec& spec, EstimatorTable est);
  // The solver keeps a reference to the spec.
  explicit TradeoffSolver(SdmcSpec&&) = delete;
  TradeoffSolver(SdmcSpec&&, EstimatorTable) = delete;

  const SdmcSpec& spec() const { return *spec_; }
  const EstimatorTable& estimator() const { return est_; }

  TradeoffPoint solve(const BaConfig& config) const;

  /// I(X;Y|S) at p_x. D(x) = Σ_s P_S Σ_y P(y|x,s) log2(P(y|x,s) / P(y|s)) over
  /// outputs with P(y|s) > 0; `reachable(x)` is the P_S-weight of those outputs.
  double information(const Eigen::Ref<const Pmf>& p_x, Eigen::VectorXd* divergence = nullptr,
                     Eigen::VectorXd* reachable = nullptr) const;

 private:
  const SdmcSpec* spec_;
  EstimatorTable est_;
  Eigen::VectorXd cost_;          // b(x), zero if the spec has none
  Eigen::VectorXd neg_entropy_;   // Σ_s P_S Σ_y P log2 P, per x
  Index max_row_support_ = 0;
};

TradeoffPoint solve_fixed_mu(const SdmcSpec& spec, const BaConfig& config);

/// Face of the minimum-distortion LP and the largest rate on it.
struct MinDistortionPoint {
  double distortion = 0.0;
  double rate = 0.0;
  Pmf input_pmf;
  std::vector<bool> support;
  bool cost_binding = false;
};

MinDistortionPoint min_distortion_point(const TradeoffSolver& solver, double budget);

struct SweepOptions {
  double budget = kInf;
  int threads = 1;
  /// Warm-start each solve from its predecessor along fixed chains of μ
  /// values; results are identical for every thread count.
  bool warm_start = true;
  /// Add the μ = 0 capacity point and the minimum-distortion anchor.
  bool anchors = true;
  BaConfig base;
};

/// One solve per μ, sorted by (distortion, rate). With anchors on, the μ = 0
/// point and the μ = ∞ point (minimum distortion) are added.
std::vector<TradeoffPoint> sweep_frontier(const TradeoffSolver& solver,
                                          const std::vector<double>& mu_grid,
                                          const SweepOptions& options = {});

/// 40 log-spaced values on [1e-3, 1e3] plus μ = 0.
std::vector<double> auto_mu_grid();

/// Largest rate at expected distortion ≤ D: bisection on μ, mixing the two
/// bracketing solutions when D falls on a linear segment of the frontier.
TradeoffPoint solve_at_distortion(const TradeoffSolver& solver, double distortion,
                                  double budget = kInf, const BaConfig& base = {});

struct Baselines {
  /// (rate, distortion) endpoints of the two time-sharing segments.
  Eigen::Vector2d basic_sensing;     // (0, D_min)
  Eigen::Vector2d basic_comm;        // (C_NoEst, D_trivial)
  Eigen::Vector2d improved_sensing;  // (R_min, D_min)
  Eigen::Vector2d improved_comm;     // (C_NoEst, D_max)
  TradeoffPoint capacity;
  MinDistortionPoint min_distortion;
};

Baselines baseline_ts(const TradeoffSolver& solver, double budget = kInf);

struct NoTradeoffTrial {
  Pmf input_pmf;
  double independence_deviation = 0.0;  // (S, T) ⊥ X
  double markov_deviation = 0.0;        // S − T − (X, Z)
};

struct NoTradeoffReport {
  bool pass = false;
  double worst_deviation = 0.0;
  double tolerance = 0.0;
  std::vector<NoTradeoffTrial> trials;
};

/// Uniform, every point mass, and `random_trials` seeded random pmfs.
std::vector<Pmf> default_trial_pmfs(Index input_size, int random_trials = 20,
                                    std::uint64_t seed = 1);

NoTradeoffReport no_tradeoff_check(const SdmcSpec& spec, const MappingTable& psi,
                                   const std::vector<Pmf>& trial_pmfs, double tol = 1e-9);

}  // namespace isac
