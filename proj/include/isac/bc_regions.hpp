#pragma once

#include "isac/ba_solver.hpp"
#include "isac/channel.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace isac {

/// One broadcast tuple. For bounds, r1 and r2 cap R0 + R1 and R0 + R2 and
/// rsum caps the total rate.
struct RegionSample {
  double r0 = 0.0;
  double r1 = 0.0;
  double r2 = 0.0;
  double rsum = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  std::vector<std::pair<std::string, double>> params;
};

struct DegradednessReport {
  bool degraded = false;
  double worst_violation = 0.0;
  Pmf witness_pmf;
  Index witness_s1 = -1;
  Index witness_y1 = -1;
};

/// Checks X − (S1, Y1) − (S2, Y2) on a panel of input pmfs.
DegradednessReport is_physically_degraded(const SdmbcSpec& spec, double tol = 1e-9,
                                          std::uint64_t seed = 1);

struct RegionGrid {
  /// Auxiliary alphabet size; 0 selects |X| + 1.
  Index u_size = 0;
  int resolution = 32;
  /// Extra seeded random pmfs on top of the lattice.
  int random_samples = 0;
  /// Seeded draws dithered around the Pareto front of the other samples.
  int refine_samples = 0;
  std::uint64_t seed = 1;
  int threads = 1;
};

/// Samples of the physically degraded region over a simplex lattice on P_UX:
/// r1 = I(X; Y1 | U, S1), r2 = I(U; Y2 | S2) (bounding R0 + R2).
std::vector<RegionSample> degraded_region(const SdmbcSpec& spec, const RegionGrid& grid);

/// Outer-bound samples over a lattice on P_X. Each receiver bound uses
/// U_k = X, which dominates every other auxiliary by data processing;
/// `random_samples` adds seeded random P_{U_k|X} draws with |U_k| = |X| + 1.
std::vector<RegionSample> outer_bound_samples(const SdmbcSpec& spec, const RegionGrid& grid);

struct ProductRegionReport {
  NoTradeoffReport receiver1;
  NoTradeoffReport receiver2;
  bool pass = false;
};

ProductRegionReport product_region_check(const SdmbcSpec& spec, const MappingTable& psi1,
                                         const MappingTable& psi2,
                                         const std::vector<Pmf>& trial_pmfs, double tol = 1e-9);

/// Distortion floors of the erasure BC. Inputs are 2x2 pmfs indexed [e][s].
/// The optimal estimator after an erased feedback symbol picks the likelier
/// state, so each floor is min(P_EkSk(1, 0), P_Sk(1)).
std::pair<double, double> erasure_bc_distortion_region(const Eigen::Matrix2d& p_e1s1,
                                                       const Eigen::Matrix2d& p_e2s2);

std::vector<RegionSample> binary_bc_region(double q, double gamma,
                                           const std::vector<double>& p_grid,
                                           const std::vector<double>& r_grid);
std::vector<RegionSample> flipped_bc_region(double q, double gamma,
                                            const std::vector<double>& p_grid,
                                            const std::vector<double>& r_grid);

double dueck_distortion(double q, double t);
double dueck_dmin(double q);

/// Per t: r1 = r2 = 1, rsum = 1 + q² H_b(t), d1 = d2 = dueck_distortion(q, t).
std::vector<RegionSample> dueck_outer(double q, const std::vector<double>& t_grid);

struct CurvePoint {
  double distortion = 0.0;
  double sum_rate = 0.0;
};

struct DueckInner {
  std::vector<RegionSample> samples;  // rsum = 1 + q H_b(t) − q(1 − q)
  std::vector<CurvePoint> hull;       // non-decreasing upper concave envelope
};

/// Inner bound per t, plus the hull over (D, sum-rate) that also includes
/// the rate-1 point at minimum distortion.
DueckInner dueck_inner(double q, const std::vector<double>& t_grid);

struct DueckRegions {
  double single_rate_cap = 1.0;
  double sum_rate_cap = 1.0;
  double distortion_floor = 0.0;
};

DueckRegions dueck_capacity_and_distortion_regions(double q);

/// Rates maximized, distortions minimized; ties within eps count as equal.
std::vector<RegionSample> pareto_front(const std::vector<RegionSample>& samples,
                                       double eps = 1e-9);

/// Upper concave hull of (distortion, sum_rate), made non-decreasing.
std::vector<CurvePoint> upper_hull(std::vector<CurvePoint> points);

/// Piecewise-linear evaluation; held constant beyond the last vertex and
/// -inf before the first.
double evaluate_curve(const std::vector<CurvePoint>& curve, double distortion);

/// Largest sum rate among samples with d1 ≤ D (samples treated as points).
double best_sum_rate(const std::vector<RegionSample>& samples, double distortion);

std::vector<double> linspace(double a, double b, int n);

}  // namespace isac
