#include "isac/bc_regions.hpp"

#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/parallel.hpp"
#include "isac/rng.hpp"

#include <algorithm>
#include <cmath>

namespace isac {

namespace {

constexpr std::size_t kMaxGridSamples = 5'000'000;

// I(X; Y | U, S) for a joint P(u, x) (rows u) on a single-receiver view.
double conditional_on_aux(const SdmcSpec& view, const Eigen::MatrixXd& p_ux) {
  double total = 0.0;
  for (Index u = 0; u < p_ux.rows(); ++u) {
    const double pu = p_ux.row(u).sum();
    if (pu <= 0.0) continue;
    const Pmf cond = p_ux.row(u).transpose() / pu;
    total += pu * conditional_mutual_information(view, cond);
  }
  return total;
}

std::string ux_name(Index u, Index x) { return "p_u" + std::to_string(u) + "x" + std::to_string(x); }
std::string x_name(Index x) { return "p_x" + std::to_string(x); }

}  // namespace

DegradednessReport is_physically_degraded(const SdmbcSpec& spec, double tol, std::uint64_t seed) {
  validate(spec);
  const Index nx = spec.input_size;
  const Index n1 = spec.state1_size, n2 = spec.state2_size;
  const Index m1 = spec.output1_size, m2 = spec.output2_size, nz = spec.feedback_size;

  DegradednessReport report;
  report.degraded = true;
  for (const Pmf& p : default_trial_pmfs(nx, 8, seed)) {
    // P(x, s1, y1, s2, y2)
    for (Index s1 = 0; s1 < n1; ++s1)
      for (Index y1 = 0; y1 < m1; ++y1) {
        Eigen::MatrixXd cond = Eigen::MatrixXd::Zero(nx, n2 * m2);  // P(x, s2, y2 | s1, y1) up to scale
        for (Index x = 0; x < nx; ++x)
          for (Index s2 = 0; s2 < n2; ++s2) {
            const double w = p[x] * spec.state_pmf(s1, s2);
            if (w == 0.0) continue;
            for (Index y2 = 0; y2 < m2; ++y2)
              for (Index z = 0; z < nz; ++z)
                cond(x, s2 * m2 + y2) += w * spec.law(spec.row(s1, s2, x), spec.col(y1, y2, z));
          }
        const double total = cond.sum();
        if (total <= 0.0) continue;
        const Eigen::RowVectorXd mixture = cond.colwise().sum() / total;
        for (Index x = 0; x < nx; ++x) {
          const double px = cond.row(x).sum();
          if (px <= 0.0) continue;
          const double dev = (cond.row(x) / px - mixture).cwiseAbs().maxCoeff();
          if (dev > report.worst_violation) {
            report.worst_violation = dev;
            report.witness_pmf = p;
            report.witness_s1 = s1;
            report.witness_y1 = y1;
          }
        }
      }
  }
  report.degraded = report.worst_violation <= tol;
  return report;
}

std::vector<RegionSample> degraded_region(const SdmbcSpec& spec, const RegionGrid& grid) {
  validate(spec);
  const Index nx = spec.input_size;
  const Index nu = grid.u_size > 0 ? grid.u_size : nx + 1;
  if (grid.resolution < 1) throw SpecError("grid resolution must be at least 1");
  const Index parts = nu * nx;
  const std::size_t lattice = composition_count(grid.resolution, parts);
  if (lattice > kMaxGridSamples) throw InstanceTooLarge("auxiliary lattice too large");

  const SdmcSpec view1 = receiver_view(spec, 1);
  const SdmcSpec view2 = receiver_view(spec, 2);
  const EstimatorTable est1 = build_estimator(view1);
  const EstimatorTable est2 = build_estimator(view2);

  std::vector<Eigen::MatrixXd> joints;
  joints.reserve(lattice + static_cast<std::size_t>(std::max(grid.random_samples, 0)));
  for_each_composition(grid.resolution, parts, [&](const Eigen::VectorXi& counts) {
    Eigen::MatrixXd p(nu, nx);
    for (Index u = 0; u < nu; ++u)
      for (Index x = 0; x < nx; ++x) p(u, x) = counts[u * nx + x] / static_cast<double>(grid.resolution);
    joints.push_back(std::move(p));
  });
  for (int i = 0; i < grid.random_samples; ++i) {
    Rng rng(grid.seed, static_cast<std::uint64_t>(i));
    joints.push_back(rng.simplex(parts).reshaped(nx, nu).transpose());
  }

  auto evaluate = [&](const std::vector<Eigen::MatrixXd>& draws, std::vector<RegionSample>& out) {
    const std::size_t first = out.size();
    out.resize(first + draws.size());
    parallel_for(static_cast<Index>(draws.size()), grid.threads, [&](Index i) {
      const Eigen::MatrixXd& p_ux = draws[static_cast<std::size_t>(i)];
      const Pmf p_x = p_ux.colwise().sum().transpose();
      RegionSample s;
      s.r1 = conditional_on_aux(view1, p_ux);
      s.r2 = std::max(0.0, conditional_mutual_information(view2, p_x) - conditional_on_aux(view2, p_ux));
      s.rsum = s.r1 + s.r2;
      s.d1 = est1.cost.dot(p_x);
      s.d2 = est2.cost.dot(p_x);
      for (Index u = 0; u < nu; ++u)
        for (Index x = 0; x < nx; ++x) s.params.emplace_back(ux_name(u, x), p_ux(u, x));
      out[first + static_cast<std::size_t>(i)] = std::move(s);
    });
  };
  std::vector<RegionSample> out;
  evaluate(joints, out);

  if (grid.refine_samples > 0) {
    const std::vector<RegionSample> front = pareto_front(out);
    std::vector<Eigen::MatrixXd> draws;
    draws.reserve(static_cast<std::size_t>(grid.refine_samples));
    Rng rng(grid.seed, 0x7e5eedULL);
    const double reach = 1.0 / grid.resolution;
    for (int i = 0; i < grid.refine_samples; ++i) {
      const RegionSample& base = front[static_cast<std::size_t>(rng.next() % front.size())];
      Eigen::MatrixXd p(nu, nx);
      for (Index k = 0; k < parts; ++k) p(k / nx, k % nx) = base.params[static_cast<std::size_t>(k)].second;
      const double scale = reach * rng.uniform();
      for (Index k = 0; k < parts; ++k) {
        double& v = p(k / nx, k % nx);
        v = std::max(0.0, v + scale * rng.normal());
      }
      draws.push_back(p / p.sum());
    }
    evaluate(draws, out);
  }
  return out;
}

std::vector<RegionSample> outer_bound_samples(const SdmbcSpec& spec, const RegionGrid& grid) {
  validate(spec);
  const Index nx = spec.input_size;
  if (grid.resolution < 1) throw SpecError("grid resolution must be at least 1");
  if (composition_count(grid.resolution, nx) > kMaxGridSamples)
    throw InstanceTooLarge("input lattice too large");

  const SdmcSpec view1 = receiver_view(spec, 1);
  const SdmcSpec view2 = receiver_view(spec, 2);
  const SdmcSpec merged = merged_view(spec);
  const EstimatorTable est1 = build_estimator(view1);
  const EstimatorTable est2 = build_estimator(view2);

  struct Draw {
    Pmf p_x;
    Eigen::MatrixXd u1, u2;  // P(u, x); empty for U_k = X
  };
  std::vector<Draw> draws;
  for (const auto& c : compositions(grid.resolution, nx))
    draws.push_back({c.cast<double>() / grid.resolution, {}, {}});
  const Index nu = grid.u_size > 0 ? grid.u_size : nx + 1;
  for (int i = 0; i < grid.random_samples; ++i) {
    Rng rng(grid.seed, static_cast<std::uint64_t>(i));
    Draw d;
    d.p_x = rng.simplex(nx);
    d.u1.resize(nu, nx);
    d.u2.resize(nu, nx);
    for (Index x = 0; x < nx; ++x) {
      d.u1.col(x) = rng.simplex(nu) * d.p_x[x];
      d.u2.col(x) = rng.simplex(nu) * d.p_x[x];
    }
    draws.push_back(std::move(d));
  }

  std::vector<RegionSample> out(draws.size());
  parallel_for(static_cast<Index>(draws.size()), grid.threads, [&](Index i) {
    const Draw& d = draws[static_cast<std::size_t>(i)];
    RegionSample s;
    const double i1 = conditional_mutual_information(view1, d.p_x);
    const double i2 = conditional_mutual_information(view2, d.p_x);
    // I(U; Y | S) = I(X; Y | S) − I(X; Y | U, S) for U − X − (Y, S)
    s.r1 = d.u1.size() ? std::max(0.0, i1 - conditional_on_aux(view1, d.u1)) : i1;
    s.r2 = d.u2.size() ? std::max(0.0, i2 - conditional_on_aux(view2, d.u2)) : i2;
    s.rsum = conditional_mutual_information(merged, d.p_x);
    s.d1 = est1.cost.dot(d.p_x);
    s.d2 = est2.cost.dot(d.p_x);
    for (Index x = 0; x < nx; ++x) s.params.emplace_back(x_name(x), d.p_x[x]);
    out[static_cast<std::size_t>(i)] = std::move(s);
  });
  return out;
}

ProductRegionReport product_region_check(const SdmbcSpec& spec, const MappingTable& psi1,
                                         const MappingTable& psi2,
                                         const std::vector<Pmf>& trial_pmfs, double tol) {
  ProductRegionReport report;
  report.receiver1 = no_tradeoff_check(receiver_view(spec, 1), psi1, trial_pmfs, tol);
  report.receiver2 = no_tradeoff_check(receiver_view(spec, 2), psi2, trial_pmfs, tol);
  report.pass = report.receiver1.pass && report.receiver2.pass;
  return report;
}

std::pair<double, double> erasure_bc_distortion_region(const Eigen::Matrix2d& p_e1s1,
                                                       const Eigen::Matrix2d& p_e2s2) {
  auto floor = [](const Eigen::Matrix2d& p) {
    check_pmf(p.reshaped(), "P_EkSk");
    return std::min(p(1, 0), p(0, 1) + p(1, 1));
  };
  return {floor(p_e1s1), floor(p_e2s2)};
}

namespace {

void check_unit(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw SpecError(std::string(name) + " must lie in [0, 1]");
}

template <typename D1, typename D2>
std::vector<RegionSample> binary_family(double q, double gamma, const std::vector<double>& p_grid,
                                        const std::vector<double>& r_grid, D1 d1, D2 d2) {
  check_unit(q, "q");
  check_unit(gamma, "gamma");
  std::vector<RegionSample> out;
  out.reserve(p_grid.size() * r_grid.size());
  for (double p : p_grid) {
    check_unit(p, "p");
    for (double r : r_grid) {
      check_unit(r, "r");
      RegionSample s;
      const double h = q * binary_entropy(p);
      s.r1 = h * r;
      s.r2 = gamma * h * (1.0 - r);
      s.rsum = s.r1 + s.r2;
      s.d1 = d1(p);
      s.d2 = d2(p);
      s.params = {{"p", p}, {"r", r}};
      out.push_back(std::move(s));
    }
  }
  return out;
}

}  // namespace

std::vector<RegionSample> binary_bc_region(double q, double gamma,
                                           const std::vector<double>& p_grid,
                                           const std::vector<double>& r_grid) {
  return binary_family(
      q, gamma, p_grid, r_grid, [&](double p) { return p * std::min(q, 1.0 - q); },
      [&](double p) { return p * std::min(gamma * q, 1.0 - gamma * q); });
}

std::vector<RegionSample> flipped_bc_region(double q, double gamma,
                                            const std::vector<double>& p_grid,
                                            const std::vector<double>& r_grid) {
  return binary_family(
      q, gamma, p_grid, r_grid, [&](double p) { return p * std::min(q * (1.0 - gamma), 1.0 - q); },
      [&](double p) { return (1.0 - p) * q * std::min(gamma, 1.0 - gamma); });
}

double dueck_distortion(double q, double t) {
  check_unit(q, "q");
  check_unit(t, "t");
  if (q <= 0.5) return q / 2.0;
  if (q <= 2.0 - std::sqrt(2.0)) return q * (1.0 - t * (2.0 * q - 1.0)) / 2.0;
  return (1.0 - q) * (2.0 - q + t * (3.0 * q - 2.0)) / 2.0;
}

double dueck_dmin(double q) {
  check_unit(q, "q");
  if (q <= 0.5) return q / 2.0;
  if (q <= 2.0 / 3.0) return q * (1.0 - q);
  return (1.0 - q) * (2.0 - q) / 2.0;
}

std::vector<RegionSample> dueck_outer(double q, const std::vector<double>& t_grid) {
  std::vector<RegionSample> out;
  for (double t : t_grid) {
    RegionSample s;
    s.r1 = s.r2 = 1.0;
    s.rsum = 1.0 + q * q * binary_entropy(t);
    s.d1 = s.d2 = dueck_distortion(q, t);
    s.params = {{"t", t}};
    out.push_back(std::move(s));
  }
  return out;
}

DueckInner dueck_inner(double q, const std::vector<double>& t_grid) {
  DueckInner out;
  std::vector<CurvePoint> pts;
  for (double t : t_grid) {
    RegionSample s;
    s.r1 = s.r2 = 1.0;
    s.rsum = 1.0 + q * binary_entropy(t) - q * (1.0 - q);
    s.d1 = s.d2 = dueck_distortion(q, t);
    s.params = {{"t", t}};
    pts.push_back({s.d1, s.rsum});
    out.samples.push_back(std::move(s));
  }
  // Sum rate 1 is achievable at minimum distortion through X0 alone.
  pts.push_back({dueck_dmin(q), 1.0});
  out.hull = upper_hull(std::move(pts));
  return out;
}

DueckRegions dueck_capacity_and_distortion_regions(double q) {
  check_unit(q, "q");
  return {1.0, 1.0 + q * q, dueck_dmin(q)};
}

std::vector<RegionSample> pareto_front(const std::vector<RegionSample>& samples, double eps) {
  auto dominates_or_ties = [eps](const RegionSample& a, const RegionSample& b) {
    return a.r0 >= b.r0 - eps && a.r1 >= b.r1 - eps && a.r2 >= b.r2 - eps &&
           a.rsum >= b.rsum - eps && a.d1 <= b.d1 + eps && a.d2 <= b.d2 + eps;
  };
  std::vector<std::size_t> order(samples.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    const auto& a = samples[i];
    const auto& b = samples[j];
    if (a.d1 != b.d1) return a.d1 < b.d1;
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.r1 != b.r1) return a.r1 > b.r1;
    return a.r2 > b.r2;
  });
  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    const auto& cand = samples[i];
    bool covered = false;
    for (std::size_t f : front)
      if (dominates_or_ties(samples[f], cand)) {
        covered = true;
        break;
      }
    if (covered) continue;
    std::erase_if(front, [&](std::size_t f) { return dominates_or_ties(cand, samples[f]); });
    front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  std::vector<RegionSample> out;
  out.reserve(front.size());
  for (std::size_t f : front) out.push_back(samples[f]);
  return out;
}

std::vector<CurvePoint> upper_hull(std::vector<CurvePoint> points) {
  std::sort(points.begin(), points.end(), [](const CurvePoint& a, const CurvePoint& b) {
    if (a.distortion != b.distortion) return a.distortion < b.distortion;
    return a.sum_rate > b.sum_rate;
  });
  std::vector<CurvePoint> hull;
  for (const auto& p : points) {
    if (!hull.empty() && p.distortion == hull.back().distortion) continue;
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull.back();
      const double cross = (b.distortion - a.distortion) * (p.sum_rate - a.sum_rate) -
                           (b.sum_rate - a.sum_rate) * (p.distortion - a.distortion);
      if (cross >= 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }
  // Larger distortion never lowers the achievable rate.
  const auto top = std::max_element(hull.begin(), hull.end(), [](const auto& a, const auto& b) {
    return a.sum_rate < b.sum_rate;
  });
  if (top != hull.end()) hull.erase(top + 1, hull.end());
  return hull;
}

double evaluate_curve(const std::vector<CurvePoint>& curve, double distortion) {
  if (curve.empty() || distortion < curve.front().distortion) return -kInf;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    const auto& a = curve[i - 1];
    const auto& b = curve[i];
    if (distortion <= b.distortion) {
      const double w = (distortion - a.distortion) / (b.distortion - a.distortion);
      return a.sum_rate + w * (b.sum_rate - a.sum_rate);
    }
  }
  return curve.back().sum_rate;
}

double best_sum_rate(const std::vector<RegionSample>& samples, double distortion) {
  double best = -kInf;
  for (const auto& s : samples)
    if (s.d1 <= distortion) best = std::max(best, s.rsum);
  return best;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {a};
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(i == n - 1 ? b : a + (b - a) * i / (n - 1));
  return out;
}

}  // namespace isac
