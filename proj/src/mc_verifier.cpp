#include "isac/mc_verifier.hpp"

#include "isac/ba_solver.hpp"
#include "isac/errors.hpp"

#include <cmath>
#include <vector>

namespace isac {

namespace {

std::vector<double> cumulative(const Eigen::Ref<const Eigen::VectorXd>& p) {
  std::vector<double> cdf(static_cast<std::size_t>(p.size()));
  double acc = 0.0;
  for (Index i = 0; i < p.size(); ++i) cdf[static_cast<std::size_t>(i)] = acc += p[i];
  return cdf;
}

Index draw_from_row(const Kernel& k, Index row, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  Index last = -1;
  for (Kernel::InnerIterator it(k, row); it; ++it) {
    if (it.value() <= 0.0) continue;
    acc += it.value();
    last = it.col();
    if (u < acc) return last;
  }
  return last;
}

}  // namespace

TrialReport simulate_distortion(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x,
                                std::size_t n, std::uint64_t seed) {
  return simulate_distortion(spec, build_estimator(spec), p_x, n, seed);
}

TrialReport simulate_distortion(const SdmcSpec& spec, const EstimatorTable& est,
                                const Eigen::Ref<const Pmf>& p_x, std::size_t n,
                                std::uint64_t seed) {
  if (n < 1) throw SpecError("sample count must be at least 1");
  check_pmf(p_x, "input pmf");
  const std::vector<double> cdf_s = cumulative(spec.state_pmf);
  const std::vector<double> cdf_x = cumulative(p_x);
  Rng rng(seed);

  // Welford running mean and variance
  double mean = 0.0, m2 = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const Index s = rng.categorical(cdf_s);
    const Index x = rng.categorical(cdf_x);
    const Index z = draw_from_row(spec.law_z, spec.row(x, s), rng);
    const double d = spec.distortion(s, est.table(x, z));
    const double delta = d - mean;
    mean += delta / static_cast<double>(i);
    m2 += delta * (d - mean);
  }

  TrialReport r;
  r.n_samples = n;
  r.empirical_value = mean;
  r.analytic_value = expected_distortion(est, p_x);
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  r.std_error = std::sqrt(var / static_cast<double>(n));
  const double diff = r.empirical_value - r.analytic_value;
  if (r.std_error > 0.0)
    r.z_score = diff / r.std_error;
  else
    r.z_score = std::abs(diff) <= 1e-12 ? 0.0 : std::copysign(kInf, diff);
  r.pass = std::abs(r.z_score) <= 4.0;
  return r;
}

BruteForceResult brute_force_tradeoff(const SdmcSpec& spec, double distortion, double budget,
                                      double grid_step) {
  if (spec.input_size > 4) throw InstanceTooLarge("brute force needs |X| <= 4");
  if (!(grid_step > 0.0 && grid_step <= 0.5)) throw SpecError("grid_step must lie in (0, 0.5]");
  const int steps = static_cast<int>(std::lround(1.0 / grid_step));
  const EstimatorTable est = build_estimator(spec);
  const Eigen::VectorXd b = spec.cost.size() ? spec.cost : Eigen::VectorXd::Zero(spec.input_size);
  constexpr double slack = 1e-12;

  BruteForceResult best;
  best.rate = -kInf;
  Pmf p(spec.input_size);
  for_each_composition(steps, spec.input_size, [&](const Eigen::VectorXi& counts) {
    ++best.lattice_points;
    p = counts.cast<double>() / steps;
    if (est.cost.dot(p) > distortion + slack || b.dot(p) > budget + slack) return;
    ++best.feasible_points;
    const double rate = conditional_mutual_information(spec, p);
    if (rate > best.rate) {
      best.rate = rate;
      best.input_pmf = p;
    }
  });
  if (best.feasible_points == 0) throw Infeasible("no lattice point satisfies the constraints");
  return best;
}

ExhaustiveResult exhaustive_estimator_search(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x) {
  const Index nx = spec.input_size, nz = spec.feedback_size, ne = spec.estimate_size;
  const Index cells = nx * nz;
  double count = std::pow(static_cast<double>(ne), static_cast<double>(cells));
  if (count > 1e6) throw InstanceTooLarge("more than 10^6 estimator tables");

  // contrib(x * nz + z, ŝ) = P_X(x) Σ_s P_S(s) P(z|x,s) d(s, ŝ)
  Eigen::MatrixXd contrib = Eigen::MatrixXd::Zero(cells, ne);
  for (Index x = 0; x < nx; ++x)
    for (Index s = 0; s < spec.state_size; ++s)
      for (Kernel::InnerIterator it(spec.law_z, spec.row(x, s)); it; ++it)
        for (Index e = 0; e < ne; ++e)
          contrib(x * nz + it.col(), e) += p_x[x] * spec.state_pmf[s] * it.value() * spec.distortion(s, e);

  ExhaustiveResult best;
  best.distortion = kInf;
  std::vector<int> digits(static_cast<std::size_t>(cells), 0);
  while (true) {
    ++best.tables;
    double total = 0.0;
    for (Index c = 0; c < cells; ++c) total += contrib(c, digits[static_cast<std::size_t>(c)]);
    if (total < best.distortion) {
      best.distortion = total;
      best.table.resize(nx, nz);
      for (Index c = 0; c < cells; ++c) best.table(c / nz, c % nz) = digits[static_cast<std::size_t>(c)];
    }
    Index pos = 0;
    while (pos < cells && ++digits[static_cast<std::size_t>(pos)] == ne) digits[static_cast<std::size_t>(pos++)] = 0;
    if (pos == cells) break;
  }
  return best;
}

SdmcSpec random_spec(Rng& rng, Index input_size, Index state_size, Index output_size,
                     Index feedback_size, double zero_fraction) {
  const Index cols = output_size * feedback_size;
  Eigen::MatrixXd joint(input_size * state_size, cols);
  for (Index r = 0; r < joint.rows(); ++r) {
    Pmf row = rng.simplex(cols);
    if (zero_fraction > 0.0) {
      for (Index c = 0; c < cols; ++c)
        if (rng.uniform() < zero_fraction) row[c] = 0.0;
      if (row.sum() <= 0.0) row[static_cast<Index>(rng.next() % static_cast<std::uint64_t>(cols))] = 1.0;
      row /= row.sum();
    }
    joint.row(r) = row.transpose();
  }
  Pmf p_s = rng.simplex(state_size);
  Eigen::MatrixXd d(state_size, state_size);
  for (Index i = 0; i < d.size(); ++i) d.data()[i] = rng.uniform();
  Eigen::VectorXd cost(input_size);
  for (Index x = 0; x < input_size; ++x) cost[x] = rng.uniform();
  return SdmcSpec::from_joint(std::move(p_s), std::move(joint), input_size, output_size,
                              feedback_size, Distortion(std::move(d)), std::move(cost));
}

}  // namespace isac
