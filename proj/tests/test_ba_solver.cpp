#include "isac/analytic_examples.hpp"
#include "isac/ba_solver.hpp"
#include "isac/errors.hpp"
#include "isac/mc_verifier.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace isac;

TEST_CASE("conditional mutual information") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  for (double p : {0.0, 0.1, 0.3, 0.5, 0.9, 1.0}) {
    const Eigen::Vector2d px(1 - p, p);
    CHECK(conditional_mutual_information(b, px) == doctest::Approx(0.4 * oracle::h2(p)).epsilon(1e-12));
  }
  Rng rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 2, 3, 2, 0.3);
    const Pmf px = rng.simplex(3);
    const TradeoffSolver solver(s);
    CHECK(conditional_mutual_information(s, px) == doctest::Approx(oracle::cmi(s, px)).epsilon(1e-12));
    CHECK(solver.information(px) == doctest::Approx(oracle::cmi(s, px)).epsilon(1e-12));
  }
}

TEST_CASE("Q update is the Bayes posterior of X") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 2, 3, 2, 0.3);
    const Pmf px = rng.simplex(3);
    const QTable q = q_update(s, px);
    for (Index sidx = 0; sidx < 2; ++sidx)
      for (Index y = 0; y < 3; ++y) {
        const double ref0 = oracle::bayes_q(s, px, 0, y, sidx);
        if (std::isnan(ref0)) {
          CHECK_FALSE(q.used(y, sidx));
          continue;
        }
        double total = 0.0;
        for (Index x = 0; x < 3; ++x) {
          CHECK(q(s, x, y, sidx) == doctest::Approx(oracle::bayes_q(s, px, x, y, sidx)).epsilon(1e-12));
          total += q(s, x, y, sidx);
        }
        CHECK(total == doctest::Approx(1.0));
      }
  }
}

TEST_CASE("P update") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const EstimatorTable est = build_estimator(b);
  const QTable q = q_update(b, uniform_pmf(2));
  // Both inputs see Q = 1/2 under S = 0 and Q = 1 under S = 1, so only μ c(x)
  // separates them.
  const Pmf p0 = p_update(b, est, q, 0.0, 0.0);
  CHECK(p0.sum() == doctest::Approx(1.0));
  CHECK(p0[0] == doctest::Approx(0.5));
  const Pmf p1 = p_update(b, est, q, 1.0, 0.0);
  CHECK(p1[0] / p1[1] == doctest::Approx(std::exp2(-0.4)));

  // λ·b acts like μ·c.
  SdmcSpec costed = b;
  costed.cost = Eigen::Vector2d(1.0, 0.0);
  const Pmf pl = p_update(costed, est, q, 0.0, 0.4);
  CHECK(pl[0] == doctest::Approx(p1[0]));
}

TEST_CASE("fixed-mu solves on the binary channel") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  BaConfig cfg;
  const TradeoffPoint cap = solve_fixed_mu(b, cfg);
  CHECK(cap.converged);
  CHECK(cap.rate == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(cap.distortion == doctest::Approx(0.2).epsilon(1e-9));

  cfg.mu = 1e3;
  const TradeoffPoint sensing = solve_fixed_mu(b, cfg);
  CHECK(sensing.rate < 1e-6);
  CHECK(sensing.distortion < 1e-6);

  const TradeoffSolver solver(b);
  for (double d : {0.04, 0.1, 0.15}) {
    const TradeoffPoint at = solve_at_distortion(solver, d);
    CHECK(at.distortion == doctest::Approx(d).epsilon(1e-6));
    CHECK(at.rate == doctest::Approx(binary_multiplicative_cd(0.4, d)).epsilon(1e-5));
  }
  CHECK(solve_at_distortion(solver, 0.1).rate == doctest::Approx(0.3245).epsilon(1e-3));
  CHECK(solve_at_distortion(solver, 0.3).rate == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("objective is monotone along iterations") {
  Rng rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 3, 3, 3, 0.2);
    BaConfig cfg;
    cfg.mu = rng.uniform() * 3.0;
    cfg.record_trace = true;
    const TradeoffPoint r = solve_fixed_mu(s, cfg);
    for (std::size_t k = 1; k < r.objective_trace.size(); ++k)
      CHECK(r.objective_trace[k] >= r.objective_trace[k - 1] - 1e-10);
  }
}

TEST_CASE("swept frontier is concave and non-decreasing") {
  Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 2, 3, 2, 0.2);
    const TradeoffSolver solver(s);
    const auto pts = sweep_frontier(solver, auto_mu_grid());
    REQUIRE(pts.size() >= 2);
    CHECK(pts.front().distortion == doctest::Approx(min_distortion_point(solver, kInf).distortion).epsilon(1e-12));
    BaConfig cap;
    CHECK(pts.back().rate == doctest::Approx(solver.solve(cap).rate).epsilon(1e-9));
    for (std::size_t i = 1; i < pts.size(); ++i) {
      CHECK(pts[i].distortion >= pts[i - 1].distortion - 1e-12);
      CHECK(pts[i].rate >= pts[i - 1].rate - 1e-6);
    }
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      const double d0 = pts[i - 1].distortion, d1 = pts[i].distortion, d2 = pts[i + 1].distortion;
      if (d2 - d0 < 1e-9) continue;
      const double chord = pts[i - 1].rate + (pts[i + 1].rate - pts[i - 1].rate) * (d1 - d0) / (d2 - d0);
      CHECK(pts[i].rate >= chord - 1e-6);
    }
  }
}

TEST_CASE("sweep saturates at capacity and is thread-count independent") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const TradeoffSolver solver(b);
  SweepOptions opt;
  const auto seq = sweep_frontier(solver, auto_mu_grid(), opt);
  CHECK(seq.back().rate == doctest::Approx(0.4).epsilon(1e-9));
  CHECK(seq.front().distortion == 0.0);
  CHECK(seq.front().rate == 0.0);

  opt.warm_start = false;
  opt.threads = 1;
  const auto one = sweep_frontier(solver, auto_mu_grid(), opt);
  opt.threads = 4;
  const auto four = sweep_frontier(solver, auto_mu_grid(), opt);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].rate == four[i].rate);
    CHECK(one[i].distortion == four[i].distortion);
  }

  opt.anchors = false;
  const auto bare = sweep_frontier(solver, {0.0}, opt);
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].rate == doctest::Approx(0.4).epsilon(1e-9));
}

TEST_CASE("cost constraint") {
  // Sending x = 1 costs 1, so the budget caps P_X(1).
  SdmcSpec b = binary_multiplicative_spec(0.4);
  b.cost = Eigen::Vector2d(0.0, 1.0);
  const TradeoffSolver solver(b);
  for (double budget : {0.1, 0.3, 0.45}) {
    BaConfig cfg;
    cfg.budget = budget;
    const TradeoffPoint r = solver.solve(cfg);
    CHECK(r.cost <= budget + 1e-12);
    CHECK(r.cost == doctest::Approx(budget).epsilon(1e-9));
    CHECK(r.rate == doctest::Approx(0.4 * oracle::h2(budget)).epsilon(1e-8));
    CHECK(r.lambda > 0.0);
  }
  BaConfig loose;
  loose.budget = 0.9;
  const TradeoffPoint r = solver.solve(loose);
  CHECK(r.rate == doctest::Approx(0.4).epsilon(1e-9));

  // Equality cost constraint forces the spend.
  BaConfig eq;
  eq.budget = 0.8;
  eq.cost_equality = true;
  const TradeoffPoint e = solver.solve(eq);
  CHECK(e.cost == doctest::Approx(0.8).epsilon(1e-9));
  CHECK(e.rate == doctest::Approx(0.4 * oracle::h2(0.8)).epsilon(1e-8));

  SdmcSpec pricey = b;
  pricey.cost = Eigen::Vector2d(1.0, 2.0);
  BaConfig bad;
  bad.budget = 0.5;
  CHECK_THROWS_AS(solve_fixed_mu(pricey, bad), Infeasible);
  BaConfig neg;
  neg.mu = -1.0;
  CHECK_THROWS_AS(solve_fixed_mu(b, neg), SpecError);
}

TEST_CASE("cost-constrained solves agree with brute force") {
  Rng rng(99);
  for (int trial = 0; trial < 8; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 2, 2, 2, 0.1);
    const TradeoffSolver solver(s);
    const double cmax = solver.estimator().cost.maxCoeff();
    const double bmin = s.cost.minCoeff(), bmax = s.cost.maxCoeff();
    const double budget = bmin + 0.6 * (bmax - bmin);
    const double dlo = d_min(s, budget).distortion;
    const double d = dlo + 0.5 * (std::max(cmax, dlo) - dlo);
    const TradeoffPoint ba = solve_at_distortion(solver, d, budget);
    const BruteForceResult bf = brute_force_tradeoff(s, d, budget, 2e-3);
    CHECK(ba.cost <= budget + 1e-9);
    CHECK(ba.distortion <= d + 1e-9);
    CHECK(ba.rate >= bf.rate - 2e-3);
    CHECK(ba.rate <= bf.rate + 2e-3);
  }
}

TEST_CASE("minimum-distortion point") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const TradeoffSolver solver(b);
  const MinDistortionPoint md = min_distortion_point(solver, kInf);
  CHECK(md.distortion == 0.0);
  CHECK(md.rate == 0.0);
  CHECK(md.input_pmf.isApprox(point_mass(2, 1)));

  // Erasure channel: every input senses perfectly, so the minimum-distortion
  // face is the whole simplex and its rate is the capacity.
  const SdmcSpec e = erasure_channel_spec(0.3);
  const TradeoffSolver er(e);
  const MinDistortionPoint me = min_distortion_point(er, kInf);
  CHECK(me.distortion == 0.0);
  CHECK(me.rate == doctest::Approx(0.7).epsilon(1e-9));
}

TEST_CASE("baselines on the binary channel") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const Baselines bl = baseline_ts(TradeoffSolver(b));
  CHECK(std::abs(bl.basic_sensing[0]) < 1e-9);
  CHECK(std::abs(bl.basic_sensing[1]) < 1e-9);
  CHECK(std::abs(bl.basic_comm[0] - 0.4) < 1e-9);
  CHECK(std::abs(bl.basic_comm[1] - 0.4) < 1e-9);
  CHECK(std::abs(bl.improved_sensing[0]) < 1e-9);
  CHECK(std::abs(bl.improved_comm[0] - 0.4) < 1e-9);
  CHECK(std::abs(bl.improved_comm[1] - 0.2) < 1e-9);

  // No tradeoff: the improved segment is horizontal.
  const SdmcSpec e = erasure_channel_spec(0.3);
  const Baselines eb = baseline_ts(TradeoffSolver(e));
  CHECK(eb.improved_sensing[0] == doctest::Approx(eb.improved_comm[0]).epsilon(1e-9));
  CHECK(eb.improved_comm[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("no-tradeoff condition") {
  const SdmcSpec er = erasure_channel_spec(0.3);
  const NoTradeoffReport ok = no_tradeoff_check(er, erasure_psi(), default_trial_pmfs(2));
  CHECK(ok.pass);
  CHECK(ok.worst_deviation < 1e-12);
  CHECK(ok.trials.size() == 1 + 2 + 20);

  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const MappingTable ident = MappingTable::from_function(2, 2, [](Index, Index z) { return z; });
  const NoTradeoffReport bad = no_tradeoff_check(b, ident, default_trial_pmfs(2));
  CHECK_FALSE(bad.pass);
  CHECK(bad.worst_deviation > 1e-3);

  // A constant ψ needs S independent of (X, Z), which fails here too.
  const MappingTable flat = MappingTable::from_function(2, 2, [](Index, Index) { return 0; });
  CHECK_FALSE(no_tradeoff_check(b, flat, default_trial_pmfs(2)).pass);

  // With a deterministic state a constant ψ certifies.
  SdmcSpec det = b;
  det.state_pmf = Eigen::Vector2d(0, 1);
  CHECK(no_tradeoff_check(det, flat, default_trial_pmfs(2)).pass);
}
