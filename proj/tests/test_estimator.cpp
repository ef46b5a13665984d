#include "isac/analytic_examples.hpp"
#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/mc_verifier.hpp"

#include "oracles.hpp"

#include <doctest.h>

using namespace isac;

TEST_CASE("posterior on the binary multiplicative channel") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  CHECK(posterior_state(b, 1, 1).isApprox(Eigen::Vector2d(0, 1)));
  CHECK(posterior_state(b, 0, 0).isApprox(Eigen::Vector2d(0.6, 0.4)));
  CHECK(posterior_state(b, 1, 0).isApprox(Eigen::Vector2d(1, 0)));
  CHECK_THROWS_AS(posterior_state(b, 0, 1), ZeroProbabilityObservation);
}

TEST_CASE("posterior matches Bayes on random channels") {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const SdmcSpec s = random_spec(rng, 3, 3, 2, 3, 0.3);
    for (Index x = 0; x < 3; ++x)
      for (Index z = 0; z < 3; ++z) {
        const std::vector<double> ref = oracle::posterior(s, x, z);
        if (ref.empty()) {
          CHECK_THROWS_AS(posterior_state(s, x, z), ZeroProbabilityObservation);
          continue;
        }
        const Pmf p = posterior_state(s, x, z);
        for (Index k = 0; k < 3; ++k) CHECK(p[k] == doctest::Approx(ref[static_cast<std::size_t>(k)]).epsilon(1e-12));
      }
  }
}

TEST_CASE("binary channel estimator and costs") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const EstimatorTable est = build_estimator(b);
  CHECK(est.table(1, 0) == 0);
  CHECK(est.table(1, 1) == 1);
  CHECK(est.table(0, 0) == 0);  // argmax of the prior (0.6, 0.4)
  CHECK(est.cost[1] == 0.0);
  CHECK(est.cost[0] == doctest::Approx(0.4));
  for (double p : {0.0, 0.25, 0.5, 1.0})
    CHECK(expected_distortion(est, Eigen::Vector2d(p, 1 - p)) == doctest::Approx(0.4 * p));

  // q > 1/2 flips the blind estimate.
  const EstimatorTable e7 = build_estimator(binary_multiplicative_spec(0.7));
  CHECK(e7.table(0, 0) == 1);
  CHECK(e7.cost[0] == doctest::Approx(0.3));
}

TEST_CASE("ties go to the lowest estimate index") {
  const EstimatorTable est = build_estimator(binary_multiplicative_spec(0.5));
  CHECK(est.table(0, 0) == 0);
  CHECK(est.cost[0] == doctest::Approx(0.5));
}

TEST_CASE("estimator optimality and triple-sum identity on random channels") {
  Rng rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const Index nx = 1 + static_cast<Index>(rng.next() % 3), nz = 1 + static_cast<Index>(rng.next() % 3);
    const SdmcSpec s = random_spec(rng, nx, 1 + static_cast<Index>(rng.next() % 3), 2, nz, 0.25);
    const EstimatorTable est = build_estimator(s);
    const double max_d = s.distortion.max_value();
    CHECK(est.cost.minCoeff() >= 0.0);
    CHECK(est.cost.maxCoeff() <= max_d + 1e-12);
    for (const Pmf& p : {uniform_pmf(nx), Pmf(rng.simplex(nx)), point_mass(nx, 0)}) {
      const ExhaustiveResult ex = exhaustive_estimator_search(s, p);
      CHECK(expected_distortion(est, p) <= ex.distortion + 1e-12);
      CHECK(expected_distortion(est, p) == doctest::Approx(oracle::triple_sum(s, est.table, p)).epsilon(1e-12));
      CHECK(table_distortion(s, est.table, p) == doctest::Approx(expected_distortion(est, p)).epsilon(1e-12));
    }
  }
}

TEST_CASE("squared-error path agrees with the dense table path") {
  Rng rng(9);
  for (int trial = 0; trial < 10; ++trial) {
    SdmcSpec s = random_spec(rng, 2, 3, 2, 3, 0.2);
    SquaredError sq{Eigen::Vector3d(-1.0, 0.5, 2.0), Eigen::Vector4d(-1.0, 0.0, 0.5, 2.0)};
    Eigen::MatrixXd table(3, 4);
    for (Index i = 0; i < 3; ++i)
      for (Index j = 0; j < 4; ++j) table(i, j) = std::pow(sq.state_values[i] - sq.estimate_values[j], 2);
    s.estimate_size = 4;
    s.distortion = Distortion(sq);
    const EstimatorTable a = build_estimator(s);
    const double trivial_a = d_trivial(s);
    s.distortion = Distortion(table);
    const EstimatorTable b = build_estimator(s);
    CHECK(a.table == b.table);
    CHECK((a.cost - b.cost).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(trivial_a == doctest::Approx(d_trivial(s)).epsilon(1e-12));
  }
}

TEST_CASE("d_min") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const DminResult r = d_min(b, kInf);
  CHECK(r.distortion == 0.0);
  CHECK(r.input_pmf.isApprox(point_mass(2, 1)));

  const DminResult flat = d_min(Eigen::Vector3d::Constant(0.7), Eigen::Vector3d(0, 1, 2), 5);
  CHECK(flat.distortion == doctest::Approx(0.7));

  // c = (0.3, 0.1, 0.5), b = (2, 5, 0), B = 3: enumerate every ≤ 2-point support.
  const Eigen::Vector3d c(0.3, 0.1, 0.5), bb(2, 5, 0);
  const DminResult lp = d_min(c, bb, 3);
  double best = kInf;
  for (Index i = 0; i < 3; ++i)
    for (Index j = 0; j < 3; ++j)
      for (int k = 0; k <= 10000; ++k) {
        const double t = k / 10000.0;
        if ((1 - t) * bb[i] + t * bb[j] <= 3 + 1e-12) best = std::min(best, (1 - t) * c[i] + t * c[j]);
      }
  CHECK(lp.distortion == doctest::Approx(best).epsilon(1e-4));
  CHECK(lp.distortion <= best + 1e-12);
  CHECK(lp.distortion == doctest::Approx(0.7 / 3.0));  // 2/3 on x=0, 1/3 on x=1
  CHECK(c.dot(lp.input_pmf) == doctest::Approx(lp.distortion));
  CHECK(bb.dot(lp.input_pmf) <= 3 + 1e-12);
  CHECK_THROWS_AS(d_min(c, Eigen::Vector3d(1, 2, 3), 0.5), Infeasible);

  // Non-increasing in B, d_min(∞) = min c.
  double prev = kInf;
  for (double budget : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0}) {
    const double v = d_min(c, bb, budget).distortion;
    CHECK(v <= prev + 1e-15);
    prev = v;
  }
  CHECK(d_min(c, bb, kInf).distortion == doctest::Approx(0.1));
}

TEST_CASE("d_trivial") {
  CHECK(d_trivial(binary_multiplicative_spec(0.4)) == doctest::Approx(0.4));
  CHECK(d_trivial(binary_multiplicative_spec(0.5)) == doctest::Approx(0.5));
  SdmcSpec det = binary_multiplicative_spec(0.4);
  det.state_pmf = Eigen::Vector2d(0, 1);
  CHECK(d_trivial(det) == 0.0);
  const SdmbcSpec dueck = dueck_bc_spec(0.75);
  CHECK(d_trivial(receiver_view(dueck, 1)) == doctest::Approx(0.25));
  CHECK(d_trivial(receiver_view(dueck, 2)) == doctest::Approx(0.25));
}

TEST_CASE("Dueck reduction estimator follows the five-case rule") {
  // q = 3/4; x = (x1, x2), z = (y1', y2').
  const double q = 0.75;
  const SdmcSpec r = dueck_reduction_spec(q, 1);
  const EstimatorTable est = build_estimator(r);
  for (Index x1 = 0; x1 < 2; ++x1)
    for (Index x2 = 0; x2 < 2; ++x2)
      for (Index y1 = 0; y1 < 2; ++y1)
        for (Index y2 = 0; y2 < 2; ++y2) {
          const Index x = x1 * 2 + x2, z = y1 * 2 + y2;
          // Direct case analysis over (s1, s2, n).
          double w0 = 0.0, w1 = 0.0;
          for (Index s1 = 0; s1 < 2; ++s1)
            for (Index s2 = 0; s2 < 2; ++s2)
              for (Index n = 0; n < 2; ++n) {
                const Index a = s1 ? (x1 ^ n) : 0, b = s2 ? (x2 ^ n) : 0;
                if (a != y1 || b != y2) continue;
                const double w = (s1 ? q : 1 - q) * (s2 ? q : 1 - q) * 0.5;
                (s1 ? w1 : w0) += w;
              }
          if (w0 + w1 == 0.0) continue;
          CHECK(est.table(x, z) == (w1 > w0 ? 1 : 0));
        }
  // Spot values: a 1 at receiver 1 reveals S1 = 1.
  CHECK(est.table(0, 2) == 1);
  CHECK(est.table(0, 3) == 1);
  // x1 = x2 and z = (0, 1): N = 1 and y1' = 0 forces S1 = 0.
  CHECK(est.table(0, 1) == 0);
  // x1 ≠ x2 and z = (0, 1): x2 = 1, N = 0, so y1' = x1 = 0 is uninformative: prior wins.
  CHECK(est.table(1, 1) == 1);
}

TEST_CASE("broadcast estimators") {
  const auto [e1, e2] = build_bc_estimators(binary_bc_spec(0.6, 0.5));
  // x = 1: ŝ_k = y_k, with z = y1 * 2 + y2.
  for (Index z = 0; z < 4; ++z) {
    if (z == 1) continue;  // (y1, y2) = (0, 1) has probability zero
    CHECK(e1.table(1, z) == z / 2);
    CHECK(e2.table(1, z) == z % 2);
  }
  CHECK(e1.cost[1] == 0.0);
  CHECK(e2.cost[1] == 0.0);
  CHECK(e1.cost[0] == doctest::Approx(0.4));
  CHECK(e2.cost[0] == doctest::Approx(0.3));

  // Flipped BC: (x, y2) = (0, 1) reveals S2 = 1, hence S1 = 1.
  const auto [f1, f2] = build_bc_estimators(flipped_bc_spec(0.6, 0.5));
  CHECK(f1.table(0, 1) == 1);
  CHECK(f1.table(1, 2) == 1);
  CHECK(f1.table(1, 0) == 0);

  // S2 deterministic: c_2 ≡ 0.
  SdmbcSpec det = binary_bc_spec(0.6, 0.5);
  det.state_pmf << 0.4, 0.0, 0.6, 0.0;
  const auto [d1, d2] = build_bc_estimators(det);
  CHECK(d2.cost.cwiseAbs().maxCoeff() == 0.0);
}
