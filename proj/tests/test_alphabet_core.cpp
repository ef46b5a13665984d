#include "isac/analytic_examples.hpp"
#include "isac/channel.hpp"
#include "isac/errors.hpp"
#include "isac/mc_verifier.hpp"
#include "isac/pmf.hpp"
#include "isac/rng.hpp"
#include "isac/spec_io.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <set>

using namespace isac;

namespace {

SdmcSpec small_spec() {
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(4, 4);
  joint.row(0) << 0.5, 0.5, 0, 0;
  joint.row(1) << 0.25, 0.25, 0.25, 0.25;
  joint.row(2) << 0, 0, 1, 0;
  joint.row(3) << 0.1, 0.2, 0.3, 0.4;
  return SdmcSpec::from_joint(Eigen::Vector2d(0.3, 0.7), joint, 2, 2, 2, Distortion::hamming(2));
}

std::string message_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const SpecError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("pmf helpers") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(entropy_bits(uniform_pmf(8)) == doctest::Approx(3.0));
  CHECK(is_pmf(point_mass(3, 2)));
  CHECK_FALSE(is_pmf(Eigen::Vector2d(0.6, 0.6)));
  CHECK_FALSE(is_pmf(Eigen::Vector2d(1.1, -0.1)));
  CHECK_THROWS_AS(check_pmf(Eigen::Vector2d(0.5, 0.49), "p"), SpecError);
}

TEST_CASE("simplex lattice enumeration") {
  for (int steps : {1, 4, 10})
    for (Index parts : {1, 2, 3, 4}) {
      std::set<std::vector<int>> seen;
      for_each_composition(steps, parts, [&](const Eigen::VectorXi& c) {
        CHECK(c.sum() == steps);
        CHECK(c.minCoeff() >= 0);
        seen.insert(std::vector<int>(c.data(), c.data() + c.size()));
      });
      CHECK(seen.size() == composition_count(steps, parts));
    }
  CHECK(composition_count(1000, 3) == 501501);
  const auto all = compositions(3, 2);
  REQUIRE(all.size() == 4);
  CHECK(all.front()[0] == 3);
  CHECK(all.back()[0] == 0);
}

TEST_CASE("rng streams are reproducible and distinct") {
  Rng a(7, 0), b(7, 0), c(7, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto va = a.next();
    CHECK(va == b.next());
    differs |= va != c.next();
  }
  CHECK(differs);
  Rng r(3);
  const Pmf p = r.simplex(5);
  CHECK(is_pmf(p));
  double mean = 0.0;
  for (int i = 0; i < 20000; ++i) mean += r.normal();
  CHECK(std::abs(mean / 20000) < 0.05);
}

TEST_CASE("validate accepts the paper examples") {
  CHECK_NOTHROW(validate(binary_multiplicative_spec(0.4)));
  CHECK_NOTHROW(validate(erasure_channel_spec(0.3)));
  CHECK_NOTHROW(validate(dueck_reduction_spec(0.75, 1)));
  CHECK_NOTHROW(validate(binary_bc_spec(0.6, 0.5)));
  CHECK_NOTHROW(validate(dueck_bc_spec(0.75)));
  CHECK_NOTHROW(validate(erasure_bc_spec(Eigen::Matrix2d::Constant(0.25), Eigen::Matrix2d::Constant(0.25))));
}

TEST_CASE("validate reports the violated invariant with coordinates") {
  SdmcSpec bad = small_spec();
  Eigen::MatrixXd joint = *bad.joint_law;
  joint.row(2) << 0, 0, 0.5, 0;  // row (x=1, s=0)
  bad = SdmcSpec::from_joint(bad.state_pmf, joint, 2, 2, 2, Distortion::hamming(2));
  const std::string msg = message_of([&] { validate(bad); });
  CHECK(msg.find("row not normalized") != std::string::npos);
  CHECK(msg.find("x=1,s=0") != std::string::npos);
  CHECK(msg.find("0.5") != std::string::npos);

  SdmcSpec neg = small_spec();
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
  d(0, 0) = -1;
  neg.distortion = Distortion(d);
  CHECK(message_of([&] { validate(neg); }).find("negative distortion") != std::string::npos);

  SdmcSpec cost = small_spec();
  cost.cost = Eigen::Vector2d(1.0, -0.5);
  CHECK(message_of([&] { validate(cost); }).find("negative cost") != std::string::npos);

  // Idempotent, no side effects.
  const SdmcSpec ok = small_spec();
  validate(ok);
  validate(ok);
  CHECK(dense(ok.law_y).isApprox(dense(small_spec().law_y)));
}

TEST_CASE("marginals") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const Eigen::MatrixXd py = dense(marginal_y_given_xs(b));
  for (Index x = 0; x < 2; ++x)
    for (Index s = 0; s < 2; ++s)
      for (Index y = 0; y < 2; ++y) CHECK(py(b.row(x, s), y) == (y == s * x ? 1.0 : 0.0));
  // Z = Y
  CHECK(dense(marginal_z_given_xs(b)).isApprox(py));
  CHECK(dense(b.law_z)(b.row(0, 0), 0) == 1.0);
  CHECK(dense(b.law_z)(b.row(0, 1), 0) == 1.0);

  // Z uniform and independent of Y leaves the Y-marginal unchanged.
  Eigen::MatrixXd joint(4, 6);
  Eigen::MatrixXd wy(4, 2);
  wy << 0.9, 0.1, 0.2, 0.8, 0.5, 0.5, 1.0, 0.0;
  for (Index r = 0; r < 4; ++r)
    for (Index y = 0; y < 2; ++y)
      for (Index z = 0; z < 3; ++z) joint(r, y * 3 + z) = wy(r, y) / 3.0;
  const SdmcSpec u = SdmcSpec::from_joint(Eigen::Vector2d(0.5, 0.5), joint, 2, 2, 3, Distortion::hamming(2));
  CHECK(dense(u.law_y).isApprox(wy, 1e-15));

  // Every derived row sums to one.
  Rng rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SdmcSpec r = random_spec(rng, 3, 2, 3, 2, 0.3);
    const Eigen::MatrixXd a = dense(r.law_y), c = dense(r.law_z);
    for (Index row = 0; row < a.rows(); ++row) {
      CHECK(std::abs(a.row(row).sum() - 1.0) < 1e-9);
      CHECK(std::abs(c.row(row).sum() - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("Dueck reduction marginal matches case enumeration") {
  const double q = 0.75;
  const SdmcSpec r = dueck_reduction_spec(q, 1);
  const Eigen::MatrixXd py = dense(r.law_y);
  // Enumerate (x1, x2, s1, s2, n) and accumulate directly.
  for (Index x1 = 0; x1 < 2; ++x1)
    for (Index x2 = 0; x2 < 2; ++x2)
      for (Index s1 = 0; s1 < 2; ++s1) {
        Eigen::Vector4d expect = Eigen::Vector4d::Zero();
        for (Index s2 = 0; s2 < 2; ++s2)
          for (Index n = 0; n < 2; ++n) {
            const Index y1 = s1 ? (x1 ^ n) : 0;
            const Index y2 = s2 ? (x2 ^ n) : 0;
            expect[y1 * 2 + y2] += (s2 ? q : 1 - q) * 0.5;
          }
        CHECK(py.row(r.row(x1 * 2 + x2, s1)).transpose().isApprox(expect, 1e-15));
      }
  // x = (0,0), s1 = 1: y1' = N; y2' = N when s2 = 1, else 0.
  CHECK(py.row(r.row(0, 1)).transpose().isApprox(Eigen::Vector4d(0.5, 0.0, 0.125, 0.375), 1e-15));
}

TEST_CASE("erasure BC feedback marginal matches enumeration over (E, S)") {
  Eigen::Matrix2d p1, p2;
  p1 << 0.5, 0.2, 0.12, 0.18;
  p2 << 0.4, 0.1, 0.3, 0.2;
  const SdmbcSpec bc = erasure_bc_spec(p1, p2);
  const SdmcSpec v1 = receiver_view(bc, 1);
  const Eigen::MatrixXd pz = dense(v1.law_z);
  const double ps1 = p1(0, 1) + p1(1, 1);
  for (Index x = 0; x < 2; ++x)
    for (Index s1 = 0; s1 < 2; ++s1) {
      Eigen::VectorXd expect = Eigen::VectorXd::Zero(9);
      const double p_s1 = s1 ? ps1 : 1 - ps1;
      for (Index e1 = 0; e1 < 2; ++e1)
        for (Index e2 = 0; e2 < 2; ++e2)
          for (Index s2 = 0; s2 < 2; ++s2) {
            const double w = p1(e1, s1) / p_s1 * p2(e2, s2);
            const Index z1 = e1 ? 2 : (s1 ? 2 : x);
            const Index z2 = e2 ? 2 : (s2 ? 2 : x);
            expect[z1 * 3 + z2] += w;
          }
      CHECK(pz.row(v1.row(x, s1)).transpose().isApprox(expect, 1e-14));
    }
}

TEST_CASE("merged view preserves total probability") {
  for (const SdmbcSpec& bc : {binary_bc_spec(0.6, 0.5), flipped_bc_spec(0.3, 0.2), dueck_bc_spec(0.75)}) {
    const SdmcSpec m = merged_view(bc);
    CHECK_NOTHROW(validate(m));
    CHECK(m.state_pmf.sum() == doctest::Approx(1.0));
    double total = 0.0;
    for (Index x = 0; x < m.input_size; ++x)
      for (Index s = 0; s < m.state_size; ++s) total += m.state_pmf[s] * m.joint_law->row(m.row(x, s)).sum();
    CHECK(total == doctest::Approx(m.input_size));
  }
}

TEST_CASE("spec JSON round trip and rejection") {
  const SdmcSpec b = binary_multiplicative_spec(0.4);
  const AnySpec back = parse_spec(to_json(b));
  REQUIRE(std::holds_alternative<SdmcSpec>(back));
  const SdmcSpec& c = std::get<SdmcSpec>(back);
  CHECK(dense(c.law_y).isApprox(dense(b.law_y)));
  CHECK(c.state_pmf.isApprox(b.state_pmf));

  GaussianQuantConfig g = GaussianQuantConfig::reduced();
  g.pam_points = 2;
  g.state_points = 20;
  const SdmcSpec gs = gaussian_quantized_spec(g);
  const SdmcSpec gb = std::get<SdmcSpec>(parse_spec(to_json(gs)));
  CHECK_FALSE(gb.joint_law.has_value());
  CHECK(gb.distortion.is_squared_error());
  CHECK((dense(gb.law_z) - dense(gs.law_z)).cwiseAbs().maxCoeff() < 1e-15);

  const SdmbcSpec bc = dueck_bc_spec(0.75);
  const SdmbcSpec bb = std::get<SdmbcSpec>(parse_spec(to_json(bc)));
  CHECK(bb.law.isApprox(bc.law));
  CHECK(bb.state_pmf.isApprox(bc.state_pmf));

  const std::string base = R"({"kind":"sdmc","sizes":{"input":1,"state":2,"output":1,"feedback":1},
    "state_pmf":[0.5,0.5],"law":[[[[1.0]],[[1.0]]]],"distortion":[[0,1],[1,0]])";
  CHECK_NOTHROW(parse_spec(base + "}"));
  CHECK_THROWS_AS(parse_spec(base + R"(,"colour":1})"), SpecError);
  CHECK_THROWS_AS(parse_spec("{not json"), SpecError);

  // Within 1e-6 of normalized: rescaled. Beyond: rejected.
  const std::string near = R"({"kind":"sdmc","sizes":{"input":1,"state":2,"output":2,"feedback":1},
    "state_pmf":[0.5,0.5000004],"law":[[[[0.3],[0.7]],[[0.2],[0.8000001]]]],"distortion":[[0,1],[1,0]]})";
  const SdmcSpec n = std::get<SdmcSpec>(parse_spec(near));
  CHECK(n.state_pmf.sum() == doctest::Approx(1.0).epsilon(1e-15));
  const std::string far = R"({"kind":"sdmc","sizes":{"input":1,"state":2,"output":2,"feedback":1},
    "state_pmf":[0.5,0.5],"law":[[[[0.3],[0.7]],[[0.2],[0.3]]]],"distortion":[[0,1],[1,0]]})";
  const std::string msg = message_of([&] { parse_spec(far); });
  CHECK(msg.find("x=0,s=1") != std::string::npos);
  CHECK(msg.find("row not normalized") != std::string::npos);

  const MappingTable psi = erasure_psi();
  const MappingTable back_psi = parse_mapping(to_json(psi));
  CHECK(back_psi.image == psi.image);
  CHECK(back_psi.codomain_size == 2);
  CHECK_THROWS_AS(parse_mapping(R"({"kind":"mapping","codomain_size":1,"image":[[0,1]]})"), SpecError);
}
