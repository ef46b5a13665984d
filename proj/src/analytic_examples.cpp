#include "isac/analytic_examples.hpp"

#include "isac/errors.hpp"
#include "isac/rng.hpp"

#include <cmath>
#include <numbers>

namespace isac {

namespace {

void check_probability(double v, const char* name, bool open = false) {
  const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
  if (!ok) throw SpecError(std::string(name) + (open ? " must lie in (0, 1)" : " must lie in [0, 1]"));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// P(χ²₁ ≤ x)
double chi2_1_cdf(double x) { return x <= 0.0 ? 0.0 : std::erf(std::sqrt(0.5 * x)); }

// Probabilities of the cells of a centered grid of `points` values spaced
// `step` apart (in units of sigma), tails folded into the edge cells.
Eigen::VectorXd gaussian_cells(Index points, double step, double sigma) {
  Eigen::VectorXd p(points);
  if (points == 1) {
    p[0] = 1.0;
    return p;
  }
  const double center = 0.5 * static_cast<double>(points - 1);
  double prev = 0.0;
  for (Index j = 0; j < points; ++j) {
    const double upper = j == points - 1 ? 1.0 : normal_cdf((j - center + 0.5) * step / sigma);
    p[j] = upper - prev;
    prev = upper;
  }
  return p;
}

// Nearest integer with exact half-way cases rounded down.
long snap(double u) { return static_cast<long>(std::ceil(u - 0.5)); }

double softplus2(double v) {
  const double nats = v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v));
  return nats / std::numbers::ln2;
}

}  // namespace

SdmcSpec binary_multiplicative_spec(double q) {
  check_probability(q, "q", true);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(4, 4);
  for (Index x = 0; x < 2; ++x)
    for (Index s = 0; s < 2; ++s) {
      const Index y = s * x;
      joint(x * 2 + s, y * 2 + y) = 1.0;
    }
  SdmcSpec spec = SdmcSpec::from_joint(Eigen::Vector2d(1.0 - q, q), std::move(joint), 2, 2, 2,
                                       Distortion::hamming(2));
  spec.labels["input"] = {"0", "1"};
  spec.labels["state"] = {"0", "1"};
  return spec;
}

double binary_multiplicative_cd(double q, double distortion) {
  check_probability(q, "q");
  if (distortion < 0.0) throw SpecError("distortion must be non-negative");
  const double m = std::min(q, 1.0 - q);
  const double p = m > 0.0 ? std::min(distortion / m, 0.5) : 0.5;
  return q * binary_entropy(p);
}

SdmcSpec erasure_channel_spec(double p) {
  check_probability(p, "p");
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(4, 9);
  for (Index x = 0; x < 2; ++x)
    for (Index s = 0; s < 2; ++s) {
      const Index y = s == 1 ? 2 : x;
      joint(x * 2 + s, y * 3 + y) = 1.0;
    }
  SdmcSpec spec = SdmcSpec::from_joint(Eigen::Vector2d(1.0 - p, p), std::move(joint), 2, 3, 3,
                                       Distortion::hamming(2));
  spec.labels["output"] = {"0", "1", "?"};
  spec.labels["feedback"] = {"0", "1", "?"};
  return spec;
}

MappingTable erasure_psi() {
  return MappingTable::from_function(2, 3, [](Index, Index z) { return z == 2 ? 1 : 0; });
}

void validate(const GaussianQuantConfig& cfg) {
  if (cfg.pam_points < 2 || cfg.noise_points < 2 || cfg.state_points < 2)
    throw SpecError("quantizer point counts must be at least 2");
  if (!(cfg.power > 0.0)) throw SpecError("power must be positive");
  if (!(cfg.feedback_variance >= 0.0)) throw SpecError("feedback variance must be non-negative");
  if (!(cfg.noise_halfwidth > 0.0)) throw SpecError("noise half-width must be positive");
  if (!(cfg.state_tail > 0.0 && cfg.state_tail < 1.0)) throw SpecError("state tail must lie in (0, 1)");
}

SdmcSpec gaussian_quantized_spec(const GaussianQuantConfig& cfg) {
  validate(cfg);
  const Index nx = cfg.pam_points;
  const Index nn = cfg.noise_points;
  const Index cells = cfg.state_points;
  const Index ns = 2 * cells;

  const double h = 2.0 * cfg.noise_halfwidth / static_cast<double>(nn - 1);
  const double sigma_fb = std::sqrt(cfg.feedback_variance);
  const long kfb = sigma_fb > 0.0 ? static_cast<long>(std::floor(cfg.noise_halfwidth * sigma_fb / h)) : 0;
  const Index nfb = 2 * kfb + 1;

  const double nnz = static_cast<double>(nx) * ns * (2.0 * nn + nfb - 1);
  if (nnz > 1e8) throw InstanceTooLarge("quantized Gaussian law would hold more than 1e8 entries");

  // Inputs
  const double kappa = std::sqrt(3.0 * cfg.power / static_cast<double>(nx * nx - 1));
  Eigen::VectorXd x_vals(nx);
  for (Index m = 1; m <= nx; ++m) x_vals[m - 1] = static_cast<double>(2 * m - 1 - nx) * kappa;

  // States: S² on [0, s²_max] in equal cells, ± square roots of midpoints
  double lo = 0.0, hi = 1.0;
  while (1.0 - chi2_1_cdf(hi) >= cfg.state_tail) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - chi2_1_cdf(mid) >= cfg.state_tail ? lo : hi) = mid;
  }
  const double s2_max = hi;
  const double width = s2_max / static_cast<double>(cells);
  Eigen::VectorXd s_vals(ns), p_s(ns);
  double prev = 0.0;
  for (Index i = 0; i < cells; ++i) {
    const double upper = i == cells - 1 ? 1.0 : chi2_1_cdf((i + 1) * width);
    const double mass = upper - prev;
    prev = upper;
    const double rep = std::sqrt((i + 0.5) * width);
    s_vals[cells - 1 - i] = -rep;
    s_vals[cells + i] = rep;
    p_s[cells - 1 - i] = 0.5 * mass;
    p_s[cells + i] = 0.5 * mass;
  }

  // Noise cells and the feedback convolution on the same lattice
  const Eigen::VectorXd p_n = gaussian_cells(nn, h, 1.0);
  const Eigen::VectorXd p_fb = gaussian_cells(nfb, 1.0, sigma_fb > 0.0 ? sigma_fb / h : 1.0);
  Eigen::VectorXd p_nz = Eigen::VectorXd::Zero(nn + nfb - 1);
  for (Index j = 0; j < nn; ++j)
    for (Index k = 0; k < nfb; ++k) p_nz[j + k] += p_n[j] * p_fb[k];

  // Output index t ↔ value (t − (nn − 1)/2) h
  std::vector<long> shift(static_cast<std::size_t>(nx * ns));
  long r_min = 0, r_max = 0;
  for (Index x = 0; x < nx; ++x)
    for (Index s = 0; s < ns; ++s) {
      const long r = snap(s_vals[s] * x_vals[x] / h);
      shift[static_cast<std::size_t>(x * ns + s)] = r;
      if (x == 0 && s == 0) r_min = r_max = r;
      r_min = std::min(r_min, r);
      r_max = std::max(r_max, r);
    }
  const Index ny = static_cast<Index>(r_max - r_min) + nn;
  const Index nz = ny + nfb - 1;

  Kernel law_y(nx * ns, ny), law_z(nx * ns, nz);
  law_y.reserve(nx * ns * nn);
  law_z.reserve(nx * ns * p_nz.size());
  for (Index row = 0; row < nx * ns; ++row) {
    const Index base = static_cast<Index>(shift[static_cast<std::size_t>(row)] - r_min);
    law_y.startVec(row);
    for (Index j = 0; j < nn; ++j) law_y.insertBack(row, base + j) = p_n[j];
    law_z.startVec(row);
    // z index = y index + (k + kfb) with the feedback offset k ∈ [−kfb, kfb]
    for (Index j = 0; j < p_nz.size(); ++j) law_z.insertBack(row, base + j) = p_nz[j];
  }
  law_y.finalize();
  law_z.finalize();

  SquaredError sq{s_vals, s_vals};
  Eigen::VectorXd cost = x_vals.array().square();
  SdmcSpec spec = SdmcSpec::from_marginals(std::move(p_s), std::move(law_y), std::move(law_z), nx,
                                           Distortion(std::move(sq)), std::move(cost));
  std::vector<std::string> xl;
  for (Index x = 0; x < nx; ++x) xl.push_back(std::to_string(x_vals[x]));
  spec.labels["input"] = std::move(xl);
  return spec;
}

GaussianAnchors gaussian_analytic_anchors(double power, double feedback_variance,
                                          std::size_t mc_samples, std::uint64_t seed) {
  if (!(power >= 0.0) || !(feedback_variance >= 0.0)) throw SpecError("invalid Gaussian parameters");
  if (mc_samples < 1) throw SpecError("need at least one Monte-Carlo sample");
  GaussianAnchors a;
  const double v = 1.0 + feedback_variance;
  Rng rng_s(seed, 0), rng_x(seed, 1);
  double c_acc = 0.0, d_acc = 0.0;
  for (std::size_t i = 0; i < mc_samples; ++i) {
    const double s = rng_s.normal();
    c_acc += 0.5 * std::log2(1.0 + s * s * power);
    const double x = std::sqrt(power) * rng_x.normal();
    d_acc += v / (v + x * x);
  }
  a.capacity_no_estimation = c_acc / static_cast<double>(mc_samples);
  a.d_max = d_acc / static_cast<double>(mc_samples);
  a.d_min = v / (v + power);

  // I(X;Y|S) for equiprobable ±√P: E_S[1 − E_N log2(1 + exp(−2a(a + N)))], a = |S|√P
  const int grid = 2001;
  const double span = 10.0;
  const double step = 2.0 * span / (grid - 1);
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double outer = 0.0, outer_w = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double s = -span + i * step;
    const double ws = std::exp(-0.5 * s * s) * norm * (i == 0 || i == grid - 1 ? 0.5 : 1.0);
    const double amp = std::abs(s) * std::sqrt(power);
    double inner = 0.0, inner_w = 0.0;
    for (int j = 0; j < grid; ++j) {
      const double n = -span + j * step;
      const double wn = std::exp(-0.5 * n * n) * norm * (j == 0 || j == grid - 1 ? 0.5 : 1.0);
      inner += wn * softplus2(-2.0 * amp * (amp + n));
      inner_w += wn;
    }
    outer += ws * (1.0 - inner / inner_w);
    outer_w += ws;
  }
  a.r_min = outer / outer_w;
  return a;
}

Eigen::MatrixXd degraded_state_pmf(double q, double gamma) {
  check_probability(q, "q");
  check_probability(gamma, "gamma");
  Eigen::MatrixXd p(2, 2);
  p << 1.0 - q, 0.0, q * (1.0 - gamma), q * gamma;
  return p;
}

namespace {

SdmbcSpec binary_family_spec(double q, double gamma, bool flipped) {
  SdmbcSpec bc;
  bc.input_size = 2;
  bc.state1_size = bc.state2_size = 2;
  bc.output1_size = bc.output2_size = 2;
  bc.feedback_size = 4;
  bc.state_pmf = degraded_state_pmf(q, gamma);
  bc.law = Eigen::MatrixXd::Zero(8, 16);
  for (Index s1 = 0; s1 < 2; ++s1)
    for (Index s2 = 0; s2 < 2; ++s2)
      for (Index x = 0; x < 2; ++x) {
        const Index y1 = s1 * x;
        const Index y2 = s2 * (flipped ? 1 - x : x);
        bc.law(bc.row(s1, s2, x), bc.col(y1, y2, y1 * 2 + y2)) = 1.0;
      }
  bc.distortion1 = bc.distortion2 = Distortion::hamming(2).table();
  return bc;
}

}  // namespace

SdmbcSpec binary_bc_spec(double q, double gamma) { return binary_family_spec(q, gamma, false); }
SdmbcSpec flipped_bc_spec(double q, double gamma) { return binary_family_spec(q, gamma, true); }

SdmbcSpec erasure_bc_spec(const Eigen::Matrix2d& p_e1s1, const Eigen::Matrix2d& p_e2s2) {
  check_pmf(p_e1s1.reshaped(), "P_E1S1");
  check_pmf(p_e2s2.reshaped(), "P_E2S2");
  const Eigen::Vector2d ps1 = p_e1s1.colwise().sum().transpose();
  const Eigen::Vector2d ps2 = p_e2s2.colwise().sum().transpose();
  // P(e | s), uniform where P(s) = 0
  auto given = [](const Eigen::Matrix2d& p, const Eigen::Vector2d& ps, Index e, Index s) {
    return ps[s] > 0.0 ? p(e, s) / ps[s] : 0.5;
  };

  SdmbcSpec bc;
  bc.input_size = 2;
  bc.state1_size = bc.state2_size = 2;
  bc.output1_size = bc.output2_size = 3;
  bc.feedback_size = 9;
  bc.state_pmf = ps1 * ps2.transpose();
  bc.law = Eigen::MatrixXd::Zero(8, 81);
  for (Index s1 = 0; s1 < 2; ++s1)
    for (Index s2 = 0; s2 < 2; ++s2)
      for (Index x = 0; x < 2; ++x) {
        const Index y1 = s1 == 0 ? x : 2;
        const Index y2 = s2 == 0 ? x : 2;
        for (Index e1 = 0; e1 < 2; ++e1)
          for (Index e2 = 0; e2 < 2; ++e2) {
            const double w = given(p_e1s1, ps1, e1, s1) * given(p_e2s2, ps2, e2, s2);
            const Index z1 = e1 == 0 ? y1 : 2;
            const Index z2 = e2 == 0 ? y2 : 2;
            bc.law(bc.row(s1, s2, x), bc.col(y1, y2, z1 * 3 + z2)) += w;
          }
      }
  bc.distortion1 = bc.distortion2 = Distortion::hamming(2).table();
  return bc;
}

MappingTable erasure_bc_psi(int receiver) {
  if (receiver != 1 && receiver != 2) throw SpecError("receiver must be 1 or 2");
  return MappingTable::from_function(2, 9, [receiver](Index, Index z) -> Index {
    const Index zk = receiver == 1 ? z / 3 : z % 3;
    return zk == 2 ? 1 : 0;
  });
}

SdmbcSpec dueck_bc_spec(double q) {
  check_probability(q, "q");
  SdmbcSpec bc;
  bc.input_size = 8;
  bc.state1_size = bc.state2_size = 2;
  bc.output1_size = bc.output2_size = 4;
  bc.feedback_size = 4;
  const Eigen::Vector2d ps(1.0 - q, q);
  bc.state_pmf = ps * ps.transpose();
  bc.law = Eigen::MatrixXd::Zero(32, 64);
  for (Index s1 = 0; s1 < 2; ++s1)
    for (Index s2 = 0; s2 < 2; ++s2)
      for (Index x = 0; x < 8; ++x) {
        const Index x0 = x / 4, x1 = (x / 2) % 2, x2 = x % 2;
        for (Index n = 0; n < 2; ++n) {
          const Index y1p = s1 * (x1 ^ n);
          const Index y2p = s2 * (x2 ^ n);
          bc.law(bc.row(s1, s2, x), bc.col(x0 * 2 + y1p, x0 * 2 + y2p, y1p * 2 + y2p)) += 0.5;
        }
      }
  bc.distortion1 = bc.distortion2 = Distortion::hamming(2).table();
  return bc;
}

SdmcSpec dueck_reduction_spec(double q, int receiver) {
  check_probability(q, "q");
  if (receiver != 1 && receiver != 2) throw SpecError("receiver must be 1 or 2");
  const Eigen::Vector2d ps(1.0 - q, q);
  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(8, 16);
  for (Index x = 0; x < 4; ++x) {
    const Index x1 = x / 2, x2 = x % 2;
    for (Index sk = 0; sk < 2; ++sk)
      for (Index so = 0; so < 2; ++so)
        for (Index n = 0; n < 2; ++n) {
          const Index s1 = receiver == 1 ? sk : so;
          const Index s2 = receiver == 1 ? so : sk;
          const Index y = (s1 * (x1 ^ n)) * 2 + s2 * (x2 ^ n);
          joint(x * 2 + sk, y * 4 + y) += ps[so] * 0.5;
        }
  }
  return SdmcSpec::from_joint(ps, std::move(joint), 4, 4, 4, Distortion::hamming(2));
}

double dueck_t(const Eigen::Ref<const Pmf>& p_x) {
  if (p_x.size() != 4) throw SpecError("expected a pmf over (x1, x2)");
  return p_x[1] + p_x[2];
}

}  // namespace isac
