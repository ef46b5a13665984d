#include "isac/estimator.hpp"

#include "isac/errors.hpp"

#include <string>

namespace isac {

namespace {

constexpr double kTieTolerance = 1e-12;

// Lowest index whose score is within the relative tie tolerance of the minimum.
Index pick_min(const Eigen::Ref<const Eigen::VectorXd>& scores) {
  const double best = scores.minCoeff();
  const double tol = kTieTolerance * scores.cwiseAbs().maxCoeff();
  for (Index i = 0; i < scores.size(); ++i)
    if (scores[i] <= best + tol) return i;
  return 0;
}

}  // namespace

Pmf posterior_state(const SdmcSpec& spec, Index x, Index z) {
  Pmf post(spec.state_size);
  for (Index s = 0; s < spec.state_size; ++s)
    post[s] = spec.state_pmf[s] * spec.law_z.coeff(spec.row(x, s), z);
  const double total = post.sum();
  if (!(total > 0.0))
    throw ZeroProbabilityObservation("P(z=" + std::to_string(z) + " | x=" + std::to_string(x) +
                                     ") = 0");
  return post / total;
}

EstimatorTable build_estimator(const SdmcSpec& spec) {
  const Index nx = spec.input_size;
  const Index nz = spec.feedback_size;
  const Index ne = spec.estimate_size;
  EstimatorTable est;
  est.table = Eigen::MatrixXi::Zero(nx, nz);
  est.cost = Eigen::VectorXd::Zero(nx);

  const bool squared = spec.distortion.is_squared_error();
  Eigen::VectorXd den(nz), m1(nz), m2(nz);
  Eigen::MatrixXd scores;
  Eigen::VectorXd w_vals, w_sq;
  if (squared) {
    w_vals = spec.distortion.squared_error().estimate_values;
    w_sq = w_vals.array().square();
  } else {
    scores.resize(nz, ne);
  }

  for (Index x = 0; x < nx; ++x) {
    den.setZero();
    if (squared) {
      const auto& v = spec.distortion.squared_error().state_values;
      m1.setZero();
      m2.setZero();
      for (Index s = 0; s < spec.state_size; ++s) {
        const double ps = spec.state_pmf[s];
        if (ps == 0.0) continue;
        for (Kernel::InnerIterator it(spec.law_z, spec.row(x, s)); it; ++it) {
          const double w = ps * it.value();
          den[it.col()] += w;
          m1[it.col()] += w * v[s];
          m2[it.col()] += w * v[s] * v[s];
        }
      }
      Eigen::VectorXd row(ne);
      for (Index z = 0; z < nz; ++z) {
        if (!(den[z] > 0.0)) continue;
        // unnormalized posterior risk Σ_s w_s (v_s − ŵ)²
        row = (m2[z] - 2.0 * m1[z] * w_vals.array() + den[z] * w_sq.array()).matrix();
        const Index pick = pick_min(row);
        est.table(x, z) = static_cast<int>(pick);
        est.cost[x] += std::max(row[pick], 0.0);
      }
    } else {
      const Eigen::MatrixXd& d = spec.distortion.table();
      scores.setZero();
      for (Index s = 0; s < spec.state_size; ++s) {
        const double ps = spec.state_pmf[s];
        if (ps == 0.0) continue;
        for (Kernel::InnerIterator it(spec.law_z, spec.row(x, s)); it; ++it) {
          const double w = ps * it.value();
          den[it.col()] += w;
          scores.row(it.col()) += w * d.row(s);
        }
      }
      for (Index z = 0; z < nz; ++z) {
        if (!(den[z] > 0.0)) continue;
        const Index pick = pick_min(scores.row(z).transpose());
        est.table(x, z) = static_cast<int>(pick);
        est.cost[x] += scores(z, pick);
      }
    }
  }
  return est;
}

Eigen::VectorXd table_cost(const SdmcSpec& spec, const Eigen::MatrixXi& table) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(spec.input_size);
  for (Index x = 0; x < spec.input_size; ++x)
    for (Index s = 0; s < spec.state_size; ++s) {
      const double ps = spec.state_pmf[s];
      if (ps == 0.0) continue;
      for (Kernel::InnerIterator it(spec.law_z, spec.row(x, s)); it; ++it)
        c[x] += ps * it.value() * spec.distortion(s, table(x, it.col()));
    }
  return c;
}

double table_distortion(const SdmcSpec& spec, const Eigen::MatrixXi& table,
                        const Eigen::Ref<const Pmf>& p_x) {
  return table_cost(spec, table).dot(p_x);
}

DminResult d_min(const Eigen::VectorXd& c, const Eigen::VectorXd& b, double budget) {
  const Index n = c.size();
  if (n == 0) throw Infeasible("empty input alphabet");
  if (!affordable(b.minCoeff(), budget)) throw Infeasible("budget below the cheapest input cost");

  DminResult best;
  best.distortion = kInf;
  for (Index i = 0; i < n; ++i)
    if (affordable(b[i], budget) && c[i] < best.distortion) {
      best.distortion = c[i];
      best.input_pmf = point_mass(n, i);
    }
  // Mixtures of an affordable and an unaffordable symbol spending exactly B.
  for (Index i = 0; i < n; ++i) {
    if (!affordable(b[i], budget)) continue;
    for (Index j = 0; j < n; ++j) {
      if (affordable(b[j], budget) || c[j] >= c[i]) continue;
      const double theta = (budget - b[i]) / (b[j] - b[i]);
      const double value = (1.0 - theta) * c[i] + theta * c[j];
      if (value < best.distortion) {
        best.distortion = value;
        best.input_pmf = Pmf::Zero(n);
        best.input_pmf[i] = 1.0 - theta;
        best.input_pmf[j] = theta;
      }
    }
  }
  return best;
}

DminResult d_min(const SdmcSpec& spec, const EstimatorTable& est, double budget) {
  return d_min(est.cost, spec.cost, budget);
}

DminResult d_min(const SdmcSpec& spec, double budget) {
  return d_min(spec, build_estimator(spec), budget);
}

double d_trivial(const SdmcSpec& spec) {
  const Index ne = spec.estimate_size;
  Eigen::VectorXd risk(ne);
  if (spec.distortion.is_squared_error()) {
    const auto& sq = spec.distortion.squared_error();
    const double m1 = spec.state_pmf.dot(sq.state_values);
    const double m2 = spec.state_pmf.dot(sq.state_values.cwiseAbs2());
    risk = (m2 - 2.0 * m1 * sq.estimate_values.array() + sq.estimate_values.array().square()).matrix();
  } else {
    risk = spec.distortion.table().transpose() * spec.state_pmf;
  }
  return std::max(risk[pick_min(risk)], 0.0);
}

std::pair<EstimatorTable, EstimatorTable> build_bc_estimators(const SdmbcSpec& spec) {
  return {build_estimator(receiver_view(spec, 1)), build_estimator(receiver_view(spec, 2))};
}

}  // namespace isac
