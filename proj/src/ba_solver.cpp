#include "isac/ba_solver.hpp"

#include "isac/errors.hpp"
#include "isac/parallel.hpp"
#include "isac/rng.hpp"

#include <algorithm>
#include <numeric>

namespace isac {

double conditional_mutual_information(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x) {
  const Index ny = spec.output_size;
  Eigen::VectorXd py(ny);
  double total = 0.0;
  for (Index s = 0; s < spec.state_size; ++s) {
    const double ps = spec.state_pmf[s];
    if (ps == 0.0) continue;
    py.setZero();
    for (Index x = 0; x < spec.input_size; ++x) {
      if (p_x[x] == 0.0) continue;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it)
        py[it.col()] += p_x[x] * it.value();
    }
    for (Index x = 0; x < spec.input_size; ++x) {
      if (p_x[x] == 0.0) continue;
      double acc = 0.0;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it)
        if (it.value() > 0.0) acc += it.value() * std::log2(it.value() / py[it.col()]);
      total += ps * p_x[x] * acc;
    }
  }
  return std::max(total, 0.0);
}

double QTable::operator()(const SdmcSpec& spec, Index x, Index y, Index s) const {
  const double py = p_y_given_s(s, y);
  if (!(py > 0.0)) return 1.0 / static_cast<double>(spec.input_size);
  return p_x[x] * spec.law_y.coeff(spec.row(x, s), y) / py;
}

QTable q_update(const SdmcSpec& spec, const Eigen::Ref<const Pmf>& p_x) {
  QTable q;
  q.p_x = p_x;
  q.p_y_given_s = Eigen::MatrixXd::Zero(spec.state_size, spec.output_size);
  for (Index x = 0; x < spec.input_size; ++x)
    for (Index s = 0; s < spec.state_size; ++s)
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it)
        q.p_y_given_s(s, it.col()) += p_x[x] * it.value();
  return q;
}

namespace {

// exp2 of the exponents, normalized; -inf entries map to exactly 0.
Pmf softmax2(const Eigen::VectorXd& g) {
  double top = -kInf;
  for (Index i = 0; i < g.size(); ++i) top = std::max(top, g[i]);
  if (top == -kInf) throw DegenerateUpdate("every exponent of the input update is -inf");
  Pmf p(g.size());
  for (Index i = 0; i < g.size(); ++i) p[i] = g[i] == -kInf ? 0.0 : std::exp2(g[i] - top);
  return p / p.sum();
}

}  // namespace

Pmf p_update(const SdmcSpec& spec, const EstimatorTable& est, const QTable& q, double mu,
             double lambda) {
  Eigen::VectorXd g = Eigen::VectorXd::Zero(spec.input_size);
  for (Index x = 0; x < spec.input_size; ++x) {
    double acc = 0.0;
    for (Index s = 0; s < spec.state_size && acc != -kInf; ++s) {
      const double ps = spec.state_pmf[s];
      if (ps == 0.0) continue;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it) {
        if (it.value() == 0.0) continue;
        const double qv = q(spec, x, it.col(), s);
        if (qv == 0.0) {
          acc = -kInf;
          break;
        }
        acc += ps * it.value() * std::log2(qv);
      }
    }
    const double b = spec.cost.size() ? spec.cost[x] : 0.0;
    g[x] = acc == -kInf ? -kInf : acc - lambda * b - mu * est.cost[x];
  }
  return softmax2(g);
}

TradeoffSolver::TradeoffSolver(const SdmcSpec& spec) : TradeoffSolver(spec, build_estimator(spec)) {}

TradeoffSolver::TradeoffSolver(const SdmcSpec& spec, EstimatorTable est)
    : spec_(&spec), est_(std::move(est)) {
  validate(spec);
  cost_ = spec.cost.size() ? spec.cost : Eigen::VectorXd::Zero(spec.input_size);
  neg_entropy_ = Eigen::VectorXd::Zero(spec.input_size);
  for (Index x = 0; x < spec.input_size; ++x)
    for (Index s = 0; s < spec.state_size; ++s) {
      const double ps = spec.state_pmf[s];
      if (ps == 0.0) continue;
      double acc = 0.0;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it) acc += xlog2x(it.value());
      neg_entropy_[x] += ps * acc;
    }
}

double TradeoffSolver::information(const Eigen::Ref<const Pmf>& p_x, Eigen::VectorXd* divergence,
                                   Eigen::VectorXd* reachable) const {
  const SdmcSpec& spec = *spec_;
  const Index nx = spec.input_size;
  const Index ny = spec.output_size;
  Eigen::VectorXd d = neg_entropy_;
  Eigen::VectorXd reach = Eigen::VectorXd::Zero(nx);
  Eigen::VectorXd py = Eigen::VectorXd::Zero(ny);
  Eigen::VectorXd logpy(ny);
  std::vector<Index> touched;
  touched.reserve(static_cast<std::size_t>(ny));
  std::vector<char> seen(static_cast<std::size_t>(ny), 0);

  for (Index s = 0; s < spec.state_size; ++s) {
    const double ps = spec.state_pmf[s];
    if (ps == 0.0) continue;
    for (Index x = 0; x < nx; ++x) {
      if (p_x[x] == 0.0) continue;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it) {
        const Index y = it.col();
        py[y] += p_x[x] * it.value();
        if (!seen[y]) {
          seen[y] = 1;
          touched.push_back(y);
        }
      }
    }
    for (Index y : touched) logpy[y] = py[y] > 0.0 ? std::log2(py[y]) : 0.0;
    for (Index x = 0; x < nx; ++x) {
      double acc = 0.0;
      double w = 0.0;
      for (Kernel::InnerIterator it(spec.law_y, spec.row(x, s)); it; ++it) {
        const Index y = it.col();
        if (seen[y] && py[y] > 0.0) {
          acc += it.value() * logpy[y];
          w += it.value();
        }
      }
      d[x] -= ps * acc;
      reach[x] += ps * w;
    }
    for (Index y : touched) {
      py[y] = 0.0;
      seen[y] = 0;
    }
    touched.clear();
  }

  double info = 0.0;
  for (Index x = 0; x < nx; ++x)
    if (p_x[x] > 0.0) info += p_x[x] * d[x];
  if (divergence) *divergence = std::move(d);
  if (reachable) *reachable = std::move(reach);
  return std::max(info, 0.0);
}

namespace {

struct DualResult {
  Pmf p;
  double lambda = 0.0;
};

class DualSolver {
 public:
  DualSolver(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double budget, double eps)
      : a_(a), b_(b), budget_(budget), eps_(eps) {}

  Pmf at(double lambda) const {
    Eigen::VectorXd g(a_.size());
    for (Index i = 0; i < a_.size(); ++i) g[i] = a_[i] == -kInf ? -kInf : a_[i] - lambda * b_[i];
    return softmax2(g);
  }
  double cost(const Pmf& p) const { return p.dot(b_); }

  // Projected subgradient warm-started at lambda0, then bisection.
  DualResult inequality(double lambda0, double step0, int sub_iters) const {
    Pmf p0 = at(0.0);
    if (cost(p0) <= budget_ + eps_) return {std::move(p0), 0.0};
    double lambda = std::max(lambda0, 0.0);
    for (int l = 1; l <= sub_iters; ++l) {
      Pmf p = at(lambda);
      const double gap = cost(p) - budget_;
      if (std::abs(gap) <= eps_) return {std::move(p), lambda};
      lambda = std::max(0.0, lambda + step0 / l * gap);
    }
    return bisect(0.0, std::max(lambda, 1.0), false);
  }

  DualResult equality(double lambda0, double step0, int sub_iters) const {
    double lambda = lambda0;
    for (int l = 1; l <= sub_iters; ++l) {
      Pmf p = at(lambda);
      const double gap = cost(p) - budget_;
      if (std::abs(gap) <= eps_) return {std::move(p), lambda};
      lambda += step0 / l * gap;
    }
    return bisect(std::min(lambda, -1.0), std::max(lambda, 1.0), true);
  }

 private:
  // cost(λ) is non-increasing; find cost(λ) = B with lo on the expensive side.
  DualResult bisect(double lo, double hi, bool free_lower) const {
    if (free_lower) {
      while (cost(at(lo)) < budget_ - eps_) {
        lo *= 2.0;
        if (lo < -1e300) throw Infeasible("budget above the largest reachable input cost");
      }
    }
    Pmf p_hi = at(hi);
    while (cost(p_hi) > budget_ + eps_) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) throw Infeasible("budget below the cheapest reachable input cost");
      p_hi = at(hi);
    }
    for (int i = 0; i < 400; ++i) {
      const double gap = cost(p_hi) - budget_;
      if (std::abs(gap) <= eps_) break;
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      Pmf p_mid = at(mid);
      if (cost(p_mid) > budget_) {
        lo = mid;
      } else {
        hi = mid;
        p_hi = std::move(p_mid);
      }
    }
    return {std::move(p_hi), hi};
  }

  const Eigen::VectorXd& a_;
  const Eigen::VectorXd& b_;
  double budget_;
  double eps_;
};

}  // namespace

TradeoffPoint TradeoffSolver::solve(const BaConfig& config) const {
  const SdmcSpec& spec = *spec_;
  const Index nx = spec.input_size;
  if (config.max_iters < 1 || !(config.convergence_eps > 0.0) || !(config.lambda_eps > 0.0))
    throw SpecError("solver tolerances must be positive");
  if (config.mu < 0.0) throw SpecError("penalty mu must be non-negative");

  std::vector<bool> allowed = config.support;
  if (allowed.empty()) allowed.assign(static_cast<std::size_t>(nx), true);
  if (static_cast<Index>(allowed.size()) != nx) throw SpecError("support mask has wrong size");
  const Index n_allowed = std::count(allowed.begin(), allowed.end(), true);
  if (n_allowed == 0) throw Infeasible("empty input support");

  double b_lo = kInf, b_hi = -kInf;
  for (Index x = 0; x < nx; ++x)
    if (allowed[x]) {
      b_lo = std::min(b_lo, cost_[x]);
      b_hi = std::max(b_hi, cost_[x]);
    }
  const double budget = config.budget;
  if (budget < b_lo - config.lambda_eps) throw Infeasible("budget below the cheapest input cost");
  if (config.cost_equality && budget > b_hi + config.lambda_eps)
    throw Infeasible("budget above the most expensive input cost");
  const bool constrained =
      config.cost_equality ? (b_hi > b_lo) : (std::isfinite(budget) && !affordable(b_hi, budget));

  Pmf p;
  if (config.initial_pmf) {
    p = *config.initial_pmf;
    for (Index x = 0; x < nx; ++x)
      if (!allowed[x]) p[x] = 0.0;
    if (!(p.sum() > 0.0)) throw SpecError("initial pmf has no mass on the support");
    p /= p.sum();
  } else {
    p = Pmf::Zero(nx);
    for (Index x = 0; x < nx; ++x)
      if (allowed[x]) p[x] = 1.0 / static_cast<double>(n_allowed);
  }

  TradeoffPoint out;
  out.mu = config.mu;
  out.budget = budget;

  Eigen::VectorXd div, reach;
  information(p, &div, &reach);
  const double log_uniform = -std::log2(static_cast<double>(nx));
  double lambda = 0.0;
  double f_prev = -kInf;
  Eigen::VectorXd a(nx);
  for (int k = 1; k <= config.max_iters; ++k) {
    for (Index x = 0; x < nx; ++x) {
      if (!allowed[x]) {
        a[x] = -kInf;
      } else if (p[x] > 0.0) {
        a[x] = std::log2(p[x]) + div[x] - config.mu * est_.cost[x];
      } else if (reach[x] > 0.0) {
        a[x] = -kInf;  // Q(x|y,s) = 0 on outputs that occur
      } else {
        a[x] = log_uniform - config.mu * est_.cost[x];  // only unused Q rows
      }
    }
    Pmf p_new;
    if (!constrained) {
      p_new = softmax2(a);
      lambda = 0.0;
    } else {
      DualSolver dual(a, cost_, budget, config.lambda_eps);
      DualResult r = config.cost_equality
                         ? dual.equality(lambda, config.lambda_step0, config.lambda_subgradient_iters)
                         : dual.inequality(lambda, config.lambda_step0,
                                           config.lambda_subgradient_iters);
      p_new = std::move(r.p);
      lambda = r.lambda;
    }
    const double moved = (p_new - p).cwiseAbs().maxCoeff();
    p = std::move(p_new);
    const double info = information(p, &div, &reach);
    const double f = info - config.mu * est_.cost.dot(p);
    if (config.record_trace) out.objective_trace.push_back(f);
    out.iterations = k;
    if (k > 1 && f - f_prev < config.convergence_eps &&
        (config.pmf_eps <= 0.0 || moved < config.pmf_eps)) {
      out.converged = true;
      break;
    }
    f_prev = f;
  }

  out.rate = information(p);
  out.distortion = est_.cost.dot(p);
  out.cost = cost_.dot(p);
  out.lambda = lambda;
  out.input_pmf = std::move(p);
  return out;
}

TradeoffPoint solve_fixed_mu(const SdmcSpec& spec, const BaConfig& config) {
  return TradeoffSolver(spec).solve(config);
}

MinDistortionPoint min_distortion_point(const TradeoffSolver& solver, double budget) {
  const SdmcSpec& spec = solver.spec();
  const Eigen::VectorXd& c = solver.estimator().cost;
  const Eigen::VectorXd b = spec.cost.size() ? spec.cost : Eigen::VectorXd::Zero(spec.input_size);
  const DminResult best = d_min(c, b, budget);
  const double v = best.distortion;
  const double tol = 1e-10 * std::max(1.0, std::abs(v));
  const Index n = c.size();

  // Union of the supports of all optimal vertices: affordable point masses
  // and two-point mixtures that spend the whole budget.
  MinDistortionPoint out;
  out.distortion = v;
  out.support.assign(static_cast<std::size_t>(n), false);
  for (Index i = 0; i < n; ++i)
    if (affordable(b[i], budget) && c[i] <= v + tol) out.support[i] = true;
  for (Index i = 0; i < n; ++i) {
    if (!affordable(b[i], budget)) continue;
    for (Index j = 0; j < n; ++j) {
      if (affordable(b[j], budget) || c[j] >= c[i]) continue;
      const double theta = (budget - b[i]) / (b[j] - b[i]);
      if ((1.0 - theta) * c[i] + theta * c[j] <= v + tol) {
        out.support[i] = true;
        out.support[j] = true;
      }
    }
  }
  out.cost_binding = v > c.minCoeff() + tol;

  const Index size = std::count(out.support.begin(), out.support.end(), true);
  if (size <= 1) {
    out.input_pmf = best.input_pmf;
    out.rate = 0.0;
    return out;
  }
  BaConfig cfg;
  cfg.mu = 0.0;
  cfg.budget = budget;
  cfg.support = out.support;
  cfg.cost_equality = out.cost_binding;
  TradeoffPoint r = solver.solve(cfg);
  out.rate = r.rate;
  out.input_pmf = std::move(r.input_pmf);
  return out;
}

constexpr Index kWarmChain = 8;

std::vector<double> auto_mu_grid() {
  std::vector<double> grid{0.0};
  for (int i = 0; i < 40; ++i) grid.push_back(std::pow(10.0, -3.0 + 6.0 * i / 39.0));
  return grid;
}

namespace {

TradeoffPoint anchor_point(const TradeoffSolver& solver, const MinDistortionPoint& md,
                           double budget) {
  TradeoffPoint a;
  a.mu = kInf;
  a.budget = budget;
  a.rate = md.rate;
  a.distortion = md.distortion;
  const SdmcSpec& spec = solver.spec();
  a.cost = spec.cost.size() ? spec.cost.dot(md.input_pmf) : 0.0;
  a.input_pmf = md.input_pmf;
  a.converged = true;
  return a;
}

}  // namespace

std::vector<TradeoffPoint> sweep_frontier(const TradeoffSolver& solver,
                                          const std::vector<double>& mu_grid,
                                          const SweepOptions& options) {
  if (mu_grid.empty()) throw SpecError("mu grid is empty");
  std::vector<double> grid = mu_grid;
  for (double m : grid)
    if (!(m >= 0.0) || !std::isfinite(m)) throw SpecError("mu values must be finite and >= 0");
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (options.anchors && grid.front() != 0.0) grid.insert(grid.begin(), 0.0);

  const Index n = static_cast<Index>(grid.size());
  std::vector<TradeoffPoint> points(static_cast<std::size_t>(n));
  BaConfig base = options.base;
  base.budget = options.budget;

  // Warm starts follow fixed chains of consecutive μ values; chains run in
  // parallel, so the result does not depend on the thread count.
  const Index chain = options.warm_start ? kWarmChain : 1;
  const Index chains = (n + chain - 1) / chain;
  const Index nx = solver.spec().input_size;
  parallel_for(chains, options.threads, [&](Index c) {
    std::optional<Pmf> warm;
    for (Index i = c * chain; i < std::min(n, (c + 1) * chain); ++i) {
      BaConfig cfg = base;
      cfg.mu = grid[static_cast<std::size_t>(i)];
      if (warm) cfg.initial_pmf = (1.0 - 1e-6) * *warm + 1e-6 * uniform_pmf(nx);
      TradeoffPoint pt = solver.solve(cfg);
      if (!pt.converged && warm) {
        cfg.initial_pmf.reset();
        TradeoffPoint retry = solver.solve(cfg);
        if (retry.converged) pt = std::move(retry);
      }
      warm = pt.input_pmf;
      points[static_cast<std::size_t>(i)] = std::move(pt);
    }
  });

  if (options.anchors)
    points.push_back(anchor_point(solver, min_distortion_point(solver, options.budget), options.budget));
  std::stable_sort(points.begin(), points.end(), [](const TradeoffPoint& a, const TradeoffPoint& b) {
    if (a.distortion != b.distortion) return a.distortion < b.distortion;
    return a.rate < b.rate;
  });
  return points;
}

TradeoffPoint solve_at_distortion(const TradeoffSolver& solver, double distortion, double budget,
                                  const BaConfig& base) {
  const MinDistortionPoint md = min_distortion_point(solver, budget);
  const double tol = 1e-12 * std::max(1.0, std::abs(md.distortion));
  if (distortion < md.distortion - tol) throw Infeasible("distortion below the minimum");

  BaConfig cfg = base;
  cfg.budget = budget;
  cfg.mu = 0.0;
  TradeoffPoint lo = solver.solve(cfg);
  if (distortion >= lo.distortion - tol) return lo;
  if (distortion <= md.distortion + tol) return anchor_point(solver, md, budget);

  // Bracket: lo has D > target, hi has D ≤ target.
  TradeoffPoint hi;
  double mu = 1.0;
  bool found = false;
  for (int i = 0; i < 40; ++i) {
    cfg.mu = mu;
    cfg.initial_pmf = lo.input_pmf;
    TradeoffPoint p = solver.solve(cfg);
    if (p.distortion <= distortion) {
      hi = std::move(p);
      found = true;
      break;
    }
    lo = std::move(p);
    mu *= 4.0;
  }
  if (!found) hi = anchor_point(solver, md, budget);

  for (int i = 0; i < 100; ++i) {
    if (!std::isfinite(hi.mu)) break;
    if (hi.mu - lo.mu <= 1e-10 * hi.mu || lo.distortion - hi.distortion <= 1e-13) break;
    cfg.mu = lo.mu > 0.0 && hi.mu / lo.mu > 4.0 ? std::sqrt(lo.mu * hi.mu) : 0.5 * (lo.mu + hi.mu);
    const Pmf mix = 0.5 * (lo.input_pmf + hi.input_pmf);
    cfg.initial_pmf = (1.0 - 1e-6) * mix + 1e-6 * uniform_pmf(mix.size());
    TradeoffPoint p = solver.solve(cfg);
    if (p.distortion <= distortion)
      hi = std::move(p);
    else
      lo = std::move(p);
  }

  // Exact distortion by mixing the bracketing inputs.
  const double span = lo.distortion - hi.distortion;
  const double theta = span > 0.0 ? (lo.distortion - distortion) / span : 1.0;
  TradeoffPoint out;
  out.mu = std::isfinite(hi.mu) ? 0.5 * (lo.mu + hi.mu) : lo.mu;
  out.budget = budget;
  out.input_pmf = (1.0 - theta) * lo.input_pmf + theta * hi.input_pmf;
  out.rate = solver.information(out.input_pmf);
  out.distortion = solver.estimator().cost.dot(out.input_pmf);
  const SdmcSpec& spec = solver.spec();
  out.cost = spec.cost.size() ? spec.cost.dot(out.input_pmf) : 0.0;
  out.lambda = theta * hi.lambda + (1.0 - theta) * lo.lambda;
  out.iterations = lo.iterations + hi.iterations;
  out.converged = lo.converged && hi.converged;
  return out;
}

Baselines baseline_ts(const TradeoffSolver& solver, double budget) {
  Baselines out;
  BaConfig cfg;
  cfg.budget = budget;
  out.capacity = solver.solve(cfg);
  out.min_distortion = min_distortion_point(solver, budget);
  const double dt = d_trivial(solver.spec());
  out.basic_sensing = {0.0, out.min_distortion.distortion};
  out.basic_comm = {out.capacity.rate, dt};
  out.improved_sensing = {out.min_distortion.rate, out.min_distortion.distortion};
  out.improved_comm = {out.capacity.rate, out.capacity.distortion};
  return out;
}

std::vector<Pmf> default_trial_pmfs(Index input_size, int random_trials, std::uint64_t seed) {
  std::vector<Pmf> out;
  out.push_back(uniform_pmf(input_size));
  for (Index x = 0; x < input_size; ++x) out.push_back(point_mass(input_size, x));
  for (int i = 0; i < random_trials; ++i) {
    Rng rng(seed, static_cast<std::uint64_t>(i));
    out.push_back(rng.simplex(input_size));
  }
  return out;
}

NoTradeoffReport no_tradeoff_check(const SdmcSpec& spec, const MappingTable& psi,
                                   const std::vector<Pmf>& trial_pmfs, double tol) {
  validate(psi, spec.input_size, spec.feedback_size);
  const Index nx = spec.input_size, ns = spec.state_size, nz = spec.feedback_size;
  const Index nt = psi.codomain_size;
  const Eigen::MatrixXd law_z = dense(spec.law_z);

  NoTradeoffReport report;
  report.tolerance = tol;
  for (const Pmf& p : trial_pmfs) {
    check_pmf(p, "trial pmf");
    // joint P(s, x, z)
    std::vector<Eigen::MatrixXd> sxz(static_cast<std::size_t>(ns), Eigen::MatrixXd::Zero(nx, nz));
    Eigen::MatrixXd st = Eigen::MatrixXd::Zero(ns, nt);
    Eigen::MatrixXd xz = Eigen::MatrixXd::Zero(nx, nz);
    Eigen::VectorXd pt = Eigen::VectorXd::Zero(nt);
    std::vector<Eigen::MatrixXd> stx(static_cast<std::size_t>(ns), Eigen::MatrixXd::Zero(nt, nx));
    for (Index s = 0; s < ns; ++s)
      for (Index x = 0; x < nx; ++x)
        for (Index z = 0; z < nz; ++z) {
          const double w = spec.state_pmf[s] * p[x] * law_z(spec.row(x, s), z);
          const Index t = psi.image(x, z);
          sxz[s](x, z) = w;
          st(s, t) += w;
          xz(x, z) += w;
          pt[t] += w;
          stx[s](t, x) += w;
        }
    NoTradeoffTrial trial;
    trial.input_pmf = p;
    for (Index s = 0; s < ns; ++s)
      for (Index t = 0; t < nt; ++t)
        for (Index x = 0; x < nx; ++x)
          trial.independence_deviation =
              std::max(trial.independence_deviation, std::abs(stx[s](t, x) - st(s, t) * p[x]));
    for (Index s = 0; s < ns; ++s)
      for (Index x = 0; x < nx; ++x)
        for (Index z = 0; z < nz; ++z) {
          const Index t = psi.image(x, z);
          trial.markov_deviation = std::max(
              trial.markov_deviation, std::abs(sxz[s](x, z) * pt[t] - st(s, t) * xz(x, z)));
        }
    report.worst_deviation = std::max(
        {report.worst_deviation, trial.independence_deviation, trial.markov_deviation});
    report.trials.push_back(std::move(trial));
  }
  report.pass = report.worst_deviation <= tol;
  return report;
}

}  // namespace isac
