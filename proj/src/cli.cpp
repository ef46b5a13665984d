#include "isac/cli.hpp"

#include "isac/analytic_examples.hpp"
#include "isac/ba_solver.hpp"
#include "isac/bc_regions.hpp"
#include "isac/errors.hpp"
#include "isac/estimator.hpp"
#include "isac/mc_verifier.hpp"
#include "isac/spec_io.hpp"
#include "isac/version.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <tuple>
#include <sstream>

namespace isac::cli {

using nlohmann::json;

namespace {

/// A command-line usage problem; maps to the input-error exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, const std::string& what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  const auto res = std::from_chars(text.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw UsageError("cannot parse " + what + " from \"" + text + "\"");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& part : split(s, ',')) out.push_back(parse_double(part, what));
  return out;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Builtin instances ----------------------------------------------------------

struct Instance {
  AnySpec spec;
  std::string source;  // file path or builtin descriptor
  std::string digest;
  double default_budget = kInf;
  std::optional<MappingTable> psi1, psi2;
};

class BuiltinArgs {
 public:
  BuiltinArgs(std::string name, std::map<std::string, double> values)
      : name_(std::move(name)), values_(std::move(values)) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
  }
  Index get_size(const std::string& key, Index fallback) {
    const double v = get(key, static_cast<double>(fallback));
    if (v < 1 || v != std::floor(v)) throw UsageError(name_ + ": " + key + " must be a positive integer");
    return static_cast<Index>(v);
  }
  void finish() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw UsageError("builtin " + name_ + " has no parameter " + k);
  }

 private:
  std::string name_;
  std::map<std::string, double> values_;
  std::set<std::string> used_;
};

Eigen::Matrix2d independent_es(double e, double s) {
  Eigen::Matrix2d p;
  p << (1.0 - e) * (1.0 - s), (1.0 - e) * s, e * (1.0 - s), e * s;
  return p;
}

Instance make_builtin(const std::string& descriptor) {
  const std::vector<std::string> parts = split(descriptor, ',');
  if (parts.empty() || parts[0].empty()) throw UsageError("empty builtin name");
  std::map<std::string, double> values;
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto eq = parts[i].find('=');
    if (eq == std::string::npos) throw UsageError("builtin parameter \"" + parts[i] + "\" is not k=v");
    values[parts[i].substr(0, eq)] = parse_double(parts[i].substr(eq + 1), parts[i].substr(0, eq));
  }
  const std::string& name = parts[0];
  BuiltinArgs a(name, values);
  Instance inst;
  inst.source = "builtin:" + descriptor;
  inst.digest = sha256_hex(inst.source);

  if (name == "binary") {
    inst.spec = binary_multiplicative_spec(a.get("q", 0.4));
  } else if (name == "erasure") {
    inst.spec = erasure_channel_spec(a.get("p", 0.3));
    inst.psi1 = erasure_psi();
  } else if (name == "gaussian") {
    GaussianQuantConfig cfg = a.get("reduced", 0.0) != 0.0 ? GaussianQuantConfig::reduced() : GaussianQuantConfig{};
    cfg.pam_points = a.get_size("m", cfg.pam_points);
    cfg.noise_points = a.get_size("noise", cfg.noise_points);
    cfg.state_points = a.get_size("state", cfg.state_points);
    cfg.power = a.get("power", cfg.power);
    cfg.feedback_variance = a.get("fb", cfg.feedback_variance);
    a.finish();
    inst.spec = gaussian_quantized_spec(cfg);
    inst.default_budget = cfg.power;
    return inst;
  } else if (name == "random") {
    Rng rng(static_cast<std::uint64_t>(a.get("seed", 1)));
    const Index nx = a.get_size("x", 3), ns = a.get_size("s", 3), ny = a.get_size("y", 3), nz = a.get_size("z", 3);
    inst.spec = random_spec(rng, nx, ns, ny, nz, a.get("zeros", 0.0));
  } else if (name == "binary-bc") {
    inst.spec = binary_bc_spec(a.get("q", 0.6), a.get("gamma", 0.5));
  } else if (name == "flipped-bc") {
    inst.spec = flipped_bc_spec(a.get("q", 0.6), a.get("gamma", 0.5));
  } else if (name == "erasure-bc") {
    inst.spec = erasure_bc_spec(independent_es(a.get("e1", 0.2), a.get("s1", 0.3)),
                                independent_es(a.get("e2", 0.1), a.get("s2", 0.4)));
    inst.psi1 = erasure_bc_psi(1);
    inst.psi2 = erasure_bc_psi(2);
  } else if (name == "dueck") {
    inst.spec = dueck_bc_spec(a.get("q", 0.75));
  } else if (name == "dueck-reduction") {
    const double k = a.get("k", 1);
    if (k != 1 && k != 2) throw UsageError("dueck-reduction: k must be 1 or 2");
    inst.spec = dueck_reduction_spec(a.get("q", 0.75), static_cast<int>(k));
  } else {
    throw UsageError("unknown builtin \"" + name + "\"");
  }
  a.finish();
  return inst;
}

// Shared options ---------------------------------------------------------------

struct Common {
  std::string spec_path;
  std::string builtin;
  std::optional<double> budget;
  std::string mu_grid = "auto";
  std::string out_path;
  int threads = 1;
  std::uint64_t seed = 1;
  std::string format = "csv";
};

void add_source(CLI::App* cmd, Common& c) {
  auto* spec = cmd->add_option("--spec", c.spec_path, "Channel JSON file");
  auto* builtin = cmd->add_option("--builtin", c.builtin, "Builtin instance NAME[,k=v...]");
  spec->excludes(builtin);
}

void add_output(CLI::App* cmd, Common& c) {
  cmd->add_option("--out", c.out_path, "Output file (stdout if omitted)");
  cmd->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

Instance load_instance(const Common& c) {
  if (!c.builtin.empty()) return make_builtin(c.builtin);
  if (c.spec_path.empty()) throw UsageError("one of --spec or --builtin is required");
  Instance inst;
  const std::string bytes = read_file(c.spec_path);
  inst.spec = parse_spec(bytes);
  inst.source = c.spec_path;
  inst.digest = sha256_hex(bytes);
  return inst;
}

const SdmcSpec& need_sdmc(const Instance& inst) {
  if (const auto* s = std::get_if<SdmcSpec>(&inst.spec)) return *s;
  throw UsageError("this command needs a single-receiver channel (kind sdmc)");
}

const SdmbcSpec& need_sdmbc(const Instance& inst) {
  if (const auto* s = std::get_if<SdmbcSpec>(&inst.spec)) return *s;
  throw UsageError("this command needs a broadcast channel (kind sdmbc)");
}

double budget_of(const Common& c, const Instance& inst) { return c.budget ? *c.budget : inst.default_budget; }

json config_echo(const Common& c, json extra = json::object()) {
  extra["budget"] = c.budget ? json(num(*c.budget)) : json(nullptr);
  extra["mu_grid"] = c.mu_grid;
  extra["threads"] = c.threads;
  extra["seed"] = c.seed;
  extra["format"] = c.format;
  if (!c.spec_path.empty()) extra["spec"] = c.spec_path;
  if (!c.builtin.empty()) extra["builtin"] = c.builtin;
  return extra;
}

/// Writes `body` to --out (plus its manifest) or to `out`.
void emit(const std::string& body, const Common& c, const std::string& command, const std::string& digest,
          const std::string& source, const json& config, std::ostream& out) {
  if (c.out_path.empty()) {
    out << body;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary);
  if (!f) throw UsageError("cannot write " + c.out_path);
  f << body;
  json manifest = {{"command", command},
                   {"spec_source", source},
                   {"spec_digest", "sha256:" + digest},
                   {"config", config},
                   {"version", kVersion},
                   {"timestamp", utc_timestamp()}};
  std::ofstream m(c.out_path + ".manifest.json", std::ios::binary);
  if (!m) throw UsageError("cannot write manifest for " + c.out_path);
  m << manifest.dump(2) << '\n';
}

std::vector<double> parse_mu_grid(const std::string& text) {
  if (text == "auto") return auto_mu_grid();
  const std::vector<std::string> parts = split(text, ':');
  if (parts.size() != 3) throw UsageError("--mu-grid must be a:b:n or auto");
  const double a = parse_double(parts[0], "mu-grid start");
  const double b = parse_double(parts[1], "mu-grid end");
  const double n = parse_double(parts[2], "mu-grid count");
  if (n < 1 || n != std::floor(n)) throw UsageError("mu-grid count must be a positive integer");
  if (n == 1) return {a};
  return linspace(a, b, static_cast<int>(n));
}

json pmf_json(const Pmf& p) {
  json a = json::array();
  for (Index i = 0; i < p.size(); ++i) a.push_back(p[i]);
  return a;
}

std::string region_csv(const std::vector<RegionSample>& samples) {
  std::ostringstream os;
  os << "r0,r1,r2,rsum,d1,d2";
  if (!samples.empty())
    for (const auto& [name, v] : samples.front().params) os << ',' << name;
  os << '\n';
  for (const RegionSample& s : samples) {
    os << num(s.r0) << ',' << num(s.r1) << ',' << num(s.r2) << ',' << num(s.rsum) << ',' << num(s.d1) << ','
       << num(s.d2);
    for (const auto& [name, v] : s.params) os << ',' << num(v);
    os << '\n';
  }
  return os.str();
}

json region_json(const std::vector<RegionSample>& samples) {
  json a = json::array();
  for (const RegionSample& s : samples) {
    json o = {{"r0", s.r0}, {"r1", s.r1}, {"r2", s.r2}, {"rsum", s.rsum}, {"d1", s.d1}, {"d2", s.d2}};
    for (const auto& [name, v] : s.params) o[name] = v;
    a.push_back(std::move(o));
  }
  return a;
}

// Commands ---------------------------------------------------------------------

int cmd_generate(const Common& c, std::ostream& out) {
  if (c.builtin.empty()) throw UsageError("generate needs --builtin");
  const Instance inst = make_builtin(c.builtin);
  std::string body = std::visit([](const auto& s) { return to_json(s); }, inst.spec) + "\n";
  emit(body, c, "generate", inst.digest, inst.source, config_echo(c), out);
  return kSuccess;
}

int cmd_tradeoff(const Common& c, std::ostream& out, std::ostream& err) {
  const Instance inst = load_instance(c);
  const SdmcSpec& spec = need_sdmc(inst);
  const double budget = budget_of(c, inst);
  const TradeoffSolver solver(spec);
  SweepOptions opts;
  opts.budget = budget;
  opts.threads = c.threads;
  opts.anchors = c.mu_grid == "auto";
  const std::vector<TradeoffPoint> pts = sweep_frontier(solver, parse_mu_grid(c.mu_grid), opts);

  bool any_converged = false;
  for (const TradeoffPoint& p : pts) any_converged |= p.converged;

  std::string body;
  if (c.format == "json") {
    json a = json::array();
    for (const TradeoffPoint& p : pts)
      a.push_back({{"mu", std::isinf(p.mu) ? json("inf") : json(p.mu)},
                   {"rate_bits", p.rate},
                   {"distortion", p.distortion},
                   {"cost", p.cost},
                   {"lambda", p.lambda},
                   {"iterations", p.iterations},
                   {"converged", p.converged},
                   {"input_pmf", pmf_json(p.input_pmf)}});
    body = a.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "mu,rate_bits,distortion,cost,iterations,converged\n";
    for (const TradeoffPoint& p : pts)
      os << num(p.mu) << ',' << num(p.rate) << ',' << num(p.distortion) << ',' << num(p.cost) << ','
         << p.iterations << ',' << (p.converged ? 1 : 0) << '\n';
    body = os.str();
  }
  emit(body, c, "tradeoff", inst.digest, inst.source, config_echo(c, {{"resolved_budget", num(budget)}}), out);
  if (!any_converged) {
    err << "error: no tradeoff point converged\n";
    return kNumericalFailure;
  }
  return kSuccess;
}

int cmd_baselines(const Common& c, std::ostream& out) {
  const Instance inst = load_instance(c);
  const SdmcSpec& spec = need_sdmc(inst);
  const double budget = budget_of(c, inst);
  const Baselines b = baseline_ts(TradeoffSolver(spec), budget);
  const std::vector<std::tuple<std::string, std::string, Eigen::Vector2d>> rows = {
      {"basic", "sensing", b.basic_sensing},
      {"basic", "communication", b.basic_comm},
      {"improved", "sensing", b.improved_sensing},
      {"improved", "communication", b.improved_comm}};
  std::string body;
  if (c.format == "json") {
    json a = json::array();
    for (const auto& [scheme, end, v] : rows)
      a.push_back({{"scheme", scheme}, {"endpoint", end}, {"rate_bits", v[0]}, {"distortion", v[1]}});
    body = a.dump(2) + "\n";
  } else {
    std::ostringstream os;
    os << "scheme,endpoint,rate_bits,distortion\n";
    for (const auto& [scheme, end, v] : rows) os << scheme << ',' << end << ',' << num(v[0]) << ',' << num(v[1]) << '\n';
    body = os.str();
  }
  emit(body, c, "baselines", inst.digest, inst.source, config_echo(c, {{"resolved_budget", num(budget)}}), out);
  return kSuccess;
}

struct BcParams {
  std::string kind;
  double q = -1.0;
  double gamma = 0.5;
  int points = 51;
  int resolution = 32;
  int u_size = 0;
  int random_samples = 0;
  int refine_samples = 0;
  bool pareto = false;
  std::string pe1s1, pe2s2;
};

Eigen::Matrix2d parse_es(const std::string& text, const std::string& what) {
  const std::vector<double> v = parse_list(text, what);
  if (v.size() != 4) throw UsageError(what + " needs four numbers P(e,s) in order (0,0),(0,1),(1,0),(1,1)");
  Eigen::Matrix2d p;
  p << v[0], v[1], v[2], v[3];
  return p;
}

int cmd_bc(const Common& c, const BcParams& bp, std::ostream& out, std::ostream& err) {
  json config = config_echo(c, {{"kind", bp.kind}, {"points", bp.points}, {"resolution", bp.resolution}});
  if (bp.points < 2) throw UsageError("--points must be at least 2");
  std::string digest = sha256_hex("bc:" + bp.kind);
  std::string source = "parameters";

  auto curve_body = [&](const std::vector<CurvePoint>& curve, const std::vector<double>& t) {
    std::ostringstream os;
    if (c.format == "json") {
      json a = json::array();
      for (std::size_t i = 0; i < curve.size(); ++i)
        a.push_back({{"distortion", curve[i].distortion}, {"sum_rate", curve[i].sum_rate},
                     {"t", std::isnan(t[i]) ? json(nullptr) : json(t[i])}});
      os << a.dump(2) << '\n';
    } else {
      os << "distortion,sum_rate,t\n";
      for (std::size_t i = 0; i < curve.size(); ++i)
        os << num(curve[i].distortion) << ',' << num(curve[i].sum_rate) << ','
           << (std::isnan(t[i]) ? std::string() : num(t[i])) << '\n';
    }
    return os.str();
  };
  auto region_body = [&](std::vector<RegionSample> s) {
    if (bp.pareto) s = pareto_front(s);
    return c.format == "json" ? region_json(s).dump(2) + "\n" : region_csv(s);
  };

  std::string body;
  if (bp.kind == "degraded" || bp.kind == "outer") {
    const Instance inst = load_instance(c);
    const SdmbcSpec& bc = need_sdmbc(inst);
    digest = inst.digest;
    source = inst.source;
    RegionGrid grid;
    grid.u_size = bp.u_size;
    grid.resolution = bp.resolution;
    grid.random_samples = bp.random_samples;
    grid.refine_samples = bp.refine_samples;
    grid.seed = c.seed;
    grid.threads = c.threads;
    if (bp.kind == "degraded") {
      const DegradednessReport rep = is_physically_degraded(bc, 1e-9, c.seed);
      if (!rep.degraded) {
        err << "warning: channel is not physically degraded (violation " << num(rep.worst_violation)
            << " at s1=" << rep.witness_s1 << ", y1=" << rep.witness_y1 << ", input pmf [";
        for (Index i = 0; i < rep.witness_pmf.size(); ++i) err << (i ? "," : "") << num(rep.witness_pmf[i]);
        err << "])\n";
      }
      body = region_body(degraded_region(bc, grid));
    } else {
      body = region_body(outer_bound_samples(bc, grid));
    }
  } else if (bp.kind == "binary" || bp.kind == "flipped") {
    const double q = bp.q < 0.0 ? 0.6 : bp.q;
    const std::vector<double> p_grid = linspace(0.0, 0.5, bp.points);
    const std::vector<double> r_grid = linspace(0.0, 1.0, bp.points);
    body = region_body(bp.kind == "binary" ? binary_bc_region(q, bp.gamma, p_grid, r_grid)
                                           : flipped_bc_region(q, bp.gamma, p_grid, r_grid));
  } else if (bp.kind == "dueck-outer" || bp.kind == "dueck-inner") {
    const double q = bp.q < 0.0 ? 0.75 : bp.q;
    const std::vector<double> t_grid = linspace(0.0, 0.5, bp.points);
    std::vector<CurvePoint> curve;
    std::vector<double> ts;
    if (bp.kind == "dueck-outer") {
      std::vector<RegionSample> s = dueck_outer(q, t_grid);
      std::stable_sort(s.begin(), s.end(), [](const RegionSample& a, const RegionSample& b) { return a.d1 < b.d1; });
      for (const RegionSample& r : s) {
        curve.push_back({r.d1, r.rsum});
        ts.push_back(r.params.front().second);
      }
    } else {
      const DueckInner inner = dueck_inner(q, t_grid);
      curve = inner.hull;
      for (const CurvePoint& p : curve) {
        double t = std::nan("");
        for (const RegionSample& s : inner.samples)
          if (s.d1 == p.distortion && s.rsum == p.sum_rate) t = s.params.front().second;
        ts.push_back(t);
      }
    }
    body = curve_body(curve, ts);
  } else if (bp.kind == "erasure") {
    if (bp.pe1s1.empty() || bp.pe2s2.empty()) throw UsageError("bc erasure needs --pe1s1 and --pe2s2");
    const auto [d1, d2] = erasure_bc_distortion_region(parse_es(bp.pe1s1, "--pe1s1"), parse_es(bp.pe2s2, "--pe2s2"));
    config["pe1s1"] = bp.pe1s1;
    config["pe2s2"] = bp.pe2s2;
    if (c.format == "json") {
      body = json{{"d1_min", d1}, {"d2_min", d2}}.dump(2) + "\n";
    } else {
      body = "receiver,distortion_floor\n1," + num(d1) + "\n2," + num(d2) + "\n";
    }
  } else {
    throw UsageError("unknown bc region \"" + bp.kind + "\"");
  }
  if (bp.q >= 0.0) config["q"] = num(bp.q);
  config["gamma"] = num(bp.gamma);
  emit(body, c, "bc " + bp.kind, digest, source, config, out);
  return kSuccess;
}

struct VerifyParams {
  std::string check;
  std::string psi_path, psi2_path;
  std::string pmf;
  std::size_t samples = 1000000;
  double step = 0.0;
  double tol = -1.0;
  int points = 5;
};

MappingTable load_mapping(const std::string& path) { return parse_mapping(read_file(path)); }

int cmd_verify(const Common& c, const VerifyParams& vp, std::ostream& out) {
  const Instance inst = load_instance(c);
  json report = {{"check", vp.check}};
  bool pass = false;
  std::ostringstream human;

  auto trial_pmf = [&](Index n) -> Pmf {
    if (vp.pmf.empty()) return uniform_pmf(n);
    const std::vector<double> v = parse_list(vp.pmf, "--pmf");
    if (static_cast<Index>(v.size()) != n) throw UsageError("--pmf needs " + std::to_string(n) + " entries");
    Pmf p = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
    check_pmf(p, "--pmf");
    return p;
  };

  if (vp.check == "estimator") {
    const SdmcSpec& spec = need_sdmc(inst);
    const EstimatorTable est = build_estimator(spec);
    std::vector<Pmf> panel = vp.pmf.empty() ? default_trial_pmfs(spec.input_size, 5, c.seed)
                                            : std::vector<Pmf>{trial_pmf(spec.input_size)};
    const double tol = vp.tol >= 0.0 ? vp.tol : 1e-12;
    double worst = 0.0;
    std::size_t tables = 0;
    for (const Pmf& p : panel) {
      const ExhaustiveResult ex = exhaustive_estimator_search(spec, p);
      tables = ex.tables;
      worst = std::max(worst, expected_distortion(est, p) - ex.distortion);
    }
    pass = worst <= tol;
    report["worst_gap"] = worst;
    report["tables_per_pmf"] = tables;
    report["trials"] = panel.size();
    human << "estimator: " << (pass ? "PASS" : "FAIL") << " worst gap " << num(worst) << " over " << panel.size()
          << " pmfs (" << tables << " tables each)\n";
  } else if (vp.check == "frontier") {
    const SdmcSpec& spec = need_sdmc(inst);
    const double budget = budget_of(c, inst);
    const TradeoffSolver solver(spec);
    const double step = vp.step > 0.0 ? vp.step : spec.input_size <= 2 ? 1e-4 : spec.input_size == 3 ? 2e-3 : 1e-2;
    const double tol = vp.tol >= 0.0 ? vp.tol : 2e-3;
    const MinDistortionPoint md = min_distortion_point(solver, budget);
    BaConfig cap_cfg;
    cap_cfg.budget = budget;
    const TradeoffPoint cap = solver.solve(cap_cfg);
    json rows = json::array();
    pass = true;
    for (int i = 0; i < vp.points; ++i) {
      const double frac = vp.points == 1 ? 1.0 : static_cast<double>(i) / (vp.points - 1);
      const double d = md.distortion + frac * std::max(cap.distortion - md.distortion, 0.0);
      const TradeoffPoint ba = solve_at_distortion(solver, d, budget);
      const BruteForceResult bf = brute_force_tradeoff(spec, d, budget, step);
      // The lattice optimum can fall below the true one by the grid error only.
      const double gap = bf.rate - ba.rate;
      const bool ok = gap <= 1e-9 && ba.rate - bf.rate <= tol;
      pass &= ok;
      rows.push_back({{"distortion", d}, {"ba_rate", ba.rate}, {"brute_force_rate", bf.rate}, {"pass", ok}});
      human << "D=" << num(d) << " ba=" << num(ba.rate) << " grid=" << num(bf.rate) << (ok ? " ok" : " MISMATCH")
            << '\n';
    }
    report["points"] = rows;
    report["grid_step"] = step;
    report["tolerance"] = tol;
    human << "frontier: " << (pass ? "PASS" : "FAIL") << '\n';
  } else if (vp.check == "distortion-mc") {
    const SdmcSpec& spec = need_sdmc(inst);
    const TrialReport r = simulate_distortion(spec, trial_pmf(spec.input_size), vp.samples, c.seed);
    pass = r.pass;
    report.update({{"n_samples", r.n_samples},
                   {"empirical", r.empirical_value},
                   {"analytic", r.analytic_value},
                   {"std_error", r.std_error},
                   {"z_score", r.z_score}});
    human << "distortion-mc: " << (pass ? "PASS" : "FAIL") << " empirical " << num(r.empirical_value)
          << " analytic " << num(r.analytic_value) << " z " << num(r.z_score) << '\n';
  } else if (vp.check == "no-tradeoff") {
    const double tol = vp.tol >= 0.0 ? vp.tol : 1e-9;
    auto mapping = [&](const std::string& path, const std::optional<MappingTable>& fallback, const char* flag) {
      if (!path.empty()) return load_mapping(path);
      if (fallback) return *fallback;
      throw UsageError(std::string("no-tradeoff needs ") + flag);
    };
    if (const auto* spec = std::get_if<SdmcSpec>(&inst.spec)) {
      const MappingTable psi = mapping(vp.psi_path, inst.psi1, "--psi");
      const NoTradeoffReport r = no_tradeoff_check(*spec, psi, default_trial_pmfs(spec->input_size, 20, c.seed), tol);
      pass = r.pass;
      report["worst_deviation"] = r.worst_deviation;
      report["trials"] = r.trials.size();
      human << "no-tradeoff: " << (pass ? "PASS" : "FAIL") << " worst deviation " << num(r.worst_deviation) << '\n';
    } else {
      const SdmbcSpec& bc = need_sdmbc(inst);
      const MappingTable psi1 = mapping(vp.psi_path, inst.psi1, "--psi");
      const MappingTable psi2 = mapping(vp.psi2_path, inst.psi2, "--psi2");
      const ProductRegionReport r =
          product_region_check(bc, psi1, psi2, default_trial_pmfs(bc.input_size, 20, c.seed), tol);
      pass = r.pass;
      report["worst_deviation_1"] = r.receiver1.worst_deviation;
      report["worst_deviation_2"] = r.receiver2.worst_deviation;
      human << "no-tradeoff: " << (pass ? "PASS" : "FAIL") << " worst deviations "
            << num(r.receiver1.worst_deviation) << ", " << num(r.receiver2.worst_deviation) << '\n';
    }
  } else {
    throw UsageError("unknown check \"" + vp.check + "\"");
  }
  report["pass"] = pass;

  const std::string json_body = report.dump(2) + "\n";
  if (c.out_path.empty()) {
    out << (c.format == "json" ? json_body : human.str());
  } else {
    out << human.str();
    emit(json_body, c, "verify " + vp.check, inst.digest, inst.source, config_echo(c), out);
  }
  return pass ? kSuccess : kVerificationFailed;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Capacity-distortion-cost tradeoffs of state-dependent channels", "isac"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common c;
  BcParams bp;
  VerifyParams vp;
  auto add_common = [&](CLI::App* cmd, bool source, bool budget) {
    if (source) add_source(cmd, c);
    if (budget) cmd->add_option("--budget", c.budget, "Input cost budget B");
    add_output(cmd, c);
    cmd->add_option("--threads", c.threads, "Worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", c.seed, "Random seed");
  };

  auto* generate = app.add_subcommand("generate", "Emit the channel JSON of a builtin instance");
  generate->add_option("--builtin", c.builtin, "Builtin instance NAME[,k=v...]")->required();
  add_output(generate, c);

  auto* tradeoff = app.add_subcommand("tradeoff", "Sweep the capacity-distortion frontier");
  add_common(tradeoff, true, true);
  tradeoff->add_option("--mu-grid", c.mu_grid, "a:b:n (linear, inclusive) or auto");

  auto* baselines = app.add_subcommand("baselines", "Time-sharing baseline endpoints");
  add_common(baselines, true, true);

  auto* bc = app.add_subcommand("bc", "Broadcast regions and bounds");
  bc->add_option("kind", bp.kind, "degraded, outer, binary, flipped, dueck-inner, dueck-outer or erasure")->required();
  add_common(bc, true, false);
  bc->add_option("--q", bp.q, "State parameter q");
  bc->add_option("--gamma", bp.gamma, "Degradation parameter gamma");
  bc->add_option("--points", bp.points, "Grid points per parameter");
  bc->add_option("--resolution", bp.resolution, "Simplex lattice resolution");
  bc->add_option("--u-size", bp.u_size, "Auxiliary alphabet size (0: |X|+1)");
  bc->add_option("--random-samples", bp.random_samples, "Extra random auxiliary draws");
  bc->add_option("--refine-samples", bp.refine_samples, "Dithered draws around the degraded-region front");
  bc->add_flag("--pareto", bp.pareto, "Keep only the Pareto front");
  bc->add_option("--pe1s1", bp.pe1s1, "P(e1,s1) as four comma-separated numbers");
  bc->add_option("--pe2s2", bp.pe2s2, "P(e2,s2) as four comma-separated numbers");

  auto* verify = app.add_subcommand("verify", "Cross-check against independent oracles");
  verify->add_option("check", vp.check, "estimator, frontier, distortion-mc or no-tradeoff")->required();
  add_common(verify, true, true);
  verify->add_option("--psi", vp.psi_path, "Mapping table JSON (receiver 1)");
  verify->add_option("--psi2", vp.psi2_path, "Mapping table JSON (receiver 2)");
  verify->add_option("--pmf", vp.pmf, "Input pmf, comma-separated");
  verify->add_option("--samples", vp.samples, "Monte-Carlo samples");
  verify->add_option("--step", vp.step, "Brute-force lattice spacing");
  verify->add_option("--tol", vp.tol, "Pass tolerance");
  verify->add_option("--points", vp.points, "Distortion levels to check")->check(CLI::PositiveNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (*generate) return cmd_generate(c, out);
    if (*tradeoff) return cmd_tradeoff(c, out, err);
    if (*baselines) return cmd_baselines(c, out);
    if (*bc) return cmd_bc(c, bp, out, err);
    if (*verify) return cmd_verify(c, vp, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const SpecError& e) {
    err << "error: invalid input: " << e.what() << '\n';
    return kInputError;
  } catch (const Infeasible& e) {
    err << "error: infeasible: " << e.what() << '\n';
    return kInputError;
  } catch (const InstanceTooLarge& e) {
    err << "error: instance too large: " << e.what() << '\n';
    return kInputError;
  } catch (const ZeroProbabilityObservation& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const DegenerateUpdate& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kInputError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, std::cout, std::cerr);
}

}  // namespace isac::cli
