#include "isac/pmf.hpp"

#include "isac/errors.hpp"

#include <sstream>

namespace isac {

bool is_pmf(const Eigen::Ref<const Eigen::VectorXd>& p, double tol) {
  if (p.size() == 0) return false;
  for (Index i = 0; i < p.size(); ++i)
    if (!(p[i] >= 0.0) || !std::isfinite(p[i])) return false;
  return std::abs(p.sum() - 1.0) <= tol;
}

void check_pmf(const Eigen::Ref<const Eigen::VectorXd>& p, const std::string& what, double tol) {
  if (p.size() == 0) throw SpecError(what + " is empty");
  for (Index i = 0; i < p.size(); ++i) {
    if (!std::isfinite(p[i]) || p[i] < 0.0) {
      std::ostringstream os;
      os << what << " entry " << i << " is " << p[i] << " (negative or non-finite)";
      throw SpecError(os.str());
    }
  }
  const double total = p.sum();
  if (std::abs(total - 1.0) > tol) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << total << " (row not normalized)";
    throw SpecError(os.str());
  }
}

Pmf uniform_pmf(Index n) { return Pmf::Constant(n, 1.0 / static_cast<double>(n)); }

Pmf point_mass(Index n, Index at) {
  Pmf p = Pmf::Zero(n);
  p[at] = 1.0;
  return p;
}

std::size_t composition_count(int steps, Index parts) {
  // C(steps + parts - 1, parts - 1), saturating.
  if (parts <= 0) return 0;
  double c = 1.0;
  for (Index k = 1; k < parts; ++k) c = c * static_cast<double>(steps + k) / static_cast<double>(k);
  if (c > 1e18) return static_cast<std::size_t>(-1);
  return static_cast<std::size_t>(std::llround(c));
}

namespace {

void compose(int remaining, Index pos, Eigen::VectorXi& counts,
             const std::function<void(const Eigen::VectorXi&)>& visit) {
  if (pos == counts.size() - 1) {
    counts[pos] = remaining;
    visit(counts);
    return;
  }
  for (int k = remaining; k >= 0; --k) {
    counts[pos] = k;
    compose(remaining - k, pos + 1, counts, visit);
  }
}

}  // namespace

void for_each_composition(int steps, Index parts,
                          const std::function<void(const Eigen::VectorXi&)>& visit) {
  if (parts <= 0 || steps < 0) return;
  Eigen::VectorXi counts = Eigen::VectorXi::Zero(parts);
  compose(steps, 0, counts, visit);
}

std::vector<Eigen::VectorXi> compositions(int steps, Index parts) {
  std::vector<Eigen::VectorXi> out;
  out.reserve(composition_count(steps, parts));
  for_each_composition(steps, parts, [&](const Eigen::VectorXi& c) { out.push_back(c); });
  return out;
}

}  // namespace isac
