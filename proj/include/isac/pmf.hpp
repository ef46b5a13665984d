#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

namespace isac {

using Index = Eigen::Index;

/// Probability vector over a finite alphabet. Entries are non-negative and
/// sum to one within kPmfTolerance.
using Pmf = Eigen::VectorXd;

inline constexpr double kPmfTolerance = 1e-9;
inline constexpr double kInf = std::numeric_limits<double>::infinity();

template <typename Scalar>
Scalar xlog2x(Scalar x) {
  return x > Scalar(0) ? x * std::log2(x) : Scalar(0);
}

/// H_b(p) in bits; zero outside (0, 1).
template <typename Scalar>
Scalar binary_entropy(Scalar p) {
  if (p <= Scalar(0) || p >= Scalar(1)) return Scalar(0);
  return -xlog2x(p) - xlog2x(Scalar(1) - p);
}

template <typename Derived>
typename Derived::Scalar entropy_bits(const Eigen::DenseBase<Derived>& p) {
  typename Derived::Scalar h(0);
  for (Index i = 0; i < p.size(); ++i) h -= xlog2x(p.derived().coeff(i));
  return h;
}

bool is_pmf(const Eigen::Ref<const Eigen::VectorXd>& p, double tol = kPmfTolerance);

/// Throws SpecError naming `what` and the offending coordinate.
void check_pmf(const Eigen::Ref<const Eigen::VectorXd>& p, const std::string& what,
               double tol = kPmfTolerance);

Pmf uniform_pmf(Index n);
Pmf point_mass(Index n, Index at);

/// Number of ways to write `steps` as an ordered sum of `parts` non-negative
/// integers, i.e. the size of the simplex lattice with spacing 1/steps.
std::size_t composition_count(int steps, Index parts);

/// Visits the simplex lattice in lexicographic order of the count vector
/// (first coordinate descending).
void for_each_composition(int steps, Index parts,
                          const std::function<void(const Eigen::VectorXi&)>& visit);

std::vector<Eigen::VectorXi> compositions(int steps, Index parts);

}  // namespace isac
