#include "isac/channel.hpp"

#include "isac/errors.hpp"

#include <sstream>

namespace isac {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

void check_row(const Kernel& k, Index row, const std::string& where) {
  double total = 0.0;
  for (Kernel::InnerIterator it(k, row); it; ++it) {
    if (!std::isfinite(it.value()) || it.value() < 0.0)
      throw SpecError(where + " has negative or non-finite entry " + fmt(it.value()));
    total += it.value();
  }
  if (std::abs(total - 1.0) > kPmfTolerance)
    throw SpecError(where + " sums to " + fmt(total) + " (row not normalized)");
}

std::string xs_name(const std::string& law, Index x, Index s) {
  return law + " row (x=" + std::to_string(x) + ",s=" + std::to_string(s) + ")";
}

void check_distortion(const Eigen::MatrixXd& d, const std::string& what) {
  for (Index i = 0; i < d.rows(); ++i)
    for (Index j = 0; j < d.cols(); ++j) {
      if (!std::isfinite(d(i, j)))
        throw SpecError(what + " entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is not finite");
      if (d(i, j) < 0.0)
        throw SpecError(what + " entry (" + std::to_string(i) + "," + std::to_string(j) +
                        ") is " + fmt(d(i, j)) + " (negative distortion)");
    }
}

Kernel marginalize(const Eigen::MatrixXd& joint, Index output_size, Index feedback_size,
                   bool over_z) {
  const Index cols = over_z ? output_size : feedback_size;
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(joint.rows(), cols);
  for (Index r = 0; r < joint.rows(); ++r)
    for (Index y = 0; y < output_size; ++y)
      for (Index z = 0; z < feedback_size; ++z) {
        const double v = joint(r, y * feedback_size + z);
        if (over_z)
          m(r, y) += v;
        else
          m(r, z) += v;
      }
  return to_kernel(m);
}

}  // namespace

Distortion Distortion::hamming(Index n) {
  return Distortion(Eigen::MatrixXd(Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n)));
}

Index Distortion::state_size() const {
  if (is_squared_error()) return squared_error().state_values.size();
  return table().rows();
}

Index Distortion::estimate_size() const {
  if (is_squared_error()) return squared_error().estimate_values.size();
  return table().cols();
}

double Distortion::operator()(Index s, Index s_hat) const {
  if (is_squared_error()) {
    const auto& sq = squared_error();
    const double e = sq.state_values[s] - sq.estimate_values[s_hat];
    return e * e;
  }
  return table()(s, s_hat);
}

double Distortion::max_value() const {
  if (is_squared_error()) {
    const auto& sq = squared_error();
    const double a = sq.state_values.maxCoeff() - sq.estimate_values.minCoeff();
    const double b = sq.estimate_values.maxCoeff() - sq.state_values.minCoeff();
    return std::max(a * a, b * b);
  }
  return table().size() ? table().maxCoeff() : 0.0;
}

SdmcSpec SdmcSpec::from_joint(Eigen::VectorXd state_pmf, Eigen::MatrixXd joint, Index input_size,
                              Index output_size, Index feedback_size, Distortion distortion,
                              Eigen::VectorXd cost) {
  SdmcSpec spec;
  spec.input_size = input_size;
  spec.state_size = state_pmf.size();
  spec.output_size = output_size;
  spec.feedback_size = feedback_size;
  spec.estimate_size = distortion.estimate_size();
  if (joint.rows() != input_size * spec.state_size || joint.cols() != output_size * feedback_size)
    throw SpecError("law has shape " + std::to_string(joint.rows()) + "x" +
                    std::to_string(joint.cols()) + ", expected " +
                    std::to_string(input_size * spec.state_size) + "x" +
                    std::to_string(output_size * feedback_size));
  spec.law_y = marginalize(joint, output_size, feedback_size, true);
  spec.law_z = marginalize(joint, output_size, feedback_size, false);
  spec.joint_law = std::move(joint);
  spec.state_pmf = std::move(state_pmf);
  spec.distortion = std::move(distortion);
  spec.cost = cost.size() ? std::move(cost) : Eigen::VectorXd::Zero(input_size);
  return spec;
}

SdmcSpec SdmcSpec::from_marginals(Eigen::VectorXd state_pmf, Kernel law_y, Kernel law_z,
                                  Index input_size, Distortion distortion, Eigen::VectorXd cost) {
  SdmcSpec spec;
  spec.input_size = input_size;
  spec.state_size = state_pmf.size();
  spec.output_size = law_y.cols();
  spec.feedback_size = law_z.cols();
  spec.estimate_size = distortion.estimate_size();
  spec.state_pmf = std::move(state_pmf);
  spec.law_y = std::move(law_y);
  spec.law_z = std::move(law_z);
  spec.law_y.makeCompressed();
  spec.law_z.makeCompressed();
  spec.distortion = std::move(distortion);
  spec.cost = cost.size() ? std::move(cost) : Eigen::VectorXd::Zero(input_size);
  return spec;
}

MappingTable MappingTable::from_function(Index input_size, Index feedback_size,
                                         const std::function<Index(Index, Index)>& f) {
  MappingTable m;
  m.image.resize(input_size, feedback_size);
  Index top = -1;
  for (Index x = 0; x < input_size; ++x)
    for (Index z = 0; z < feedback_size; ++z) {
      const Index t = f(x, z);
      m.image(x, z) = static_cast<int>(t);
      top = std::max(top, t);
    }
  m.codomain_size = top + 1;
  return m;
}

void validate(const SdmcSpec& spec) {
  if (spec.input_size < 1 || spec.state_size < 1 || spec.output_size < 1 ||
      spec.feedback_size < 1 || spec.estimate_size < 1)
    throw SpecError("alphabet sizes must be at least 1");
  if (spec.state_pmf.size() != spec.state_size)
    throw SpecError("state_pmf has " + std::to_string(spec.state_pmf.size()) +
                    " entries, expected " + std::to_string(spec.state_size));
  check_pmf(spec.state_pmf, "state_pmf");

  const Index rows = spec.input_size * spec.state_size;
  if (spec.law_y.rows() != rows || spec.law_y.cols() != spec.output_size)
    throw SpecError("Y-marginal has wrong shape");
  if (spec.law_z.rows() != rows || spec.law_z.cols() != spec.feedback_size)
    throw SpecError("Z-marginal has wrong shape");
  if (spec.joint_law) {
    const auto& j = *spec.joint_law;
    if (j.rows() != rows || j.cols() != spec.output_size * spec.feedback_size)
      throw SpecError("law has wrong shape");
    for (Index x = 0; x < spec.input_size; ++x)
      for (Index s = 0; s < spec.state_size; ++s) {
        const auto row = j.row(spec.row(x, s));
        if (!row.allFinite() || (row.array() < 0.0).any())
          throw SpecError(xs_name("law", x, s) + " has negative or non-finite entry");
        const double total = row.sum();
        if (std::abs(total - 1.0) > kPmfTolerance)
          throw SpecError(xs_name("law", x, s) + " sums to " + fmt(total) +
                          " (row not normalized)");
      }
  }
  for (Index x = 0; x < spec.input_size; ++x)
    for (Index s = 0; s < spec.state_size; ++s) {
      check_row(spec.law_y, spec.row(x, s), xs_name("law_y", x, s));
      check_row(spec.law_z, spec.row(x, s), xs_name("law_z", x, s));
    }

  if (spec.distortion.state_size() != spec.state_size ||
      spec.distortion.estimate_size() != spec.estimate_size)
    throw SpecError("distortion has shape " + std::to_string(spec.distortion.state_size()) + "x" +
                    std::to_string(spec.distortion.estimate_size()) + ", expected " +
                    std::to_string(spec.state_size) + "x" + std::to_string(spec.estimate_size));
  if (spec.distortion.is_squared_error()) {
    const auto& sq = spec.distortion.squared_error();
    if (!sq.state_values.allFinite() || !sq.estimate_values.allFinite())
      throw SpecError("squared-error labels must be finite");
  } else {
    check_distortion(spec.distortion.table(), "distortion");
  }

  if (spec.cost.size() != spec.input_size)
    throw SpecError("cost has " + std::to_string(spec.cost.size()) + " entries, expected " +
                    std::to_string(spec.input_size));
  for (Index x = 0; x < spec.input_size; ++x)
    if (!std::isfinite(spec.cost[x]) || spec.cost[x] < 0.0)
      throw SpecError("cost entry " + std::to_string(x) + " is " + fmt(spec.cost[x]) +
                      " (negative cost)");
}

void validate(const SdmbcSpec& spec) {
  if (spec.input_size < 1 || spec.state1_size < 1 || spec.state2_size < 1 ||
      spec.output1_size < 1 || spec.output2_size < 1 || spec.feedback_size < 1)
    throw SpecError("alphabet sizes must be at least 1");
  if (spec.state_pmf.rows() != spec.state1_size || spec.state_pmf.cols() != spec.state2_size)
    throw SpecError("state_pmf has wrong shape");
  const Eigen::VectorXd flat = spec.state_pmf.transpose().reshaped();
  check_pmf(flat, "state_pmf");
  const Index rows = spec.state1_size * spec.state2_size * spec.input_size;
  const Index cols = spec.output1_size * spec.output2_size * spec.feedback_size;
  if (spec.law.rows() != rows || spec.law.cols() != cols) throw SpecError("law has wrong shape");
  for (Index s1 = 0; s1 < spec.state1_size; ++s1)
    for (Index s2 = 0; s2 < spec.state2_size; ++s2)
      for (Index x = 0; x < spec.input_size; ++x) {
        const auto row = spec.law.row(spec.row(s1, s2, x));
        const std::string where = "law row (s1=" + std::to_string(s1) +
                                  ",s2=" + std::to_string(s2) + ",x=" + std::to_string(x) + ")";
        if (!row.allFinite() || (row.array() < 0.0).any())
          throw SpecError(where + " has negative or non-finite entry");
        const double total = row.sum();
        if (std::abs(total - 1.0) > kPmfTolerance)
          throw SpecError(where + " sums to " + fmt(total) + " (row not normalized)");
      }
  if (spec.distortion1.rows() != spec.state1_size || spec.distortion1.cols() < 1)
    throw SpecError("distortion1 has wrong shape");
  if (spec.distortion2.rows() != spec.state2_size || spec.distortion2.cols() < 1)
    throw SpecError("distortion2 has wrong shape");
  check_distortion(spec.distortion1, "distortion1");
  check_distortion(spec.distortion2, "distortion2");
}

void validate(const MappingTable& psi, Index input_size, Index feedback_size) {
  if (psi.image.rows() != input_size || psi.image.cols() != feedback_size)
    throw SpecError("mapping table has shape " + std::to_string(psi.image.rows()) + "x" +
                    std::to_string(psi.image.cols()) + ", expected " +
                    std::to_string(input_size) + "x" + std::to_string(feedback_size));
  for (Index x = 0; x < input_size; ++x)
    for (Index z = 0; z < feedback_size; ++z)
      if (psi.image(x, z) < 0 || psi.image(x, z) >= psi.codomain_size)
        throw SpecError("mapping image at (x=" + std::to_string(x) + ",z=" + std::to_string(z) +
                        ") outside codomain");
}

const Kernel& marginal_y_given_xs(const SdmcSpec& spec) { return spec.law_y; }
const Kernel& marginal_z_given_xs(const SdmcSpec& spec) { return spec.law_z; }

Eigen::MatrixXd dense(const Kernel& k) { return Eigen::MatrixXd(k); }

Kernel to_kernel(const Eigen::MatrixXd& rows) {
  Kernel k = rows.sparseView(1.0, 0.0);
  k.makeCompressed();
  return k;
}

SdmcSpec receiver_view(const SdmbcSpec& bc, int receiver) {
  if (receiver != 1 && receiver != 2) throw SpecError("receiver must be 1 or 2");
  const bool first = receiver == 1;
  const Index own = first ? bc.state1_size : bc.state2_size;
  const Index other = first ? bc.state2_size : bc.state1_size;
  const Index out = first ? bc.output1_size : bc.output2_size;
  const Eigen::VectorXd p_own =
      first ? Eigen::VectorXd(bc.state_pmf.rowwise().sum()) : Eigen::VectorXd(bc.state_pmf.colwise().sum().transpose());

  Eigen::MatrixXd joint = Eigen::MatrixXd::Zero(bc.input_size * own, out * bc.feedback_size);
  for (Index sk = 0; sk < own; ++sk) {
    for (Index so = 0; so < other; ++so) {
      const Index s1 = first ? sk : so;
      const Index s2 = first ? so : sk;
      // P(s_other | s_k); uniform when s_k itself has zero probability
      const double w = p_own[sk] > 0.0 ? bc.state_pmf(s1, s2) / p_own[sk] : 1.0 / other;
      if (w == 0.0) continue;
      for (Index x = 0; x < bc.input_size; ++x) {
        const auto row = bc.law.row(bc.row(s1, s2, x));
        for (Index y1 = 0; y1 < bc.output1_size; ++y1)
          for (Index y2 = 0; y2 < bc.output2_size; ++y2)
            for (Index z = 0; z < bc.feedback_size; ++z) {
              const Index y = first ? y1 : y2;
              joint(x * own + sk, y * bc.feedback_size + z) += w * row[bc.col(y1, y2, z)];
            }
      }
    }
  }
  const Eigen::MatrixXd& d = first ? bc.distortion1 : bc.distortion2;
  SdmcSpec spec = SdmcSpec::from_joint(p_own, std::move(joint), bc.input_size, out,
                                       bc.feedback_size, Distortion(d));
  return spec;
}

SdmcSpec merged_view(const SdmbcSpec& bc) {
  const Index s_size = bc.state1_size * bc.state2_size;
  Eigen::VectorXd p_s(s_size);
  for (Index s1 = 0; s1 < bc.state1_size; ++s1)
    for (Index s2 = 0; s2 < bc.state2_size; ++s2) p_s[s1 * bc.state2_size + s2] = bc.state_pmf(s1, s2);

  const Index y_size = bc.output1_size * bc.output2_size;
  Eigen::MatrixXd joint(bc.input_size * s_size, y_size * bc.feedback_size);
  for (Index x = 0; x < bc.input_size; ++x)
    for (Index s1 = 0; s1 < bc.state1_size; ++s1)
      for (Index s2 = 0; s2 < bc.state2_size; ++s2)
        joint.row(x * s_size + s1 * bc.state2_size + s2) = bc.law.row(bc.row(s1, s2, x));

  const Index e1 = bc.estimate1_size();
  const Index e2 = bc.estimate2_size();
  Eigen::MatrixXd d(s_size, e1 * e2);
  for (Index s1 = 0; s1 < bc.state1_size; ++s1)
    for (Index s2 = 0; s2 < bc.state2_size; ++s2)
      for (Index h1 = 0; h1 < e1; ++h1)
        for (Index h2 = 0; h2 < e2; ++h2)
          d(s1 * bc.state2_size + s2, h1 * e2 + h2) = bc.distortion1(s1, h1) + bc.distortion2(s2, h2);
  return SdmcSpec::from_joint(std::move(p_s), std::move(joint), bc.input_size, y_size,
                              bc.feedback_size, Distortion(std::move(d)));
}

}  // namespace isac
