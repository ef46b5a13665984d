#pragma once

#include "isac/pmf.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace isac {

/// Conditional law stored row-wise: row (x, s) holds a pmf over the output
/// alphabet. Sparse because the quantized Gaussian rows have narrow support.
using Kernel = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

/// d(s, s_hat) = (v_s - w_s_hat)^2 on real-valued labels.
struct SquaredError {
  Eigen::VectorXd state_values;
  Eigen::VectorXd estimate_values;
};

/// Distortion measure on S x S_hat, either a dense table or squared error.
class Distortion {
 public:
  Distortion() = default;
  explicit Distortion(Eigen::MatrixXd table) : rep_(std::move(table)) {}
  explicit Distortion(SquaredError sq) : rep_(std::move(sq)) {}

  static Distortion hamming(Index n);

  Index state_size() const;
  Index estimate_size() const;
  double operator()(Index s, Index s_hat) const;
  double max_value() const;

  bool is_squared_error() const { return std::holds_alternative<SquaredError>(rep_); }
  const Eigen::MatrixXd& table() const { return std::get<Eigen::MatrixXd>(rep_); }
  const SquaredError& squared_error() const { return std::get<SquaredError>(rep_); }

 private:
  std::variant<Eigen::MatrixXd, SquaredError> rep_;
};

/// Optional symbol names, used only for I/O.
using Labels = std::map<std::string, std::vector<std::string>>;

/// Single-receiver state-dependent memoryless channel P(y, z | x, s).
///
/// Rows of every kernel are indexed by (x, s) -> x * state_size + s. The
/// joint law is optional: every single-receiver quantity depends on the law
/// only through its Y- and Z-marginals, which are always present.
struct SdmcSpec {
  Index input_size = 0;
  Index state_size = 0;
  Index output_size = 0;
  Index feedback_size = 0;
  Index estimate_size = 0;

  Eigen::VectorXd state_pmf;
  /// rows (x, s), columns y * feedback_size + z
  std::optional<Eigen::MatrixXd> joint_law;
  Kernel law_y;
  Kernel law_z;
  Distortion distortion;
  Eigen::VectorXd cost;
  Labels labels;

  Index row(Index x, Index s) const { return x * state_size + s; }

  /// Builds marginals from a dense joint law laid out as documented above.
  static SdmcSpec from_joint(Eigen::VectorXd state_pmf, Eigen::MatrixXd joint,
                             Index input_size, Index output_size, Index feedback_size,
                             Distortion distortion, Eigen::VectorXd cost = {});

  /// Marginal-only form; used when the joint is too large to store.
  static SdmcSpec from_marginals(Eigen::VectorXd state_pmf, Kernel law_y, Kernel law_z,
                                 Index input_size, Distortion distortion,
                                 Eigen::VectorXd cost = {});
};

/// Two-receiver broadcast channel P(y1, y2, z | s1, s2, x).
struct SdmbcSpec {
  Index input_size = 0;
  Index state1_size = 0;
  Index state2_size = 0;
  Index output1_size = 0;
  Index output2_size = 0;
  Index feedback_size = 0;

  /// P(s1, s2), rows s1, columns s2.
  Eigen::MatrixXd state_pmf;
  /// rows (s1 * state2_size + s2) * input_size + x,
  /// columns (y1 * output2_size + y2) * feedback_size + z
  Eigen::MatrixXd law;
  Eigen::MatrixXd distortion1;
  Eigen::MatrixXd distortion2;
  Labels labels;

  Index row(Index s1, Index s2, Index x) const { return (s1 * state2_size + s2) * input_size + x; }
  Index col(Index y1, Index y2, Index z) const { return (y1 * output2_size + y2) * feedback_size + z; }
  Index estimate1_size() const { return distortion1.cols(); }
  Index estimate2_size() const { return distortion2.cols(); }
};

/// ψ: X x Z -> T as a dense table of codomain indices.
struct MappingTable {
  Eigen::MatrixXi image;  // input_size x feedback_size
  Index codomain_size = 0;

  static MappingTable from_function(Index input_size, Index feedback_size,
                                    const std::function<Index(Index, Index)>& f);
};

void validate(const SdmcSpec& spec);
void validate(const SdmbcSpec& spec);
void validate(const MappingTable& psi, Index input_size, Index feedback_size);

/// P(y | x, s) and P(z | x, s); rows sum to one.
const Kernel& marginal_y_given_xs(const SdmcSpec& spec);
const Kernel& marginal_z_given_xs(const SdmcSpec& spec);

/// Dense copy of a kernel, rows (x, s).
Eigen::MatrixXd dense(const Kernel& k);
Kernel to_kernel(const Eigen::MatrixXd& rows);

/// Receiver-k view of a broadcast channel: state S_k, output Y_k, the full
/// feedback Z, distortion d_k. The other state is averaged out under
/// P(s_other | s_k), so posteriors of S_k given (x, z) are preserved.
SdmcSpec receiver_view(const SdmbcSpec& bc, int receiver);

/// Merged single-user view: state (S1, S2) indexed s1 * |S2| + s2, output
/// (Y1, Y2) indexed y1 * |Y2| + y2, feedback Z, estimate (S1_hat, S2_hat)
/// with the sum distortion d1 + d2. Total probability is preserved.
SdmcSpec merged_view(const SdmbcSpec& bc);

}  // namespace isac
