#include "isac/spec_io.hpp"

#include "isac/errors.hpp"

#include <json.hpp>

#include <fstream>
#include <set>
#include <sstream>

namespace isac {

using nlohmann::json;

namespace {

constexpr double kRenormTolerance = 1e-6;

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key())) throw SpecError("unknown field \"" + it.key() + "\" in " + where);
}

const json& need(const json& j, const std::string& key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw SpecError("missing field \"" + key + "\" in " + where);
  return j.at(key);
}

Index size_field(const json& sizes, const std::string& key) {
  const json& v = need(sizes, key, "sizes");
  if (!v.is_number_integer() || v.get<long long>() < 1)
    throw SpecError("sizes." + key + " must be a positive integer");
  return static_cast<Index>(v.get<long long>());
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw SpecError(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SpecError(where + " is not finite");
  return d;
}

Eigen::VectorXd vector_field(const json& v, Index n, const std::string& where) {
  if (!v.is_array() || static_cast<Index>(v.size()) != n)
    throw SpecError(where + " must be an array of " + std::to_string(n) + " numbers");
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out[i] = number(v[static_cast<std::size_t>(i)], where);
  return out;
}

Eigen::MatrixXd matrix_field(const json& v, Index rows, Index cols, const std::string& where) {
  if (!v.is_array() || static_cast<Index>(v.size()) != rows)
    throw SpecError(where + " must have " + std::to_string(rows) + " rows");
  Eigen::MatrixXd m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    m.row(r) = vector_field(v[static_cast<std::size_t>(r)], cols, where).transpose();
  return m;
}

// Rescales a probability row that is within kRenormTolerance of normalized.
void renormalize(Eigen::Ref<Eigen::VectorXd> p, const std::string& where) {
  if ((p.array() < 0.0).any()) throw SpecError(where + " has a negative entry");
  const double total = p.sum();
  if (std::abs(total - 1.0) > kRenormTolerance) {
    std::ostringstream os;
    os.precision(12);
    os << where << " sums to " << total << " (row not normalized)";
    throw SpecError(os.str());
  }
  p /= total;
}

std::string xs_name(const std::string& law, Index x, Index s) {
  return law + " row (x=" + std::to_string(x) + ",s=" + std::to_string(s) + ")";
}

// Nested [x][s][...] arrays of depth 2 + dims.size(), flattened row-major
// over the trailing dimensions.
Eigen::MatrixXd nested_law(const json& v, Index nx, Index ns, const std::vector<Index>& dims,
                           const std::string& name) {
  Index cols = 1;
  for (Index d : dims) cols *= d;
  Eigen::MatrixXd out(nx * ns, cols);
  std::function<void(const json&, std::size_t, Index, Index, const std::string&)> fill =
      [&](const json& node, std::size_t depth, Index row, Index offset, const std::string& where) {
        const Index n = dims[depth];
        if (!node.is_array() || static_cast<Index>(node.size()) != n)
          throw SpecError(where + " must have " + std::to_string(n) + " entries");
        Index stride = 1;
        for (std::size_t k = depth + 1; k < dims.size(); ++k) stride *= dims[k];
        for (Index i = 0; i < n; ++i) {
          const json& child = node[static_cast<std::size_t>(i)];
          if (depth + 1 == dims.size())
            out(row, offset + i) = number(child, where);
          else
            fill(child, depth + 1, row, offset + i * stride, where);
        }
      };
  if (!v.is_array() || static_cast<Index>(v.size()) != nx)
    throw SpecError(name + " must have " + std::to_string(nx) + " input rows");
  for (Index x = 0; x < nx; ++x) {
    const json& vx = v[static_cast<std::size_t>(x)];
    if (!vx.is_array() || static_cast<Index>(vx.size()) != ns)
      throw SpecError(name + "[" + std::to_string(x) + "] must have " + std::to_string(ns) + " state rows");
    for (Index s = 0; s < ns; ++s)
      fill(vx[static_cast<std::size_t>(s)], 0, x * ns + s, 0, xs_name(name, x, s));
  }
  return out;
}

Kernel marginal_law(const json& v, Index nx, Index ns, Index cols, const std::string& name) {
  if (v.is_object()) {
    reject_unknown(v, {"sparse_rows"}, name);
    const json& rows = need(v, "sparse_rows", name);
    if (!rows.is_array() || static_cast<Index>(rows.size()) != nx * ns)
      throw SpecError(name + ".sparse_rows must have " + std::to_string(nx * ns) + " rows");
    Kernel k(nx * ns, cols);
    std::vector<Eigen::Triplet<double, int>> trip;
    for (Index r = 0; r < nx * ns; ++r) {
      const std::string where = xs_name(name, r / ns, r % ns);
      const json& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array()) throw SpecError(where + " must be an array of [index, probability]");
      Eigen::VectorXd vals(static_cast<Index>(row.size()));
      std::vector<int> idx;
      for (std::size_t e = 0; e < row.size(); ++e) {
        const json& pair = row[e];
        if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number_integer())
          throw SpecError(where + " entries must be [index, probability]");
        const long long c = pair[0].get<long long>();
        if (c < 0 || c >= cols) throw SpecError(where + " index " + std::to_string(c) + " out of range");
        idx.push_back(static_cast<int>(c));
        vals[static_cast<Index>(e)] = number(pair[1], where);
      }
      renormalize(vals, where);
      for (std::size_t e = 0; e < idx.size(); ++e)
        trip.emplace_back(static_cast<int>(r), idx[e], vals[static_cast<Index>(e)]);
    }
    k.setFromTriplets(trip.begin(), trip.end());
    k.makeCompressed();
    return k;
  }
  Eigen::MatrixXd dense_rows = nested_law(v, nx, ns, {cols}, name);
  for (Index r = 0; r < dense_rows.rows(); ++r) {
    Eigen::VectorXd row = dense_rows.row(r).transpose();
    renormalize(row, xs_name(name, r / ns, r % ns));
    dense_rows.row(r) = row.transpose();
  }
  return to_kernel(dense_rows);
}

Labels parse_labels(const json& v) {
  if (!v.is_object()) throw SpecError("labels must be an object");
  Labels out;
  for (auto it = v.begin(); it != v.end(); ++it) {
    if (!it.value().is_array()) throw SpecError("labels." + it.key() + " must be an array of strings");
    std::vector<std::string> names;
    for (const json& n : it.value()) {
      if (!n.is_string()) throw SpecError("labels." + it.key() + " must be an array of strings");
      names.push_back(n.get<std::string>());
    }
    out[it.key()] = std::move(names);
  }
  return out;
}

Distortion parse_distortion(const json& v, Index ns, Index ne) {
  if (v.is_object()) {
    reject_unknown(v, {"squared_error"}, "distortion");
    const json& sq = need(v, "squared_error", "distortion");
    reject_unknown(sq, {"state_values", "estimate_values"}, "distortion.squared_error");
    SquaredError e;
    e.state_values = vector_field(need(sq, "state_values", "squared_error"), ns, "state_values");
    e.estimate_values = vector_field(need(sq, "estimate_values", "squared_error"), ne, "estimate_values");
    return Distortion(std::move(e));
  }
  return Distortion(matrix_field(v, ns, ne, "distortion"));
}

SdmcSpec parse_sdmc(const json& j) {
  reject_unknown(j, {"kind", "sizes", "state_pmf", "law", "law_y", "law_z", "distortion", "cost", "labels"},
                 "channel");
  const json& sizes = need(j, "sizes", "channel");
  reject_unknown(sizes, {"input", "state", "output", "feedback", "estimate"}, "sizes");
  const Index nx = size_field(sizes, "input");
  const Index ns = size_field(sizes, "state");
  const Index ny = size_field(sizes, "output");
  const Index nz = size_field(sizes, "feedback");
  const Index ne = sizes.contains("estimate") ? size_field(sizes, "estimate") : ns;

  Eigen::VectorXd p_s = vector_field(need(j, "state_pmf", "channel"), ns, "state_pmf");
  renormalize(p_s, "state_pmf");
  Distortion d = parse_distortion(need(j, "distortion", "channel"), ns, ne);
  Eigen::VectorXd cost;
  if (j.contains("cost")) cost = vector_field(j.at("cost"), nx, "cost");

  SdmcSpec spec;
  if (j.contains("law")) {
    if (j.contains("law_y") || j.contains("law_z"))
      throw SpecError("give either law or law_y/law_z, not both");
    Eigen::MatrixXd joint = nested_law(j.at("law"), nx, ns, {ny, nz}, "law");
    for (Index r = 0; r < joint.rows(); ++r) {
      Eigen::VectorXd row = joint.row(r).transpose();
      renormalize(row, xs_name("law", r / ns, r % ns));
      joint.row(r) = row.transpose();
    }
    spec = SdmcSpec::from_joint(std::move(p_s), std::move(joint), nx, ny, nz, std::move(d), std::move(cost));
  } else {
    Kernel ly = marginal_law(need(j, "law_y", "channel"), nx, ns, ny, "law_y");
    Kernel lz = marginal_law(need(j, "law_z", "channel"), nx, ns, nz, "law_z");
    spec = SdmcSpec::from_marginals(std::move(p_s), std::move(ly), std::move(lz), nx, std::move(d),
                                    std::move(cost));
  }
  if (j.contains("labels")) spec.labels = parse_labels(j.at("labels"));
  validate(spec);
  return spec;
}

SdmbcSpec parse_sdmbc(const json& j) {
  reject_unknown(j, {"kind", "sizes", "state_pmf", "law", "distortion1", "distortion2", "labels"},
                 "broadcast channel");
  const json& sizes = need(j, "sizes", "broadcast channel");
  reject_unknown(sizes, {"input", "state1", "state2", "output1", "output2", "feedback", "estimate1", "estimate2"},
                 "sizes");
  SdmbcSpec bc;
  bc.input_size = size_field(sizes, "input");
  bc.state1_size = size_field(sizes, "state1");
  bc.state2_size = size_field(sizes, "state2");
  bc.output1_size = size_field(sizes, "output1");
  bc.output2_size = size_field(sizes, "output2");
  bc.feedback_size = size_field(sizes, "feedback");
  const Index e1 = sizes.contains("estimate1") ? size_field(sizes, "estimate1") : bc.state1_size;
  const Index e2 = sizes.contains("estimate2") ? size_field(sizes, "estimate2") : bc.state2_size;

  bc.state_pmf = matrix_field(need(j, "state_pmf", "broadcast channel"), bc.state1_size, bc.state2_size,
                              "state_pmf");
  {
    Eigen::VectorXd flat = bc.state_pmf.transpose().reshaped();
    renormalize(flat, "state_pmf");
    bc.state_pmf = flat.reshaped(bc.state2_size, bc.state1_size).transpose();
  }

  // law[s1][s2][x][y1][y2][z]
  const Index ns = bc.state1_size * bc.state2_size;
  Eigen::MatrixXd flat = nested_law(need(j, "law", "broadcast channel"), bc.state1_size, bc.state2_size,
                                    {bc.input_size, bc.output1_size, bc.output2_size, bc.feedback_size}, "law");
  const Index cols = bc.output1_size * bc.output2_size * bc.feedback_size;
  bc.law.resize(ns * bc.input_size, cols);
  for (Index s = 0; s < ns; ++s)
    for (Index x = 0; x < bc.input_size; ++x) {
      Eigen::VectorXd row = flat.row(s).segment(x * cols, cols).transpose();
      renormalize(row, "law row (s1=" + std::to_string(s / bc.state2_size) + ",s2=" +
                           std::to_string(s % bc.state2_size) + ",x=" + std::to_string(x) + ")");
      bc.law.row(s * bc.input_size + x) = row.transpose();
    }
  bc.distortion1 = matrix_field(need(j, "distortion1", "broadcast channel"), bc.state1_size, e1, "distortion1");
  bc.distortion2 = matrix_field(need(j, "distortion2", "broadcast channel"), bc.state2_size, e2, "distortion2");
  if (j.contains("labels")) bc.labels = parse_labels(j.at("labels"));
  validate(bc);
  return bc;
}

json vector_json(const Eigen::Ref<const Eigen::VectorXd>& v) {
  json a = json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

json matrix_json(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  json a = json::array();
  for (Index r = 0; r < m.rows(); ++r) a.push_back(vector_json(m.row(r).transpose()));
  return a;
}

json sparse_json(const Kernel& k) {
  json rows = json::array();
  for (Index r = 0; r < k.rows(); ++r) {
    json row = json::array();
    for (Kernel::InnerIterator it(k, r); it; ++it) row.push_back(json::array({it.col(), it.value()}));
    rows.push_back(std::move(row));
  }
  return json{{"sparse_rows", std::move(rows)}};
}

json labels_json(const Labels& labels) {
  json l = json::object();
  for (const auto& [k, v] : labels) l[k] = v;
  return l;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SpecError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

AnySpec parse_spec(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw SpecError("channel document must be a JSON object");
  const json& kind = need(j, "kind", "channel");
  if (!kind.is_string()) throw SpecError("kind must be a string");
  try {
    if (kind == "sdmc") return parse_sdmc(j);
    if (kind == "sdmbc") return parse_sdmbc(j);
  } catch (const json::exception& e) {
    throw SpecError(std::string("malformed channel: ") + e.what());
  }
  throw SpecError("unknown kind \"" + kind.get<std::string>() + "\"");
}

AnySpec load_spec(const std::filesystem::path& path) { return parse_spec(read_file(path)); }

std::string to_json(const SdmcSpec& spec) {
  json j;
  j["kind"] = "sdmc";
  j["sizes"] = {{"input", spec.input_size},   {"state", spec.state_size},
                {"output", spec.output_size}, {"feedback", spec.feedback_size},
                {"estimate", spec.estimate_size}};
  j["state_pmf"] = vector_json(spec.state_pmf);
  if (spec.joint_law) {
    const auto& joint = *spec.joint_law;
    json law = json::array();
    for (Index x = 0; x < spec.input_size; ++x) {
      json lx = json::array();
      for (Index s = 0; s < spec.state_size; ++s) {
        const Eigen::VectorXd row = joint.row(spec.row(x, s)).transpose();
        lx.push_back(matrix_json(row.reshaped(spec.feedback_size, spec.output_size).transpose()));
      }
      law.push_back(std::move(lx));
    }
    j["law"] = std::move(law);
  } else {
    j["law_y"] = sparse_json(spec.law_y);
    j["law_z"] = sparse_json(spec.law_z);
  }
  if (spec.distortion.is_squared_error()) {
    const auto& sq = spec.distortion.squared_error();
    j["distortion"] = {{"squared_error",
                        {{"state_values", vector_json(sq.state_values)},
                         {"estimate_values", vector_json(sq.estimate_values)}}}};
  } else {
    j["distortion"] = matrix_json(spec.distortion.table());
  }
  j["cost"] = vector_json(spec.cost);
  if (!spec.labels.empty()) j["labels"] = labels_json(spec.labels);
  return j.dump();
}

std::string to_json(const SdmbcSpec& bc) {
  json j;
  j["kind"] = "sdmbc";
  j["sizes"] = {{"input", bc.input_size},     {"state1", bc.state1_size},
                {"state2", bc.state2_size},   {"output1", bc.output1_size},
                {"output2", bc.output2_size}, {"feedback", bc.feedback_size},
                {"estimate1", bc.estimate1_size()}, {"estimate2", bc.estimate2_size()}};
  j["state_pmf"] = matrix_json(bc.state_pmf);
  json law = json::array();
  for (Index s1 = 0; s1 < bc.state1_size; ++s1) {
    json l1 = json::array();
    for (Index s2 = 0; s2 < bc.state2_size; ++s2) {
      json l2 = json::array();
      for (Index x = 0; x < bc.input_size; ++x) {
        json lx = json::array();
        for (Index y1 = 0; y1 < bc.output1_size; ++y1) {
          json ly1 = json::array();
          for (Index y2 = 0; y2 < bc.output2_size; ++y2) {
            json ly2 = json::array();
            for (Index z = 0; z < bc.feedback_size; ++z) ly2.push_back(bc.law(bc.row(s1, s2, x), bc.col(y1, y2, z)));
            ly1.push_back(std::move(ly2));
          }
          lx.push_back(std::move(ly1));
        }
        l2.push_back(std::move(lx));
      }
      l1.push_back(std::move(l2));
    }
    law.push_back(std::move(l1));
  }
  j["law"] = std::move(law);
  j["distortion1"] = matrix_json(bc.distortion1);
  j["distortion2"] = matrix_json(bc.distortion2);
  if (!bc.labels.empty()) j["labels"] = labels_json(bc.labels);
  return j.dump();
}

MappingTable parse_mapping(std::string_view json_text) {
  const json j = parse_json(json_text);
  if (!j.is_object()) throw SpecError("mapping document must be a JSON object");
  reject_unknown(j, {"kind", "codomain_size", "image"}, "mapping");
  const json& kind = need(j, "kind", "mapping");
  if (kind != "mapping") throw SpecError("mapping kind must be \"mapping\"");
  const json& cs = need(j, "codomain_size", "mapping");
  if (!cs.is_number_integer() || cs.get<long long>() < 1) throw SpecError("codomain_size must be a positive integer");
  const json& image = need(j, "image", "mapping");
  if (!image.is_array() || image.empty() || !image[0].is_array())
    throw SpecError("image must be a non-empty array of rows");
  MappingTable m;
  m.codomain_size = static_cast<Index>(cs.get<long long>());
  m.image.resize(static_cast<Index>(image.size()), static_cast<Index>(image[0].size()));
  for (Index x = 0; x < m.image.rows(); ++x) {
    const json& row = image[static_cast<std::size_t>(x)];
    if (!row.is_array() || static_cast<Index>(row.size()) != m.image.cols())
      throw SpecError("image rows must all have the same length");
    for (Index z = 0; z < m.image.cols(); ++z) {
      const json& v = row[static_cast<std::size_t>(z)];
      if (!v.is_number_integer()) throw SpecError("image entries must be integers");
      m.image(x, z) = static_cast<int>(v.get<long long>());
    }
  }
  validate(m, m.image.rows(), m.image.cols());
  return m;
}

std::string to_json(const MappingTable& psi) {
  json image = json::array();
  for (Index x = 0; x < psi.image.rows(); ++x) {
    json row = json::array();
    for (Index z = 0; z < psi.image.cols(); ++z) row.push_back(psi.image(x, z));
    image.push_back(std::move(row));
  }
  return json{{"kind", "mapping"}, {"codomain_size", psi.codomain_size}, {"image", std::move(image)}}.dump();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SpecError("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace isac
