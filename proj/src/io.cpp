#include "qcorr/io.hpp"

#include <fstream>
#include <regex>
#include <sstream>

namespace qcorr::io {
namespace {

const json& require(const json& j, const std::string& key) {
  if (!j.is_object()) throw ParseError(key, "document is not a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ParseError(key, "missing");
  return *it;
}

Index positive_int(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 1)
    throw ParseError(field, "expected a positive integer");
  return static_cast<Index>(j.get<long long>());
}

double number(const json& j, const std::string& field) {
  if (!j.is_number()) throw ParseError(field, "expected a number");
  return j.get<double>();
}

Dims dims_from_json(const json& j) {
  const json& d = require(j, "dims");
  if (!d.is_array() || d.size() != 2) throw ParseError("dims", "expected [d_a, d_b]");
  return {positive_int(d[0], "dims"), positive_int(d[1], "dims")};
}

json dims_to_json(Dims d) { return json::array({d.a, d.b}); }

std::vector<OperatorXd> operator_list(const json& j, const std::string& field, Index dim) {
  if (!j.is_array()) throw ParseError(field, "expected an array of matrices");
  std::vector<OperatorXd> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string name = field + "[" + std::to_string(k) + "]";
    OperatorXd m = operator_from_json(j[k], name);
    if (m.rows() != dim) throw ParseError(name, "expected dimension " + std::to_string(dim));
    out.push_back(std::move(m));
  }
  return out;
}

DensityMatrix<double> density(const OperatorXd& m, const std::string& field, double tol) {
  try {
    return DensityMatrix<double>(m, tol);
  } catch (const InvalidState& e) {
    throw InvalidState(field + ": " + e.what());
  }
}

RealMatrix<double> real_table(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty() || !j[0].is_array())
    throw ParseError(field, "expected a non-empty table of numbers");
  const std::size_t rows = j.size(), cols = j[0].size();
  RealMatrix<double> w(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols) throw ParseError(field, "ragged table");
    for (std::size_t k = 0; k < cols; ++k)
      w(static_cast<Index>(i), static_cast<Index>(k)) = number(j[i][k], field);
  }
  return w;
}

json real_table_to_json(const RealMatrix<double>& w) {
  json rows = json::array();
  for (Index i = 0; i < w.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < w.cols(); ++k) row.push_back(w(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

// Probability table read from a file: small negative entries and a small
// normalization error (both within tol) are absorbed.
RealMatrix<double> probability_table(RealMatrix<double> w, const std::string& field, double tol) {
  if (w.minCoeff() < -tol) throw InvalidState(field + ": negative weight");
  w = w.cwiseMax(0.0);
  if (std::abs(w.sum() - 1.0) > tol) throw InvalidState(field + ": weights do not sum to 1");
  return w / w.sum();
}

std::vector<std::string> labels_from_json(const json& j, const std::string& field) {
  if (!j.is_array()) throw ParseError(field, "expected an array of labels");
  std::vector<std::string> out;
  for (const auto& x : j) {
    if (!x.is_string()) throw ParseError(field, "labels must be strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

}  // namespace

json operator_to_json(const OperatorXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < m.cols(); ++k) row.push_back(json::array({m(i, k).real(), m(i, k).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

OperatorXd operator_from_json(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) throw ParseError(field, "expected a non-empty array of rows");
  const std::size_t n = j.size();
  OperatorXd m(static_cast<Index>(n), static_cast<Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != n)
      throw ParseError(field, "row " + std::to_string(i) + " does not have " + std::to_string(n) +
                                  " entries");
    for (std::size_t k = 0; k < n; ++k) {
      const json& z = row[k];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ParseError(field, "entry (" + std::to_string(i) + ", " + std::to_string(k) +
                                    ") is not a [re, im] pair");
      m(static_cast<Index>(i), static_cast<Index>(k)) = {z[0].get<double>(), z[1].get<double>()};
    }
  }
  if (!m.allFinite()) throw ParseError(field, "non-finite entry");
  return m;
}

json state_to_json(const BipartiteState<double>& s) {
  return {{"dims", dims_to_json(s.dims())}, {"matrix", operator_to_json(s.matrix())}};
}

RawState raw_state_from_json(const json& j) {
  RawState raw{dims_from_json(j), operator_from_json(require(j, "matrix"), "matrix")};
  if (raw.matrix.rows() != raw.dims.total())
    throw ParseError("matrix", "size " + std::to_string(raw.matrix.rows()) +
                                   " does not match dims " + to_string(raw.dims));
  return raw;
}

BipartiteState<double> state_from_json(const json& j, double tol) {
  const RawState raw = raw_state_from_json(j);
  return {density(raw.matrix, "matrix", tol), raw.dims};
}

json decomposition_to_json(const SeparableDecomposition<double>& d) {
  json sa = json::array(), sb = json::array();
  for (const auto& [ra, rb] : d.pairs()) {
    sa.push_back(operator_to_json(ra.matrix()));
    sb.push_back(operator_to_json(rb.matrix()));
  }
  return {{"type", "separable"},
          {"dims", dims_to_json(d.dims())},
          {"weights", d.weights()},
          {"states_a", std::move(sa)},
          {"states_b", std::move(sb)}};
}

json decomposition_to_json(const CCDecomposition<double>& d) {
  json ba = json::array(), bb = json::array();
  for (const auto& p : d.basis_a().projectors()) ba.push_back(operator_to_json(p));
  for (const auto& p : d.basis_b().projectors()) bb.push_back(operator_to_json(p));
  return {{"type", "cc"},
          {"dims", dims_to_json(d.dims())},
          {"weights", real_table_to_json(d.weights())},
          {"basis_a", std::move(ba)},
          {"basis_b", std::move(bb)}};
}

Decomposition decomposition_from_json(const json& j, double tol) {
  const json& type = require(j, "type");
  if (!type.is_string()) throw ParseError("type", "expected a string");
  const Dims dims = dims_from_json(j);
  const std::string kind = type.get<std::string>();
  if (kind == "separable") {
    const json& wj = require(j, "weights");
    if (!wj.is_array() || wj.empty()) throw ParseError("weights", "expected a non-empty array");
    RealMatrix<double> w(1, static_cast<Index>(wj.size()));
    for (std::size_t i = 0; i < wj.size(); ++i) w(0, static_cast<Index>(i)) = number(wj[i], "weights");
    w = probability_table(std::move(w), "weights", tol);
    const auto sa = operator_list(require(j, "states_a"), "states_a", dims.a);
    const auto sb = operator_list(require(j, "states_b"), "states_b", dims.b);
    if (sa.size() != wj.size()) throw ParseError("states_a", "count does not match weights");
    if (sb.size() != wj.size()) throw ParseError("states_b", "count does not match weights");
    std::vector<double> weights(w.data(), w.data() + w.size());
    std::vector<SeparableDecomposition<double>::Pair> pairs;
    for (std::size_t i = 0; i < sa.size(); ++i)
      pairs.emplace_back(density(sa[i], "states_a[" + std::to_string(i) + "]", tol),
                         density(sb[i], "states_b[" + std::to_string(i) + "]", tol));
    return SeparableDecomposition<double>(std::move(weights), std::move(pairs));
  }
  if (kind == "cc") {
    RealMatrix<double> w = real_table(require(j, "weights"), "weights");
    if (w.rows() != dims.a || w.cols() != dims.b)
      throw ParseError("weights", "expected a " + to_string(dims) + " table");
    w = probability_table(std::move(w), "weights", tol);
    const auto pa = operator_list(require(j, "basis_a"), "basis_a", dims.a);
    const auto pb = operator_list(require(j, "basis_b"), "basis_b", dims.b);
    auto basis = [tol](const std::vector<OperatorXd>& ps, const std::string& field) {
      try {
        return ProjectiveBasis<double>::from_projectors(ps, tol);
      } catch (const InvalidState& e) {
        throw InvalidState(field + ": " + e.what());
      }
    };
    return CCDecomposition<double>(std::move(w), basis(pa, "basis_a"), basis(pb, "basis_b"));
  }
  throw ParseError("type", "expected \"separable\" or \"cc\", got \"" + kind + "\"");
}

json model_to_json(const LinearLhvModel<double>& m) {
  json ka = json::array(), kb = json::array();
  for (const auto& f : m.kernel(Side::a).operators()) ka.push_back(operator_to_json(f.matrix()));
  for (const auto& f : m.kernel(Side::b).operators()) kb.push_back(operator_to_json(f.matrix()));
  return {{"dims", dims_to_json(m.dims())},
          {"events_a", m.events(Side::a).labels()},
          {"events_b", m.events(Side::b).labels()},
          {"weights", real_table_to_json(m.measure().weights())},
          {"kernel_a", std::move(ka)},
          {"kernel_b", std::move(kb)}};
}

LinearLhvModel<double> model_from_json(const json& j, double tol) {
  const Dims dims = dims_from_json(j);
  auto ea = labels_from_json(require(j, "events_a"), "events_a");
  auto eb = labels_from_json(require(j, "events_b"), "events_b");
  RealMatrix<double> w = real_table(require(j, "weights"), "weights");
  if (static_cast<std::size_t>(w.rows()) != ea.size() ||
      static_cast<std::size_t>(w.cols()) != eb.size())
    throw ParseError("weights", "table shape does not match the event spaces");
  w = probability_table(std::move(w), "weights", tol);
  auto kernel = [&](const std::string& field, Index dim, std::size_t count) {
    const auto ops = operator_list(require(j, field), field, dim);
    if (ops.size() != count) throw ParseError(field, "one operator per event required");
    std::vector<DensityMatrix<double>> out;
    for (std::size_t i = 0; i < ops.size(); ++i)
      out.push_back(density(ops[i], field + "[" + std::to_string(i) + "]", tol));
    return OperatorKernel<double>(std::move(out));
  };
  auto ka = kernel("kernel_a", dims.a, ea.size());
  auto kb = kernel("kernel_b", dims.b, eb.size());
  try {
    return LinearLhvModel<double>(EventSpace(std::move(ea)), EventSpace(std::move(eb)),
                                  JointMeasure<double>(std::move(w)), std::move(ka), std::move(kb));
  } catch (const InvalidState& e) {
    throw ParseError("events", e.what());
  }
}

json frame_to_json(const OperatorFrame<double>& f) {
  json el = json::array();
  for (const auto& e : f.elements()) el.push_back(operator_to_json(e.matrix()));
  return {{"dim", f.dim()}, {"elements", std::move(el)}};
}

OperatorFrame<double> frame_from_json(const json& j, double tol) {
  const Index d = positive_int(require(j, "dim"), "dim");
  const auto ops = operator_list(require(j, "elements"), "elements", d);
  std::vector<DensityMatrix<double>> el;
  for (std::size_t i = 0; i < ops.size(); ++i)
    el.push_back(density(ops[i], "elements[" + std::to_string(i) + "]", tol));
  return OperatorFrame<double>(std::move(el));
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("<file>", "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte, text.size());
    std::string field = "<document>";
    static const std::regex key(R"re("([^"\\]+)"\s*:)re");
    const std::string head = text.substr(0, pos);
    for (auto it = std::sregex_iterator(head.begin(), head.end(), key); it != std::sregex_iterator();
         ++it)
      field = (*it)[1].str();
    throw ParseError(field, "malformed JSON in " + path.string() + " at byte " +
                                std::to_string(e.byte) + " (truncated or invalid syntax)");
  }
}

void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out.flush()) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw Error("cannot write " + path.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace qcorr::io
