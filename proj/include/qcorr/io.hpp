#pragma once

// JSON document formats shared by the CLI: state files, decomposition files,
// LHV model files and operator frames. Every operator is written as a
// row-major array of rows, each row an array of [re, im] pairs.

#include <filesystem>
#include <string>
#include <variant>

#include <json.hpp>

#include "qcorr/qcorr.hpp"

namespace qcorr::io {

using json = nlohmann::json;

// Tolerance applied when validating operators read from files.
inline constexpr double kFileTolerance = 1e-8;

// Malformed document; `field` names the offending entry.
class ParseError : public Error {
 public:
  ParseError(std::string field, const std::string& what)
      : Error("field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

json operator_to_json(const OperatorXd& m);
OperatorXd operator_from_json(const json& j, const std::string& field);

json state_to_json(const BipartiteState<double>& s);
// Structural problems raise ParseError; a well-formed matrix that is not a
// state (non-Hermitian, trace != 1, not PSD beyond tol) raises InvalidState.
BipartiteState<double> state_from_json(const json& j, double tol = kFileTolerance);

// Structure check only, for reporting validity flags.
struct RawState {
  Dims dims;
  OperatorXd matrix;
};
RawState raw_state_from_json(const json& j);

using Decomposition = std::variant<SeparableDecomposition<double>, CCDecomposition<double>>;
json decomposition_to_json(const SeparableDecomposition<double>& d);
json decomposition_to_json(const CCDecomposition<double>& d);
Decomposition decomposition_from_json(const json& j, double tol = kFileTolerance);

json model_to_json(const LinearLhvModel<double>& m);
LinearLhvModel<double> model_from_json(const json& j, double tol = kFileTolerance);

json frame_to_json(const OperatorFrame<double>& f);
OperatorFrame<double> frame_from_json(const json& j, double tol = kFileTolerance);

// Reads and parses a JSON file. Syntax errors raise ParseError naming the last
// field that was being read.
json read_json_file(const std::filesystem::path& path);

// Writes `text` to `path` via a temporary file and rename, so a failed write
// never leaves a partial file behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& text);

std::string dump(const json& j);

}  // namespace qcorr::io
