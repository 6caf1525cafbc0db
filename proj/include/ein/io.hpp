#pragma once

// JSON and CSV encodings of inputs and reports.

#include "ein/classify.hpp"
#include "ein/harness.hpp"
#include "ein/spectral.hpp"

#include <json.hpp>

#include <stdexcept>
#include <string>

namespace ein::io {

using nlohmann::json;

/// Malformed or inconsistent input document; the message names the line or field.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Serializes with floating-point numbers at 17 significant digits.
std::string dump(const json& j, int indent = 2);

/// Parses a document; syntax errors report line and column.
json parse_document(const std::string& text);

json to_json(const Signature& sig);
json to_json(const Vector& v);
/// Row-major array of rows.
json to_json(const Matrix& m);
json to_json(const ClassificationReport& r);
json to_json(const AlgebraReport& r);
json to_json(const ExperimentReport& r);
json to_json(const Signature& sig, const JordanFactors& f, const JordanResiduals& res);

Signature parse_signature(const json& j, const std::string& path);
double parse_real(const json& j, const std::string& path);
/// Exactly n reals.
Vector parse_vector(const json& j, int n, const std::string& path);
/// rows*cols reals, row-major, either flat or as an array of rows.
Matrix parse_matrix(const json& j, int rows, int cols, const std::string& path);

struct FieldSpec {
  Signature sig;
  MobiusFieldd field;
  json options = json::object();
};

/// {signature, field: {matrix} | {affine: {a, M, T}}, options}. Both encodings
/// produce the same matrix, so downstream output does not depend on the encoding.
FieldSpec parse_field_spec(const json& j, const std::string& path = "$");

/// {signature, map: {scale, A, T}}.
AffineConformalMapd parse_map_spec(const json& j, const std::string& path = "$");

/// Header row "index,t,observable".
std::string traces_csv(const ExperimentReport& r);

/// Shortest decimal that round-trips, used for CSV cells and parameter strings.
std::string format_real(double x);

}  // namespace ein::io
