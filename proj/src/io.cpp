#include "ein/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace ein::io {

namespace {

bool is_scalar_array(const json& j) {
  for (const auto& e : j)
    if (e.is_structured()) return false;
  return true;
}

void write(std::string& out, const json& j, int indent, int depth) {
  const auto pad = [&](int d) {
    if (indent >= 0) out += '\n' + std::string(std::size_t(indent * d), ' ');
  };
  switch (j.type()) {
    case json::value_t::number_float: {
      const double x = j.get<double>() + 0.0;  // drops the sign of -0
      if (!std::isfinite(x)) {
        out += "null";
      } else {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out += buf;
      }
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      const bool inline_ = indent < 0 || is_scalar_array(j);
      out += '[';
      bool first = true;
      for (const auto& e : j) {
        if (!first) out += inline_ && indent >= 0 ? ", " : ",";
        first = false;
        if (!inline_) pad(depth + 1);
        write(out, e, indent, depth + 1);
      }
      if (!inline_) pad(depth);
      out += ']';
      return;
    }
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (const auto& [key, value] : j.items()) {
        if (!first) out += ',';
        first = false;
        pad(depth + 1);
        out += json(key).dump();
        out += indent >= 0 ? ": " : ":";
        write(out, value, indent, depth + 1);
      }
      pad(depth);
      out += '}';
      return;
    }
    default:
      out += j.dump();
  }
}

json optional_vector(const std::optional<Vector>& v) {
  return v ? to_json(*v) : json(nullptr);
}

const json& member(const json& j, const char* key, const std::string& path) {
  if (!j.is_object()) throw InputError(path + ": expected an object");
  const auto it = j.find(key);
  if (it == j.end()) throw InputError(path + ": missing field \"" + key + "\"");
  return *it;
}

}  // namespace

std::string format_real(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x + 0.0);
  return std::string(buf, res.ptr);
}

std::string dump(const json& j, int indent) {
  std::string out;
  write(out, j, indent, 0);
  return out;
}

json parse_document(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string what = e.what();
    const auto colon = what.find(": ");
    if (colon != std::string::npos) what = what.substr(colon + 2);
    throw InputError("malformed JSON at line " + std::to_string(line) + ", column " +
                     std::to_string(column) + ": " + what);
  }
}

json to_json(const Signature& sig) { return {{"p", sig.p}, {"q", sig.q}}; }

json to_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) rows.push_back(to_json(Vector(m.row(i).transpose())));
  return rows;
}

json to_json(const ClassificationReport& r) {
  json j;
  j["signature"] = to_json(r.sig);
  j["field"] = {{"a", r.field.a}, {"M", to_json(r.field.M)}, {"T", to_json(r.field.T)}};
  j["fixed_point"] = optional_vector(r.fixed_point);
  j["linearizable"] = r.linearizable;
  j["inessential"] = r.inessential;
  j["essential"] = !r.inessential;
  if (r.parabolic) {
    j["parabolic_vector"] = {{"u", to_json(r.parabolic->u)},
                             {"is_null", r.parabolic->is_null},
                             {"pairing", r.parabolic->pairing},
                             {"eigen_residual", r.parabolic->eigen_residual},
                             {"candidate_dimension", r.parabolic->candidate_dimension}};
  } else {
    j["parabolic_vector"] = nullptr;
  }
  j["riemannian_case"] = r.riemannian_case ? json(to_string(*r.riemannian_case)) : json(nullptr);
  j["conclusion"] = r.conclusion;
  j["low_confidence"] = r.low_confidence;
  j["residuals"] = r.residuals;
  return j;
}

json to_json(const AlgebraReport& r) {
  json j;
  j["riemannian_case"] = r.riemannian_case;
  j["compact"] = r.compact.compact;
  j["joint_fixed_point"] = optional_vector(r.joint_fixed_point);
  j["bracket_residual"] = r.compact.bracket_residual;
  j["bracket_warning"] = r.compact.bracket_warning;
  j["rank_warning"] = r.compact.rank_warning;
  j["witness"] = r.witness ? json(*r.witness) : json(nullptr);
  j["witness_report"] = r.witness_report ? to_json(*r.witness_report) : json(nullptr);
  return j;
}

json to_json(const ExperimentReport& r) {
  json j;
  j["name"] = r.name;
  j["parameters"] = r.parameters;
  j["samples"] = r.samples;
  j["max_violation"] = r.max_violation;
  j["tolerance"] = r.tolerance ? json(*r.tolerance) : json(nullptr);
  j["exploratory"] = !r.tolerance.has_value();
  j["pass"] = r.pass;
  j["statistics"] = r.statistics;
  json traces = json::array();
  for (const auto& row : r.traces)
    traces.push_back({{"index", static_cast<long long>(row.index)}, {"t", row.t}, {"observable", row.observable}});
  j["traces"] = traces;
  j["notes"] = r.notes;
  return j;
}

json to_json(const Signature& sig, const JordanFactors& f, const JordanResiduals& res) {
  json j;
  j["signature"] = to_json(sig);
  j["A_s"] = to_json(f.A_s);
  j["A_e"] = to_json(f.A_e);
  j["A_u"] = to_json(f.A_u);
  j["residuals"] = {{"membership", res.membership},
                    {"commutation", res.commutation},
                    {"product", res.product},
                    {"unipotent", res.unipotent},
                    {"spectrum", res.spectrum}};
  j["max_residual"] = res.max();
  return j;
}

double parse_real(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path + ": expected a number");
  return j.get<double>();
}

Signature parse_signature(const json& j, const std::string& path) {
  const auto int_field = [&](const char* key) {
    const json& v = member(j, key, path);
    if (!v.is_number_integer() && !v.is_number_unsigned())
      throw InputError(path + "." + key + ": expected an integer");
    return v.get<int>();
  };
  const Signature sig{int_field("p"), int_field("q")};
  try {
    validate(sig);
  } catch (const Error& e) {
    throw InputError(path + ": " + e.what());
  }
  return sig;
}

Vector parse_vector(const json& j, int n, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array of " + std::to_string(n) + " numbers");
  if (int(j.size()) != n)
    throw InputError(path + ": expected " + std::to_string(n) + " entries, got " + std::to_string(j.size()));
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = parse_real(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

Matrix parse_matrix(const json& j, int rows, int cols, const std::string& path) {
  if (!j.is_array()) throw InputError(path + ": expected an array");
  Matrix m(rows, cols);
  if (!j.empty() && j[0].is_array()) {
    if (int(j.size()) != rows)
      throw InputError(path + ": expected " + std::to_string(rows) + " rows, got " + std::to_string(j.size()));
    for (int i = 0; i < rows; ++i)
      m.row(i) = parse_vector(j[i], cols, path + "[" + std::to_string(i) + "]").transpose();
    return m;
  }
  const Vector flat = parse_vector(j, rows * cols, path);
  for (int i = 0; i < rows; ++i)
    for (int k = 0; k < cols; ++k) m(i, k) = flat(i * cols + k);
  return m;
}

FieldSpec parse_field_spec(const json& j, const std::string& path) {
  const Signature sig = parse_signature(member(j, "signature", path), path + ".signature");
  const json& field = member(j, "field", path);
  const std::string fpath = path + ".field";
  if (!field.is_object()) throw InputError(fpath + ": expected an object");
  const bool has_matrix = field.contains("matrix"), has_affine = field.contains("affine");
  if (has_matrix == has_affine)
    throw InputError(fpath + ": exactly one of \"matrix\" or \"affine\" is required");
  json options = json::object();
  if (j.contains("options")) {
    options = j["options"];
    if (!options.is_object()) throw InputError(path + ".options: expected an object");
  }
  const int n = sig.n(), N = sig.ambient();
  if (has_matrix) {
    const Matrix X = parse_matrix(field["matrix"], N, N, fpath + ".matrix");
    try {
      return {sig, MobiusFieldd::checked(sig, X), options};
    } catch (const Error& e) {
      throw InputError(fpath + ".matrix: " + e.what());
    }
  }
  const json& aff = field["affine"];
  const std::string apath = fpath + ".affine";
  const AffineConformalFieldd F{sig, parse_real(member(aff, "a", apath), apath + ".a"),
                                parse_matrix(member(aff, "M", apath), n, n, apath + ".M"),
                                parse_vector(member(aff, "T", apath), n, apath + ".T")};
  try {
    validate(F);
  } catch (const Error& e) {
    throw InputError(apath + ".M: " + e.what());
  }
  return {sig, affine_to_field(F), options};
}

AffineConformalMapd parse_map_spec(const json& j, const std::string& path) {
  const Signature sig = parse_signature(member(j, "signature", path), path + ".signature");
  const json& map = member(j, "map", path);
  const std::string mpath = path + ".map";
  const int n = sig.n();
  AffineConformalMapd h{sig, parse_real(member(map, "scale", mpath), mpath + ".scale"),
                        parse_matrix(member(map, "A", mpath), n, n, mpath + ".A"),
                        parse_vector(member(map, "T", mpath), n, mpath + ".T")};
  try {
    validate(h, 1e-8);
  } catch (const Error& e) {
    throw InputError(mpath + ": " + e.what());
  }
  return h;
}

std::string traces_csv(const ExperimentReport& r) {
  std::string out = "index,t,observable\n";
  for (const auto& row : r.traces)
    out += std::to_string(static_cast<long long>(row.index)) + "," + format_real(row.t) + "," +
           format_real(row.observable) + "\n";
  return out;
}

}  // namespace ein::io
