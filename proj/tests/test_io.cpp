#include "approx.hpp"

#include "ein/io.hpp"

#include <string>

using namespace ein;
using io::json;

namespace {

bool contains(const std::string& hay, const std::string& needle) { return hay.find(needle) != std::string::npos; }

std::string error_of(const std::string& text) {
  try {
    io::parse_field_spec(io::parse_document(text));
  } catch (const io::InputError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("io") {

TEST_CASE("numbers are written with 17 significant digits") {
  const std::string s = io::dump(json{{"x", 0.1}, {"y", -0.0}, {"z", 3}});
  CHECK(contains(s, "0.10000000000000001"));
  CHECK(contains(s, "\"y\": 0"));
  CHECK_FALSE(contains(s, "-0"));
  CHECK(contains(s, "\"z\": 3"));
  const double third = 1.0 / 3.0;
  CHECK(io::parse_document(io::dump(json(third))).get<double>() == third);
  CHECK(io::dump(json(std::nan(""))) == "null");
}

TEST_CASE("shortest round-trip formatting") {
  CHECK(io::format_real(0.1) == "0.1");
  CHECK(io::format_real(2.0) == "2");
  CHECK(std::stod(io::format_real(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("syntax errors name the line and column") {
  try {
    io::parse_document("{\n  \"signature\": {\"p\": 0,\n  \"q\": }\n}");
    FAIL("expected an error");
  } catch (const io::InputError& e) {
    CHECK(contains(e.what(), "line 3"));
    CHECK(contains(e.what(), "column"));
  }
}

TEST_CASE("field spec validation") {
  CHECK(contains(error_of("{}"), "signature"));
  CHECK(contains(error_of(R"({"signature": {"p": 0, "q": 3}})"), "field"));
  CHECK(contains(error_of(R"({"signature": {"p": 0, "q": 3}, "field": {}})"), "exactly one"));
  CHECK(contains(error_of(R"({"signature": {"p": 0, "q": 3}, "field": {"affine": {"a": 0, "M": [0,0,0,0,0,0,0,0,0], "T": [1, 0]}}})"),
                 "T"));
  CHECK(contains(error_of(R"({"signature": {"p": 0.5, "q": 3}, "field": {"affine": {"a": 0}}})"), "integer"));
  // A non-algebra matrix is rejected.
  std::string bad = R"({"signature": {"p": 0, "q": 3}, "field": {"matrix": [)";
  for (int i = 0; i < 25; ++i) bad += (i ? ",1" : "1");
  bad += "]}}";
  CHECK_FALSE(error_of(bad).empty());
}

TEST_CASE("affine and matrix encodings give identical reports") {
  const std::string affine = R"({"signature": {"p": 1, "q": 2},
    "field": {"affine": {"a": 0.5, "M": [[0, 0, 0], [0, 0, 0], [0, 0, 0]], "T": [0, 0, -1]}}})";
  const auto A = io::parse_field_spec(io::parse_document(affine));
  const json matrix = {{"signature", {{"p", 1}, {"q", 2}}}, {"field", {{"matrix", io::to_json(A.field.mat())}}}};
  const auto B = io::parse_field_spec(matrix);
  CHECK(io::dump(io::to_json(classify_field(A.field))) == io::dump(io::to_json(classify_field(B.field))));
  CHECK((A.field.mat() - B.field.mat()).norm() == 0.0);
}

TEST_CASE("flat and nested matrices") {
  const Matrix a = io::parse_matrix(json::parse("[1,2,3,4]"), 2, 2, "$");
  const Matrix b = io::parse_matrix(json::parse("[[1,2],[3,4]]"), 2, 2, "$");
  CHECK((a - b).norm() == 0.0);
  CHECK(a(0, 1) == 2.0);
  CHECK_THROWS_AS(io::parse_matrix(json::parse("[1,2,3]"), 2, 2, "$"), io::InputError);
  CHECK_THROWS_AS(io::parse_matrix(json::parse("[[1,2],[3]]"), 2, 2, "$"), io::InputError);
}

TEST_CASE("map spec") {
  const auto h = io::parse_map_spec(json::parse(R"({"signature": {"p": 0, "q": 3},
    "map": {"scale": 2, "A": [1,0,0,0,1,0,0,0,1], "T": [1, 0, 0]}})"));
  CHECK(h.scale == 2.0);
  CHECK(h.T(0) == 1.0);
  CHECK_THROWS(io::parse_map_spec(json::parse(R"({"signature": {"p": 0, "q": 3},
    "map": {"scale": -1, "A": [1,0,0,0,1,0,0,0,1], "T": [1, 0, 0]}})")));
}

TEST_CASE("report encodings") {
  const Signature sig{0, 3};
  const auto rep = classify_field(affine_to_field(AffineConformalFieldd{sig, 0.0, Matrix::Zero(3, 3), Vector::Unit(3, 0)}));
  const json j = io::to_json(rep);
  CHECK(j.at("linearizable") == false);
  CHECK(j.at("riemannian_case") == "CASE2_TRANSLATION");
  CHECK(j.at("fixed_point").is_null());
  CHECK(j.at("parabolic_vector").at("is_null") == false);
  CHECK(j.at("field").at("T").size() == 3);

  ExperimentReport e;
  e.name = "demo";
  e.traces = {{0, 0.0, 1.5}, {1, 0.25, 0.1}};
  e.settle();
  const json je = io::to_json(e);
  CHECK(je.at("tolerance").is_null());
  CHECK(je.at("exploratory") == true);
  CHECK(io::traces_csv(e) == "index,t,observable\n0,0,1.5\n1,0.25,0.1\n");
}

}  // TEST_SUITE
