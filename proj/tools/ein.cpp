// Command-line frontend: classification, orbits, geodesics, experiments,
// Jordan factors and developments. JSON in, JSON or CSV out.

#include "ein/io.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

using namespace ein;
using io::json;

namespace {

enum Exit { kOk = 0, kFail = 1, kUsage = 2, kLowConfidence = 3 };

struct Common {
  std::string input;
  std::string output = "-";
  std::uint64_t seed = 1;
  std::optional<double> tol;
  bool strict = false;
};

std::string read_input(const std::string& path) {
  if (path.empty()) throw io::InputError("--input is required");
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path);
  if (!in) throw io::InputError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw io::InputError("cannot write " + path);
  out << text;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw io::InputError(what + ": cannot parse \"" + item + "\" as a number");
    }
  }
  return values;
}

Vector parse_point(const std::string& s, int n, const std::string& what) {
  const auto values = parse_list(s, what);
  if (int(values.size()) != n)
    throw io::InputError(what + ": expected " + std::to_string(n) + " coordinates");
  return Eigen::Map<const Vector>(values.data(), n);
}

Signature parse_sig(const std::string& s) {
  const auto values = parse_list(s, "--sig");
  if (values.size() != 2) throw io::InputError("--sig: expected p,q");
  const Signature sig{int(values[0]), int(values[1])};
  try {
    validate(sig);
  } catch (const Error& e) {
    throw io::InputError(std::string("--sig: ") + e.what());
  }
  return sig;
}

double option_tol(const Common& c, const json& options) {
  if (c.tol) return *c.tol;
  if (options.contains("tol")) return io::parse_real(options["tol"], "options.tol");
  return kRankTolerance;
}

std::vector<double> time_grid(const std::string& times, double t_max, int steps) {
  if (!times.empty()) return parse_list(times, "--times");
  if (steps < 1) throw io::InputError("--steps must be >= 1");
  std::vector<double> grid;
  for (int i = 0; i <= steps; ++i) grid.push_back(t_max * i / steps);
  return grid;
}

std::string csv_point(const std::optional<Vector>& y, int n) {
  std::string out;
  for (int i = 0; i < n; ++i) {
    out += ",";
    if (y) out += io::format_real((*y)(i));
    else if (i == 0) out += "OUTSIDE";
  }
  return out;
}

// classify ---------------------------------------------------------------

int cmd_classify(const Common& c, bool algebra) {
  const json doc = io::parse_document(read_input(c.input));
  const bool list = doc.is_array();
  std::vector<io::FieldSpec> specs;
  if (list) {
    if (doc.empty()) throw io::InputError("$: empty list");
    for (std::size_t i = 0; i < doc.size(); ++i)
      specs.push_back(io::parse_field_spec(doc[i], "$[" + std::to_string(i) + "]"));
  } else {
    specs.push_back(io::parse_field_spec(doc));
  }

  if (algebra) {
    std::vector<AffineConformalFieldd> fields;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      if (!(specs[i].sig == specs[0].sig)) throw io::InputError("$: generators must share a signature");
      fields.push_back(field_to_affine(specs[i].field));
    }
    const AlgebraReport r = classify_algebra(fields, option_tol(c, specs[0].options));
    write_output(c.output, io::dump(io::to_json(r)) + "\n");
    const bool low = r.witness_report && r.witness_report->low_confidence;
    return c.strict && (low || r.compact.rank_warning) ? kLowConfidence : kOk;
  }

  json out = json::array();
  bool low = false;
  for (const auto& spec : specs) {
    const ClassificationReport r = classify_field(spec.field, option_tol(c, spec.options));
    low = low || r.low_confidence;
    out.push_back(io::to_json(r));
  }
  write_output(c.output, io::dump(list ? out : out[0]) + "\n");
  return c.strict && low ? kLowConfidence : kOk;
}

// orbit ------------------------------------------------------------------

int cmd_orbit(const Common& c, const std::string& point, const std::string& chart,
              const std::string& times, double t_max, int steps) {
  const io::FieldSpec spec = io::parse_field_spec(io::parse_document(read_input(c.input)));
  const Signature& sig = spec.sig;
  const int n = sig.n();
  if (point.empty()) throw io::InputError("--point is required");
  const Vector y0 = parse_point(point, n, "--point");
  Vector start;
  if (chart == "j") start = chart_j_column(sig, y0);
  else if (chart == "jo") start = chart_jo_column(sig, y0);
  else throw io::InputError("--chart: expected j or jo");

  std::string out = "t";
  for (int i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
  out += ",rho_o\n";
  for (double t : time_grid(times, t_max, steps)) {
    const EinPointd z = EinPointd::from_rep(sig, Vector(projective_flow(spec.field, t) * start));
    const auto y = inverse_chart(z, Chart::JInfinity);
    out += io::format_real(t) + csv_point(y, n) + "," + (y ? io::format_real(y->norm()) : "") + "\n";
  }
  write_output(c.output, out);
  return kOk;
}

// geodesic ---------------------------------------------------------------

int cmd_geodesic(const Common& c, const std::string& mode, const std::string& sig_text,
                 const std::string& v_text, const std::string& v0_text, const std::string& s_text,
                 double s0, std::optional<double> R) {
  const Signature sig = parse_sig(sig_text);
  const int n = sig.n();
  const Vector v = parse_point(v_text, n, "--v");
  const Vector v0 = v0_text.empty() ? Vector(Vector::Zero(n)) : parse_point(v0_text, n, "--v0");
  const auto geo = ConformalGeodesicd::from_chart(sig, v, v0);
  json out;
  out["signature"] = io::to_json(sig);
  out["kind"] = to_string(geo.kind());
  out["v"] = io::to_json(v);
  out["v0"] = io::to_json(v0);
  if (mode == "evaluate") {
    json points = json::array();
    for (double s : parse_list(s_text, "--s")) {
      const EinPointd z = eval_geodesic(geo, s);
      const auto yj = inverse_chart(z, Chart::J);
      const auto yo = inverse_chart(z, Chart::JInfinity);
      points.push_back({{"s", s},
                        {"rep", io::to_json(z.rep())},
                        {"chart_j", yj ? io::to_json(*yj) : json(nullptr)},
                        {"chart_jo", yo ? io::to_json(*yo) : json(nullptr)}});
    }
    out["points"] = points;
  } else {
    if (!(s0 > 0)) throw io::InputError("--s0 must be > 0");
    QuadratureConfig quad;
    if (c.tol) quad.abs_tol = *c.tol;
    const GeodesicSegment<double> seg{geo, s0};
    const auto len = segment_length_L0(seg, quad);
    out["s0"] = s0;
    out["in_chart"] = len.has_value();
    out["length"] = len ? json(len->length) : json(nullptr);
    out["error_estimate"] = len ? json(len->error_estimate) : json(nullptr);
    if (R) {
      out["R"] = *R;
      out["inside_ball"] = segment_in_ball(seg, *R);
      out["bound_8nR"] = 8.0 * n * *R;
    }
  }
  write_output(c.output, io::dump(out) + "\n");
  return kOk;
}

// verify -----------------------------------------------------------------

struct VerifyArgs {
  std::string name;
  std::string sig = "";
  std::optional<double> R;
  std::optional<long> samples;
  double t_max = 1e4;
  int time_points = 60;
  double r = 1.0;
  std::string center;
  int k_max = 10;
  double envelope_constant = 1.0;
  double epsilon = 1e-2;
  std::string traces;
};

AffineConformalFieldd default_field(const Signature& sig, double a, bool translation) {
  AffineConformalFieldd F{sig, a, Matrix::Zero(sig.n(), sig.n()), Vector::Zero(sig.n())};
  if (translation) F.T(0) = 1.0;
  return F;
}

AffineConformalFieldd input_field(const Common& c, const AffineConformalFieldd& fallback) {
  if (c.input.empty()) return fallback;
  return field_to_affine(io::parse_field_spec(io::parse_document(read_input(c.input))).field);
}

int cmd_verify(const Common& c, const VerifyArgs& v) {
  const Signature sig = v.sig.empty() ? Signature{0, 3} : parse_sig(v.sig);
  ExperimentReport rep;
  if (v.name == "segment-bound") {
    SegmentBoundOptions o;
    o.R = v.R.value_or(1.0);
    o.samples = v.samples.value_or(1000);
    o.seed = c.seed;
    rep = run_segment_bound(sig, o);
  } else if (v.name == "piege") {
    PiegeOptions o;
    o.R = v.R.value_or(1.0);
    o.samples = v.samples.value_or(500);
    o.t_max = v.t_max;
    o.time_points = v.time_points;
    o.seed = c.seed;
    o.final_threshold = v.epsilon;
    o.envelope_constant = v.envelope_constant;
    rep = run_piege(input_field(c, default_field(sig, 0, true)), o);
  } else if (v.name == "translation-stability") {
    const AffineConformalFieldd F = input_field(c, default_field(sig, 0, true));
    TranslationStabilityOptions o;
    o.center = v.center.empty() ? Vector(Vector::Zero(F.sig.n())) : parse_point(v.center, F.sig.n(), "--center");
    o.r = v.r;
    o.t_grid = geometric_grid(1e-2, v.t_max, v.time_points);
    o.samples = v.samples.value_or(200);
    o.seed = c.seed;
    o.epsilon = v.epsilon;
    rep = run_translation_stability(F, o);
  } else if (v.name == "reparam") {
    AffineConformalMapd h;
    Vector u;
    if (c.input.empty()) {
      const Signature s = v.sig.empty() ? Signature{1, 2} : sig;
      if (s.p < 1) throw io::InputError("reparam: the default parabolic pair needs p >= 1");
      h = {s, 1.0, Matrix::Identity(s.n(), s.n()), -Vector::Unit(s.n(), s.n() - 1)};
      u = Vector::Unit(s.n(), 0);
    } else {
      const json doc = io::parse_document(read_input(c.input));
      h = io::parse_map_spec(doc);
      if (!doc.contains("u")) throw io::InputError("$: missing field \"u\"");
      u = io::parse_vector(doc["u"], h.sig.n(), "$.u");
    }
    ReparametrizationOptions o;
    for (int i = 1; i <= 100; ++i) o.s_grid.push_back(0.01 * i);
    o.k_max = v.k_max;
    if (c.tol) o.tolerance = *c.tol;
    rep = run_reparametrization(h, u, o);
  } else if (v.name == "semicomplete") {
    SemicompleteOptions o;
    o.R0 = v.R.value_or(0.5);
    o.t_grid = geometric_grid(1e-2, v.t_max, v.time_points);
    o.samples = v.samples.value_or(200);
    o.seed = c.seed;
    o.collapse_threshold = v.epsilon;
    rep = run_semicomplete_contraction(input_field(c, default_field(sig, 1.0, false)), o);
  } else {
    throw io::InputError("unknown experiment \"" + v.name +
                         "\" (expected segment-bound, piege, translation-stability, reparam, semicomplete)");
  }
  if (!v.traces.empty()) write_output(v.traces, io::traces_csv(rep));
  write_output(c.output, io::dump(io::to_json(rep)) + "\n");
  return rep.pass ? kOk : kFail;
}

// jordan -----------------------------------------------------------------

int cmd_jordan(const Common& c) {
  const json doc = io::parse_document(read_input(c.input));
  const Signature sig = io::parse_signature(doc.contains("signature") ? doc["signature"] : json(), "$.signature");
  if (!doc.contains("matrix")) throw io::InputError("$: missing field \"matrix\"");
  const Matrix A = io::parse_matrix(doc["matrix"], sig.n(), sig.n(), "$.matrix");
  const double tol = c.tol.value_or(1e-8);
  const JordanFactors f = jordan_chevalley(sig, A, tol);
  write_output(c.output, io::dump(io::to_json(sig, f, jordan_residuals(sig, A, f))) + "\n");
  return kOk;
}

// develop ----------------------------------------------------------------

int cmd_develop(const Common& c, double t0, const std::string& times, double t_max, int steps) {
  const json doc = io::parse_document(read_input(c.input));
  const Signature sig = io::parse_signature(doc.contains("signature") ? doc["signature"] : json(), "$.signature");
  const int N = sig.ambient(), n = sig.n();
  if (!doc.contains("xi")) throw io::InputError("$: missing field \"xi\"");
  MobiusFieldd xi = [&] {
    try {
      return MobiusFieldd::checked(sig, io::parse_matrix(doc["xi"], N, N, "$.xi"));
    } catch (const Error& e) {
      throw io::InputError(std::string("$.xi: ") + e.what());
    }
  }();
  MobiusElementd base = MobiusElementd::identity(sig);
  if (doc.contains("base")) {
    try {
      base = MobiusElementd::checked(sig, io::parse_matrix(doc["base"], N, N, "$.base"));
    } catch (const Error& e) {
      throw io::InputError(std::string("$.base: ") + e.what());
    }
  }
  const GroupCurve<double> lift = [&](double t) { return base * exp_field(xi, t); };
  const GroupCurve<double> dev = develop_flat(lift, t0);

  std::string out = "t";
  for (int i = 0; i < N; ++i) out += ",X" + std::to_string(i);
  for (int i = 1; i <= n; ++i) out += ",y" + std::to_string(i);
  out += "\n";
  for (double t : time_grid(times, t_max, steps)) {
    const EinPointd z = project(dev(t));
    out += io::format_real(t);
    for (int i = 0; i < N; ++i) out += "," + io::format_real(z.rep()(i));
    out += csv_point(inverse_chart(z, Chart::JInfinity), n) + "\n";
  }
  write_output(c.output, out);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conformal dynamics on Einstein's universe: classification and experiments", "ein"};
  app.require_subcommand(1);
  app.fallthrough();
  Common c;
  app.add_option("--input", c.input, "Input JSON file, or - for stdin");
  app.add_option("--output", c.output, "Output file, or - for stdout")->capture_default_str();
  app.add_option("--seed", c.seed, "Random seed")->capture_default_str();
  app.add_option("--tol", c.tol, "Numerical tolerance");
  app.add_flag("--strict", c.strict, "Exit 3 on low-confidence verdicts");

  auto* classify = app.add_subcommand("classify", "Classify fields given as FieldSpec documents");
  bool algebra = false;
  classify->add_flag("--algebra", algebra, "Treat the list as generators of one algebra (p = 0)");

  auto* orbit = app.add_subcommand("orbit", "CSV trace of a flow orbit in the chart at infinity");
  std::string point, chart = "j", times;
  double t_max = 10.0;
  int steps = 10;
  orbit->add_option("--point", point, "Start point, comma separated");
  orbit->add_option("--chart", chart, "Chart of the start point: j or jo")->capture_default_str();
  orbit->add_option("--times", times, "Comma separated times (overrides --t-max/--steps)");
  orbit->add_option("--t-max", t_max, "Final time of the uniform grid")->capture_default_str();
  orbit->add_option("--steps", steps, "Number of uniform steps")->capture_default_str();

  auto* geodesic = app.add_subcommand("geodesic", "Evaluate a conformal geodesic or measure a segment");
  std::string mode, sig_text, v_text, v0_text, s_text = "0,0.25,0.5,0.75,1";
  double s0 = 1.0;
  std::optional<double> R;
  geodesic->add_option("mode", mode, "evaluate or length")->required()->check(CLI::IsMember({"evaluate", "length"}));
  geodesic->add_option("--sig", sig_text, "Signature p,q")->required();
  geodesic->add_option("--v", v_text, "Direction v")->required();
  geodesic->add_option("--v0", v0_text, "Second datum v0 (default 0)");
  geodesic->add_option("--s", s_text, "Parameters to evaluate")->capture_default_str();
  geodesic->add_option("--s0", s0, "Segment end parameter")->capture_default_str();
  geodesic->add_option("--R", R, "Also certify the segment inside B(o,R)");

  auto* verify = app.add_subcommand("verify", "Run a harness experiment; exit 0 iff it passes");
  VerifyArgs va;
  verify->add_option("name", va.name, "segment-bound | piege | translation-stability | reparam | semicomplete")
      ->required();
  verify->add_option("--sig", va.sig, "Signature p,q");
  verify->add_option("--R", va.R, "Ball radius");
  verify->add_option("--samples", va.samples, "Number of samples");
  verify->add_option("--t-max", va.t_max, "Final time")->capture_default_str();
  verify->add_option("--time-points", va.time_points, "Geometric grid size")->capture_default_str();
  verify->add_option("--r", va.r, "Ball radius around --center")->capture_default_str();
  verify->add_option("--center", va.center, "Center x of B(x,r), comma separated");
  verify->add_option("--k-max", va.k_max, "Largest power of h")->capture_default_str();
  verify->add_option("--envelope-constant", va.envelope_constant, "Constant of the decay envelope")
      ->capture_default_str();
  verify->add_option("--epsilon", va.epsilon, "Final distance threshold")->capture_default_str();
  verify->add_option("--traces", va.traces, "Write traces as CSV to this file");

  auto* jordan = app.add_subcommand("jordan", "Jordan factors of A in O(p,q)");

  auto* develop = app.add_subcommand("develop", "Development of the lift t -> base exp(t xi)");
  double t0 = 0.0;
  std::string dtimes;
  double dt_max = 1.0;
  int dsteps = 10;
  develop->add_option("--t0", t0, "Base time")->capture_default_str();
  develop->add_option("--times", dtimes, "Comma separated times");
  develop->add_option("--t-max", dt_max, "Final time of the uniform grid")->capture_default_str();
  develop->add_option("--steps", dsteps, "Number of uniform steps")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*classify) return cmd_classify(c, algebra);
    if (*orbit) return cmd_orbit(c, point, chart, times, t_max, steps);
    if (*geodesic) return cmd_geodesic(c, mode, sig_text, v_text, v0_text, s_text, s0, R);
    if (*verify) return cmd_verify(c, va);
    if (*jordan) return cmd_jordan(c);
    if (*develop) return cmd_develop(c, t0, dtimes, dt_max, dsteps);
  } catch (const io::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
