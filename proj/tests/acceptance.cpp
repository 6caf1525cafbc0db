// Acceptance run: one pass/fail line per criterion. With --criterion N only
// criterion N runs; the exit status is 0 iff every criterion run passed.

#include "oracles.hpp"

#include "ein/classify.hpp"
#include "ein/harness.hpp"
#include "ein/spectral.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace ein;

namespace {

struct Outcome {
  bool pass = false;
  std::string summary;
  std::vector<std::string> details;
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

Matrix rotation_generator(int n, int i, int k) {
  Matrix M = Matrix::Zero(n, n);
  M(i, k) = -1;
  M(k, i) = 1;
  return M;
}

Matrix null_rotation(const Signature& sig, int i, int k) {
  const int n = sig.n();
  const Vector u = Vector::Unit(n, i), w = Vector::Unit(n, k);
  return (u * w.transpose() - w * u.transpose()) * oracle::gram(sig);
}

Matrix diagonal(std::initializer_list<double> xs) {
  Vector d(xs.size());
  int i = 0;
  for (double x : xs) d(i++) = x;
  return d.asDiagonal();
}

Vector vec(std::initializer_list<double> xs) {
  Vector v(xs.size());
  int i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

AffineConformalMapd random_p_element(const Signature& sig, Rng& rng) {
  return {sig, std::exp(rng.uniform(-1, 1)), oracle::taylor_exp(oracle::random_algebra(oracle::gram(sig), rng, 0.5)),
          rng.normal_vector(sig.n())};
}

// 1 -------------------------------------------------------------------------
Outcome segment_bound() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out{true, "", {}};
  double worst_ratio = 0;
  long total = 0;
  for (const Signature sig : {Signature{0, 3}, Signature{1, 2}, Signature{1, 3}})
    for (double R : {0.5, 1.0, 2.0}) {
      SegmentBoundOptions opt;
      opt.R = R;
      opt.samples = 1000;
      opt.margin = 1e-6;
      const auto rep = run_segment_bound(sig, opt);
      total += rep.samples;
      const bool ok = rep.pass && rep.samples == 1000;
      out.pass = out.pass && ok;
      worst_ratio = std::max(worst_ratio, rep.statistics.at("max_ratio_to_bound"));
      out.details.push_back("sig=(" + std::to_string(sig.p) + "," + std::to_string(sig.q) + ") R=" + num(R) +
                            " samples=" + std::to_string(rep.samples) + " max_len=" +
                            num(rep.statistics.at("max_length")) + " bound=" + num(8 * sig.n() * R) +
                            (ok ? "" : "  FAILED"));
    }
  const double secs = seconds_since(t0);
  out.pass = out.pass && secs < 30;
  out.summary = "segments=" + std::to_string(total) + " max L/(8nR)=" + num(worst_ratio) + " runtime=" + num(secs) +
                "s (limit 30s)";
  return out;
}

// 2 -------------------------------------------------------------------------
Outcome reparametrization() {
  const auto t0 = std::chrono::steady_clock::now();
  const Signature sig{1, 2};
  const AffineConformalMapd h{sig, 1.0, Matrix::Identity(3, 3), Vector(-Vector::Unit(3, 2))};
  ReparametrizationOptions opt;
  for (int i = 1; i <= 100; ++i) opt.s_grid.push_back(0.01 * i);
  opt.k_max = 10;
  opt.tolerance = 1e-9;
  const auto rep = run_reparametrization(h, Vector::Unit(3, 0), opt);
  const double secs = seconds_since(t0);
  return {rep.pass && rep.tolerance && secs < 1.0,
          "max deviation=" + num(rep.max_violation) + " (tol 1e-9) runtime=" + num(secs) + "s (limit 1s)",
          {}};
}

// 3 -------------------------------------------------------------------------
Outcome action_lemma() {
  Rng rng(3003);
  const Signature sigs[] = {{1, 2}, {1, 3}, {2, 2}, {2, 3}, {1, 4}};
  double worst1 = 0, worst2 = 0, worst_h = 0;
  long checks = 0;
  for (int k = 0; k < 200; ++k) {
    const Signature& sig = sigs[k % 5];
    const int n = sig.n();
    // A = C (e^l on e_0, e^{-l} on e_{n-1}, middle element of O(p-1,q-1)) C^{-1}
    // and u = c C e_0, so A u = e^l u and e^l A u = e^{2l} u.
    const double lambda = rng.uniform(-1.5, 1.5);
    Matrix D = Matrix::Zero(n, n);
    D(0, 0) = std::exp(lambda);
    D(n - 1, n - 1) = std::exp(-lambda);
    const Signature mid{sig.p - 1, sig.q - 1};
    D.block(1, 1, n - 2, n - 2) = oracle::taylor_exp(oracle::random_algebra(oracle::gram(mid), rng, 0.8));
    const Matrix C = oracle::taylor_exp(oracle::random_algebra(oracle::gram(sig), rng, 0.5));
    const Matrix A = C * D * C.inverse();
    const Vector u = rng.uniform(0.3, 2.0) * C.col(0);
    const Vector T = rng.normal_vector(n);
    const double Tu = (T.transpose() * oracle::gram(sig) * u)(0);

    const MobiusElementd linear = from_affine(AffineConformalMapd{sig, std::exp(lambda), A, Vector::Zero(n)});
    const MobiusElementd shift = gen_nplus(sig, T);
    const MobiusElementd full = from_affine(AffineConformalMapd{sig, std::exp(lambda), A, T});
    for (int i = 0; i < 20; ++i) {
      const double s = -2.0 + 4.0 * (i + 0.5) / 20;
      const EinPointd beta = chart_jo(sig, Vector(s * u));
      worst1 = std::max(worst1, ein_distance(act_on_ein(linear, beta), beta));
      const double denom = 1 - s * Tu;
      if (std::abs(denom) < 1e-3) continue;
      const EinPointd target = chart_jo(sig, Vector(s / denom * u));
      worst2 = std::max(worst2, ein_distance(act_on_ein(shift, beta), target));
      worst_h = std::max(worst_h, ein_distance(act_on_ein(full, beta), target));
      ++checks;
    }
  }
  const double worst = std::max({worst1, worst2, worst_h});
  return {worst <= 1e-8,
          "point1 residual=" + num(worst1) + " point2 residual=" + num(worst2) + " composed=" + num(worst_h) +
              " over " + std::to_string(checks) + " parameter checks (tol 1e-8)",
          {}};
}

// 4 -------------------------------------------------------------------------
Outcome jordan() {
  Rng rng(4004);
  const Signature sigs[] = {{0, 3}, {1, 2}, {1, 3}, {2, 2}, {0, 4}, {2, 3}, {1, 4}, {0, 5}, {3, 3}, {2, 4}, {1, 5}};
  JordanResiduals worst;
  double idem = 0;
  for (int k = 0; k < 200; ++k) {
    const Signature& sig = sigs[k % 11];
    const int n = sig.n();
    const Matrix I = Matrix::Identity(n, n);
    const auto sample = oracle::structured_orthogonal(sig, rng);
    const auto f = jordan_chevalley(sig, sample.A);
    const auto r = jordan_residuals(sig, sample.A, f);
    worst.membership = std::max(worst.membership, r.membership);
    worst.commutation = std::max(worst.commutation, r.commutation);
    worst.product = std::max(worst.product, r.product);
    worst.unipotent = std::max(worst.unipotent, r.unipotent);
    worst.spectrum = std::max(worst.spectrum, r.spectrum);
    auto dev = [&](const JordanFactors& g, const Matrix& s, const Matrix& e, const Matrix& u) {
      return std::max({(g.A_s - s).norm(), (g.A_e - e).norm(), (g.A_u - u).norm()}) / (1 + sample.A.squaredNorm());
    };
    idem = std::max({idem, dev(jordan_chevalley(sig, f.A_s), f.A_s, I, I), dev(jordan_chevalley(sig, f.A_e), I, f.A_e, I),
                     dev(jordan_chevalley(sig, f.A_u), I, I, f.A_u)});
  }
  const bool pass = worst.max() <= 1e-8 && idem <= 1e-8;
  return {pass,
          "product=" + num(worst.product) + " commutation=" + num(worst.commutation) + " membership=" +
              num(worst.membership) + " spectrum=" + num(worst.spectrum) + " unipotent=" + num(worst.unipotent) +
              " idempotence=" + num(idem) + " (tol 1e-8)",
          {}};
}

// 5 -------------------------------------------------------------------------
struct Curated {
  std::string name;
  AffineConformalFieldd field;
  bool linearizable;
  bool inessential;
};

std::vector<Curated> curated_suite() {
  Rng rng(5005);
  const Signature e3{0, 3}, l12{1, 2}, l13{1, 3}, s22{2, 2};
  const Matrix Z3 = Matrix::Zero(3, 3), Z4 = Matrix::Zero(4, 4);
  const Vector o3 = Vector::Zero(3), o4 = Vector::Zero(4);
  const Matrix boost12 = diagonal({0.8, 0, -0.8});
  const Matrix boost13 = diagonal({0.6, 0, 0, -0.6});
  const Matrix rot13 = rotation_generator(4, 1, 2);
  return {
      {"(0,3) rotation", {e3, 0, rotation_generator(3, 0, 1), o3}, true, true},
      {"(0,3) dilation", {e3, 1, Z3, o3}, true, false},
      {"(0,3) translation", {e3, 0, Z3, Vector::Unit(3, 0)}, false, false},
      {"(0,3) screw motion", {e3, 0, rotation_generator(3, 0, 1), Vector::Unit(3, 2)}, false, false},
      {"(0,3) rotation, T in the image", {e3, 0, rotation_generator(3, 0, 1), Vector::Unit(3, 0)}, true, true},
      {"(0,3) dilation+rotation+T", {e3, 0.5, rotation_generator(3, 0, 1), vec({1, 2, 3})}, true, false},
      {"(0,3) zero field", {e3, 0, Z3, o3}, true, true},
      {"(0,3) rotation, T with axial part", {e3, 0, rotation_generator(3, 0, 1), vec({1, 0, 1})}, false, false},
      {"(1,2) boost", {l12, 0, boost12, o3}, true, true},
      {"(1,2) boost, T in the kernel", {l12, 0, boost12, Vector::Unit(3, 1)}, false, false},
      {"(1,2) boost, T in the image", {l12, 0, boost12, vec({1, 0, 1})}, true, true},
      {"(1,2) null rotation", {l12, 0, null_rotation(l12, 0, 1), o3}, true, true},
      {"(1,2) null rotation, T off the image", {l12, 0, null_rotation(l12, 0, 1), Vector(-Vector::Unit(3, 2))}, false, false},
      {"(1,2) null translation", {l12, 0, Z3, Vector(-Vector::Unit(3, 2))}, false, false},
      {"(1,2) dilation+null rotation", {l12, 2, null_rotation(l12, 0, 1), rng.normal_vector(3)}, true, false},
      {"(1,2) null translation e_1", {l12, 0, Z3, Vector::Unit(3, 0)}, false, false},
      {"(1,2) dilation=boost rate, T obstructed", {l12, 0.8, boost12, Vector::Unit(3, 2)}, false, false},
      {"(1,2) dilation=boost rate, T in the image", {l12, 0.8, boost12, Vector::Unit(3, 0)}, true, false},
      {"(1,3) middle rotation", {l13, 0, rot13, o4}, true, true},
      {"(1,3) rotation, T in the kernel", {l13, 0, rot13, Vector::Unit(4, 0)}, false, false},
      {"(1,3) rotation+boost, T in the image", {l13, 0, Matrix(rot13 + boost13), vec({1, 1, 1, 1})}, true, true},
      {"(1,3) boost+rotation, random T", {l13, 0, Matrix(2 * rot13 + 1.5 * boost13), rng.normal_vector(4)}, true, true},
      {"(1,3) null rotation, T off the image", {l13, 0, null_rotation(l13, 0, 1), Vector::Unit(4, 2)}, false, false},
      {"(1,3) dilation+rotation", {l13, 1, rot13, rng.normal_vector(4)}, true, false},
      {"(1,3) null translation", {l13, 0, Z4, vec({1, 0, 0, 1})}, false, false},
      {"(2,2) two boosts, random T", {s22, 0, diagonal({0.5, 1.2, -1.2, -0.5}), rng.normal_vector(4)}, true, true},
      {"(2,2) one boost, T in the kernel", {s22, 0, diagonal({0.5, 0, 0, -0.5}), Vector::Unit(4, 1)}, false, false},
      {"(2,2) J K field", {s22, 0, oracle::random_algebra(oracle::gram(s22), rng), o4}, true, true},
      {"(2,2) null rotation, T off the image", {s22, 0, null_rotation(s22, 0, 1), Vector::Unit(4, 2)}, false, false},
      {"(2,2) contraction a=-1", {s22, -1, Z4, rng.normal_vector(4)}, true, false},
  };
}

AffineConformalFieldd random_field(const Signature& sig, Rng& rng, int shape) {
  const int n = sig.n();
  const Matrix J = oracle::gram(sig);
  AffineConformalFieldd F{sig, rng.uniform(-1, 1), oracle::random_algebra(J, rng), rng.normal_vector(n)};
  if (shape == 1) {
    F.a = 0;
    if (rng.uniform() < 0.5) F.M = sig.p > 0 ? null_rotation(sig, 0, n / 2) : rotation_generator(n, 0, 1);
  } else if (shape == 2) {
    const Vector c = rng.normal_vector(n);
    F.T = -(F.a * c + F.M * c);
  }
  return F;
}

Outcome dichotomies() {
  Outcome out{true, "", {}};
  int matched = 0;
  const auto suite = curated_suite();
  for (const auto& c : suite) {
    const auto rep = classify_field(affine_to_field(c.field));
    const bool ok = rep.linearizable == c.linearizable && rep.inessential == c.inessential && !rep.low_confidence;
    matched += ok;
    if (!ok)
      out.details.push_back("mismatch: " + c.name + " linearizable=" + std::to_string(rep.linearizable) +
                            " inessential=" + std::to_string(rep.inessential));
  }
  Rng rng(5006);
  const Signature sigs[] = {{0, 3}, {1, 2}, {1, 3}, {2, 2}};
  int agree = 0, with_zero = 0;
  for (int k = 0; k < 500; ++k) {
    const Signature& sig = sigs[k % 4];
    const auto F = random_field(sig, rng, k % 3);
    const bool field = fixed_point_field(F).point.has_value();
    const bool map = fixed_point_map(to_affine(exp_field(affine_to_field(F), 1.0))).point.has_value();
    agree += field == map;
    with_zero += field;
  }
  out.pass = matched == int(suite.size()) && agree == 500;
  out.summary = "curated verdicts " + std::to_string(matched) + "/" + std::to_string(suite.size()) +
                ", solver agreement " + std::to_string(agree) + "/500 (" + std::to_string(with_zero) +
                " with a zero)";
  return out;
}

// 6 -------------------------------------------------------------------------
Outcome trichotomy() {
  const Signature sig{0, 3};
  struct Case {
    std::string name;
    AffineConformalFieldd F;
    RiemannianCase expected;
    bool inessential, linearizable;
  };
  const std::vector<Case> cases{
      {"rotation", {sig, 0, rotation_generator(3, 0, 1), Vector::Zero(3)}, RiemannianCase::Case1Compact, true, true},
      {"dilation", {sig, 1, Matrix::Zero(3, 3), Vector::Zero(3)}, RiemannianCase::Case2Dilation, false, true},
      {"translation", {sig, 0, Matrix::Zero(3, 3), Vector::Unit(3, 0)}, RiemannianCase::Case2Translation, false, false}};
  Outcome out{true, "", {}};
  Rng rng(6006);
  int conjugations = 0;
  for (const auto& c : cases) {
    const MobiusFieldd X = affine_to_field(c.F);
    auto matches = [&](const ClassificationReport& r) {
      return r.riemannian_case == c.expected && r.inessential == c.inessential && r.linearizable == c.linearizable;
    };
    bool ok = matches(classify_field(X));
    int invariant = 0;
    for (int k = 0; k < 100; ++k) invariant += matches(classify_field(adjoint(from_affine(random_p_element(sig, rng)), X)));
    conjugations += invariant;
    ok = ok && invariant == 100;
    out.pass = out.pass && ok;
    out.details.push_back(c.name + " -> " + to_string(c.expected) + ", invariant under " + std::to_string(invariant) +
                          "/100 conjugations");
  }
  out.summary = "3/3 canonical generators checked, " + std::to_string(conjugations) + "/300 conjugates agree";
  return out;
}

// 7 -------------------------------------------------------------------------
Outcome piege() {
  const AffineConformalFieldd F{Signature{0, 3}, 0, Matrix::Zero(3, 3), Vector::Unit(3, 0)};
  PiegeOptions opt;
  opt.R = 1.0;
  opt.samples = 500;
  opt.t_max = 1e4;
  opt.final_threshold = 1e-2;
  opt.envelope_constant = 1.0;
  const auto rep = run_piege(F, opt);
  const auto& st = rep.statistics;
  Outcome out;
  out.pass = rep.pass;
  out.summary = "branches fwd/bwd/boundary=" + num(st.at("forward_branch")) + "/" + num(st.at("backward_branch")) + "/" +
                num(st.at("boundary")) + " containment_violation=" + num(st.at("containment_violation")) +
                " final_violation=" + num(st.at("final_distance_violation")) + " monotone_violation=" +
                num(st.at("monotone_violation")) + " envelope sup s^2 t^2 |v|^2=" + num(st.at("envelope_max_ratio")) +
                " vs bound 1";
  if (!rep.pass) out.details.push_back("the envelope 1/(t^2 |v|^2) is exceeded; the measured constant is 4");
  opt.envelope_constant = 4.0;
  const auto four = run_piege(F, opt);
  out.details.push_back(std::string("info: same run with envelope constant 4: ") + (four.pass ? "PASS" : "FAIL") +
                        " (max violation " + num(four.max_violation) + ")");
  return out;
}

// 8 -------------------------------------------------------------------------
Outcome translation_stability() {
  Rng rng(8008);
  Outcome out{true, "", {}};
  double worst = 0;
  for (int k = 0; k < 10; ++k) {
    const Vector v = rng.normal_vector(3).normalized();
    // Rotation about the axis v commutes with the translation along v.
    Eigen::JacobiSVD<Matrix> svd(Matrix(v.transpose()), Eigen::ComputeFullV);
    const Vector a = svd.matrixV().col(1), b = svd.matrixV().col(2);
    const Matrix M = rng.uniform(0.5, 3.0) * (a * b.transpose() - b * a.transpose());
    const AffineConformalFieldd F{Signature{0, 3}, 0, M, v};
    TranslationStabilityOptions opt;
    opt.center = 3.0 * rng.normal_vector(3);
    opt.r = 1.0;
    opt.t_grid = geometric_grid(1e-2, 1e4, 60);
    opt.samples = 200;
    opt.seed = 100 + k;
    opt.epsilon = 1e-2;
    const auto rep = run_translation_stability(F, opt);
    out.pass = out.pass && rep.pass;
    worst = std::max(worst, rep.statistics.at("final_max_distance"));
  }
  out.summary = "10 centers, worst distance to o at t=1e4: " + num(worst) + " (limit 1e-2)";
  return out;
}

// 9 -------------------------------------------------------------------------
Outcome algebra_decisions() {
  const Signature sig{0, 3};
  Rng rng(9009);
  double worst = 0;
  int compact = 0, rejected = 0;
  const int trials = 50;
  for (int k = 0; k < trials; ++k) {
    const AffineConformalMapd g = random_p_element(sig, rng);
    const MobiusElementd G = from_affine(g);
    std::vector<AffineConformalFieldd> gens;
    for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}})
      gens.push_back(field_to_affine(adjoint(G, affine_to_field(AffineConformalFieldd{sig, 0, rotation_generator(3, i, j), Vector::Zero(3)}))));
    const auto r = is_algebra_compact_type(gens);
    if (r.compact && r.joint_fixed_point) {
      ++compact;
      worst = std::max(worst, (*r.joint_fixed_point - g.T).norm() / (1 + g.T.norm()));
    } else {
      worst = std::max(worst, 1.0);
    }
    auto with_dilation = gens;
    with_dilation.push_back(field_to_affine(adjoint(G, affine_to_field(AffineConformalFieldd{sig, 1, Matrix::Zero(3, 3), Vector::Zero(3)}))));
    auto with_translation = gens;
    with_translation.push_back({sig, 0, Matrix::Zero(3, 3), rng.normal_vector(3)});
    rejected += !is_algebra_compact_type(with_dilation).compact;
    rejected += !is_algebra_compact_type(with_translation).compact;
  }
  return {compact == trials && worst <= 1e-8 && rejected == 2 * trials,
          "compact " + std::to_string(compact) + "/" + std::to_string(trials) + ", center error=" + num(worst) +
              " (tol 1e-8), rejected " + std::to_string(rejected) + "/" + std::to_string(2 * trials) +
              " sets with a dilation or translation",
          {}};
}

// 10 ------------------------------------------------------------------------
Outcome model_identities() {
  Rng rng(10010);
  const Signature sigs[] = {{0, 3}, {1, 2}, {1, 3}, {2, 2}, {0, 5}, {2, 3}};
  double inv = 0, round = 0;
  int done = 0;
  while (done < 1000) {
    const Signature& sig = sigs[done % 6];
    const Vector x = rng.normal_vector(sig.n());
    if (std::abs(oracle::Q(sig, x)) < 1e-2 * x.squaredNorm()) continue;
    inv = std::max(inv, ein_distance(chart_jo(sig, inversion_s(sig, x)), chart_j(sig, x)));
    round = std::max(round, (*inverse_chart(chart_j(sig, x), Chart::J) - x).norm() / (1 + x.squaredNorm()));
    round = std::max(round, (*inverse_chart(chart_jo(sig, x), Chart::JInfinity) - x).norm() / (1 + x.squaredNorm()));
    ++done;
  }
  double drift = 0;
  for (const Signature& sig : {Signature{0, 3}, Signature{1, 3}}) {
    EinPointd z = chart_j(sig, rng.normal_vector(sig.n()));
    for (int k = 0; k < 10000; ++k) {
      const MobiusElementd g = MobiusElementd::checked(
          sig, oracle::taylor_exp(oracle::random_algebra(oracle::gram_ambient(sig), rng, 0.3)), 1e-10);
      z = act_on_ein(g, z);
      drift = std::max(drift, z.null_residual());
    }
  }
  return {std::max({inv, round, drift}) <= 1e-10,
          "j°(s(x)) vs j(x)=" + num(inv) + " chart round trip=" + num(round) + " null residual after 1e4 actions=" +
              num(drift) + " (tol 1e-10)",
          {}};
}

struct Criterion {
  int id;
  std::string title;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  int only = 0;
  app.add_option("--criterion", only, "run a single criterion (1-10)")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> all{
      {1, "segment length bound", segment_bound},
      {2, "reparametrization law", reparametrization},
      {3, "action lemma, both points", action_lemma},
      {4, "Jordan decomposition contract", jordan},
      {5, "linearizability and essentiality dichotomies", dichotomies},
      {6, "Riemannian trichotomy", trichotomy},
      {7, "trapping lemma", piege},
      {8, "strong stability collapse", translation_stability},
      {9, "algebra-level decisions", algebra_decisions},
      {10, "model identities", model_identities},
  };
  bool ok = true;
  for (const auto& c : all) {
    if (only && c.id != only) continue;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), {}};
    }
    std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.summary.c_str());
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
