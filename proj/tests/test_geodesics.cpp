#include "approx.hpp"
#include "oracles.hpp"

#include "ein/geodesics.hpp"

using namespace ein;

namespace {

const Signature kSigs[] = {{0, 3}, {1, 2}, {1, 3}, {2, 2}};

Vector jo_coords(const EinPointd& z) { return *inverse_chart(z, Chart::JInfinity); }

Vector null_vector(const Signature& sig, Rng& rng) {
  // a e_0 + middle part + b e_{n-1} with 2ab + |m|^2 = 0.
  const int n = sig.n();
  Vector u = Vector::Zero(n);
  for (int i = sig.p; i < n - sig.p; ++i) u(i) = rng.normal();
  u(0) = rng.uniform(0.5, 1.5);
  u(n - 1) = -0.5 * u.segment(1, n - 2).squaredNorm() / u(0);
  return u;
}

// Non-null direction with |Q(v)| bounded away from zero, unit Euclidean norm.
Vector non_null_unit(const Signature& sig, Rng& rng) {
  for (;;) {
    const Vector v = rng.normal_vector(sig.n()).normalized();
    if (std::abs(oracle::Q(sig, v)) > 0.3) return v;
  }
}

}  // namespace

TEST_SUITE("geodesics") {

TEST_CASE("every geodesic starts at o") {
  Rng rng(61);
  for (const auto& sig : kSigs) {
    const EinPointd o = basepoint_o(sig);
    const auto g1 = ConformalGeodesicd::from_chart(sig, non_null_unit(sig, rng), rng.normal_vector(sig.n()));
    CHECK(ein_distance(eval_geodesic(g1, 0.0), o) == 0.0);
    const auto g2 = geodesic_from_o(nminus_generator(sig, rng.normal_vector(sig.n())));
    CHECK(ein_distance(eval_geodesic(g2, 0.0), o) <= 1e-15);
    if (sig.p > 0) {
      const auto g3 = ConformalGeodesicd::from_chart(sig, null_vector(sig, rng), rng.normal_vector(sig.n()));
      CHECK(g3.kind() == GeodesicKind::Lightlike);
      CHECK(ein_distance(eval_geodesic(g3, 0.0), o) == 0.0);
    }
  }
}

TEST_CASE("spacelike chart example") {
  const Signature sig{0, 3};
  const auto g = ConformalGeodesicd::from_chart(sig, Vector::Unit(3, 0), Vector::Zero(3));
  CHECK(g.kind() == GeodesicKind::Spacelike);
  CHECK(ein_distance(eval_geodesic(g, 1.0), chart_jo(sig, Vector(2 * Vector::Unit(3, 0)))) <= 1e-15);
}

TEST_CASE("lightlike line through o") {
  const Signature sig{1, 2};
  const Vector u = Vector::Unit(3, 0);
  const auto g = ConformalGeodesicd::from_chart(sig, u, Vector::Zero(3));
  CHECK(g.kind() == GeodesicKind::Lightlike);
  for (double s : {-3.0, -0.5, 0.25, 1.0, 10.0, 1e6})
    CHECK(ein_distance(eval_geodesic(g, s), chart_jo(sig, Vector(s * u))) <= 1e-14);
}

TEST_CASE("geodesics from o via n-") {
  const Signature sig{0, 3};
  CHECK(geodesic_from_o(nminus_generator(sig, Vector::Zero(3))).is_constant());
  const auto z = geodesic_from_o(nminus_generator(sig, Vector::Zero(3)));
  CHECK(ein_distance(eval_geodesic(z, 5.0), basepoint_o(sig)) == 0.0);

  const MobiusFieldd xi = nminus_generator(sig, Vector::Unit(3, 0));
  const auto g = geodesic_from_o(xi);
  CHECK(g.kind() == GeodesicKind::Spacelike);
  CHECK_FALSE(g.is_constant());
  for (double s : {0.3, 1.0, 2.5, -4.0}) {
    // exp(s xi) e_0 by the terminating series I + sX + s^2 X^2 / 2.
    const Matrix X = xi.mat();
    const Matrix E = Matrix::Identity(5, 5) + s * X + 0.5 * s * s * X * X;
    CHECK((X * X * X).norm() == 0.0);
    CHECK(oracle::ray_distance(eval_geodesic(g, s).rep(), E.col(0)) <= 1e-14);
    Vector expected(5);
    expected << 1, s, 0, 0, -0.5 * s * s;
    CHECK(oracle::ray_distance(eval_geodesic(g, s).rep(), expected) <= 1e-14);
  }
  CHECK_THROWS_AS(geodesic_from_o(nplus_generator(sig, Vector::Unit(3, 0))), Error);
  CHECK_THROWS_AS(ConformalGeodesicd::from_chart(sig, Vector::Zero(3), Vector::Zero(3)), Error);
}

TEST_CASE("chart form matches the chart-at-infinity formula") {
  Rng rng(62);
  for (const auto& sig : kSigs)
    for (int k = 0; k < 50; ++k) {
      const Vector v = non_null_unit(sig, rng);
      const Vector v0 = 0.2 * rng.normal_vector(sig.n());
      const auto g = ConformalGeodesicd::from_chart(sig, v, v0);
      CHECK((g.kind() == GeodesicKind::Timelike) == (oracle::Q(sig, v) < 0));
      for (int i = 1; i <= 10; ++i) {
        const double s = 0.1 * i;
        const Vector w = v + s * v0;
        if (std::abs(oracle::Q(sig, w)) < 0.05) continue;
        const Vector y = oracle::chart_curve(sig, v, v0, s);
        CHECK_CLOSE(jo_coords(eval_geodesic(g, s)), y, 1e-11 * (1 + y.squaredNorm()));
        const auto cs = chart_sample(g, s);
        REQUIRE(cs.has_value());
        CHECK_CLOSE(cs->y, y, 1e-12 * (1 + y.norm()));
        const double h = 1e-5;
        const Vector fd = (oracle::chart_curve(sig, v, v0, s + h) - oracle::chart_curve(sig, v, v0, s - h)) / (2 * h);
        CHECK_CLOSE(cs->dy, fd, 1e-6 * (1 + fd.norm()));
      }
    }
}

TEST_CASE("n- form round trip") {
  Rng rng(63);
  for (const auto& sig : kSigs)
    for (int k = 0; k < 30; ++k) {
      const bool light = sig.p > 0 && k % 3 == 0;
      const Vector v = light ? null_vector(sig, rng) : non_null_unit(sig, rng);
      const auto g = ConformalGeodesicd::from_chart(sig, v, rng.normal_vector(sig.n()));
      const NminusData<double> nd = to_nminus_form(g);
      const auto h = ConformalGeodesicd::from_nminus(nd.xi, nd.conjugator);
      CHECK(h.kind() == g.kind());
      for (double s : {0.1, 0.7, 1.3, -2.0}) {
        CHECK(ein_distance(eval_geodesic(g, s), eval_geodesic(h, s)) <= 1e-10);
        // The n- data generates the same curve through the exponential.
        const Vector col = oracle::taylor_exp(s * nd.xi.mat()).col(0);
        CHECK(oracle::ray_distance(eval_geodesic(g, s).rep(), col) <= 1e-8);
      }
    }
}

TEST_CASE("tangents have the causal type of the geodesic") {
  Rng rng(64);
  for (const auto& sig : kSigs)
    for (int k = 0; k < 40; ++k) {
      const bool light = sig.p > 0 && k % 3 == 0;
      const Vector v = light ? null_vector(sig, rng) : non_null_unit(sig, rng);
      const auto g = ConformalGeodesicd::from_chart(sig, v, 0.2 * rng.normal_vector(sig.n()));
      const CausalType expected = g.kind() == GeodesicKind::Timelike    ? CausalType::Timelike
                                  : g.kind() == GeodesicKind::Spacelike ? CausalType::Spacelike
                                                                        : CausalType::Lightlike;
      int checked = 0;
      for (int i = 1; i <= 20; ++i) {
        const double s = 0.05 * i, h = 1e-5;
        const auto a = inverse_chart(eval_geodesic(g, s - h), Chart::JInfinity);
        const auto b = inverse_chart(eval_geodesic(g, s + h), Chart::JInfinity);
        if (!a || !b || a->norm() > 1e3 || b->norm() > 1e3) continue;
        const Vector d = (*b - *a) / (2 * h);
        CHECK(causal_type(sig, d, 1e-6) == expected);
        ++checked;
      }
      CHECK(checked > 0);
    }
}

TEST_CASE("segment lengths") {
  const auto light = ConformalGeodesicd::from_chart(Signature{1, 2}, Vector::Unit(3, 0), Vector::Zero(3));
  const auto L1 = segment_length_L0(GeodesicSegment<double>{light, 1.0});
  REQUIRE(L1.has_value());
  CHECK(L1->length == doctest::Approx(1.0).epsilon(1e-12));

  const auto space = ConformalGeodesicd::from_chart(Signature{0, 3}, Vector::Unit(3, 0), Vector::Zero(3));
  const auto L2 = segment_length_L0(GeodesicSegment<double>{space, 1.0});
  REQUIRE(L2.has_value());
  CHECK(L2->length == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(segment_length_L0(GeodesicSegment<double>{space, 0.0}), Error);

  Rng rng(65);
  int compared = 0;
  for (const auto& sig : kSigs)
    for (int k = 0; k < 20; ++k) {
      const Vector v = non_null_unit(sig, rng);
      const Vector v0 = 0.3 * rng.normal_vector(sig.n());
      const double s0 = rng.uniform(0.2, 1.0);
      double qmin = 1e300;
      for (int i = 0; i <= 200; ++i) qmin = std::min(qmin, std::abs(oracle::Q(sig, Vector(v + s0 * i / 200 * v0))));
      if (qmin < 0.1) continue;
      const auto g = ConformalGeodesicd::from_chart(sig, v, v0);
      const auto L = segment_length_L0(GeodesicSegment<double>{g, s0});
      REQUIRE(L.has_value());
      const double ref = oracle::curve_length([&](double s) { return oracle::chart_curve(sig, v, v0, s); }, 0, s0);
      CHECK(std::abs(L->length - ref) <= 1e-6 * (1 + ref));
      ++compared;
    }
  CHECK(compared >= 20);
}

TEST_CASE("segments certified in a ball obey the length bound") {
  Rng rng(66);
  int kept = 0;
  for (const auto& sig : kSigs)
    for (double R : {0.5, 1.0, 2.0})
      for (int k = 0; k < 40; ++k) {
        const Vector v = non_null_unit(sig, rng);
        const auto g = ConformalGeodesicd::from_chart(sig, v, rng.normal_vector(sig.n()).normalized() * rng.uniform());
        const GeodesicSegment<double> seg{g, rng.uniform(0.01, 1.0) * R};
        if (!segment_in_ball(seg, R)) continue;
        const auto L = segment_length_L0(seg);
        REQUIRE(L.has_value());
        CHECK(L->length <= 8 * sig.n() * R);
        ++kept;
      }
  CHECK(kept > 50);

  const auto line = ConformalGeodesicd::from_chart(Signature{1, 2}, Vector::Unit(3, 0), Vector::Zero(3));
  CHECK(segment_in_ball(GeodesicSegment<double>{line, 0.5}, 1.0));
  CHECK_FALSE(segment_in_ball(GeodesicSegment<double>{line, 1.5}, 1.0));
}

TEST_CASE("development in the flat model") {
  Rng rng(67);
  const Signature sig{1, 3};
  const MobiusElementd g0 = exp_field(MobiusFieldd::checked(sig, oracle::random_algebra(oracle::gram_ambient(sig), rng)), 1.0);
  const auto constant = develop_flat<double>([&](double) { return g0; }, 0.3);
  for (double t : {0.0, 1.0, 7.0}) CHECK_CLOSE(constant(t).mat(), Matrix::Identity(6, 6), 1e-10);

  const Matrix X = oracle::random_algebra(oracle::gram_ambient(sig), rng);
  const MobiusFieldd xi = MobiusFieldd::checked(sig, X);
  const auto dev = develop_flat<double>([&](double t) { return exp_field(xi, t); }, 0.5);
  for (double t : {0.5, 1.0, 2.0, -1.0}) CHECK_CLOSE(dev(t).mat(), oracle::taylor_exp((t - 0.5) * X), 1e-9);

  const MobiusFieldd eta = nminus_generator(sig, rng.normal_vector(4));
  const auto curve = develop_flat<double>([&](double s) { return exp_field(eta, s); }, 0.0);
  const auto geo = geodesic_from_o(eta);
  for (double s : {0.0, 0.4, 1.0, 3.0}) CHECK(ein_distance(project(curve(s)), eval_geodesic(geo, s)) <= 1e-12);

  CHECK_THROWS_AS(develop_flat<double>([&](double) { return MobiusElementd::unchecked(sig, Matrix::Ones(6, 6)); }, 0.0),
                  Error);
}

TEST_CASE("holonomy equivariance") {
  Rng rng(68);
  const std::vector<double> grid{0.0, 0.1, 0.25, 0.5, 1.0};
  for (const auto& sig : kSigs) {
    const AffineConformalFieldd F{sig, rng.uniform(-1, 1), oracle::random_algebra(oracle::gram(sig), rng),
                                  rng.normal_vector(sig.n())};
    const MobiusFieldd Xp = affine_to_field(F);
    const auto geo = ConformalGeodesicd::from_chart(sig, non_null_unit(sig, rng), 0.3 * rng.normal_vector(sig.n()));
    CHECK(holonomy_equivariance_check(Xp, geo, 0.0, grid) <= 1e-12);
    CHECK(holonomy_equivariance_check(Xp, geo, 1.0, grid) <= 1e-9);
    CHECK_THROWS_AS(holonomy_equivariance_check(nminus_generator(sig, Vector::Unit(sig.n(), 0)), geo, 1.0, grid),
                    Error);
  }

  // Translation along T against the lightlike line of u with <T, u> = -1.
  const Signature sig{1, 2};
  const Vector u = Vector::Unit(3, 0), T = -Vector::Unit(3, 2);
  const MobiusFieldd Xp = affine_to_field(AffineConformalFieldd{sig, 0.0, Matrix::Zero(3, 3), T});
  const auto beta = ConformalGeodesicd::from_chart(sig, u, Vector::Zero(3));
  CHECK(holonomy_equivariance_check(Xp, beta, 1.0, grid) <= 1e-12);
  const MobiusElementd h = exp_field(Xp, 1.0);
  for (double s : {0.1, 0.5, 2.0, 30.0})
    CHECK(ein_distance(act_on_ein(h, eval_geodesic(beta, s)), chart_jo(sig, Vector(s / (1 + s) * u))) <= 1e-14);
}

}  // TEST_SUITE
