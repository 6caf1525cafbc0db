#include "ein/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

namespace ein {

namespace {

std::string fmt(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x + 0.0);
  return std::string(buf, res.ptr);
}

std::string fmt(const Vector& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v(i));
  return s + "]";
}

std::string fmt(const Signature& sig) {
  return std::to_string(sig.p) + "," + std::to_string(sig.q);
}

/// Checks the translation-rotation hypothesis: p = 0, a = 0, M T = 0, T != 0.
void require_translation_rotation(const AffineConformalFieldd& F, const char* what) {
  validate(F);
  const std::string w(what);
  if (F.sig.p != 0) throw Error(ErrorKind::PreconditionViolated, w + ": Riemannian signature required");
  const double scale = 1 + F.M.norm() + F.T.norm();
  if (std::abs(F.a) > 1e-12 * scale)
    throw Error(ErrorKind::PreconditionViolated, w + ": the field has a dilation part");
  if (F.T.norm() <= 1e-12 * scale)
    throw Error(ErrorKind::PreconditionViolated, w + ": the field has a fixed point");
  if ((F.M * F.T).norm() > 1e-10 * scale * scale)
    throw Error(ErrorKind::PreconditionViolated,
                w + ": rotation and translation parts do not commute");
}

/// rho°(g . z, o) for a projective representative g, or nullopt outside the chart.
std::optional<double> distance_to_o(const Matrix& g, const Vector& column, const Signature& sig) {
  const EinPointd z = EinPointd::from_rep(sig, Vector(g * column), 1e-6);
  const auto y = inverse_chart(z, Chart::JInfinity);
  if (!y) return std::nullopt;
  return y->norm();
}

}  // namespace

void ExperimentReport::settle() {
  pass = !tolerance || max_violation <= *tolerance;
}

std::vector<double> geometric_grid(double t_min, double t_max, int count) {
  if (!(t_min > 0) || !(t_max >= t_min) || count < 0)
    throw Error(ErrorKind::InvalidInput, "time grid: need 0 < t_min <= t_max and count >= 0");
  std::vector<double> grid{0.0};
  if (count == 0) return grid;
  if (count == 1) {
    grid.push_back(t_max);
    return grid;
  }
  const double ratio = std::log(t_max / t_min) / (count - 1);
  for (int i = 0; i < count; ++i) grid.push_back(i == count - 1 ? t_max : t_min * std::exp(ratio * i));
  return grid;
}

Vector random_null_vector(const Signature& sig, Rng& rng) {
  if (sig.p < 1) throw Error(ErrorKind::InvalidSignature, "no null vectors in Riemannian signature");
  const int n = sig.n();
  for (;;) {
    const Vector x = rng.normal_vector(n);
    const Vector y = rng.normal_vector(n);
    // Q(x + c y) = Q(x) + 2 c <x,y> + c^2 Q(y)
    const double qa = eval_Q(sig, y), qb = bilinear(sig, x, y), qc = eval_Q(sig, x);
    const double disc = qb * qb - qa * qc;
    if (disc < 0 || std::abs(qa) < 1e-6) continue;
    const double c = (-qb + std::sqrt(disc)) / qa;
    const Vector u = x + c * y;
    if (u.norm() > 1e-3) return u / u.norm();
  }
}

ExperimentReport run_segment_bound(const Signature& sig, const SegmentBoundOptions& opt) {
  validate(sig);
  if (!(opt.R > 0)) throw Error(ErrorKind::InvalidInput, "segment-bound: R must be > 0");
  ExperimentReport rep;
  rep.name = "segment-bound";
  rep.parameters = {{"signature", fmt(sig)},
                    {"R", fmt(opt.R)},
                    {"samples", std::to_string(opt.samples)},
                    {"seed", std::to_string(opt.seed)},
                    {"margin", fmt(opt.margin)},
                    {"quadrature_abs_tol", fmt(opt.quadrature.abs_tol)},
                    {"quadrature_max_depth", std::to_string(opt.quadrature.max_depth)}};
  const int n = sig.n();
  const double bound = 8.0 * n * opt.R;
  const Rng base(opt.seed);
  long kept = 0, attempts = 0, lightlike = 0, timelike = 0, spacelike = 0;
  double max_len = 0, max_ratio = 0, max_err = 0, violation = 0;
  const long max_attempts = opt.max_attempts_factor * std::max(1L, opt.samples);
  while (kept < opt.samples && attempts < max_attempts) {
    Rng rng = base.fork(static_cast<std::uint64_t>(attempts++));
    const Vector v0 = rng.in_ball(n, 1.0);
    std::optional<ConformalGeodesicd> geo;
    double s0 = 0;
    if (sig.p >= 1 && rng.uniform() < 1.0 / 3.0) {
      const Vector u = random_null_vector(sig, rng) * rng.uniform(0.05, 1.0);
      geo = ConformalGeodesicd::from_chart(sig, u, v0);
      s0 = rng.uniform() * 1.5 * opt.R / u.norm();
    } else {
      const Vector v = rng.in_ball(n, 1.0);
      const double q = std::abs(eval_Q(sig, v));
      if (q <= kCausalTolerance * v.squaredNorm() || v.norm() < 1e-6) continue;
      geo = ConformalGeodesicd::from_chart(sig, v, v0);
      s0 = rng.uniform() * opt.R * q / v.norm();
    }
    if (!(s0 > 0)) continue;
    const GeodesicSegment<double> seg{*geo, s0};
    if (!segment_in_ball(seg, opt.R)) continue;
    const auto len = segment_length_L0(seg, opt.quadrature, 64);
    if (!len) continue;
    ++kept;
    switch (geo->kind()) {
      case GeodesicKind::Lightlike: ++lightlike; break;
      case GeodesicKind::Timelike: ++timelike; break;
      case GeodesicKind::Spacelike: ++spacelike; break;
    }
    max_len = std::max(max_len, len->length);
    max_ratio = std::max(max_ratio, len->length / bound);
    max_err = std::max(max_err, len->error_estimate);
    violation = std::max(violation, len->length - bound);
  }
  rep.samples = kept;
  rep.max_violation = std::max(0.0, violation);
  rep.tolerance = opt.margin;
  rep.statistics = {{"bound_8nR", bound},
                    {"max_length", max_len},
                    {"max_ratio_to_bound", max_ratio},
                    {"max_quadrature_error", max_err},
                    {"attempts", double(attempts)},
                    {"timelike", double(timelike)},
                    {"spacelike", double(spacelike)},
                    {"lightlike", double(lightlike)}};
  rep.settle();
  if (kept < opt.samples) {
    rep.pass = false;
    rep.notes.push_back("fewer certified segments than requested");
  }
  return rep;
}

ExperimentReport run_piege(const AffineConformalFieldd& F, const PiegeOptions& opt) {
  require_translation_rotation(F, "piege");
  if (!(opt.R > 0) || !(opt.t_max > 0) || opt.time_points < 2 || opt.u_points < 1)
    throw Error(ErrorKind::InvalidInput, "piege: invalid options");
  const Signature& sig = F.sig;
  const int n = sig.n();
  const Vector& v = F.T;
  const double vv = v.squaredNorm();
  const MobiusFieldd X = affine_to_field(F);

  ExperimentReport rep;
  rep.name = "piege";
  rep.parameters = {{"signature", fmt(sig)},
                    {"R", fmt(opt.R)},
                    {"samples", std::to_string(opt.samples)},
                    {"t_max", fmt(opt.t_max)},
                    {"time_points", std::to_string(opt.time_points)},
                    {"u_points", std::to_string(opt.u_points)},
                    {"seed", std::to_string(opt.seed)},
                    {"final_threshold", fmt(opt.final_threshold)},
                    {"envelope_constant", fmt(opt.envelope_constant)},
                    {"T", fmt(v)}};

  const std::vector<double> grid = geometric_grid(1e-2, opt.t_max, opt.time_points);
  std::vector<Matrix> forward, backward;
  for (double t : grid) {
    forward.push_back(projective_flow(X, t));
    backward.push_back(projective_flow(X, -t));
  }

  // sup over the segment [oz] = { j°(u y) : u in (0,1] } of rho° to o,
  // per grid time, for one branch. Infinity marks a point outside the chart.
  auto branch_sup = [&](const Vector& y, const std::vector<Matrix>& flows) {
    std::vector<double> sup(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i)
      for (int k = 1; k <= opt.u_points; ++k) {
        const double u = double(k) / opt.u_points;
        const auto d = distance_to_o(flows[i], chart_jo_column(sig, Vector(u * y)), sig);
        sup[i] = std::max(sup[i], d ? *d : std::numeric_limits<double>::infinity());
      }
    return sup;
  };

  struct BranchCheck {
    double containment = 0, final = 0, monotone = 0, envelope = 0, envelope_ratio = 0;
  };
  auto check = [&](const std::vector<double>& sup) {
    BranchCheck c;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      c.containment = std::max(c.containment, sup[i] >= opt.R ? sup[i] - opt.R + 1e-300 : 0.0);
      if (grid[i] > 0) {
        const double ratio = sup[i] * sup[i] * grid[i] * grid[i] * vv;
        c.envelope_ratio = std::max(c.envelope_ratio, ratio);
        c.envelope = std::max(c.envelope, ratio / opt.envelope_constant - 1.0);
      }
      if (i > 0 && grid[i - 1] >= opt.t_max / 10)
        c.monotone = std::max(c.monotone, sup[i] - sup[i - 1] * (1 + 1e-9));
    }
    c.final = std::max(0.0, sup.back() - opt.final_threshold);
    return c;
  };

  const Rng base(opt.seed);
  long forward_n = 0, backward_n = 0, boundary_n = 0, opposite_contained = 0;
  BranchCheck worst;
  std::vector<double> trace(grid.size(), 0.0);
  for (long i = 0; i < opt.samples; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    Vector y = rng.in_ball(n, opt.R);
    if (y.norm() < 1e-9) y = Vector::Constant(n, 1e-3);
    const Vector x = inversion_s(sig, y);
    const double pairing = x.dot(v);
    const bool boundary = std::abs(pairing) <= 1e-12 * x.norm() * v.norm();
    std::vector<const std::vector<Matrix>*> predicted;
    if (boundary) {
      ++boundary_n;
      predicted = {&forward, &backward};
    } else if (pairing > 0) {
      ++forward_n;
      predicted = {&forward};
    } else {
      ++backward_n;
      predicted = {&backward};
    }
    for (const auto* flows : predicted) {
      const std::vector<double> sup = branch_sup(y, *flows);
      const BranchCheck c = check(sup);
      worst.containment = std::max(worst.containment, c.containment);
      worst.final = std::max(worst.final, c.final);
      worst.monotone = std::max(worst.monotone, c.monotone);
      worst.envelope = std::max(worst.envelope, c.envelope);
      worst.envelope_ratio = std::max(worst.envelope_ratio, c.envelope_ratio);
      for (std::size_t k = 0; k < grid.size(); ++k) trace[k] = std::max(trace[k], sup[k] * sup[k]);
    }
    if (!boundary) {
      const auto& other = pairing > 0 ? backward : forward;
      if (check(branch_sup(y, other)).containment == 0) ++opposite_contained;
    }
  }
  for (std::size_t k = 0; k < grid.size(); ++k) rep.traces.push_back({double(k), grid[k], trace[k]});

  rep.samples = opt.samples;
  rep.max_violation = std::max({worst.containment, worst.final, worst.monotone, worst.envelope});
  rep.tolerance = 1e-9;
  rep.statistics = {{"forward_branch", double(forward_n)},
                    {"backward_branch", double(backward_n)},
                    {"boundary", double(boundary_n)},
                    {"opposite_branch_also_contained", double(opposite_contained)},
                    {"containment_violation", worst.containment},
                    {"final_distance_violation", worst.final},
                    {"monotone_violation", worst.monotone},
                    {"envelope_violation", std::max(0.0, worst.envelope)},
                    {"envelope_max_ratio", worst.envelope_ratio}};
  rep.settle();
  rep.notes.push_back(
      "envelope_max_ratio is max over samples and t > 0 of sup_u ||s(ux+tv)||^2 t^2 ||v||^2; "
      "the envelope check requires it to stay below envelope_constant");
  return rep;
}

ExperimentReport run_translation_stability(const AffineConformalFieldd& F,
                                           const TranslationStabilityOptions& opt) {
  require_translation_rotation(F, "translation-stability");
  const Signature& sig = F.sig;
  const int n = sig.n();
  require_size(opt.center, n, "translation-stability center");
  if (opt.t_grid.empty()) throw Error(ErrorKind::InvalidInput, "translation-stability: empty t grid");
  const MobiusFieldd X = affine_to_field(F);

  ExperimentReport rep;
  rep.name = "translation-stability";
  rep.parameters = {{"signature", fmt(sig)},
                    {"center", fmt(opt.center)},
                    {"r", fmt(opt.r)},
                    {"samples", std::to_string(opt.samples)},
                    {"seed", std::to_string(opt.seed)},
                    {"epsilon", fmt(opt.epsilon)},
                    {"t_final", fmt(opt.t_grid.back())},
                    {"T", fmt(F.T)}};

  const Rng base(opt.seed);
  std::vector<Vector> points{opt.center};
  for (long i = 0; i < opt.samples; ++i) {
    Rng rng = base.fork(static_cast<std::uint64_t>(i));
    points.push_back(opt.center + rng.in_ball(n, opt.r));
  }
  std::vector<double> sup(opt.t_grid.size(), 0.0);
  long outside = 0;
  for (std::size_t k = 0; k < opt.t_grid.size(); ++k) {
    const Matrix G = projective_flow(X, opt.t_grid[k]);
    for (const Vector& y : points) {
      const auto d = distance_to_o(G, chart_j_column(sig, y), sig);
      if (!d) ++outside;
      sup[k] = std::max(sup[k], d ? *d : std::numeric_limits<double>::infinity());
    }
    rep.traces.push_back({double(k), opt.t_grid[k], sup[k]});
  }
  double monotone = 0;
  const double t_final = opt.t_grid.back();
  for (std::size_t k = 1; k < sup.size(); ++k)
    if (opt.t_grid[k - 1] >= t_final / 10) monotone = std::max(monotone, sup[k] - sup[k - 1] * (1 + 1e-9));
  const double final_excess = sup.back() - opt.epsilon;
  rep.samples = static_cast<long>(points.size());
  rep.max_violation = std::max({0.0, final_excess, monotone});
  if (!std::isfinite(rep.max_violation)) rep.max_violation = std::numeric_limits<double>::max();
  rep.tolerance = 0.0;
  rep.statistics = {{"final_max_distance", std::isfinite(sup.back()) ? sup.back() : -1.0},
                    {"monotone_violation", monotone},
                    {"outside_chart_evaluations", double(outside)}};
  rep.settle();
  return rep;
}

ExperimentReport run_reparametrization(const AffineConformalMapd& h, const Vector& u,
                                       const ReparametrizationOptions& opt) {
  validate(h, 1e-8);
  const Signature& sig = h.sig;
  require_size(u, sig.n(), "reparam u");
  if (opt.s_grid.empty() || opt.k_max < 0)
    throw Error(ErrorKind::InvalidInput, "reparam: empty grid or negative k_max");
  const double pairing = bilinear(sig, h.T, u);
  const double eigen = (h.scale * (h.A * u) - h.scale * h.scale * u).norm() / std::max(1e-300, u.norm());
  if (std::abs(pairing + 1.0) > 1e-8 || eigen > 1e-8)
    throw Error(ErrorKind::PreconditionViolated,
                "reparam: need <T,u> = -1 and lambda A u = lambda^2 u (pairing " + fmt(pairing) +
                    ", eigen residual " + fmt(eigen) + ")");
  const bool null = std::abs(eval_Q(sig, u)) <= 1e-10 * u.squaredNorm();

  ExperimentReport rep;
  rep.name = "reparam";
  rep.parameters = {{"signature", fmt(sig)},
                    {"scale", fmt(h.scale)},
                    {"T", fmt(h.T)},
                    {"u", fmt(u)},
                    {"k_max", std::to_string(opt.k_max)},
                    {"s_points", std::to_string(opt.s_grid.size())}};
  const MobiusElementd g = from_affine(h);
  MobiusElementd gk = MobiusElementd::identity(sig);
  double worst = 0;
  long count = 0;
  for (int k = 0; k <= opt.k_max; ++k) {
    double worst_k = 0;
    for (double s : opt.s_grid) {
      const double denom = 1.0 + k * s;
      if (std::abs(denom) < 1e-12) continue;
      const EinPointd z = chart_jo(sig, Vector(s * u));
      const EinPointd lhs = k == 0 ? z : act_on_ein(gk, z);
      const EinPointd rhs = chart_jo(sig, Vector((s / denom) * u));
      worst_k = std::max(worst_k, ein_distance(lhs, rhs));
      ++count;
    }
    rep.traces.push_back({double(k), double(k), worst_k});
    worst = std::max(worst, worst_k);
    gk = g * gk;
  }
  rep.samples = count;
  rep.max_violation = worst;
  rep.statistics = {{"pairing", pairing}, {"eigen_residual", eigen}, {"Q_u", eval_Q(sig, u)}};
  if (null) {
    rep.tolerance = opt.tolerance;
  } else {
    rep.notes.push_back("u is not null: exploratory measurement, no pass/fail claim");
  }
  rep.settle();
  return rep;
}

ExperimentReport run_semicomplete_contraction(const AffineConformalFieldd& F,
                                              const SemicompleteOptions& opt) {
  validate(F);
  const Signature& sig = F.sig;
  const int n = sig.n();
  if (!(opt.R0 > 0) || opt.t_grid.empty())
    throw Error(ErrorKind::InvalidInput, "semicomplete: invalid options");
  for (double t : opt.t_grid)
    if (t < 0) throw Error(ErrorKind::InvalidInput, "semicomplete: forward times only");
  const MobiusFieldd X = affine_to_field(F);
  const bool has_fixed_point = fixed_point_field(F).point.has_value();
  if (!has_fixed_point) require_translation_rotation(F, "semicomplete");

  ExperimentReport rep;
  rep.name = "semicomplete";
  rep.parameters = {{"signature", fmt(sig)},
                    {"R0", fmt(opt.R0)},
                    {"samples", std::to_string(opt.samples)},
                    {"seed", std::to_string(opt.seed)},
                    {"a", fmt(F.a)},
                    {"T", fmt(F.T)},
                    {"forward_branch_only", has_fixed_point ? "false" : "true"}};

  std::vector<Matrix> flows;
  for (double t : opt.t_grid) flows.push_back(projective_flow(X, t));
  const Rng base(opt.seed);
  std::vector<double> sup(opt.t_grid.size(), 0.0);
  long used = 0, attempts = 0;
  while (used < opt.samples && attempts < 100 * std::max(1L, opt.samples)) {
    Rng rng = base.fork(static_cast<std::uint64_t>(attempts++));
    const Vector y = rng.in_ball(n, opt.R0);
    // Forward branch of the trap: <s(y), T> >= 0, i.e. <y, T> <= 0.
    if (!has_fixed_point && y.dot(F.T) > 0) continue;
    ++used;
    const Vector col = chart_jo_column(sig, y);
    for (std::size_t k = 0; k < flows.size(); ++k) {
      const auto d = distance_to_o(flows[k], col, sig);
      sup[k] = std::max(sup[k], d ? *d : std::numeric_limits<double>::infinity());
    }
  }
  double containment = 0;
  for (std::size_t k = 0; k < sup.size(); ++k) {
    containment = std::max(containment, sup[k] >= opt.R0 ? sup[k] - opt.R0 + 1e-300 : 0.0);
    rep.traces.push_back({double(k), opt.t_grid[k], sup[k]});
  }
  if (!std::isfinite(containment)) containment = std::numeric_limits<double>::max();
  rep.samples = used;
  rep.max_violation = containment;
  rep.tolerance = opt.tolerance;
  const double spread = sup.back();
  rep.statistics = {{"final_spread", std::isfinite(spread) ? spread : -1.0},
                    {"collapsed", spread < opt.collapse_threshold ? 1.0 : 0.0},
                    {"collapse_threshold", opt.collapse_threshold}};
  rep.settle();
  return rep;
}

}  // namespace ein
