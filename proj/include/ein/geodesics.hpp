#pragma once

// Conformal geodesics of the flat model through o. Every geodesic is
// evaluated from a homogeneous column H(s), so poles of the affine chart
// formulas never appear:
//
//   timelike / spacelike, chart data (v, v0), w = v + s v0:
//       H(s) = (Q(w), 2 s w, -2 s^2)          read in j°: 2 s w / Q(w)
//   lightlike, chart data (u, v0):
//       H(s) = (1 + s <v0, u>, s u, 0)        read in j°: s u / (1 + s <v0, u>)
//   n- data (xi = Ad(c) eta, c):
//       H(s) = c exp(s eta) e_0
//
// Chart data (v, v0) is the n- data eta = n-(2v / Q(v)) (resp. n-(u)),
// conjugated by c = n+(-v0).

#include "ein/parabolic.hpp"

#include <cmath>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace ein {

enum class GeodesicKind { Timelike, Spacelike, Lightlike };

inline const char* to_string(GeodesicKind k) {
  switch (k) {
    case GeodesicKind::Timelike: return "timelike";
    case GeodesicKind::Spacelike: return "spacelike";
    case GeodesicKind::Lightlike: return "lightlike";
  }
  return "?";
}

template <typename Scalar = double>
struct ChartData {
  Vec<Scalar> v;
  Vec<Scalar> v0;
};

template <typename Scalar = double>
struct NminusData {
  MobiusField<Scalar> xi;
  MobiusElement<Scalar> conjugator;
};

/// Relative tolerance used to decide causal type of geodesic data.
inline constexpr double kCausalTolerance = 1e-10;

template <typename Scalar = double>
class ConformalGeodesic {
 public:
  using Form = std::variant<ChartData<Scalar>, NminusData<Scalar>>;

  /// s -> j°(2 s (v + s v0) / Q(v + s v0)) for non-null v, or the
  /// homographic lightlike line through o for null u = v.
  static ConformalGeodesic from_chart(const Signature& sig, const Vec<Scalar>& v,
                                      const Vec<Scalar>& v0) {
    validate(sig);
    require_size(v, sig.n(), "geodesic v");
    require_size(v0, sig.n(), "geodesic v0");
    const CausalType c = causal_type(sig, v, Scalar(kCausalTolerance));
    if (c == CausalType::Zero)
      throw Error(ErrorKind::InvalidInput, "geodesic direction must be nonzero");
    return ConformalGeodesic(sig, kind_of(c), ChartData<Scalar>{v, v0});
  }

  /// s -> [c exp(s eta) e_0] with xi = Ad(c) eta, eta in n-.
  static ConformalGeodesic from_nminus(const MobiusField<Scalar>& xi,
                                       const MobiusElement<Scalar>& conjugator) {
    const Signature& sig = xi.signature();
    const MobiusField<Scalar> eta = adjoint(conjugator.inverse(), xi);
    const Vec<Scalar> x = nminus_vector(eta);
    const CausalType c = causal_type(sig, x, Scalar(kCausalTolerance));
    const GeodesicKind kind = c == CausalType::Zero ? GeodesicKind::Spacelike : kind_of(c);
    ConformalGeodesic g(sig, kind, NminusData<Scalar>{xi, conjugator});
    g.eta_ = x;
    g.constant_ = c == CausalType::Zero;
    return g;
  }

  const Signature& signature() const { return sig_; }
  GeodesicKind kind() const { return kind_; }
  const Form& form() const { return form_; }
  /// True for the degenerate curve of xi = 0.
  bool is_constant() const { return constant_; }

  /// Homogeneous column H(s) and its derivative H'(s).
  Vec<Scalar> column(Scalar s) const { return eval_column(s, false); }
  Vec<Scalar> column_derivative(Scalar s) const { return eval_column(s, true); }

 private:
  ConformalGeodesic(const Signature& sig, GeodesicKind kind, Form form)
      : sig_(sig), kind_(kind), form_(std::move(form)) {}

  static GeodesicKind kind_of(CausalType c) {
    switch (c) {
      case CausalType::Timelike: return GeodesicKind::Timelike;
      case CausalType::Lightlike: return GeodesicKind::Lightlike;
      default: return GeodesicKind::Spacelike;
    }
  }

  static Vec<Scalar> nminus_vector(const MobiusField<Scalar>& eta) {
    const GradedParts<Scalar> parts = grade_decompose(eta, 1e-8);
    const Scalar rest = std::abs(parts.a) + parts.M.norm() + parts.xi_plus.norm();
    if (rest > Scalar(1e-8) * (Scalar(1) + eta.mat().norm()))
      throw Error(ErrorKind::NotNminus, "geodesic: Ad(c^-1) xi is not in n-");
    return parts.xi_minus;
  }

  Vec<Scalar> eval_column(Scalar s, bool derivative) const {
    const int n = sig_.n();
    Vec<Scalar> H(n + 2);
    if (const auto* cd = std::get_if<ChartData<Scalar>>(&form_)) {
      if (kind_ == GeodesicKind::Lightlike) {
        const Scalar b = bilinear(sig_, cd->v0, cd->v);
        if (derivative) {
          H(0) = b;
          H.segment(1, n) = cd->v;
        } else {
          H(0) = Scalar(1) + s * b;
          H.segment(1, n) = s * cd->v;
        }
        H(n + 1) = Scalar(0);
      } else {
        const Vec<Scalar> w = cd->v + s * cd->v0;
        if (derivative) {
          H(0) = Scalar(2) * bilinear(sig_, w, cd->v0);
          H.segment(1, n) = Scalar(2) * (w + s * cd->v0);
          H(n + 1) = Scalar(-4) * s;
        } else {
          H(0) = eval_Q(sig_, w);
          H.segment(1, n) = Scalar(2) * s * w;
          H(n + 1) = Scalar(-2) * s * s;
        }
      }
      return H;
    }
    const auto& nd = std::get<NminusData<Scalar>>(form_);
    const Scalar Qx = eval_Q(sig_, eta_);
    Vec<Scalar> base(n + 2);
    if (derivative) {
      base(0) = Scalar(0);
      base.segment(1, n) = eta_;
      base(n + 1) = -s * Qx;
    } else {
      base(0) = Scalar(1);
      base.segment(1, n) = s * eta_;
      base(n + 1) = -s * s * Qx / Scalar(2);
    }
    return nd.conjugator.mat() * base;
  }

  Signature sig_;
  GeodesicKind kind_;
  Form form_;
  Vec<Scalar> eta_;
  bool constant_ = false;
};

using ConformalGeodesicd = ConformalGeodesic<double>;

template <typename Scalar = double>
struct GeodesicSegment {
  ConformalGeodesic<Scalar> geo;
  Scalar s0;
};

/// s -> pi_G(exp(s xi)) for xi in n-.
template <typename Scalar>
ConformalGeodesic<Scalar> geodesic_from_o(const MobiusField<Scalar>& xi) {
  return ConformalGeodesic<Scalar>::from_nminus(xi, MobiusElement<Scalar>::identity(xi.signature()));
}

template <typename Scalar>
EinPoint<Scalar> eval_geodesic(const ConformalGeodesic<Scalar>& geo, Scalar s) {
  return EinPoint<Scalar>::from_rep(geo.signature(), geo.column(s));
}

/// The same geodesic as n- data (xi, c) with xi = Ad(c) eta.
template <typename Scalar>
NminusData<Scalar> to_nminus_form(const ConformalGeodesic<Scalar>& geo) {
  if (const auto* nd = std::get_if<NminusData<Scalar>>(&geo.form())) return *nd;
  const auto& cd = std::get<ChartData<Scalar>>(geo.form());
  const Signature& sig = geo.signature();
  const MobiusElement<Scalar> c = gen_nplus(sig, Vec<Scalar>(-cd.v0));
  Vec<Scalar> x = cd.v;
  if (geo.kind() != GeodesicKind::Lightlike) x = Scalar(2) * cd.v / eval_Q(sig, cd.v);
  return {adjoint(c, nminus_generator(sig, x)), c};
}

/// Chart-at-infinity coordinates y(s) = H_mid / H_0 and velocity, or nullopt
/// when H(s) leaves the chart.
template <typename Scalar>
struct ChartSample {
  Vec<Scalar> y;
  Vec<Scalar> dy;
};

template <typename Scalar>
std::optional<ChartSample<Scalar>> chart_sample(const ConformalGeodesic<Scalar>& geo, Scalar s,
                                                Scalar pivot_tol = Scalar(1e-12)) {
  const int n = geo.signature().n();
  const Vec<Scalar> H = geo.column(s);
  const Vec<Scalar> dH = geo.column_derivative(s);
  using std::abs;
  if (abs(H(0)) <= pivot_tol * H.norm()) return std::nullopt;
  const Scalar h0 = H(0);
  ChartSample<Scalar> out;
  out.y = H.segment(1, n) / h0;
  out.dy = (dH.segment(1, n) * h0 - H.segment(1, n) * dH(0)) / (h0 * h0);
  return out;
}

struct QuadratureConfig {
  double abs_tol = 1e-9;
  int max_depth = 30;
};

template <typename Scalar = double>
struct LengthEstimate {
  Scalar length{};
  Scalar error_estimate{};
};

namespace detail {

template <typename Scalar, typename F>
Scalar adaptive_simpson(const F& f, Scalar a, Scalar b, Scalar fa, Scalar fm, Scalar fb,
                        Scalar whole, Scalar tol, int depth, Scalar* err) {
  const Scalar m = (a + b) / 2;
  const Scalar lm = (a + m) / 2;
  const Scalar rm = (m + b) / 2;
  const Scalar flm = f(lm);
  const Scalar frm = f(rm);
  const Scalar left = (m - a) / 6 * (fa + 4 * flm + fm);
  const Scalar right = (b - m) / 6 * (fm + 4 * frm + fb);
  const Scalar delta = left + right - whole;
  using std::abs;
  if (depth <= 0 || abs(delta) <= 15 * tol) {
    *err += abs(delta) / 15;
    return left + right + delta / 15;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2, depth - 1, err) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2, depth - 1, err);
}

}  // namespace detail

/// L° of a segment: integral of the Euclidean speed of the j° curve.
/// nullopt when some sampled point leaves the chart at infinity.
template <typename Scalar>
std::optional<LengthEstimate<Scalar>> segment_length_L0(const GeodesicSegment<Scalar>& seg,
                                                        const QuadratureConfig& quad = {},
                                                        int domain_samples = 512) {
  if (!(seg.s0 > Scalar(0))) throw Error(ErrorKind::InvalidInput, "segment: s0 must be > 0");
  for (int k = 0; k <= domain_samples; ++k)
    if (!chart_sample(seg.geo, seg.s0 * Scalar(k) / Scalar(domain_samples))) return std::nullopt;
  bool outside = false;
  auto speed = [&](Scalar s) {
    const auto cs = chart_sample(seg.geo, s);
    if (!cs) {
      outside = true;
      return Scalar(0);
    }
    return cs->dy.norm();
  };
  // Split into pieces so the initial Simpson estimate cannot miss features.
  constexpr int pieces = 16;
  LengthEstimate<Scalar> out;
  const Scalar tol = Scalar(quad.abs_tol) / pieces;
  for (int i = 0; i < pieces; ++i) {
    const Scalar a = seg.s0 * Scalar(i) / pieces;
    const Scalar b = seg.s0 * Scalar(i + 1) / pieces;
    const Scalar fa = speed(a), fb = speed(b), fm = speed((a + b) / 2);
    const Scalar whole = (b - a) / 6 * (fa + 4 * fm + fb);
    out.length += detail::adaptive_simpson(speed, a, b, fa, fm, fb, whole, tol, quad.max_depth,
                                           &out.error_estimate);
  }
  if (outside) return std::nullopt;
  return out;
}

/// Certifies [0, s0] -> j° curve inside the open Euclidean ball of radius R:
/// dense samples, plus a first-order bound between consecutive samples.
template <typename Scalar>
bool segment_in_ball(const GeodesicSegment<Scalar>& seg, Scalar R, int samples = 512) {
  if (!(R > Scalar(0))) throw Error(ErrorKind::InvalidInput, "segment_in_ball: R must be > 0");
  const Scalar h = seg.s0 / Scalar(samples);
  std::optional<ChartSample<Scalar>> prev = chart_sample(seg.geo, Scalar(0));
  if (!prev || !(prev->y.norm() < R)) return false;
  for (int k = 1; k <= samples; ++k) {
    const Scalar s = seg.s0 * Scalar(k) / Scalar(samples);
    const auto cur = chart_sample(seg.geo, s);
    const auto mid = chart_sample(seg.geo, s - h / 2);
    if (!cur || !mid) return false;
    using std::max;
    const Scalar speed = max(max(prev->dy.norm(), cur->dy.norm()), mid->dy.norm());
    const Scalar peak = max(max(prev->y.norm(), cur->y.norm()), mid->y.norm());
    if (!(peak + speed * h / 4 < R)) return false;
    prev = cur;
  }
  return true;
}

/// Projection pi_G: g -> [g e_0].
template <typename Scalar>
EinPoint<Scalar> project(const MobiusElement<Scalar>& g) {
  return EinPoint<Scalar>::from_rep(g.signature(), Vec<Scalar>(g.mat().col(0)), Scalar(1e-6));
}

template <typename Scalar>
using GroupCurve = std::function<MobiusElement<Scalar>(Scalar)>;

/// Development of a lifted curve in the flat model: t -> lift(t0)^{-1} lift(t).
template <typename Scalar>
GroupCurve<Scalar> develop_flat(GroupCurve<Scalar> lift, Scalar t0) {
  const MobiusElement<Scalar> base = lift(t0);
  if (!group_member(base.signature(), base.mat(), 1e-8))
    throw Error(ErrorKind::NotInGroup, "develop_flat: lift is not in the group");
  const MobiusElement<Scalar> base_inv = base.inverse();
  return [lift = std::move(lift), base_inv](Scalar t) {
    const MobiusElement<Scalar> g = lift(t);
    if (!group_member(g.signature(), g.mat(), 1e-8))
      throw Error(ErrorKind::NotInGroup, "develop_flat: lift is not in the group");
    return base_inv * g;
  };
}

/// Max over s_grid of the distance between the development of the
/// transformed geodesic, pi_G(exp(s Ad(h^t) xi)), and h^t . beta(s).
template <typename Scalar>
Scalar holonomy_equivariance_check(const MobiusField<Scalar>& Xp,
                                   const ConformalGeodesic<Scalar>& geo, Scalar t,
                                   const std::vector<Scalar>& s_grid) {
  field_to_affine(Xp);
  const MobiusElement<Scalar> ht = exp_field(Xp, t);
  const NminusData<Scalar> nd = to_nminus_form(geo);
  const MobiusField<Scalar> moved = adjoint(ht, nd.xi);
  // nd.xi = Ad(c) eta with c in P, so exp(s xi) e_0 = c exp(s eta) e_0 projectively.
  Scalar worst(0);
  using std::max;
  for (Scalar s : s_grid) {
    const Vec<Scalar> lhs = matrix_exp(Mat<Scalar>(s * moved.mat())).col(0);
    const EinPoint<Scalar> developed = EinPoint<Scalar>::from_rep(geo.signature(), lhs, Scalar(1e-6));
    const EinPoint<Scalar> acted = act_on_ein(ht, eval_geodesic(geo, s));
    worst = max(worst, ein_distance(developed, acted));
  }
  return worst;
}

}  // namespace ein
