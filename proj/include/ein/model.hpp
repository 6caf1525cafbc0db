#pragma once

// The projective model Ein^{p,q}: null rays of R^{p+1,q+1}, the stereographic
// chart j (pole o) and the chart at infinity j° (centered at o), the inversion
// s(x) = -2x/Q(x) exchanging them, and the flat metric rho° read in j°.

#include "ein/forms.hpp"

#include <cmath>
#include <optional>

namespace ein {

/// A point of Ein^{p,q}, stored as its canonical representative: Euclidean
/// unit norm, first coordinate that is not negligible taken positive.
template <typename Scalar = double>
class EinPoint {
 public:
  static constexpr double kSignTolerance = 1e-12;
  static constexpr double kNullTolerance = 1e-8;

  /// Builds the point from any nonzero null representative.
  template <typename Derived>
  static EinPoint from_rep(const Signature& sig, const Eigen::MatrixBase<Derived>& rep,
                           Scalar null_tol = Scalar(kNullTolerance)) {
    require_size(rep, sig.ambient(), "EinPoint");
    const Scalar norm = rep.norm();
    using std::abs;
    if (!(norm > Scalar(0)) || !std::isfinite(static_cast<double>(norm)))
      throw Error(ErrorKind::InvalidInput, "EinPoint: representative must be finite and nonzero");
    Vec<Scalar> unit = rep / norm;
    if (abs(eval_Q_ambient(sig, unit)) > null_tol)
      throw Error(ErrorKind::InvalidInput, "EinPoint: representative is not null");
    return EinPoint(sig, canonicalize(std::move(unit)));
  }

  const Signature& signature() const { return sig_; }
  const Vec<Scalar>& rep() const { return rep_; }

  /// |Q(rep)| of the unit representative.
  Scalar null_residual() const {
    using std::abs;
    return abs(eval_Q_ambient(sig_, rep_));
  }

 private:
  EinPoint(const Signature& sig, Vec<Scalar> rep) : sig_(sig), rep_(std::move(rep)) {}

  static Vec<Scalar> canonicalize(Vec<Scalar> unit) {
    using std::abs;
    for (Eigen::Index i = 0; i < unit.size(); ++i) {
      if (abs(unit(i)) > Scalar(kSignTolerance)) {
        if (unit(i) < Scalar(0)) unit = -unit;
        break;
      }
    }
    return unit;
  }

  Signature sig_;
  Vec<Scalar> rep_;
};

using EinPointd = EinPoint<double>;

/// Projective distance between two points: min over the sign of the
/// representative of the Euclidean distance of unit representatives.
template <typename Scalar>
Scalar ein_distance(const EinPoint<Scalar>& a, const EinPoint<Scalar>& b) {
  if (!(a.signature() == b.signature()))
    throw Error(ErrorKind::DimensionMismatch, "ein_distance: signatures differ");
  using std::min;
  return min((a.rep() - b.rep()).norm(), (a.rep() + b.rep()).norm());
}

enum class Chart { J, JInfinity };

template <typename Scalar = double>
EinPoint<Scalar> basepoint_o(const Signature& sig) {
  validate(sig);
  Vec<Scalar> e0 = Vec<Scalar>::Zero(sig.ambient());
  e0(0) = Scalar(1);
  return EinPoint<Scalar>::from_rep(sig, e0);
}

/// Homogeneous column of j(x) = [-Q(x)/2, x, 1].
template <typename Derived>
Vec<typename Derived::Scalar> chart_j_column(const Signature& sig,
                                             const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const int n = sig.n();
  Vec<Scalar> col(n + 2);
  col(0) = -eval_Q(sig, x) / Scalar(2);
  col.segment(1, n) = x;
  col(n + 1) = Scalar(1);
  return col;
}

/// Homogeneous column of j°(x) = [1, x, -Q(x)/2].
template <typename Derived>
Vec<typename Derived::Scalar> chart_jo_column(const Signature& sig,
                                              const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const int n = sig.n();
  Vec<Scalar> col(n + 2);
  col(0) = Scalar(1);
  col.segment(1, n) = x;
  col(n + 1) = -eval_Q(sig, x) / Scalar(2);
  return col;
}

template <typename Derived>
EinPoint<typename Derived::Scalar> chart_j(const Signature& sig,
                                           const Eigen::MatrixBase<Derived>& x) {
  return EinPoint<typename Derived::Scalar>::from_rep(sig, chart_j_column(sig, x));
}

template <typename Derived>
EinPoint<typename Derived::Scalar> chart_jo(const Signature& sig,
                                            const Eigen::MatrixBase<Derived>& x) {
  return EinPoint<typename Derived::Scalar>::from_rep(sig, chart_jo_column(sig, x));
}

/// Chart coordinates of z, or nullopt when z lies on the lightcone of the
/// chart's pole (the pivot coordinate vanishes relative to the unit rep).
template <typename Scalar>
std::optional<Vec<Scalar>> inverse_chart(const EinPoint<Scalar>& z, Chart chart,
                                         Scalar pivot_tol = Scalar(1e-12)) {
  const Signature& sig = z.signature();
  const Vec<Scalar>& rep = z.rep();
  const Scalar pivot = chart == Chart::J ? rep(sig.n() + 1) : rep(0);
  using std::abs;
  if (abs(pivot) <= pivot_tol) return std::nullopt;
  return Vec<Scalar>(rep.segment(1, sig.n()) / pivot);
}

/// s(x) = -2x / Q(x); satisfies j°(s(x)) = j(x).
template <typename Derived>
Vec<typename Derived::Scalar> inversion_s(const Signature& sig,
                                          const Eigen::MatrixBase<Derived>& x,
                                          typename Derived::Scalar tol = 1e-12) {
  using Scalar = typename Derived::Scalar;
  const Scalar Q = eval_Q(sig, x);
  using std::abs;
  if (abs(Q) <= tol * x.squaredNorm())
    throw Error(ErrorKind::NullVector, "inversion_s: Q(x) vanishes");
  return Vec<Scalar>(Scalar(-2) * x / Q);
}

/// Distance for the flat metric rho° (Euclidean metric read in the chart j°).
template <typename Scalar>
std::optional<Scalar> rho_o_distance(const EinPoint<Scalar>& z1, const EinPoint<Scalar>& z2) {
  const auto y1 = inverse_chart(z1, Chart::JInfinity);
  const auto y2 = inverse_chart(z2, Chart::JInfinity);
  if (!y1 || !y2) return std::nullopt;
  return (*y1 - *y2).norm();
}

/// Membership in the rho°-ball B(o, R). Points outside the chart at infinity
/// are never in the ball.
template <typename Scalar>
bool ball_contains(const EinPoint<Scalar>& z, Scalar radius) {
  if (!(radius > Scalar(0))) throw Error(ErrorKind::InvalidInput, "ball_contains: R must be > 0");
  const auto y = inverse_chart(z, Chart::JInfinity);
  return y && y->norm() < radius;
}

}  // namespace ein
