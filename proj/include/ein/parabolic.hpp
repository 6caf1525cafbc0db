#pragma once

// The stabilizer P of o = [e_0], realized as the affine conformal group of
// R^{p,q} through the chart j:  g = n+(T) diag(lambda, A, 1/lambda)  acts by
// x -> lambda A x + T.

#include "ein/liealg.hpp"
#include "ein/model.hpp"

#include <cmath>
#include <vector>

namespace ein {

template <typename Scalar = double>
struct AffineConformalMap {
  Signature sig;
  Scalar scale = Scalar(1);
  Mat<Scalar> A;
  Vec<Scalar> T;

  template <typename Derived>
  Vec<Scalar> operator()(const Eigen::MatrixBase<Derived>& x) const {
    return scale * (A * x) + T;
  }

  /// this o other.
  AffineConformalMap compose(const AffineConformalMap& other) const {
    return {sig, scale * other.scale, A * other.A, scale * (A * other.T) + T};
  }
};

/// Infinitesimal generator x -> (a I + M) x + T.
template <typename Scalar = double>
struct AffineConformalField {
  Signature sig;
  Scalar a{};
  Mat<Scalar> M;
  Vec<Scalar> T;

  template <typename Derived>
  Vec<Scalar> operator()(const Eigen::MatrixBase<Derived>& x) const {
    return a * x + M * x + T;
  }

  /// The linear part a I + M.
  Mat<Scalar> linear() const {
    return a * Mat<Scalar>::Identity(sig.n(), sig.n()) + M;
  }
};

using AffineConformalMapd = AffineConformalMap<double>;
using AffineConformalFieldd = AffineConformalField<double>;

template <typename Scalar>
void validate(const AffineConformalMap<Scalar>& h, double tol = kMembershipTolerance) {
  validate(h.sig);
  require_square(h.A, h.sig.n(), "AffineConformalMap A");
  require_size(h.T, h.sig.n(), "AffineConformalMap T");
  if (!(h.scale > Scalar(0)))
    throw Error(ErrorKind::InvalidInput, "AffineConformalMap: scale must be positive");
  const Scalar norm = h.A.norm();
  if (opq_group_residual(h.sig, h.A) > Scalar(tol) * (Scalar(1) + norm * norm))
    throw Error(ErrorKind::NotInGroup, "AffineConformalMap: A is not in O(p,q)");
}

template <typename Scalar>
void validate(const AffineConformalField<Scalar>& F, double tol = kMembershipTolerance) {
  validate(F.sig);
  require_square(F.M, F.sig.n(), "AffineConformalField M");
  require_size(F.T, F.sig.n(), "AffineConformalField T");
  if (opq_algebra_residual(F.sig, F.M) > Scalar(tol) * (Scalar(1) + F.M.norm()))
    throw Error(ErrorKind::NotInAlgebra, "AffineConformalField: M is not in o(p,q)");
}

/// Reads (lambda, A, T) off an element of P. Representatives g and -g give
/// the same map.
template <typename Scalar>
AffineConformalMap<Scalar> to_affine(const MobiusElement<Scalar>& g,
                                     double tol = kMembershipTolerance) {
  const Signature& sig = g.signature();
  const int n = sig.n();
  const Mat<Scalar>& m = g.mat();
  const Scalar g00 = m(0, 0);
  const Scalar off = m.col(0).tail(n + 1).norm();
  using std::abs;
  if (!(abs(g00) > Scalar(0)) || off > Scalar(tol) * (Scalar(1) + m.norm()))
    throw Error(ErrorKind::NotInP, "to_affine: element does not fix o");
  const Scalar mu = m(n + 1, n + 1);
  const Scalar sign = g00 > Scalar(0) ? Scalar(1) : Scalar(-1);
  AffineConformalMap<Scalar> h;
  h.sig = sig;
  h.scale = abs(g00);
  h.A = sign * m.block(1, 1, n, n);
  h.T = m.block(1, n + 1, n, 1) / mu;
  return h;
}

/// n+(T) diag(lambda, A, 1/lambda).
template <typename Scalar>
MobiusElement<Scalar> from_affine(const AffineConformalMap<Scalar>& h) {
  validate(h);
  const int n = h.sig.n();
  Mat<Scalar> d = Mat<Scalar>::Zero(n + 2, n + 2);
  d(0, 0) = h.scale;
  d.block(1, 1, n, n) = h.A;
  d(n + 1, n + 1) = Scalar(1) / h.scale;
  return MobiusElement<Scalar>::unchecked(h.sig, gen_nplus(h.sig, h.T).mat() * d);
}

template <typename Scalar>
AffineConformalField<Scalar> field_to_affine(const MobiusField<Scalar>& X,
                                             double tol = kMembershipTolerance) {
  const GradedParts<Scalar> parts = grade_decompose(X, tol);
  const Scalar scale = Scalar(1) + X.mat().norm();
  if (parts.xi_minus.norm() > Scalar(tol) * scale)
    throw Error(ErrorKind::NotInLittleP, "field_to_affine: field has an n- component");
  return {X.signature(), parts.a, parts.M, parts.xi_plus};
}

template <typename Scalar>
MobiusField<Scalar> affine_to_field(const AffineConformalField<Scalar>& F) {
  validate(F);
  return field_unchecked<Scalar>(F.sig, r_matrix(F.sig, F.a, F.M) + nplus_matrix(F.sig, F.T));
}

/// Time-t map of the affine flow, from the exponential of the augmented
/// (n+1)x(n+1) generator [[aI + M, T], [0, 0]].
template <typename Scalar>
AffineConformalMap<Scalar> affine_flow(const AffineConformalField<Scalar>& F, Scalar t) {
  validate(F);
  const int n = F.sig.n();
  Mat<Scalar> aug = Mat<Scalar>::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = t * F.M;
  aug.topRightCorner(n, 1) = t * F.T;
  aug.topLeftCorner(n, n).diagonal().array() += t * F.a;
  const Mat<Scalar> E = matrix_exp(aug);
  using std::exp;
  const Scalar scale = exp(F.a * t);
  return {F.sig, scale, E.topLeftCorner(n, n) / scale, E.topRightCorner(n, 1)};
}

template <typename Scalar>
EinPoint<Scalar> act_on_ein(const MobiusElement<Scalar>& g, const EinPoint<Scalar>& z) {
  if (!(g.signature() == z.signature()))
    throw Error(ErrorKind::DimensionMismatch, "act_on_ein: signatures differ");
  return EinPoint<Scalar>::from_rep(z.signature(), Vec<Scalar>(g.mat() * z.rep()));
}

/// Projective representative of exp(t X), safe for large |t X|.
template <typename Scalar>
Mat<Scalar> projective_flow(const MobiusField<Scalar>& X, Scalar t) {
  return projective_matrix_exp(Mat<Scalar>(t * X.mat()));
}

/// Action of a projective representative (any nonzero multiple of a group
/// element) on a point.
template <typename Scalar>
EinPoint<Scalar> act_projective(const Mat<Scalar>& g, const EinPoint<Scalar>& z) {
  return EinPoint<Scalar>::from_rep(z.signature(), Vec<Scalar>(g * z.rep()));
}

/// A finite sequence of diagonal dilations; entries[k] lists lambda_1(k), ..., lambda_n(k).
template <typename Scalar = double>
struct DiagonalSequence {
  std::vector<std::vector<Scalar>> entries;
};

using DiagonalSequenced = DiagonalSequence<double>;

inline constexpr double kStabilityEpsilon = 1e-3;

template <typename Scalar>
bool is_stable(const DiagonalSequence<Scalar>& seq) {
  if (seq.entries.empty()) throw Error(ErrorKind::InvalidInput, "is_stable: empty sequence");
  for (const auto& row : seq.entries) {
    if (row.empty()) return false;
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (!(row[i] >= Scalar(1))) return false;
      if (i > 0 && row[i] > row[i - 1]) return false;
    }
  }
  return true;
}

/// Stable, and every 1/lambda_i(k) is below epsilon at the last index.
template <typename Scalar>
bool is_strongly_stable(const DiagonalSequence<Scalar>& seq, double epsilon = kStabilityEpsilon) {
  if (!is_stable(seq)) return false;
  const auto& last = seq.entries.back();
  return Scalar(1) / last.back() < Scalar(epsilon);
}

/// The element diag(lambda, A, 1/lambda) of P whose affine linear part
/// lambda A is diag(lambdas). Requires lambda_i lambda_{n+1-i} = lambda^2 and
/// lambda_i = lambda on the Euclidean middle block.
template <typename Scalar>
MobiusElement<Scalar> diagonal_element(const Signature& sig, const std::vector<Scalar>& lambdas,
                                       double tol = 1e-10) {
  validate(sig);
  const int n = sig.n();
  if (static_cast<int>(lambdas.size()) != n)
    throw Error(ErrorKind::DimensionMismatch, "diagonal_element: expected n entries");
  using std::abs;
  using std::sqrt;
  const Scalar lambda = sqrt(lambdas.front() * lambdas.back());
  for (int i = 0; i < n; ++i) {
    const Scalar prod = lambdas[i] * lambdas[n - 1 - i];
    if (abs(prod - lambda * lambda) > Scalar(tol) * lambda * lambda)
      throw Error(ErrorKind::NotInP, "diagonal_element: mirrored entries do not pair");
    if (i >= sig.p && i < sig.q && abs(lambdas[i] - lambda) > Scalar(tol) * lambda)
      throw Error(ErrorKind::NotInP, "diagonal_element: middle entries must equal lambda");
  }
  Vec<Scalar> d(n + 2);
  d(0) = lambda;
  for (int i = 0; i < n; ++i) d(i + 1) = lambdas[i] / lambda;
  d(n + 1) = Scalar(1) / lambda;
  return MobiusElement<Scalar>::unchecked(sig, Mat<Scalar>(d.asDiagonal()));
}

}  // namespace ein
