#pragma once

// Quadratic forms of type (p,q) on R^n and (p+1,q+1) on R^{n+2}, in the split
// basis: coordinate i is paired with its mirror (n+1-i, resp. n+1-i in the
// ambient 0-based indexing) for the first p (resp. p+1) indices, and the middle
// block is Euclidean.

#include "ein/common.hpp"

#include <cmath>

namespace ein {

/// Matrix J_{p,q} of Q^{p,q} on R^n.
template <typename Scalar = double>
Mat<Scalar> form_matrix(const Signature& sig) {
  validate(sig);
  const int n = sig.n();
  Mat<Scalar> J = Mat<Scalar>::Zero(n, n);
  for (int i = 0; i < sig.p; ++i) {
    J(i, n - 1 - i) = Scalar(1);
    J(n - 1 - i, i) = Scalar(1);
  }
  for (int i = sig.p; i < sig.q; ++i) J(i, i) = Scalar(1);
  return J;
}

/// Matrix J_{p+1,q+1} of Q^{p+1,q+1} on R^{n+2}.
template <typename Scalar = double>
Mat<Scalar> ambient_form_matrix(const Signature& sig) {
  validate(sig);
  const int N = sig.ambient();
  Mat<Scalar> J = Mat<Scalar>::Zero(N, N);
  for (int i = 0; i <= sig.p; ++i) {
    J(i, N - 1 - i) = Scalar(1);
    J(N - 1 - i, i) = Scalar(1);
  }
  for (int i = sig.p + 1; i <= sig.q; ++i) J(i, i) = Scalar(1);
  return J;
}

namespace detail {

// Evaluates the split form sum directly; `pairs` is the number of hyperbolic pairs.
template <typename Derived>
typename Derived::Scalar split_form(int pairs, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index size = x.size();
  Scalar sum(0);
  for (int i = 0; i < pairs; ++i) sum += Scalar(2) * x(i) * x(size - 1 - i);
  for (Eigen::Index i = pairs; i < size - pairs; ++i) sum += x(i) * x(i);
  return sum;
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar split_bilinear(int pairs, const Eigen::MatrixBase<DerivedX>& x,
                                         const Eigen::MatrixBase<DerivedY>& y) {
  using Scalar = typename DerivedX::Scalar;
  const Eigen::Index size = x.size();
  Scalar sum(0);
  for (int i = 0; i < pairs; ++i)
    sum += x(i) * y(size - 1 - i) + x(size - 1 - i) * y(i);
  for (Eigen::Index i = pairs; i < size - pairs; ++i) sum += x(i) * y(i);
  return sum;
}

}  // namespace detail

template <typename Derived>
typename Derived::Scalar eval_Q_ambient(const Signature& sig, const Eigen::MatrixBase<Derived>& X) {
  validate(sig);
  require_size(X, sig.ambient(), "eval_Q_ambient");
  return detail::split_form(sig.p + 1, X);
}

template <typename Derived>
typename Derived::Scalar eval_Q(const Signature& sig, const Eigen::MatrixBase<Derived>& x) {
  validate(sig);
  require_size(x, sig.n(), "eval_Q");
  return detail::split_form(sig.p, x);
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar bilinear(const Signature& sig, const Eigen::MatrixBase<DerivedX>& x,
                                   const Eigen::MatrixBase<DerivedY>& y) {
  validate(sig);
  require_size(x, sig.n(), "bilinear");
  require_size(y, sig.n(), "bilinear");
  return detail::split_bilinear(sig.p, x, y);
}

template <typename DerivedX, typename DerivedY>
typename DerivedX::Scalar bilinear_ambient(const Signature& sig,
                                           const Eigen::MatrixBase<DerivedX>& X,
                                           const Eigen::MatrixBase<DerivedY>& Y) {
  validate(sig);
  require_size(X, sig.ambient(), "bilinear_ambient");
  require_size(Y, sig.ambient(), "bilinear_ambient");
  return detail::split_bilinear(sig.p + 1, X, Y);
}

enum class CausalType { Zero, Lightlike, Timelike, Spacelike };

inline const char* to_string(CausalType c) {
  switch (c) {
    case CausalType::Zero: return "zero";
    case CausalType::Lightlike: return "lightlike";
    case CausalType::Timelike: return "timelike";
    case CausalType::Spacelike: return "spacelike";
  }
  return "?";
}

/// Lightlike is decided relative to the Euclidean norm, so the verdict is
/// invariant under rescaling of x.
template <typename Derived>
CausalType causal_type(const Signature& sig, const Eigen::MatrixBase<Derived>& x,
                       typename Derived::Scalar tol) {
  using Scalar = typename Derived::Scalar;
  if (!(tol > Scalar(0))) throw Error(ErrorKind::InvalidInput, "causal_type: tol must be > 0");
  const Scalar Q = eval_Q(sig, x);
  if (x.cwiseAbs().maxCoeff() <= tol) return CausalType::Zero;
  using std::abs;
  if (abs(Q) <= tol * x.squaredNorm()) return CausalType::Lightlike;
  return Q < Scalar(0) ? CausalType::Timelike : CausalType::Spacelike;
}

}  // namespace ein
