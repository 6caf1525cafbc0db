#pragma once

// Matrix realizations of o(p+1,q+1) and O(p+1,q+1) in the split basis
// (e_0, ..., e_{n+1}). The algebra is graded as n- + r + n+:
//
//   r  : diag(a, M, -a),  M in o(p,q)
//   n+ : first row middle block -x^T J, last column middle block x
//   n- : first column middle block x,   last row middle block -x^T J
//
// o = [e_0] is fixed by P = exp(r + n+).

#include "ein/expm.hpp"
#include "ein/forms.hpp"

#include <cmath>
#include <vector>

namespace ein {

/// Default relative tolerance of the membership tests.
inline constexpr double kMembershipTolerance = 1e-10;

template <typename Derived>
typename Derived::Scalar algebra_residual(const Signature& sig,
                                          const Eigen::MatrixBase<Derived>& X) {
  using Scalar = typename Derived::Scalar;
  require_square(X, sig.ambient(), "algebra membership");
  const Mat<Scalar> J = ambient_form_matrix<Scalar>(sig);
  return (X.transpose() * J + J * X).norm();
}

template <typename Derived>
typename Derived::Scalar group_residual(const Signature& sig, const Eigen::MatrixBase<Derived>& g) {
  using Scalar = typename Derived::Scalar;
  require_square(g, sig.ambient(), "group membership");
  const Mat<Scalar> J = ambient_form_matrix<Scalar>(sig);
  return (g.transpose() * J * g - J).norm();
}

/// Residual ||X^T J + J X||_F; membership means residual <= tol (1 + ||X||).
template <typename Derived>
typename Derived::Scalar is_in_algebra(const Signature& sig, const Eigen::MatrixBase<Derived>& X) {
  return algebra_residual(sig, X);
}

/// Residual ||g^T J g - J||_F; membership means residual <= tol (1 + ||g||^2).
template <typename Derived>
typename Derived::Scalar is_in_group(const Signature& sig, const Eigen::MatrixBase<Derived>& g) {
  return group_residual(sig, g);
}

template <typename Derived>
bool algebra_member(const Signature& sig, const Eigen::MatrixBase<Derived>& X,
                    double tol = kMembershipTolerance) {
  using Scalar = typename Derived::Scalar;
  return algebra_residual(sig, X) <= Scalar(tol) * (Scalar(1) + X.norm());
}

template <typename Derived>
bool group_member(const Signature& sig, const Eigen::MatrixBase<Derived>& g,
                  double tol = kMembershipTolerance) {
  using Scalar = typename Derived::Scalar;
  const Scalar norm = g.norm();
  return group_residual(sig, g) <= Scalar(tol) * (Scalar(1) + norm * norm);
}

/// An element of o(p+1,q+1).
template <typename Scalar = double>
class MobiusField {
 public:
  template <typename Derived>
  static MobiusField checked(const Signature& sig, const Eigen::MatrixBase<Derived>& mat,
                             double tol = kMembershipTolerance) {
    validate(sig);
    require_square(mat, sig.ambient(), "MobiusField");
    if (!algebra_member(sig, mat, tol))
      throw Error(ErrorKind::NotInAlgebra, "matrix is not in o(p+1,q+1)");
    return MobiusField(sig, mat);
  }

  const Signature& signature() const { return sig_; }
  const Mat<Scalar>& mat() const { return mat_; }

  MobiusField operator+(const MobiusField& o) const { return {sig_, mat_ + o.mat_}; }
  MobiusField operator-(const MobiusField& o) const { return {sig_, mat_ - o.mat_}; }
  MobiusField operator*(Scalar s) const { return {sig_, s * mat_}; }

 private:
  template <typename S>
  friend MobiusField<S> bracket(const MobiusField<S>&, const MobiusField<S>&);
  template <typename S>
  friend class MobiusElement;
  template <typename S, typename D>
  friend MobiusField<S> field_unchecked(const Signature&, const Eigen::MatrixBase<D>&);

  MobiusField(const Signature& sig, Mat<Scalar> mat) : sig_(sig), mat_(std::move(mat)) {}

  Signature sig_;
  Mat<Scalar> mat_;
};

/// Builds a field from a matrix already known to be in the algebra by
/// construction (closed-form generators, brackets, adjoint images).
template <typename Scalar, typename Derived>
MobiusField<Scalar> field_unchecked(const Signature& sig, const Eigen::MatrixBase<Derived>& mat) {
  return MobiusField<Scalar>(sig, Mat<Scalar>(mat));
}

template <typename Scalar>
MobiusField<Scalar> bracket(const MobiusField<Scalar>& X, const MobiusField<Scalar>& Y) {
  return MobiusField<Scalar>(X.sig_, X.mat_ * Y.mat_ - Y.mat_ * X.mat_);
}

/// An element of O(p+1,q+1).
template <typename Scalar = double>
class MobiusElement {
 public:
  template <typename Derived>
  static MobiusElement checked(const Signature& sig, const Eigen::MatrixBase<Derived>& mat,
                               double tol = kMembershipTolerance) {
    validate(sig);
    require_square(mat, sig.ambient(), "MobiusElement");
    if (!group_member(sig, mat, tol))
      throw Error(ErrorKind::NotInGroup, "matrix is not in O(p+1,q+1)");
    return MobiusElement(sig, mat);
  }

  static MobiusElement identity(const Signature& sig) {
    validate(sig);
    return MobiusElement(sig, Mat<Scalar>::Identity(sig.ambient(), sig.ambient()));
  }

  template <typename Derived>
  static MobiusElement unchecked(const Signature& sig, const Eigen::MatrixBase<Derived>& mat) {
    return MobiusElement(sig, Mat<Scalar>(mat));
  }

  const Signature& signature() const { return sig_; }
  const Mat<Scalar>& mat() const { return mat_; }

  /// g^{-1} = J g^T J, exact for group elements.
  MobiusElement inverse() const {
    const Mat<Scalar> J = ambient_form_matrix<Scalar>(sig_);
    return MobiusElement(sig_, J * mat_.transpose() * J);
  }

  MobiusElement operator*(const MobiusElement& o) const {
    return MobiusElement(sig_, mat_ * o.mat_);
  }

 private:
  MobiusElement(const Signature& sig, Mat<Scalar> mat) : sig_(sig), mat_(std::move(mat)) {}

  Signature sig_;
  Mat<Scalar> mat_;
};

using MobiusFieldd = MobiusField<double>;
using MobiusElementd = MobiusElement<double>;

/// Graded parts of an algebra element: X = n-(xi_minus) + r(a, M) + n+(xi_plus).
template <typename Scalar = double>
struct GradedParts {
  Vec<Scalar> xi_minus;
  Scalar a{};
  Mat<Scalar> M;
  Vec<Scalar> xi_plus;
};

template <typename Derived>
Mat<typename Derived::Scalar> nplus_matrix(const Signature& sig, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  validate(sig);
  require_size(x, sig.n(), "n+ generator");
  const int n = sig.n();
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  Mat<Scalar> X = Mat<Scalar>::Zero(n + 2, n + 2);
  X.block(0, 1, 1, n) = -(x.transpose() * J);
  X.block(1, n + 1, n, 1) = x;
  return X;
}

template <typename Derived>
Mat<typename Derived::Scalar> nminus_matrix(const Signature& sig,
                                            const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  validate(sig);
  require_size(x, sig.n(), "n- generator");
  const int n = sig.n();
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  Mat<Scalar> X = Mat<Scalar>::Zero(n + 2, n + 2);
  X.block(1, 0, n, 1) = x;
  X.block(n + 1, 1, 1, n) = -(x.transpose() * J);
  return X;
}

template <typename Scalar, typename DerivedM>
Mat<Scalar> r_matrix(const Signature& sig, Scalar a, const Eigen::MatrixBase<DerivedM>& M) {
  validate(sig);
  require_square(M, sig.n(), "r block");
  const int n = sig.n();
  Mat<Scalar> X = Mat<Scalar>::Zero(n + 2, n + 2);
  X(0, 0) = a;
  X.block(1, 1, n, n) = M;
  X(n + 1, n + 1) = -a;
  return X;
}

template <typename Derived>
MobiusField<typename Derived::Scalar> nplus_generator(const Signature& sig,
                                                      const Eigen::MatrixBase<Derived>& x) {
  return field_unchecked<typename Derived::Scalar>(sig, nplus_matrix(sig, x));
}

template <typename Derived>
MobiusField<typename Derived::Scalar> nminus_generator(const Signature& sig,
                                                       const Eigen::MatrixBase<Derived>& x) {
  return field_unchecked<typename Derived::Scalar>(sig, nminus_matrix(sig, x));
}

/// o(p,q) residual ||M^T J + J M||.
template <typename Derived>
typename Derived::Scalar opq_algebra_residual(const Signature& sig,
                                              const Eigen::MatrixBase<Derived>& M) {
  using Scalar = typename Derived::Scalar;
  require_square(M, sig.n(), "o(p,q) membership");
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  return (M.transpose() * J + J * M).norm();
}

template <typename Derived>
typename Derived::Scalar opq_group_residual(const Signature& sig,
                                            const Eigen::MatrixBase<Derived>& A) {
  using Scalar = typename Derived::Scalar;
  require_square(A, sig.n(), "O(p,q) membership");
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  return (A.transpose() * J * A - J).norm();
}

template <typename Scalar, typename DerivedM>
MobiusField<Scalar> r_generator(const Signature& sig, Scalar a,
                                const Eigen::MatrixBase<DerivedM>& M) {
  if (opq_algebra_residual(sig, M) > Scalar(kMembershipTolerance) * (Scalar(1) + M.norm()))
    throw Error(ErrorKind::NotInAlgebra, "r block: M is not in o(p,q)");
  return field_unchecked<Scalar>(sig, r_matrix(sig, a, M));
}

template <typename Scalar>
Mat<Scalar> reassemble(const Signature& sig, const GradedParts<Scalar>& parts) {
  return nminus_matrix(sig, parts.xi_minus) + r_matrix(sig, parts.a, parts.M) +
         nplus_matrix(sig, parts.xi_plus);
}

/// Reads the graded parts off the block structure. xi_plus is recovered from
/// the first row (-x^T J), so reassembly also certifies the last column.
template <typename Scalar>
GradedParts<Scalar> grade_decompose(const MobiusField<Scalar>& X,
                                    double tol = kMembershipTolerance) {
  const Signature& sig = X.signature();
  const int n = sig.n();
  const Mat<Scalar>& m = X.mat();
  if (!algebra_member(sig, m, tol)) throw Error(ErrorKind::NotInAlgebra, "grade_decompose");
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  GradedParts<Scalar> parts;
  parts.xi_minus = m.block(1, 0, n, 1);
  parts.a = m(0, 0);
  parts.M = m.block(1, 1, n, n);
  parts.xi_plus = -(J * m.block(0, 1, 1, n).transpose());
  const Scalar err = (reassemble(sig, parts) - m).norm();
  if (err > Scalar(tol) * (Scalar(1) + m.norm()))
    throw Error(ErrorKind::NotInAlgebra, "grade_decompose: reassembly residual too large");
  return parts;
}

/// Translation n+(v): x -> x + v in the chart j.
template <typename Derived>
MobiusElement<typename Derived::Scalar> gen_nplus(const Signature& sig,
                                                  const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  validate(sig);
  require_size(v, sig.n(), "gen_nplus");
  const int n = sig.n();
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  Mat<Scalar> g = Mat<Scalar>::Identity(n + 2, n + 2);
  g.block(0, 1, 1, n) = -(v.transpose() * J);
  g(0, n + 1) = -eval_Q(sig, v) / Scalar(2);
  g.block(1, n + 1, n, 1) = v;
  return MobiusElement<Scalar>::unchecked(sig, g);
}

/// n-(v), characterized by j°(v + w) = n-(v) j°(w).
template <typename Derived>
MobiusElement<typename Derived::Scalar> gen_nminus(const Signature& sig,
                                                   const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  validate(sig);
  require_size(v, sig.n(), "gen_nminus");
  const int n = sig.n();
  const Mat<Scalar> J = form_matrix<Scalar>(sig);
  Mat<Scalar> g = Mat<Scalar>::Identity(n + 2, n + 2);
  g.block(1, 0, n, 1) = v;
  g(n + 1, 0) = -eval_Q(sig, v) / Scalar(2);
  g.block(n + 1, 1, 1, n) = -(v.transpose() * J);
  return MobiusElement<Scalar>::unchecked(sig, g);
}

/// exp(t X).
template <typename Scalar>
MobiusElement<Scalar> exp_field(const MobiusField<Scalar>& X, Scalar t) {
  return MobiusElement<Scalar>::unchecked(X.signature(), matrix_exp(Mat<Scalar>(t * X.mat())));
}

/// Ad(g) X = g X g^{-1}.
template <typename Scalar>
MobiusField<Scalar> adjoint(const MobiusElement<Scalar>& g, const MobiusField<Scalar>& X) {
  if (!(g.signature() == X.signature()))
    throw Error(ErrorKind::DimensionMismatch, "adjoint: signatures differ");
  return field_unchecked<Scalar>(X.signature(), g.mat() * X.mat() * g.inverse().mat());
}

/// exp of the element of a with exponents alphas (p+1 of them): diagonal
/// (e^{a_1}, ..., e^{a_{p+1}}, 1 (q-p times), e^{-a_{p+1}}, ..., e^{-a_1}).
template <typename Scalar>
MobiusElement<Scalar> a_plus_element(const Signature& sig, const std::vector<Scalar>& alphas) {
  validate(sig);
  if (static_cast<int>(alphas.size()) != sig.p + 1)
    throw Error(ErrorKind::DimensionMismatch, "a_plus_element: expected p+1 exponents");
  const int N = sig.ambient();
  Vec<Scalar> d = Vec<Scalar>::Ones(N);
  using std::exp;
  for (int i = 0; i <= sig.p; ++i) {
    d(i) = exp(alphas[i]);
    d(N - 1 - i) = exp(-alphas[i]);
  }
  return MobiusElement<Scalar>::unchecked(sig, Mat<Scalar>(d.asDiagonal()));
}

/// True iff g is diagonal of the a_plus_element shape with
/// e^{a_1} >= ... >= e^{a_{p+1}} >= 1.
template <typename Scalar>
bool is_in_a_plus(const MobiusElement<Scalar>& g, double tol = 1e-12) {
  const Signature& sig = g.signature();
  const Mat<Scalar>& m = g.mat();
  const int N = sig.ambient();
  const Scalar scale = Scalar(1) + m.norm();
  Mat<Scalar> off = m;
  off.diagonal().setZero();
  if (off.norm() > Scalar(tol) * scale) return false;
  using std::abs;
  for (int i = sig.p + 1; i <= sig.q; ++i)
    if (abs(m(i, i) - Scalar(1)) > Scalar(tol) * scale) return false;
  for (int i = 0; i <= sig.p; ++i) {
    if (abs(m(i, i) * m(N - 1 - i, N - 1 - i) - Scalar(1)) > Scalar(tol) * scale) return false;
    if (m(i, i) < Scalar(1) - Scalar(tol)) return false;
    if (i > 0 && m(i, i) > m(i - 1, i - 1) * (Scalar(1) + Scalar(tol))) return false;
  }
  return true;
}

}  // namespace ein
