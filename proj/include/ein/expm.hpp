#pragma once

// Matrix exponential: exact terminating series for nilpotent input, otherwise
// scaling and squaring with the degree-13 Pade approximant.

#include "ein/common.hpp"

#include <cmath>

namespace ein {

namespace detail {

template <typename Scalar>
bool is_nilpotent(const Mat<Scalar>& A, Mat<Scalar>* powers_sum) {
  const Eigen::Index N = A.rows();
  using std::max;
  using std::pow;
  const Scalar scale = max(Scalar(1), A.norm());
  Mat<Scalar> term = Mat<Scalar>::Identity(N, N);
  Mat<Scalar> sum = term;
  for (Eigen::Index k = 1; k <= N; ++k) {
    term = (term * A) / Scalar(k);
    if (k == N) break;
    sum += term;
  }
  // term now holds A^N / N!
  if (term.norm() > Scalar(1e-15) * pow(scale, Scalar(N))) return false;
  if (powers_sum) *powers_sum = std::move(sum);
  return true;
}

template <typename Scalar>
Mat<Scalar> pade13(const Mat<Scalar>& A) {
  static constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                                 1187353796428800.0,  129060195264000.0,   10559470521600.0,
                                 670442572800.0,      33522128640.0,       1323241920.0,
                                 40840800.0,          960960.0,            16380.0,
                                 182.0,               1.0};
  const Eigen::Index N = A.rows();
  const Mat<Scalar> I = Mat<Scalar>::Identity(N, N);
  const Mat<Scalar> A2 = A * A;
  const Mat<Scalar> A4 = A2 * A2;
  const Mat<Scalar> A6 = A4 * A2;
  const Mat<Scalar> U =
      A * (A6 * (Scalar(b[13]) * A6 + Scalar(b[11]) * A4 + Scalar(b[9]) * A2) +
           Scalar(b[7]) * A6 + Scalar(b[5]) * A4 + Scalar(b[3]) * A2 + Scalar(b[1]) * I);
  const Mat<Scalar> V = A6 * (Scalar(b[12]) * A6 + Scalar(b[10]) * A4 + Scalar(b[8]) * A2) +
                        Scalar(b[6]) * A6 + Scalar(b[4]) * A4 + Scalar(b[2]) * A2 +
                        Scalar(b[0]) * I;
  return (V - U).partialPivLu().solve(V + U);
}

}  // namespace detail

template <typename Derived>
Mat<typename Derived::Scalar> matrix_exp(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  if (input.rows() != input.cols())
    throw Error(ErrorKind::DimensionMismatch, "matrix_exp: square matrix expected");
  const Mat<Scalar> A = input;
  Mat<Scalar> series;
  if (detail::is_nilpotent(A, &series)) return series;

  constexpr double theta13 = 5.371920351148152;
  const Scalar norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > Scalar(theta13)) {
    using std::ceil;
    using std::log2;
    squarings = static_cast<int>(ceil(log2(norm1 / Scalar(theta13))));
  }
  Mat<Scalar> E = detail::pade13(Mat<Scalar>(A / std::ldexp(Scalar(1), squarings)));
  for (int i = 0; i < squarings; ++i) E = E * E;
  return E;
}

/// exp(A) up to a positive scalar, normalized to max-abs entry 1 after every
/// squaring. Used for projective actions where exp(A) itself would overflow.
template <typename Derived>
Mat<typename Derived::Scalar> projective_matrix_exp(const Eigen::MatrixBase<Derived>& input) {
  using Scalar = typename Derived::Scalar;
  if (input.rows() != input.cols())
    throw Error(ErrorKind::DimensionMismatch, "projective_matrix_exp: square matrix expected");
  const Mat<Scalar> A = input;
  Mat<Scalar> E;
  if (detail::is_nilpotent(A, &E)) return E / E.cwiseAbs().maxCoeff();

  constexpr double theta13 = 5.371920351148152;
  const Scalar norm1 = A.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > Scalar(theta13)) {
    using std::ceil;
    using std::log2;
    squarings = static_cast<int>(ceil(log2(norm1 / Scalar(theta13))));
  }
  E = detail::pade13(Mat<Scalar>(A / std::ldexp(Scalar(1), squarings)));
  E /= E.cwiseAbs().maxCoeff();
  for (int i = 0; i < squarings; ++i) {
    E = E * E;
    E /= E.cwiseAbs().maxCoeff();
  }
  return E;
}

}  // namespace ein
