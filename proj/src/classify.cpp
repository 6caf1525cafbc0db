#include "ein/classify.hpp"

#include "ein/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ein {

namespace {

FixedPointResult solve_minimal_norm(const Matrix& L, const Vector& T, double tol) {
  Eigen::JacobiSVD<Matrix> svd(L, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  const double cutoff = tol * smax;
  const Vector rhs = -T;
  Vector x = Vector::Zero(L.cols());
  FixedPointResult r;
  r.smallest_kept = smax > 0 ? 1.0 : 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double rel = smax > 0 ? s(i) / smax : 0.0;
    if (smax > 0 && s(i) > cutoff) {
      x += (svd.matrixU().col(i).dot(rhs) / s(i)) * svd.matrixV().col(i);
      r.smallest_kept = std::min(r.smallest_kept, rel);
    } else {
      r.largest_dropped = std::max(r.largest_dropped, rel);
    }
    if (smax > 0 && rel > tol / 10 && rel <= 10 * tol) r.low_confidence = true;
  }
  r.residual = (L * x - rhs).norm();
  r.threshold = tol * (1 + T.norm());
  if (r.residual > r.threshold / 10 && r.residual <= 10 * r.threshold) r.low_confidence = true;
  if (r.residual <= r.threshold) r.point = x;
  return r;
}

/// Orthonormal basis of the numerical kernel of K.
Matrix kernel_basis(const Matrix& K, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const Eigen::Index n = K.cols();
  const double cutoff = rel_tol * std::max(1.0, s.size() > 0 ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

double scale_tolerance(const MobiusFieldd& X, double tol) { return tol * (1 + X.mat().norm()); }

}  // namespace

FixedPointResult fixed_point_field(const AffineConformalFieldd& F, double tol) {
  validate(F);
  return solve_minimal_norm(F.linear(), F.T, tol);
}

FixedPointResult fixed_point_map(const AffineConformalMapd& h, double tol) {
  validate(h, 1e-8);
  const int n = h.sig.n();
  return solve_minimal_norm(h.scale * h.A - Matrix::Identity(n, n), h.T, tol);
}

ParabolicVector parabolic_vector(const AffineConformalMapd& h, double tol) {
  validate(h, 1e-8);
  if (fixed_point_map(h, tol).point)
    throw Error(ErrorKind::PreconditionViolated, "parabolic_vector: the map has a fixed point");
  const Signature& sig = h.sig;
  const int n = sig.n();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix J = form_matrix<double>(sig);
  const JordanFactors jf = jordan_chevalley(sig, h.A);

  // lambda A u = lambda^2 u  <=>  A_e u = u, A_s u = lambda u, A_u u = u.
  Matrix K(3 * n, n);
  K << jf.A_e - I, jf.A_s - h.scale * I, jf.A_u - I;
  const Matrix basis = kernel_basis(K, 1e-6 * (1 + h.A.norm()));
  const Vector c = basis.transpose() * (J * h.T);
  if (basis.cols() == 0 || c.norm() <= tol * (1 + h.T.norm()))
    throw Error(ErrorKind::NoParabolicVector,
                "parabolic_vector: no eigenvector pairs with the translation part");

  const Vector u0 = basis * c;
  Vector u = -u0 / c.squaredNorm();

  if (std::abs(eval_Q(sig, u)) > 1e-10 * u.squaredNorm() && basis.cols() > 1) {
    // Move inside {w in candidate : <T, w> = 0} to a null vector if one is
    // reachable along a principal direction of Q restricted to that space.
    Eigen::JacobiSVD<Matrix> csvd(Matrix(c.transpose()), Eigen::ComputeFullV);
    const Matrix W = basis * csvd.matrixV().rightCols(basis.cols() - 1);
    Eigen::SelfAdjointEigenSolver<Matrix> gram(W.transpose() * J * W);
    const double Qu = eval_Q(sig, u);
    std::optional<Vector> best;
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
      const Vector w = W * gram.eigenvectors().col(j);
      const double qa = gram.eigenvalues()(j);
      const double qb = bilinear(sig, u, w);
      double step;
      if (std::abs(qa) <= 1e-12) {
        if (std::abs(qb) <= 1e-12) continue;
        step = -Qu / (2 * qb);
      } else {
        const double disc = qb * qb - qa * Qu;
        if (disc < 0) continue;
        const double r1 = (-qb + std::sqrt(disc)) / qa;
        const double r2 = (-qb - std::sqrt(disc)) / qa;
        step = std::abs(r1) < std::abs(r2) ? r1 : r2;
      }
      const Vector cand = u + step * w;
      if (!best || cand.norm() < best->norm()) best = cand;
    }
    if (best) u = *best;
  }

  ParabolicVector pv;
  pv.u = u;
  pv.pairing = bilinear(sig, h.T, u);
  pv.is_null = std::abs(eval_Q(sig, u)) <= 1e-8 * u.squaredNorm();
  pv.eigen_residual = (h.scale * (h.A * u) - h.scale * h.scale * u).norm() / u.norm();
  pv.candidate_dimension = static_cast<int>(basis.cols());
  return pv;
}

LinearizabilityResult is_linearizable(const AffineConformalFieldd& F, double tol) {
  LinearizabilityResult r;
  const FixedPointResult fp = fixed_point_field(F, tol);
  r.low_confidence = fp.low_confidence;
  if (fp.point) {
    r.linearizable = true;
    r.fixed_point = fp.point;
    return r;
  }
  try {
    r.parabolic = parabolic_vector(affine_flow(F, 1.0), tol);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::NoParabolicVector && e.kind() != ErrorKind::IllConditioned &&
        e.kind() != ErrorKind::PreconditionViolated)
      throw;
    r.low_confidence = true;
  }
  return r;
}

bool is_inessential(const AffineConformalFieldd& F, double tol) {
  const FixedPointResult fp = fixed_point_field(F, tol);
  const MobiusFieldd X = affine_to_field(F);
  return fp.point.has_value() && std::abs(F.a) <= scale_tolerance(X, tol);
}

FixedPointResult joint_fixed_point(const std::vector<AffineConformalFieldd>& fields, double tol) {
  if (fields.empty()) throw Error(ErrorKind::InvalidInput, "joint_fixed_point: no fields");
  const Signature sig = fields.front().sig;
  const int n = sig.n();
  const int k = static_cast<int>(fields.size());
  Matrix L(k * n, n);
  Vector T(k * n);
  for (int i = 0; i < k; ++i) {
    if (!(fields[i].sig == sig))
      throw Error(ErrorKind::DimensionMismatch, "joint_fixed_point: signatures differ");
    validate(fields[i]);
    L.middleRows(i * n, n) = fields[i].linear();
    T.segment(i * n, n) = fields[i].T;
  }
  return solve_minimal_norm(L, T, tol);
}

CompactTypeResult is_algebra_compact_type(const std::vector<AffineConformalFieldd>& fields,
                                          double tol) {
  if (fields.empty()) throw Error(ErrorKind::InvalidInput, "is_algebra_compact_type: no fields");
  CompactTypeResult r;

  // Bracket closure of the span, advisory only.
  const int N = fields.front().sig.ambient();
  std::vector<Matrix> mats;
  for (const auto& F : fields) mats.push_back(affine_to_field(F).mat());
  Matrix span(N * N, mats.size());
  for (std::size_t i = 0; i < mats.size(); ++i)
    span.col(i) = Eigen::Map<const Vector>(mats[i].data(), N * N);
  Eigen::JacobiSVD<Matrix> svd(span, Eigen::ComputeThinU);
  const Vector& s = svd.singularValues();
  Eigen::Index rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > tol * std::max(1.0, s(0))) ++rank;
  const Matrix Q = svd.matrixU().leftCols(rank);
  for (std::size_t i = 0; i < mats.size(); ++i)
    for (std::size_t j = i + 1; j < mats.size(); ++j) {
      const Matrix B = mats[i] * mats[j] - mats[j] * mats[i];
      const Vector b = Eigen::Map<const Vector>(B.data(), N * N);
      const Vector off = b - Q * (Q.transpose() * b);
      r.bracket_residual = std::max(r.bracket_residual, off.norm() / (1 + b.norm()));
    }
  r.bracket_warning = r.bracket_residual > 1e-8;

  bool individually = true;
  for (const auto& F : fields) individually = individually && is_inessential(F, tol);
  const FixedPointResult joint = joint_fixed_point(fields, tol);
  r.joint_fixed_point = joint.point;
  r.rank_warning = individually && !joint.point;
  r.compact = individually && joint.point.has_value();
  return r;
}

const char* to_string(RiemannianCase c) {
  switch (c) {
    case RiemannianCase::Case1Compact: return "CASE1_COMPACT";
    case RiemannianCase::Case2Dilation: return "CASE2_DILATION";
    case RiemannianCase::Case2Translation: return "CASE2_TRANSLATION";
  }
  return "?";
}

ClassificationReport classify_field(const MobiusFieldd& X, double tol) {
  validate_for_classification(X.signature());
  ClassificationReport rep;
  rep.sig = X.signature();
  rep.field = field_to_affine(X);
  const AffineConformalFieldd& F = rep.field;

  const FixedPointResult fp = fixed_point_field(F, tol);
  // The time-1 map is taken through the group exponential, independently of
  // the field-level solve.
  const AffineConformalMapd h1 = to_affine(exp_field(X, 1.0));
  const FixedPointResult fpm = fixed_point_map(h1, tol);

  rep.fixed_point = fp.point;
  rep.linearizable = fp.point.has_value();
  const double a_tol = scale_tolerance(X, tol);
  rep.inessential = rep.linearizable && std::abs(F.a) <= a_tol;
  rep.low_confidence = fp.low_confidence || fpm.low_confidence ||
                       (std::abs(F.a) > a_tol / 10 && std::abs(F.a) <= 10 * a_tol);
  if (fp.point.has_value() != fpm.point.has_value()) rep.low_confidence = true;

  if (!rep.linearizable) {
    try {
      rep.parabolic = parabolic_vector(h1, tol);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::NoParabolicVector && e.kind() != ErrorKind::IllConditioned &&
          e.kind() != ErrorKind::PreconditionViolated)
        throw;
      rep.low_confidence = true;
    }
  }

  if (rep.sig.p == 0) {
    if (std::abs(F.a) > a_tol)
      rep.riemannian_case = RiemannianCase::Case2Dilation;
    else if (rep.linearizable)
      rep.riemannian_case = RiemannianCase::Case1Compact;
    else
      rep.riemannian_case = RiemannianCase::Case2Translation;
    rep.conclusion = *rep.riemannian_case == RiemannianCase::Case1Compact
                         ? "relatively compact flow / inessential"
                         : "conformally flat neighborhood / essential";
  }

  rep.residuals["algebra"] = algebra_residual(rep.sig, X.mat());
  rep.residuals["fixed_point_residual"] = fp.residual;
  rep.residuals["fixed_point_threshold"] = fp.threshold;
  rep.residuals["fixed_point_smallest_kept"] = fp.smallest_kept;
  rep.residuals["fixed_point_largest_dropped"] = fp.largest_dropped;
  rep.residuals["map_fixed_point_residual"] = fpm.residual;
  rep.residuals["solver_disagreement"] = fp.point.has_value() == fpm.point.has_value() ? 0.0 : 1.0;
  if (rep.parabolic) {
    rep.residuals["parabolic_pairing_error"] = std::abs(rep.parabolic->pairing + 1.0);
    rep.residuals["parabolic_eigen_residual"] = rep.parabolic->eigen_residual;
  }
  return rep;
}

AlgebraReport classify_algebra(const std::vector<AffineConformalFieldd>& fields, double tol) {
  if (fields.empty()) throw Error(ErrorKind::InvalidInput, "classify_algebra: no fields");
  if (fields.front().sig.p != 0)
    throw Error(ErrorKind::InvalidSignature, "classify_algebra: Riemannian signature required");
  validate_for_classification(fields.front().sig);
  AlgebraReport rep;
  rep.compact = is_algebra_compact_type(fields, tol);
  if (rep.compact.compact) {
    rep.riemannian_case = 1;
    rep.joint_fixed_point = rep.compact.joint_fixed_point;
    return rep;
  }
  rep.riemannian_case = 2;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!is_inessential(fields[i], tol)) {
      rep.witness = i;
      rep.witness_report = classify_field(affine_to_field(fields[i]), tol);
      break;
    }
  }
  return rep;
}

}  // namespace ein
