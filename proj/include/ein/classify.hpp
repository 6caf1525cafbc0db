#pragma once

// Decision procedures for a conformal field at its singularity, read on the
// holonomy flow x -> (a I + M) x + T: fixed points, parabolic vectors,
// linearizability, essentiality, and the Riemannian trichotomy.

#include "ein/parabolic.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ein {

/// Default relative singular-value threshold for rank decisions.
inline constexpr double kRankTolerance = 1e-8;

struct FixedPointResult {
  std::optional<Vector> point;
  /// ||L x + T|| for the minimal-norm least-squares solution.
  double residual = 0;
  /// Residual threshold tol * (1 + ||T||).
  double threshold = 0;
  /// Smallest singular value kept (relative to the largest), and largest dropped.
  double smallest_kept = 0;
  double largest_dropped = 0;
  /// A singular value or the residual lies within 10x of its threshold.
  bool low_confidence = false;
};

/// Zeros of x -> (a I + M) x + T.
FixedPointResult fixed_point_field(const AffineConformalFieldd& F, double tol = kRankTolerance);

/// Fixed points of x -> lambda A x + T.
FixedPointResult fixed_point_map(const AffineConformalMapd& h, double tol = kRankTolerance);

struct ParabolicVector {
  Vector u;
  bool is_null = false;
  double pairing = 0;             ///< <T, u>, -1 by construction
  double eigen_residual = 0;      ///< ||lambda A u - lambda^2 u|| / ||u||
  int candidate_dimension = 0;    ///< dimension of Ker(lambda A - lambda^2)
};

/// For h without fixed point: u with lambda A u = lambda^2 u and <T,u> = -1,
/// built from the Jordan factors of A. A null u is preferred when the
/// candidate subspace contains one.
ParabolicVector parabolic_vector(const AffineConformalMapd& h, double tol = kRankTolerance);

struct LinearizabilityResult {
  bool linearizable = false;
  std::optional<Vector> fixed_point;
  std::optional<ParabolicVector> parabolic;
  bool low_confidence = false;
};

LinearizabilityResult is_linearizable(const AffineConformalFieldd& F, double tol = kRankTolerance);

bool is_inessential(const AffineConformalFieldd& F, double tol = kRankTolerance);

FixedPointResult joint_fixed_point(const std::vector<AffineConformalFieldd>& fields,
                                   double tol = kRankTolerance);

struct CompactTypeResult {
  bool compact = false;
  std::optional<Vector> joint_fixed_point;
  /// max over generator pairs of dist([X_i, X_j], span) / (1 + ||[X_i, X_j]||).
  double bracket_residual = 0;
  bool bracket_warning = false;
  /// Every generator fixes a point but no joint fixed point was found.
  bool rank_warning = false;
};

CompactTypeResult is_algebra_compact_type(const std::vector<AffineConformalFieldd>& fields,
                                          double tol = kRankTolerance);

enum class RiemannianCase { Case1Compact, Case2Dilation, Case2Translation };

const char* to_string(RiemannianCase c);

struct ClassificationReport {
  Signature sig;
  AffineConformalFieldd field;
  std::optional<Vector> fixed_point;
  bool linearizable = false;
  bool inessential = false;
  std::optional<ParabolicVector> parabolic;
  std::optional<RiemannianCase> riemannian_case;
  /// Conclusion label of the Riemannian case, e.g. "conformally flat neighborhood / essential".
  std::string conclusion;
  bool low_confidence = false;
  std::map<std::string, double> residuals;
};

ClassificationReport classify_field(const MobiusFieldd& X, double tol = kRankTolerance);

struct AlgebraReport {
  int riemannian_case = 0;  ///< 1 or 2
  std::optional<Vector> joint_fixed_point;
  std::optional<std::size_t> witness;
  std::optional<ClassificationReport> witness_report;
  CompactTypeResult compact;
};

/// Riemannian signature only.
AlgebraReport classify_algebra(const std::vector<AffineConformalFieldd>& fields,
                               double tol = kRankTolerance);

}  // namespace ein
