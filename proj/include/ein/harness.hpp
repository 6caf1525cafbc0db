#pragma once

// Desk-scale numerical experiments. Every experiment is a pure function of
// its parameters and seed and returns an ExperimentReport.

#include "ein/classify.hpp"
#include "ein/geodesics.hpp"
#include "ein/rng.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ein {

struct TraceRow {
  double index = 0;  ///< grid index, or k
  double t = 0;
  double observable = 0;
};

struct ExperimentReport {
  std::string name;
  std::map<std::string, std::string> parameters;
  long samples = 0;
  double max_violation = 0;
  /// Declared tolerance; absent for exploratory runs, which make no claim.
  std::optional<double> tolerance;
  bool pass = false;
  std::map<std::string, double> statistics;
  std::vector<TraceRow> traces;
  std::vector<std::string> notes;

  /// pass = (max_violation <= tolerance), or true when exploratory.
  void settle();
};

/// {0} followed by `count` geometrically spaced times in [t_min, t_max].
std::vector<double> geometric_grid(double t_min, double t_max, int count);

/// Random nonzero null vector of R^{p,q} (p >= 1).
Vector random_null_vector(const Signature& sig, Rng& rng);

struct SegmentBoundOptions {
  double R = 1.0;
  long samples = 1000;
  std::uint64_t seed = 1;
  QuadratureConfig quadrature{};
  double margin = 1e-6;
  long max_attempts_factor = 200;
};

/// Geodesic segments from o certified inside B(o,R) have L° <= 8nR.
ExperimentReport run_segment_bound(const Signature& sig, const SegmentBoundOptions& opt);

struct PiegeOptions {
  double R = 1.0;
  long samples = 500;
  double t_max = 1e4;
  int time_points = 60;
  int u_points = 32;
  std::uint64_t seed = 1;
  double final_threshold = 1e-2;
  /// Constant C in the envelope sup_u ||s(ux + tv)||^2 <= C / (t^2 ||v||^2).
  double envelope_constant = 1.0;
};

/// Forward/backward trapping of [oz] under a translation-rotation flow.
/// Requires p = 0, a = 0, M T = 0 and T != 0.
ExperimentReport run_piege(const AffineConformalFieldd& F, const PiegeOptions& opt);

struct TranslationStabilityOptions {
  Vector center;
  double r = 1.0;
  std::vector<double> t_grid;
  long samples = 200;
  std::uint64_t seed = 1;
  double epsilon = 1e-2;
};

/// Collapse of h^t j(B(x,r)) to o. Same preconditions as run_piege.
ExperimentReport run_translation_stability(const AffineConformalFieldd& F,
                                           const TranslationStabilityOptions& opt);

struct ReparametrizationOptions {
  std::vector<double> s_grid;
  int k_max = 10;
  double tolerance = 1e-9;
};

/// h^k . beta_u(s) = beta_u(s / (1 + k s)) for <T,u> = -1 and lambda A u = lambda^2 u.
/// A non-null u is measured without a pass/fail claim.
ExperimentReport run_reparametrization(const AffineConformalMapd& h, const Vector& u,
                                       const ReparametrizationOptions& opt);

struct SemicompleteOptions {
  double R0 = 0.5;
  std::vector<double> t_grid;
  long samples = 200;
  std::uint64_t seed = 1;
  double tolerance = 1e-9;
  double collapse_threshold = 1e-2;
};

/// Forward orbits of B(o,R0) stay in B(o,R0); the final spread is reported.
/// For fields without fixed point only the forward branch of run_piege is sampled.
ExperimentReport run_semicomplete_contraction(const AffineConformalFieldd& F,
                                              const SemicompleteOptions& opt);

}  // namespace ein
