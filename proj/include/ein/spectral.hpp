#pragma once

// Clustered eigenstructure and the real multiplicative Jordan decomposition
// A = A_s A_e A_u of an element of O(p,q).

#include "ein/common.hpp"

#include <complex>
#include <vector>

namespace ein {

/// Largest matrix size accepted by the spectral routines.
inline constexpr int kSpectralMaxSize = 12;

struct EigenCluster {
  /// Cluster mean; for a conjugate pair, the member with positive imaginary part.
  std::complex<double> value;
  /// Algebraic multiplicity of value (of each member of a conjugate pair).
  int multiplicity = 0;
  bool conjugate_pair = false;
  /// Orthonormal real basis of the real generalized eigenspace
  /// (multiplicity columns, or 2 * multiplicity for a pair).
  Matrix basis;
};

struct EigenStructure {
  std::vector<EigenCluster> clusters;
  /// Condition number of the concatenated complex eigenspace bases.
  double basis_condition = 1.0;
  /// Radius used to merge eigenvalues.
  double cluster_radius = 0.0;
};

/// Eigenvalues are merged by single linkage. The finest clustering whose
/// generalized eigenspaces form a well-conditioned basis is returned, which
/// absorbs the O(eps^{1/m}) splitting of defective eigenvalues.
EigenStructure eigen_structure(const Matrix& A, double tol = 1e-8);

struct JordanFactors {
  Matrix A_s;  ///< R-semisimple, positive real spectrum
  Matrix A_e;  ///< elliptic, spectrum on the unit circle
  Matrix A_u;  ///< unipotent
};

struct JordanResiduals {
  double membership = 0;   ///< max_i ||F_i^T J F_i - J|| / (1 + ||F_i||^2)
  double commutation = 0;  ///< max_ij ||[F_i, F_j]|| / (1 + ||A||^2)
  double product = 0;      ///< ||A_s A_e A_u - A|| / (1 + ||A||)
  double unipotent = 0;    ///< ||(A_u - I)^n|| / (1 + ||A_u||)^n
  double spectrum = 0;     ///< deviation of eig(A_s) from R_+ and |eig(A_e)| from 1

  double max() const;
};

/// Requires A in O(p,q) for the configured J_{p,q}. Throws IllConditioned
/// when no clustering yields factors satisfying the contract to tol.
JordanFactors jordan_chevalley(const Signature& sig, const Matrix& A, double tol = 1e-8);

JordanResiduals jordan_residuals(const Signature& sig, const Matrix& A, const JordanFactors& f);

enum class OneParamType { EllipticType, NonImaginarySpectrum };

const char* to_string(OneParamType t);

/// Elliptic type: purely imaginary spectrum and semisimple (square-free
/// minimal polynomial).
OneParamType classify_one_param(const Signature& sig, const Matrix& M, double tol = 1e-8);

}  // namespace ein
