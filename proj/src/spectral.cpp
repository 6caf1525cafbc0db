#include "ein/spectral.hpp"

#include "ein/liealg.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

namespace ein {

namespace {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

// Generalized eigenspaces whose concatenated basis is worse conditioned than
// this are treated as a split defective eigenvalue.
constexpr double kMaxBasisCondition = 1e6;

struct Clustering {
  std::vector<Complex> means;
  std::vector<int> multiplicity;
};

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) i = parent[i] = parent[parent[i]];
  return i;
}

Clustering single_linkage(const CVector& ev, double radius) {
  const int n = static_cast<int>(ev.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(ev(i) - ev(j)) <= radius) parent[find_root(parent, i)] = find_root(parent, j);

  std::vector<int> label(n, -1);
  Clustering c;
  std::vector<std::vector<Complex>> members;
  for (int i = 0; i < n; ++i) {
    const int r = find_root(parent, i);
    if (label[r] < 0) {
      label[r] = static_cast<int>(members.size());
      members.emplace_back();
    }
    members[label[r]].push_back(ev(i));
  }
  for (auto& m : members) {
    // Sum in a canonical order so conjugate clusters get conjugate means.
    std::sort(m.begin(), m.end(), [](Complex a, Complex b) {
      return a.real() != b.real() ? a.real() < b.real() : std::abs(a.imag()) < std::abs(b.imag());
    });
    Complex sum = 0;
    bool self_conjugate = true;
    for (const Complex& z : m) sum += z;
    Complex mean = sum / double(m.size());
    for (const Complex& z : m) {
      const bool has_mirror = std::any_of(m.begin(), m.end(), [&](Complex w) {
        return std::abs(w - std::conj(z)) <= radius + 1e-14 * (1 + std::abs(z));
      });
      self_conjugate = self_conjugate && has_mirror;
    }
    if (self_conjugate || std::abs(mean.imag()) <= radius) mean.imag(0.0);
    c.means.push_back(mean);
    c.multiplicity.push_back(static_cast<int>(m.size()));
  }
  return c;
}

/// Merge radii to try, finest first: the base radius, then every pairwise
/// eigenvalue distance above it.
std::vector<double> candidate_radii(const CVector& ev, double base) {
  std::vector<double> radii{base};
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    for (Eigen::Index j = i + 1; j < ev.size(); ++j) {
      const double d = std::abs(ev(i) - ev(j));
      if (d > base) radii.push_back(d * (1 + 1e-12));
    }
  std::sort(radii.begin(), radii.end());
  radii.erase(std::unique(radii.begin(), radii.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-14 * b; }),
              radii.end());
  return radii;
}

CVector eigenvalues_of(const Matrix& A) {
  Eigen::EigenSolver<Matrix> solver(A, false);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorKind::IllConditioned, "eigenvalue iteration did not converge");
  return solver.eigenvalues();
}

CMatrix complex_power(const CMatrix& B, int m) {
  CMatrix P = CMatrix::Identity(B.rows(), B.cols());
  for (int k = 0; k < m; ++k) P = P * B;
  return P;
}

/// Columns spanning Ker (A - mean)^m, as the m smallest right singular vectors.
CMatrix complex_kernel(const Matrix& A, Complex mean, int m) {
  const Eigen::Index n = A.rows();
  const CMatrix B = A.cast<Complex>() - mean * CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(complex_power(B, m), Eigen::ComputeFullV);
  return svd.matrixV().rightCols(m);
}

Matrix real_kernel(const Matrix& B, int dim) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeFullV);
  return svd.matrixV().rightCols(dim);
}

double condition(const CMatrix& V) {
  Eigen::JacobiSVD<CMatrix> svd(V);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  return smin > 0 ? s(0) / smin : std::numeric_limits<double>::infinity();
}

struct ComplexBasis {
  CMatrix V;
  CVector diag;  // cluster mean per column
  double cond = 0;
};

ComplexBasis complex_basis(const Matrix& A, const Clustering& c) {
  const Eigen::Index n = A.rows();
  ComplexBasis out;
  out.V.resize(n, n);
  out.diag.resize(n);
  Eigen::Index col = 0;
  for (std::size_t i = 0; i < c.means.size(); ++i) {
    const int m = c.multiplicity[i];
    out.V.middleCols(col, m) = complex_kernel(A, c.means[i], m);
    out.diag.segment(col, m).setConstant(c.means[i]);
    col += m;
  }
  out.cond = condition(out.V);
  return out;
}

Matrix spectral_function(const ComplexBasis& b, Complex (*f)(Complex)) {
  CVector d = b.diag;
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = f(d(i));
  const CMatrix M = b.V * d.asDiagonal() * b.V.inverse();
  return M.real();
}

EigenStructure real_structure(const Matrix& A, const Clustering& c, double cond, double radius) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  EigenStructure es;
  es.basis_condition = cond;
  es.cluster_radius = radius;
  for (std::size_t i = 0; i < c.means.size(); ++i) {
    const Complex z = c.means[i];
    const int m = c.multiplicity[i];
    if (z.imag() < 0) continue;
    EigenCluster cl;
    cl.value = z;
    cl.multiplicity = m;
    if (z.imag() == 0) {
      Matrix P = I;
      const Matrix B = A - z.real() * I;
      for (int k = 0; k < m; ++k) P = P * B;
      cl.basis = real_kernel(P, m);
    } else {
      cl.conjugate_pair = true;
      const Matrix B = (A - z.real() * I) * (A - z.real() * I) + std::norm(z.imag()) * I;
      Matrix P = I;
      for (int k = 0; k < m; ++k) P = P * B;
      cl.basis = real_kernel(P, 2 * m);
    }
    es.clusters.push_back(std::move(cl));
  }
  return es;
}

double frob(const Matrix& M) { return M.norm(); }

}  // namespace

EigenStructure eigen_structure(const Matrix& A, double tol) {
  if (A.rows() != A.cols() || A.rows() == 0)
    throw Error(ErrorKind::DimensionMismatch, "eigen_structure: square matrix expected");
  if (A.rows() > kSpectralMaxSize)
    throw Error(ErrorKind::InvalidInput, "eigen_structure: matrix larger than supported size");
  if (!A.allFinite()) throw Error(ErrorKind::InvalidInput, "eigen_structure: non-finite entry");
  const CVector ev = eigenvalues_of(A);
  const double base = tol * std::max(1.0, A.norm());
  for (double radius : candidate_radii(ev, base)) {
    const Clustering c = single_linkage(ev, radius);
    const ComplexBasis b = complex_basis(A, c);
    if (b.cond <= kMaxBasisCondition) return real_structure(A, c, b.cond, radius);
  }
  throw Error(ErrorKind::IllConditioned, "eigen_structure: no well-conditioned clustering");
}

double JordanResiduals::max() const {
  return std::max({membership, commutation, product, unipotent, spectrum});
}

JordanResiduals jordan_residuals(const Signature& sig, const Matrix& A, const JordanFactors& f) {
  const Eigen::Index n = A.rows();
  const Matrix I = Matrix::Identity(n, n);
  JordanResiduals r;
  const Matrix* factors[] = {&f.A_s, &f.A_e, &f.A_u};
  for (const Matrix* F : factors) {
    const double nf = F->norm();
    r.membership = std::max(r.membership, opq_group_residual(sig, *F) / (1 + nf * nf));
  }
  const double na = A.norm();
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const Matrix C = *factors[i] * *factors[j] - *factors[j] * *factors[i];
      r.commutation = std::max(r.commutation, frob(C) / (1 + na * na));
    }
  r.product = frob(f.A_s * f.A_e * f.A_u - A) / (1 + na);
  Matrix P = I;
  const Matrix N = f.A_u - I;
  for (Eigen::Index k = 0; k < n; ++k) P = P * N;
  r.unipotent = frob(P) / std::pow(1 + f.A_u.norm(), double(n));

  const CVector es = eigenvalues_of(f.A_s);
  const CVector ee = eigenvalues_of(f.A_e);
  const double ss = 1 + f.A_s.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    r.spectrum = std::max(r.spectrum, std::abs(es(i).imag()) / ss);
    r.spectrum = std::max(r.spectrum, std::max(0.0, -es(i).real()) / ss);
    r.spectrum = std::max(r.spectrum, std::abs(std::abs(ee(i)) - 1.0));
  }
  return r;
}

JordanFactors jordan_chevalley(const Signature& sig, const Matrix& A, double tol) {
  validate(sig);
  require_square(A, sig.n(), "jordan_chevalley");
  const double na = A.norm();
  if (opq_group_residual(sig, A) > tol * (1 + na * na))
    throw Error(ErrorKind::NotInGroup, "jordan_chevalley: matrix is not in O(p,q)");
  const CVector ev = eigenvalues_of(A);
  const double base = tol * std::max(1.0, na);
  for (double radius : candidate_radii(ev, base)) {
    const Clustering c = single_linkage(ev, radius);
    const ComplexBasis b = complex_basis(A, c);
    if (!std::isfinite(b.cond) || b.cond > 1e12) continue;
    JordanFactors f;
    f.A_s = spectral_function(b, [](Complex z) { return Complex(std::abs(z), 0.0); });
    f.A_e = spectral_function(b, [](Complex z) { return z / std::abs(z); });
    const Matrix S = f.A_s * f.A_e;
    f.A_u = S.partialPivLu().solve(A);
    if (jordan_residuals(sig, A, f).max() <= tol) return f;
  }
  throw Error(ErrorKind::IllConditioned, "jordan_chevalley: no clustering satisfies the contract");
}

const char* to_string(OneParamType t) {
  return t == OneParamType::EllipticType ? "elliptic-type" : "nonimaginary-spectrum";
}

OneParamType classify_one_param(const Signature& sig, const Matrix& M, double tol) {
  validate(sig);
  require_square(M, sig.n(), "classify_one_param");
  const double scale = std::max(1.0, M.norm());
  if (opq_algebra_residual(sig, M) > kMembershipTolerance * (1 + M.norm()))
    throw Error(ErrorKind::NotInAlgebra, "classify_one_param: M is not in o(p,q)");
  const EigenStructure es = eigen_structure(M, tol);
  const Eigen::Index n = M.rows();
  CMatrix P = CMatrix::Identity(n, n);
  int factors = 0;
  bool imaginary = true;
  for (const EigenCluster& c : es.clusters) {
    if (std::abs(c.value.real()) > 100 * tol * scale) imaginary = false;
    P = P * (M.cast<Complex>() - c.value * CMatrix::Identity(n, n));
    ++factors;
    if (c.conjugate_pair) {
      P = P * (M.cast<Complex>() - std::conj(c.value) * CMatrix::Identity(n, n));
      ++factors;
    }
  }
  const bool semisimple = P.norm() <= 100 * tol * std::pow(scale, double(factors));
  const OneParamType verdict =
      imaginary && semisimple ? OneParamType::EllipticType : OneParamType::NonImaginarySpectrum;
  if (sig.p == 0 && verdict != OneParamType::EllipticType)
    throw Error(ErrorKind::IllConditioned,
                "classify_one_param: Riemannian generator not detected as elliptic");
  return verdict;
}

}  // namespace ein
