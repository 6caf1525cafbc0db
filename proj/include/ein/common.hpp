#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace ein {

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using Vector = Vec<double>;
using Matrix = Mat<double>;

enum class ErrorKind {
  DimensionMismatch,
  InvalidSignature,
  NullVector,
  NotInAlgebra,
  NotInGroup,
  NotInP,
  NotInLittleP,
  NotNminus,
  IllConditioned,
  NoParabolicVector,
  PreconditionViolated,
  InvalidInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::InvalidSignature: return "InvalidSignature";
    case ErrorKind::NullVector: return "NullVector";
    case ErrorKind::NotInAlgebra: return "NotInAlgebra";
    case ErrorKind::NotInGroup: return "NotInGroup";
    case ErrorKind::NotInP: return "NotInP";
    case ErrorKind::NotInLittleP: return "NotInLittleP";
    case ErrorKind::NotNminus: return "NotNminus";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::NoParabolicVector: return "NoParabolicVector";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::InvalidInput: return "InvalidInput";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Type (p,q) of a conformal structure, n = p + q. We always take p <= q.
struct Signature {
  int p = 0;
  int q = 0;

  constexpr int n() const { return p + q; }
  /// Size of the ambient space R^{p+1,q+1}.
  constexpr int ambient() const { return p + q + 2; }

  friend constexpr bool operator==(const Signature&, const Signature&) = default;
};

inline void validate(const Signature& sig) {
  if (sig.p < 0 || sig.q < 0) throw Error(ErrorKind::InvalidSignature, "negative index");
  if (sig.p > sig.q) throw Error(ErrorKind::InvalidSignature, "expected p <= q");
  if (sig.n() < 1) throw Error(ErrorKind::InvalidSignature, "dimension must be at least 1");
}

/// Classification operations need n >= 3.
inline void validate_for_classification(const Signature& sig) {
  validate(sig);
  if (sig.n() < 3) throw Error(ErrorKind::InvalidSignature, "classification needs n >= 3");
}

template <typename Derived>
void require_size(const Eigen::MatrixBase<Derived>& x, Eigen::Index rows, const char* what) {
  if (x.rows() != rows || x.cols() != 1)
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(rows) + " coordinates, got " +
                    std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& m, Eigen::Index size, const char* what) {
  if (m.rows() != size || m.cols() != size)
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": expected " + std::to_string(size) + "x" +
                    std::to_string(size) + " matrix");
}

}  // namespace ein
