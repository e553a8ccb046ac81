#pragma once

// Dense symmetric algebra for the small m x m matrices B^T W B.
//
// Eigenvalues come from a cyclic Jacobi rotation solver. It is robust on
// indefinite input, which matters here: once node weights go negative the
// weighted edge Laplacian loses definiteness.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace cohesion {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

enum class LinalgErrorKind { DimensionMismatch, NotSymmetric, NoConvergence };

class LinalgError : public std::runtime_error {
 public:
  LinalgError(LinalgErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  LinalgErrorKind kind() const noexcept { return kind_; }

 private:
  LinalgErrorKind kind_;
};

/// Square matrix known to be symmetric. Storage is exactly symmetric.
template <typename Scalar>
class SymmetricMatrix {
 public:
  /// Checks |a_ij - a_ji| <= 1e-12 * max(1, |a_ij|), then stores (A + A^T) / 2.
  explicit SymmetricMatrix(const Matrix<Scalar>& a) {
    if (a.rows() != a.cols()) {
      throw LinalgError(LinalgErrorKind::DimensionMismatch, "symmetric matrix must be square");
    }
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      for (Eigen::Index j = i + 1; j < a.cols(); ++j) {
        using std::abs;
        const Scalar tol = Scalar(1e-12) * std::max(Scalar(1), abs(a(i, j)));
        if (!(abs(a(i, j) - a(j, i)) <= tol)) {
          throw LinalgError(LinalgErrorKind::NotSymmetric,
                            "matrix is not symmetric at (" + std::to_string(i) + ", " + std::to_string(j) + ")");
        }
      }
    }
    data_ = (a + a.transpose()) / Scalar(2);
  }

  /// (A + A^T) / 2 without the tolerance check, for products whose asymmetry is rounding only.
  static SymmetricMatrix symmetrized(const Matrix<Scalar>& a) {
    if (a.rows() != a.cols()) {
      throw LinalgError(LinalgErrorKind::DimensionMismatch, "symmetric matrix must be square");
    }
    SymmetricMatrix out;
    out.data_ = (a + a.transpose()) / Scalar(2);
    return out;
  }

  Eigen::Index dim() const noexcept { return data_.rows(); }
  const Matrix<Scalar>& matrix() const noexcept { return data_; }
  Scalar operator()(Eigen::Index i, Eigen::Index j) const { return data_(i, j); }

 private:
  SymmetricMatrix() = default;
  Matrix<Scalar> data_;
};

template <typename Scalar>
struct ExtremeEigenvalues {
  Scalar min;
  Scalar max;
};

/// B^T diag(w) B for an n x m incidence matrix and n node weights.
template <typename DerivedB, typename DerivedW>
SymmetricMatrix<typename DerivedB::Scalar> weighted_edge_laplacian(const Eigen::MatrixBase<DerivedB>& b,
                                                                   const Eigen::MatrixBase<DerivedW>& w) {
  using Scalar = typename DerivedB::Scalar;
  if (w.size() != b.rows()) {
    throw LinalgError(LinalgErrorKind::DimensionMismatch,
                      "weight vector has " + std::to_string(w.size()) + " entries, incidence matrix has " +
                          std::to_string(b.rows()) + " rows");
  }
  const Matrix<Scalar> product = b.transpose() * w.asDiagonal() * b;
  return SymmetricMatrix<Scalar>::symmetrized(product);
}

struct JacobiOptions {
  int max_sweeps = 100;
  double relative_tolerance = 1e-12;  // off-diagonal Frobenius norm vs ||M||_F
};

/// All eigenvalues of m, ascending. Throws LinalgError(NoConvergence).
template <typename Scalar>
Vector<Scalar> eigenvalues_symmetric(const SymmetricMatrix<Scalar>& m, const JacobiOptions& opts = {}) {
  using std::abs;
  using std::sqrt;
  Matrix<Scalar> a = m.matrix();
  const Eigen::Index n = a.rows();
  if (n == 0) return Vector<Scalar>();
  if (!a.allFinite()) {
    throw LinalgError(LinalgErrorKind::NoConvergence, "non-finite matrix entry");
  }

  const Scalar threshold = Scalar(opts.relative_tolerance) * a.norm();
  auto off_diagonal_norm = [&a, n] {
    Scalar sum(0);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) sum += a(i, j) * a(i, j);
    return sqrt(Scalar(2) * sum);
  };

  int sweep = 0;
  while (off_diagonal_norm() > threshold) {
    if (sweep++ == opts.max_sweeps) {
      throw LinalgError(LinalgErrorKind::NoConvergence,
                        "Jacobi iteration did not converge in " + std::to_string(opts.max_sweeps) + " sweeps");
    }
    for (Eigen::Index p = 0; p < n - 1; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const Scalar apq = a(p, q);
        if (apq == Scalar(0)) continue;
        const Scalar theta = (a(q, q) - a(p, p)) / (Scalar(2) * apq);
        Scalar t;
        if (abs(theta) > Scalar(1e150)) {
          t = Scalar(1) / (Scalar(2) * theta);
        } else {
          t = Scalar(1) / (abs(theta) + sqrt(theta * theta + Scalar(1)));
          if (theta < Scalar(0)) t = -t;
        }
        const Scalar c = Scalar(1) / sqrt(t * t + Scalar(1));
        const Scalar s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = Scalar(0);
        for (Eigen::Index r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const Scalar arp = a(r, p);
          const Scalar arq = a(r, q);
          a(r, p) = a(p, r) = c * arp - s * arq;
          a(r, q) = a(q, r) = s * arp + c * arq;
        }
      }
    }
  }

  Vector<Scalar> values = a.diagonal();
  std::sort(values.data(), values.data() + values.size());
  return values;
}

template <typename Scalar>
ExtremeEigenvalues<Scalar> extreme_eigenvalues(const SymmetricMatrix<Scalar>& m, const JacobiOptions& opts = {}) {
  if (m.dim() == 0) {
    throw LinalgError(LinalgErrorKind::DimensionMismatch, "extreme eigenvalues of an empty matrix");
  }
  const Vector<Scalar> values = eigenvalues_symmetric(m, opts);
  return {values(0), values(values.size() - 1)};
}

}  // namespace cohesion
