#pragma once

#include <complex>
#include <optional>

#include <Eigen/Dense>

#include "pencilkit/errors.hpp"

namespace pencilkit {

using Index = Eigen::Index;

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<std::complex<double>>;

/// Rank threshold policy shared by every rank decision.
///
/// For an operator whose reference norm is `scale`, singular values strictly
/// above `max(abs_floor, rel * scale * max(rows, cols))` count towards the
/// numerical rank. The reference norm is normally the operator's own largest
/// singular value; inside a reduction chain it is the norm of the operator
/// of the original pencil, so that rounding noise left over in reduced
/// operators is never mistaken for rank.
struct Tolerance {
  double rel = 1e-10;
  double abs_floor = 0.0;

  double threshold(double scale, Index rows, Index cols) const;

  /// Throws InputError unless rel > 0 and abs_floor >= 0.
  void validate() const;

  friend bool operator==(const Tolerance&, const Tolerance&) = default;
};

/// Singular values of `m`, in decreasing order. Empty for empty matrices.
template <class Scalar>
Eigen::VectorXd singular_values(const Matrix<Scalar>& m);

/// Largest singular value; 0 for empty matrices.
template <class Scalar>
double operator_norm(const Matrix<Scalar>& m);

/// Number of singular values above the tolerance threshold. The threshold
/// is computed against `scale` when given, otherwise against the operator
/// norm of `m`.
template <class Scalar>
Index numerical_rank(const Matrix<Scalar>& m, const Tolerance& tol,
                     std::optional<double> scale = {});

/// A linear subspace of K^ambient_dim stored as an orthonormal basis.
/// The zero subspace has a basis with zero columns.
template <class Scalar>
class Subspace {
public:
  using MatrixType = Matrix<Scalar>;

  Subspace() = default;

  /// Wraps a basis whose columns are orthonormal. Throws InputError when
  /// basis^H basis deviates from the identity by more than
  /// 10 * eps * max(ambient_dim, 1). Each column is rescaled by a unit
  /// scalar so that its first entry of largest modulus is positive.
  explicit Subspace(MatrixType basis);

  /// Orthonormalizes the columns of `spanning` (which must be linearly
  /// independent) with a Householder QR.
  static Subspace orthonormalized(const MatrixType& spanning);

  static Subspace zero(Index ambient_dim);
  static Subspace full(Index ambient_dim);

  Index ambient_dim() const { return basis_.rows(); }
  Index dim() const { return basis_.cols(); }
  bool is_zero() const { return dim() == 0; }
  bool is_full() const { return dim() == ambient_dim(); }

  const MatrixType& basis() const { return basis_; }

  /// Orthogonal projector onto the subspace.
  MatrixType projector() const;

  /// Orthogonal complement inside the ambient space.
  Subspace complement() const;

  /// Norm of the component of `vectors` orthogonal to this subspace.
  double residual(const MatrixType& vectors) const;

private:
  MatrixType basis_ = MatrixType(0, 0);
};

using RealSubspace = Subspace<double>;
using ComplexSubspace = Subspace<std::complex<double>>;

/// Column space of `m` at numerical rank.
template <class Scalar>
Subspace<Scalar> range_basis(const Matrix<Scalar>& m, const Tolerance& tol,
                             std::optional<double> scale = {});

/// Null space of `m` at numerical rank; dim = cols - rank.
template <class Scalar>
Subspace<Scalar> kernel_basis(const Matrix<Scalar>& m, const Tolerance& tol,
                              std::optional<double> scale = {});

/// {u : m u in span(target)}, computed as the kernel of m followed by the
/// projector onto the orthogonal complement of `target`.
template <class Scalar>
Subspace<Scalar> preimage_basis(const Matrix<Scalar>& m,
                                const Subspace<Scalar>& target,
                                const Tolerance& tol,
                                std::optional<double> scale = {});

template <class Scalar>
Subspace<Scalar> sum_basis(const Subspace<Scalar>& s, const Subspace<Scalar>& t,
                           const Tolerance& tol);

/// Intersection of s and t. The returned dimension is always
/// dim(s) + dim(t) - dim(sum_basis(s, t)).
template <class Scalar>
Subspace<Scalar> intersect_basis(const Subspace<Scalar>& s,
                                 const Subspace<Scalar>& t,
                                 const Tolerance& tol);

/// Represents ambient / v by the orthogonal complement of v inside ambient.
/// Throws ContainmentError when v is not contained in ambient.
template <class Scalar>
Subspace<Scalar> quotient_basis(const Subspace<Scalar>& ambient,
                                const Subspace<Scalar>& v, const Tolerance& tol);

/// Distance between orthogonal projectors, ||P_s - P_t||_2. Equals 1 when
/// the dimensions differ.
template <class Scalar>
double subspace_gap(const Subspace<Scalar>& s, const Subspace<Scalar>& t);

template <class Scalar>
struct InducedOperator {
  Matrix<Scalar> matrix;
  /// ||(I - P_target) m dom||_2: how far m leaves the target.
  double residual = 0.0;
};

/// Matrix of the map induced by `m` from span(dom) to span(target) in the
/// two orthonormal bases: target^H m dom. Use a subspace as the target for
/// restrictions, and the orthogonal complement of the quotiented subspace
/// for quotient maps (see quotient_operator). Throws InvarianceError when
/// the residual exceeds the tolerance threshold.
template <class Scalar>
InducedOperator<Scalar> induced_operator(const Matrix<Scalar>& m,
                                         const Subspace<Scalar>& dom,
                                         const Subspace<Scalar>& target,
                                         const Tolerance& tol,
                                         std::optional<double> scale = {});

/// The quotient map [m] : X / sub_dom -> Y / sub_codom, where quotients are
/// represented by orthogonal complements. Requires m(sub_dom) in sub_codom;
/// the residual reports the violation of that hypothesis.
template <class Scalar>
InducedOperator<Scalar> quotient_operator(const Matrix<Scalar>& m,
                                          const Subspace<Scalar>& sub_dom,
                                          const Subspace<Scalar>& sub_codom,
                                          const Tolerance& tol,
                                          std::optional<double> scale = {});

} // namespace pencilkit
