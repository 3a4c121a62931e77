#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pencilkit/subspace.hpp"

namespace pencilkit {

enum class Field { real, complex };

template <class Scalar>
constexpr Field field_of() {
  if constexpr (std::is_same_v<Scalar, double>) {
    return Field::real;
  } else {
    return Field::complex;
  }
}

std::string_view to_string(Field f);

/// A pair (E, A) of same-shaped matrices, read as the system
/// d/dt (E u) + A u = f with u in K^cols and equations in K^rows.
template <class Scalar>
class Pencil {
public:
  using MatrixType = Matrix<Scalar>;

  Pencil() : e_(0, 0), a_(0, 0) {}

  /// Throws InputError when shapes differ or entries are not finite.
  Pencil(MatrixType e, MatrixType a);

  static Pencil empty(Index rows, Index cols) {
    return Pencil(MatrixType::Zero(rows, cols), MatrixType::Zero(rows, cols));
  }

  const MatrixType& E() const { return e_; }
  const MatrixType& A() const { return a_; }

  Index rows() const { return e_.rows(); }
  Index cols() const { return e_.cols(); }
  bool is_square() const { return rows() == cols(); }
  bool is_zero_shaped() const { return rows() == 0 || cols() == 0; }

  static constexpr Field field() { return field_of<Scalar>(); }

  friend bool operator==(const Pencil& x, const Pencil& y) {
    return x.rows() == y.rows() && x.cols() == y.cols() && x.e_ == y.e_ && x.a_ == y.a_;
  }

private:
  MatrixType e_;
  MatrixType a_;
};

using RealPencil = Pencil<double>;
using ComplexPencil = Pencil<std::complex<double>>;
using AnyPencil = std::variant<RealPencil, ComplexPencil>;

/// Operator norms of E and A, used as reference scales for rank decisions
/// along a reduction chain.
struct PencilNorms {
  double e = 0.0;
  double a = 0.0;

  template <class Scalar>
  static PencilNorms of(const Pencil<Scalar>& p) {
    return {operator_norm<Scalar>(p.E()), operator_norm<Scalar>(p.A())};
  }
};

ComplexPencil to_complex(const RealPencil& p);

/// Change of bases (P E Q, P A Q) with P, Q invertible.
template <class Scalar>
struct EquivalencePair {
  Matrix<Scalar> P;
  Matrix<Scalar> Q;
  double cond_P = 1.0;
  double cond_Q = 1.0;

  /// Computes the condition numbers and throws InputError if P or Q is
  /// not square or numerically singular.
  static EquivalencePair make(Matrix<Scalar> p, Matrix<Scalar> q,
                              const Tolerance& tol = {});

  static EquivalencePair identity(Index rows, Index cols) {
    return {Matrix<Scalar>::Identity(rows, rows), Matrix<Scalar>::Identity(cols, cols), 1.0, 1.0};
  }
};

template <class Scalar>
Pencil<Scalar> apply_equivalence(const Pencil<Scalar>& p, const EquivalencePair<Scalar>& t);

/// Seeded random invertible matrix whose singular values are those of a
/// Gaussian matrix clipped to [sigma_lo, sigma_hi].
template <class Scalar>
Matrix<Scalar> random_well_conditioned(Index n, std::uint64_t seed,
                                       double sigma_lo = 0.1, double sigma_hi = 10.0);

/// Seeded random equivalence with condition numbers at most
/// sigma_hi / sigma_lo (100 by default).
template <class Scalar>
EquivalencePair<Scalar> random_equivalence(Index rows, Index cols, std::uint64_t seed,
                                           double sigma_lo = 0.1, double sigma_hi = 10.0);

// ---------------------------------------------------------------------------
// Kronecker blocks

enum class BlockKind { jordan, nilpotent, right_singular, left_singular };

/// One canonical block:
///   J(k, lambda): (I_k, J_k(lambda)), k x k
///   N(k):         (N_k, I_k),         k x k, N_k the upper shift
///   L(e):         ([I 0], [0 I]),     e x (e+1)
///   LT(e):        ([I; 0], [0; I]),   (e+1) x e
struct Block {
  BlockKind kind = BlockKind::jordan;
  Index size = 1;
  std::complex<double> eigenvalue{0.0, 0.0};

  Index rows() const;
  Index cols() const;
  bool is_regular() const { return kind == BlockKind::jordan || kind == BlockKind::nilpotent; }
  std::string to_string() const;

  friend bool operator==(const Block&, const Block&) = default;
};

struct BlockSpec {
  std::vector<Block> blocks;

  Index rows() const;
  Index cols() const;
  bool is_regular() const;

  /// Comma-separated J(k,lambda) | N(k) | L(e) | LT(e). The eigenvalue may be
  /// real ("1.5") or complex ("1.5+2i", "-3i"). Throws InputError.
  static BlockSpec parse(std::string_view text);
  std::string to_string() const;

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// Block-diagonal pencil assembled from the blocks. Throws InputError for
/// invalid block sizes and for complex eigenvalues when Scalar is real.
template <class Scalar>
Pencil<Scalar> synthesize(const BlockSpec& spec);

/// synthesize(spec) scrambled by random_equivalence(rows, cols, seed).
template <class Scalar>
Pencil<Scalar> synthesize(const BlockSpec& spec, std::uint64_t seed);

} // namespace pencilkit
