#pragma once

// Seeded random pencils for property suites: scrambled Kronecker block
// sums (known structure) and dense low-rank products (generic structure).

#include <cstdint>
#include <random>

#include "pencilkit/pencil.hpp"

namespace testsupport {

using pencilkit::Block;
using pencilkit::BlockKind;
using pencilkit::BlockSpec;
using pencilkit::Index;

// Blocks until rows and cols reach about max_dim. Eigenvalues are small
// integers so spectra are well separated from each other.
inline BlockSpec random_block_spec(std::mt19937_64& rng, Index max_dim, bool regular_only = false) {
  BlockSpec spec;
  std::uniform_int_distribution<int> kind_dist(0, regular_only ? 1 : 3);
  std::uniform_int_distribution<int> eig_dist(-4, 4);
  while (true) {
    Block b;
    switch (kind_dist(rng)) {
    case 0:
      b.kind = BlockKind::jordan;
      b.size = std::uniform_int_distribution<Index>(1, 3)(rng);
      b.eigenvalue = static_cast<double>(eig_dist(rng));
      break;
    case 1:
      b.kind = BlockKind::nilpotent;
      b.size = std::uniform_int_distribution<Index>(1, 3)(rng);
      break;
    case 2:
      b.kind = BlockKind::right_singular;
      b.size = std::uniform_int_distribution<Index>(0, 2)(rng);
      break;
    default:
      b.kind = BlockKind::left_singular;
      b.size = std::uniform_int_distribution<Index>(0, 2)(rng);
      break;
    }
    if (spec.rows() + b.rows() > max_dim || spec.cols() + b.cols() > max_dim) {
      if (spec.blocks.empty()) {
        continue;
      }
      break;
    }
    spec.blocks.push_back(b);
    if (std::uniform_int_distribution<int>(0, 3)(rng) == 0) {
      break;
    }
  }
  return spec;
}

template <class Scalar>
pencilkit::Matrix<Scalar> random_rank(std::mt19937_64& rng, Index rows, Index cols, Index rank) {
  std::normal_distribution<double> g;
  pencilkit::Matrix<Scalar> x(rows, rank);
  pencilkit::Matrix<Scalar> y(rank, cols);
  for (Index i = 0; i < x.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      x.data()[i] = g(rng);
    } else {
      x.data()[i] = Scalar(g(rng), g(rng));
    }
  }
  for (Index i = 0; i < y.size(); ++i) {
    if constexpr (std::is_same_v<Scalar, double>) {
      y.data()[i] = g(rng);
    } else {
      y.data()[i] = Scalar(g(rng), g(rng));
    }
  }
  return x * y;
}

// Sizes 1..max_dim with mixed ranks of E and A.
template <class Scalar>
pencilkit::Pencil<Scalar> random_pencil(std::uint64_t seed, Index max_dim = 20) {
  std::mt19937_64 rng(seed);
  if (std::uniform_int_distribution<int>(0, 2)(rng) > 0) {
    const BlockSpec spec = random_block_spec(rng, max_dim);
    return pencilkit::synthesize<Scalar>(spec, rng());
  }
  std::uniform_int_distribution<Index> dim(1, max_dim);
  const Index m = dim(rng);
  const Index n = dim(rng);
  const Index full = std::min(m, n);
  const Index re = std::uniform_int_distribution<Index>(0, full)(rng);
  const Index ra = std::uniform_int_distribution<Index>(0, full)(rng);
  return pencilkit::Pencil<Scalar>(random_rank<Scalar>(rng, m, n, re),
                                   random_rank<Scalar>(rng, m, n, ra));
}

} // namespace testsupport
