#include <gtest/gtest.h>

#include "pencilkit/errors.hpp"
#include "pencilkit/reduction.hpp"
#include "random_pencils.hpp"

using namespace pencilkit;

namespace {

RealPencil make(Index m, Index n, std::initializer_list<double> e, std::initializer_list<double> a) {
  Matrix<double> E(m, n);
  Matrix<double> A(m, n);
  auto ie = e.begin();
  auto ia = a.begin();
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < n; ++j) {
      E(i, j) = *ie++;
      A(i, j) = *ia++;
    }
  }
  return {E, A};
}

} // namespace

TEST(Observation, NilpotentBlockDropsOneDimension) {
  const auto p3 = make(2, 2, {0, 1, 0, 0}, {1, 0, 0, 1});
  const auto s = observation_reduce(p3);
  EXPECT_EQ(s.reduced.rows(), 1);
  EXPECT_EQ(s.reduced.cols(), 1);
  EXPECT_DOUBLE_EQ(s.reduced.E()(0, 0), 0.0);
  EXPECT_DOUBLE_EQ(s.reduced.A()(0, 0), 1.0);
  EXPECT_TRUE(s.pivot_invertible);
  EXPECT_EQ(s.defect(), 0);
}

TEST(Observation, LeftSingularBlockHasCokernel) {
  const auto p5 = make(2, 1, {1, 0}, {0, 1});
  const auto s = observation_reduce(p5);
  EXPECT_EQ(s.reduced.rows(), 1);
  EXPECT_EQ(s.reduced.cols(), 0);
  EXPECT_TRUE(s.pivot_invertible);
  const auto s2 = observation_reduce(s.reduced, {}, PencilNorms::of(p5));
  EXPECT_EQ(s2.defect(), 1);
  EXPECT_FALSE(s2.pivot_invertible);
}

TEST(Control, RightSingularBlockHasKernel) {
  const auto p4 = make(1, 2, {1, 0}, {0, 1});
  const auto s = control_reduce(p4);
  EXPECT_EQ(s.reduced.rows(), 0);
  EXPECT_EQ(s.reduced.cols(), 1);
  EXPECT_EQ(s.defect(), 0);
  const auto s2 = control_reduce(s.reduced, {}, PencilNorms::of(p4));
  EXPECT_EQ(s2.defect(), 1);
}

TEST(Irreducibility, Shapes) {
  EXPECT_TRUE(is_irreducible(RealPencil()));
  EXPECT_FALSE(is_irreducible(RealPencil::empty(2, 0)));
  EXPECT_TRUE(is_irreducible(make(1, 1, {2}, {5})));
  EXPECT_TRUE(is_observation_irreducible(make(1, 2, {1, 0}, {0, 1})));
  EXPECT_FALSE(is_control_irreducible(make(1, 2, {1, 0}, {0, 1})));
}

TEST(Chains, ReachIrreducibleCore) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto p = testsupport::random_pencil<double>(seed, 12);
    const auto core = reduce_to_core(p);
    EXPECT_TRUE(core.exhausted) << seed;
    EXPECT_TRUE(is_irreducible(core.final_pencil(p), {}, core.norms)) << seed;
    const auto obs = observation_chain(p);
    EXPECT_TRUE(is_observation_irreducible(obs.final_pencil(p), {}, obs.norms)) << seed;
    const auto ctrl = control_chain(p);
    EXPECT_TRUE(is_control_irreducible(ctrl.final_pencil(p), {}, ctrl.norms)) << seed;
    // The embeddings reproduce the reduced pencil from the original one.
    if (!core.steps.empty()) {
      const auto& u = core.domain_maps.back();
      const auto& w = core.codomain_maps.back();
      const auto& r = core.final_pencil(p);
      EXPECT_LT((w.adjoint() * p.E() * u - r.E()).norm(), 1e-9 * (1 + p.E().norm())) << seed;
    }
  }
}

TEST(Chains, MaxStepsStopsEarly) {
  const auto n3 = synthesize<double>(BlockSpec::parse("N(3)"));
  const auto c = observation_chain(n3, {}, Index{1});
  EXPECT_EQ(c.steps.size(), 1u);
  EXPECT_FALSE(c.exhausted);
  EXPECT_EQ(observation_chain(n3).steps.size(), 3u);
}

TEST(Normality, HoldsAndIndexOneCriteriaAgree) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto p = testsupport::random_pencil<double>(seed, 10);
    EXPECT_TRUE(normality_check(p).normal) << seed;
    EXPECT_NO_THROW(control_index_one(p)) << seed;
    const auto d = step_dimensions(p);
    EXPECT_EQ(exact_sequence_defect(d), 0) << seed;
    EXPECT_EQ(cokernel_identity_defect(d), 0) << seed;
  }
}

TEST(IndexOne, NilpotentBlocks) {
  EXPECT_TRUE(control_index_one(synthesize<double>(BlockSpec::parse("N(1)"))).index_one);
  const auto r = control_index_one(synthesize<double>(BlockSpec::parse("N(2)")));
  EXPECT_FALSE(r.index_one);
  EXPECT_EQ(r.intersection_dim, 1);
}

TEST(IndexOne, VariationalPencils) {
  Matrix<double> d(1, 2);
  d << 1, 0;
  Matrix<double> a(2, 2);
  a << 2, 1, -1, 3;
  const auto v = variational_index_one_check<double>(d, a);
  EXPECT_TRUE(v.coercive);
  ASSERT_TRUE(v.index_one.has_value());
  EXPECT_TRUE(*v.index_one);
  const auto w = variational_index_one_check<double>(d, -a);
  EXPECT_FALSE(w.coercive);
  EXPECT_FALSE(w.index_one.has_value());
  EXPECT_THROW(variational_index_one_check<double>(d, Matrix<double>::Zero(2, 3)), InputError);
}

TEST(YagiBound, FiniteOnlyWithIndexOne) {
  // E = diag(1, 0), A = diag(2, 1): Re<Eu, Au> = 2|u1|^2 <= 2 |Eu|^2.
  const auto p = make(2, 2, {1, 0, 0, 0}, {2, 0, 0, 1});
  const auto b = yagi_bound(p);
  ASSERT_TRUE(b.has_value());
  EXPECT_NEAR(*b, 2.0, 1e-12);
  const auto n2 = synthesize<double>(BlockSpec::parse("N(2)"));
  EXPECT_FALSE(yagi_bound(n2).has_value());
}
