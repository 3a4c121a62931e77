#include <gtest/gtest.h>

#include "pencilkit/defects.hpp"
#include "pencilkit/errors.hpp"
#include "random_pencils.hpp"

using namespace pencilkit;

namespace {

using V = std::vector<Index>;

DefectProfile profile_of(const char* blocks) {
  return defect_profile(synthesize<double>(BlockSpec::parse(blocks), 11));
}

} // namespace

TEST(Defects, KroneckerBlocks) {
  const auto n3 = profile_of("N(3)");
  EXPECT_EQ(n3.alpha, (V{0, 0, 1}));
  EXPECT_TRUE(n3.regular);

  const auto l1 = profile_of("L(1)");
  EXPECT_EQ(l1.beta_ctrl, (V{0, 1}));
  EXPECT_FALSE(l1.regular);

  const auto lt1 = profile_of("LT(1)");
  EXPECT_EQ(lt1.beta_obs, (V{0, 1}));
  EXPECT_FALSE(lt1.regular);

  const auto l0 = profile_of("L(0)");
  EXPECT_EQ(l0.beta_ctrl, (V{1}));

  const auto j = profile_of("J(2,1),J(1,-2)");
  EXPECT_EQ(j.alpha, (V{0}));
  EXPECT_EQ(j.steps_obs, 0);
  EXPECT_TRUE(j.regular);
}

TEST(Defects, FirstStepFunctions) {
  const auto p = synthesize<double>(BlockSpec::parse("N(2),LT(0),L(0)"), 5);
  EXPECT_EQ(alpha_defect(p), 0);
  EXPECT_EQ(beta_obs_defect(p), 1);
  EXPECT_EQ(beta_ctrl_defect(p), 1);
}

TEST(Defects, MaxSteps) {
  const auto p = synthesize<double>(BlockSpec::parse("N(4)"));
  EXPECT_THROW(defect_profile(p, {}, Index{0}), InputError);
  const auto short_run = defect_profile(p, {}, Index{2});
  EXPECT_EQ(short_run.termination, Termination::max_steps);
  EXPECT_FALSE(short_run.regular);
  EXPECT_EQ(defect_profile(p).termination, Termination::exhausted);
}

TEST(Defects, EmptyAndZeroShapes) {
  const auto e = defect_profile(RealPencil());
  EXPECT_TRUE(e.regular);
  EXPECT_EQ(e.alpha, (V{0}));
  const auto z = defect_profile(RealPencil::empty(1, 1));
  EXPECT_EQ(z.beta_obs, (V{1}));
  EXPECT_EQ(z.beta_ctrl, (V{1}));
  EXPECT_FALSE(z.regular);
}

TEST(Defects, ShiftLawsOnRandomPencils) {
  for (std::uint64_t s = 0; s < 60; ++s) {
    EXPECT_TRUE(shift_law_check(testsupport::random_pencil<double>(s, 12))) << s;
  }
}

TEST(Defects, InvariantUnderEquivalence) {
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto p = testsupport::random_pencil<std::complex<double>>(s, 10);
    const auto q = apply_equivalence(
        p, random_equivalence<std::complex<double>>(p.rows(), p.cols(), s + 100));
    EXPECT_TRUE(invariants_equal(p, q)) << s;
  }
}

TEST(Spectrum, CoreEigenvaluesAndMatching) {
  const auto p = synthesize<double>(BlockSpec::parse("J(2,3),J(1,-1),N(2)"), 9);
  const auto ev = core_eigenvalues(p);
  ASSERT_EQ(ev.size(), 3u);
  EXPECT_TRUE(eigenvalue_multisets_match(ev, {-3.0, -3.0, 1.0}, 1e-6));
  EXPECT_FALSE(eigenvalue_multisets_match(ev, {-3.0, 1.0, 1.0}, 1e-6));
  EXPECT_FALSE(eigenvalue_multisets_match({1.0}, {1.0, 1.0}));
  EXPECT_EQ(trim_zeros({1, 0, 2, 0, 0}), (V{1, 0, 2}));
}
