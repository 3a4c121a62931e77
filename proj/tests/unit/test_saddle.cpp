#include <gtest/gtest.h>

#include "pencilkit/defects.hpp"
#include "pencilkit/errors.hpp"
#include "pencilkit/saddle.hpp"

using namespace pencilkit;

namespace {

SaddleSpec two_one() {
  Matrix<double> b(1, 2);
  b << 1, 0;
  return SaddleSpec::make(Matrix<double>::Identity(2, 2), b);
}

} // namespace

TEST(Saddle, PencilLayout) {
  const auto p = build_saddle_pencil(two_one());
  ASSERT_EQ(p.rows(), 3);
  EXPECT_EQ(p.E()(0, 0), 1.0);
  EXPECT_EQ(p.E()(2, 2), 0.0);
  EXPECT_EQ(p.A()(2, 0), 1.0);
  EXPECT_EQ(p.A()(0, 2), 1.0);
}

TEST(Saddle, InfSupOfTheTwoOneExample) {
  const auto r = inf_sup_constant(two_one());
  EXPECT_DOUBLE_EQ(r.beta, 1.0);
  EXPECT_TRUE(r.satisfied);
}

TEST(Saddle, InfSupDegenerateCases) {
  const auto none = SaddleSpec::make(Matrix<double>::Identity(2, 2), Matrix<double>(0, 2));
  EXPECT_TRUE(std::isinf(inf_sup_constant(none).beta));
  const auto tall = SaddleSpec::make(Matrix<double>::Identity(1, 1), Matrix<double>::Ones(2, 1));
  const auto r = inf_sup_constant(tall);
  EXPECT_EQ(r.beta, 0.0);
  EXPECT_FALSE(r.satisfied);
  const auto zero_b = SaddleSpec::make(Matrix<double>::Identity(2, 2), Matrix<double>::Zero(1, 2));
  EXPECT_FALSE(inf_sup_constant(zero_b).satisfied);
}

TEST(Saddle, RieszMapsRescaleTheConstant) {
  Matrix<double> b(1, 1);
  b << 1;
  Matrix<double> rx(1, 1);
  rx << 4;
  const auto s = SaddleSpec::make(Matrix<double>::Identity(1, 1), b, rx);
  EXPECT_NEAR(inf_sup_constant(s).beta, 0.5, 1e-14);
}

TEST(Saddle, SolveMatchesDense) {
  Vector<double> f(3);
  f << 1, 0, 1;
  const auto r = solve_saddle(two_one(), f);
  ASSERT_TRUE(r.invertible);
  EXPECT_TRUE(r.verdicts_agree);
  EXPECT_NEAR(r.x(0), 1.0, 1e-14);
  EXPECT_NEAR(r.x(1), 0.0, 1e-14);
  EXPECT_NEAR(r.mu(0), 0.0, 1e-14);
  EXPECT_THROW(solve_saddle(two_one(), Vector<double>::Ones(2)), InputError);
}

TEST(Saddle, SingularKernelBlockIsExplained) {
  Matrix<double> a0 = Matrix<double>::Zero(2, 2);
  a0(0, 0) = 1;
  Matrix<double> b(1, 2);
  b << 1, 0;
  const auto r = solve_saddle(SaddleSpec::make(a0, b), Vector<double>::Ones(3));
  EXPECT_FALSE(r.invertible);
  EXPECT_TRUE(r.inf_sup);
  EXPECT_FALSE(r.kernel_block_invertible);
  EXPECT_TRUE(r.verdicts_agree);
  EXPECT_FALSE(r.explanation.empty());
}

TEST(Saddle, Ladder) {
  const auto l = saddle_reduction_ladder(two_one());
  EXPECT_TRUE(l.consistent);
  EXPECT_EQ(l.ker_b, 1);
  EXPECT_EQ(l.obs_domain, 2);
  EXPECT_EQ(l.obs_ctrl_domain, 1);
  EXPECT_EQ(l.ctrl_obs_codomain, 1);
}

TEST(Saddle, JsonRoundTripAndValidation) {
  const auto s = example_mixed_poisson(3);
  const auto back = saddle_from_json(saddle_to_json(s));
  EXPECT_EQ(back.A0, s.A0);
  EXPECT_EQ(back.B, s.B);
  EXPECT_EQ(back.RX, s.RX);
  EXPECT_EQ(back.RM, s.RM);
  EXPECT_THROW(saddle_from_json(nlohmann::json::array()), InputError);
  EXPECT_THROW(saddle_from_json(nlohmann::json::parse(R"({"A0":[[1,2],[3,4]],"B":[[1]]})")),
               InputError);
  EXPECT_THROW(saddle_from_json(nlohmann::json::parse(R"({"A0":[[1]],"B":[[1]],"RX":[[-1]]})")),
               InputError);
}

TEST(Saddle, MixedPoissonSatisfiesInfSup) {
  for (Index n : {2, 4, 8}) {
    const auto r = inf_sup_constant(example_mixed_poisson(n));
    EXPECT_TRUE(r.satisfied) << n;
    EXPECT_GT(r.beta, 0.5) << n;
  }
}

TEST(Saddle, DiscreteMultiplicationExample) {
  const auto ex = example_multiplication_discrete(2, 2, 2, 0.25);
  const auto d = defect_profile(ex.pencil);
  EXPECT_EQ(d.regular, ex.expected_regular);
  EXPECT_EQ(observation_chain(ex.pencil).steps.size(),
            static_cast<std::size_t>(ex.expected_observation_steps));
  EXPECT_EQ(control_chain(ex.pencil).steps.size(),
            static_cast<std::size_t>(ex.expected_control_steps));
  const auto none = example_multiplication_discrete(3, 0, 2, 0.5);
  EXPECT_EQ(observation_chain(none.pencil).steps.size(), 0u);
  EXPECT_THROW(example_multiplication_discrete(0, 0, 0, 1.0), InputError);
}
