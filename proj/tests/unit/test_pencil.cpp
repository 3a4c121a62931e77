#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "pencilkit/errors.hpp"
#include "pencilkit/pencil_io.hpp"

using namespace pencilkit;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / "pencilkit_unit_pencil";
  fs::create_directories(dir);
  return dir;
}

} // namespace

TEST(Pencil, RejectsMismatchedShapesAndNonFinite) {
  EXPECT_THROW(RealPencil(Matrix<double>::Zero(2, 2), Matrix<double>::Zero(2, 3)), InputError);
  Matrix<double> e = Matrix<double>::Zero(1, 1);
  e(0, 0) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(RealPencil(e, Matrix<double>::Zero(1, 1)), InputError);
}

TEST(Blocks, ParseAndPrint) {
  const auto spec = BlockSpec::parse("J(2,1.5), N(3),L(2),LT(1)");
  ASSERT_EQ(spec.blocks.size(), 4u);
  EXPECT_EQ(spec.rows(), 2 + 3 + 2 + 2);
  EXPECT_EQ(spec.cols(), 2 + 3 + 3 + 1);
  EXPECT_FALSE(spec.is_regular());
  EXPECT_EQ(BlockSpec::parse(spec.to_string()), spec);
  EXPECT_EQ(BlockSpec::parse("J(1,-3i)").blocks[0].eigenvalue, std::complex<double>(0, -3));
  EXPECT_EQ(BlockSpec::parse("J(1,1.5+2i)").blocks[0].eigenvalue, std::complex<double>(1.5, 2));
  EXPECT_THROW(BlockSpec::parse("J(0,1)"), InputError);
  EXPECT_THROW(BlockSpec::parse("Q(2)"), InputError);
  EXPECT_THROW(BlockSpec::parse("N(2"), InputError);
}

TEST(Blocks, CanonicalPencils) {
  const auto p3 = synthesize<double>(BlockSpec::parse("N(2)"));
  Matrix<double> e(2, 2);
  e << 0, 1, 0, 0;
  EXPECT_EQ(p3.E(), e);
  EXPECT_EQ(p3.A(), Matrix<double>::Identity(2, 2));

  const auto p4 = synthesize<double>(BlockSpec::parse("L(1)"));
  ASSERT_EQ(p4.rows(), 1);
  ASSERT_EQ(p4.cols(), 2);
  EXPECT_EQ(p4.E()(0, 0), 1.0);
  EXPECT_EQ(p4.A()(0, 1), 1.0);

  const auto lt0 = synthesize<double>(BlockSpec::parse("LT(0)"));
  EXPECT_EQ(lt0.rows(), 1);
  EXPECT_EQ(lt0.cols(), 0);
  EXPECT_THROW(synthesize<double>(BlockSpec::parse("J(1,1i)")), InputError);
}

TEST(Blocks, ScramblingMatchesExplicitEquivalence) {
  const auto spec = BlockSpec::parse("J(1,3),N(1),L(1)");
  const auto plain = synthesize<double>(spec);
  const auto eq = random_equivalence<double>(plain.rows(), plain.cols(), 7);
  EXPECT_EQ(apply_equivalence(plain, eq), synthesize<double>(spec, 7));
  EXPECT_LE(eq.cond_P, 100.0 + 1e-9);
  EXPECT_LE(eq.cond_Q, 100.0 + 1e-9);
}

TEST(Blocks, ScrambledRegularPencilHasNonzeroDeterminant) {
  const auto p = synthesize<double>(BlockSpec::parse("J(1,3),N(1)"), 7);
  // det(lambda E + A) vanishes only at lambda = -3.
  const auto det = [&](double l) { return (l * p.E() + p.A()).determinant(); };
  EXPECT_GT(std::abs(det(0.5)), 1e-8);
  EXPECT_NEAR(det(-3.0), 0.0, 1e-9);
}

TEST(PencilJson, RoundTripIsBitExact) {
  const auto p = synthesize<std::complex<double>>(BlockSpec::parse("J(2,1+1i),LT(1)"), 3);
  const AnyPencil back = pencil_from_json(pencil_to_json(p));
  ASSERT_TRUE(std::holds_alternative<ComplexPencil>(back));
  EXPECT_EQ(std::get<ComplexPencil>(back), p);

  const fs::path file = scratch_dir() / "p.json";
  save_pencil_json(AnyPencil(p), file);
  EXPECT_EQ(std::get<ComplexPencil>(load_pencil_json(file)), p);
}

TEST(PencilJson, InfersFieldAndValidates) {
  const json j = json::parse(R"({"m":1,"n":1,"E":[[[1,2]]],"A":[[0]]})");
  EXPECT_TRUE(std::holds_alternative<ComplexPencil>(pencil_from_json(j)));
  EXPECT_THROW(pencil_from_json(json::parse(R"({"m":1,"n":2,"E":[[1]],"A":[[1]]})")), InputError);
  EXPECT_THROW(pencil_from_json(json::parse(R"({"m":1,"n":1,"field":"real","E":[[[1,2]]],"A":[[0]]})")),
               InputError);
  EXPECT_THROW(pencil_from_json(json::parse(R"({"schema_version":2,"m":0,"n":0,"E":[],"A":[]})")),
               InputError);
  EXPECT_THROW(pencil_from_json(json::parse("[1]")), InputError);
}

TEST(MatrixMarket, RoundTripAndLayouts) {
  const fs::path dir = scratch_dir();
  Matrix<double> m(2, 3);
  m << 1.0 / 3.0, 0, -2, 1e-300, 5, 0.1;
  write_matrix_market<double>(m, dir / "m.mtx");
  const auto back = read_matrix_market(dir / "m.mtx");
  EXPECT_FALSE(back.is_complex);
  EXPECT_LE((back.values.real() - m).cwiseAbs().maxCoeff(), 1e-15 * m.cwiseAbs().maxCoeff());

  std::ofstream(dir / "sym.mtx") << "%%MatrixMarket matrix coordinate real symmetric\n"
                                 << "2 2 2\n1 1 4\n2 1 7\n";
  const auto sym = read_matrix_market(dir / "sym.mtx");
  EXPECT_EQ(sym.values(0, 1).real(), 7.0);
  EXPECT_EQ(sym.values(1, 0).real(), 7.0);

  std::ofstream(dir / "herm.mtx") << "%%MatrixMarket matrix coordinate complex hermitian\n"
                                  << "2 2 1\n2 1 1 2\n";
  const auto herm = read_matrix_market(dir / "herm.mtx");
  EXPECT_TRUE(herm.is_complex);
  EXPECT_EQ(herm.values(0, 1), std::complex<double>(1, -2));

  std::ofstream(dir / "bad.mtx") << "%%MatrixMarket matrix array real general\n2 2\n1\n";
  EXPECT_THROW(read_matrix_market(dir / "bad.mtx"), InputError);
  EXPECT_THROW(read_matrix_market(dir / "missing.mtx"), InputError);
}

TEST(Digest, DependsOnContentOnly) {
  const auto p = synthesize<double>(BlockSpec::parse("N(2)"));
  const std::string d = input_digest(AnyPencil(p));
  EXPECT_EQ(d.size(), 64u);
  EXPECT_EQ(d, input_digest(AnyPencil(synthesize<double>(BlockSpec::parse("N(2)")))));
  EXPECT_NE(d, input_digest(AnyPencil(to_complex(p))));
  EXPECT_NE(d, input_digest(AnyPencil(synthesize<double>(BlockSpec::parse("N(1),N(1)")))));
}

TEST(CanonicalJson, SortedKeysAndFixedFloats) {
  const json j = json::parse(R"({"b":[1.0,0.1],"a":{"z":true,"y":"s"}})");
  EXPECT_EQ(canonical_dump(j),
            "{\n  \"a\": {\n    \"y\": \"s\",\n    \"z\": true\n  },\n  \"b\": [1.0, "
            "0.10000000000000001]\n}");
  EXPECT_EQ(canonical_dump(real_to_json(std::numeric_limits<double>::infinity())), "\"inf\"");
}
