#include <filesystem>

#include <gtest/gtest.h>

#include "pencilkit/errors.hpp"
#include "pencilkit/pencil_io.hpp"
#include "pencilkit/report.hpp"
#include "random_pencils.hpp"

using namespace pencilkit;
namespace fs = std::filesystem;

namespace {

AnyPencil p1() {
  return RealPencil(Matrix<double>::Zero(1, 1), Matrix<double>::Ones(1, 1));
}

} // namespace

TEST(Report, P1) {
  const auto r = analyze(p1());
  EXPECT_EQ(r.defects.alpha, std::vector<Index>{1});
  EXPECT_TRUE(r.defects.regular);
  ASSERT_TRUE(r.core_spectrum.has_value());
  EXPECT_TRUE(r.core_spectrum->empty());
  EXPECT_EQ(r.resolvent_samples.size(), 21u);
  const std::string text = canonical_dump(to_json(r));
  EXPECT_NE(text.find("\"alpha\": [1]"), std::string::npos);
  EXPECT_NE(text.find("\"regular\": true"), std::string::npos);
}

TEST(Report, SingularPencilHasNoMembers) {
  Matrix<double> e(1, 2);
  e << 1, 0;
  Matrix<double> a(1, 2);
  a << 0, 1;
  const auto r = analyze(AnyPencil(RealPencil(e, a)));
  EXPECT_FALSE(r.defects.regular);
  for (const auto& s : r.resolvent_samples) {
    EXPECT_FALSE(s.member);
  }
  EXPECT_FALSE(r.core_spectrum.has_value());
  EXPECT_NE(std::find(r.warnings.begin(), r.warnings.end(), "pencil is not regular"),
            r.warnings.end());
}

TEST(Report, JsonRoundTrip) {
  for (std::uint64_t s : {1u, 4u, 9u}) {
    const AnyPencil p = s % 5 == 4 ? AnyPencil(testsupport::random_pencil<std::complex<double>>(s, 8))
                                   : AnyPencil(testsupport::random_pencil<double>(s, 8));
    const auto r = analyze(p);
    const json j = to_json(r);
    const auto back = report_from_json(j);
    EXPECT_EQ(canonical_dump(to_json(back)), canonical_dump(j)) << s;
    EXPECT_EQ(back.defects, r.defects);
    EXPECT_EQ(back.chain, r.chain);
    EXPECT_EQ(back.warnings, r.warnings);
  }
  const auto r = analyze(p1());
  const fs::path file = fs::temp_directory_path() / "pencilkit_unit_report.json";
  save_report(r, file);
  EXPECT_EQ(canonical_dump(to_json(load_report(file))), canonical_dump(to_json(r)));
}

TEST(Report, EmptyReportHasOnlyTheSchemaVersion) {
  EXPECT_EQ(canonical_dump(to_json(AnalysisReport{})), "{\n  \"schema_version\": 1\n}");
  EXPECT_EQ(report_from_json(to_json(AnalysisReport{})).input_digest, "");
  EXPECT_THROW(report_from_json(json::parse(R"({"schema_version":2})")), InputError);
  EXPECT_THROW(report_from_json(json::parse(R"({"schema_version":1,"input_digest":"x"})")),
               InputError);
}

TEST(Report, Deterministic) {
  const AnyPencil p = testsupport::random_pencil<double>(12, 10);
  EXPECT_EQ(canonical_dump(to_json(analyze(p))), canonical_dump(to_json(analyze(p))));
}

TEST(Report, TextSummaryMentionsKeyFacts) {
  const std::string t = text_summary(analyze(p1()));
  EXPECT_NE(t.find("alpha (1)"), std::string::npos);
  EXPECT_NE(t.find("regular yes"), std::string::npos);
}
