#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pencilkit/commutativity.hpp"
#include "pencilkit/defects.hpp"
#include "pencilkit/reduction.hpp"
#include "pencilkit/saddle.hpp"
#include "pencilkit/spectrum.hpp"

namespace pencilkit {

inline constexpr int kReportSchemaVersion = 1;

struct StepSummary {
  ReductionKind kind = ReductionKind::observation;
  Index parent_rows = 0;
  Index parent_cols = 0;
  Index reduced_rows = 0;
  Index reduced_cols = 0;
  Index pivot_rows = 0;
  Index pivot_cols = 0;
  Index pivot_rank = 0;
  double pivot_sigma_min = 0.0;
  bool pivot_invertible = false;
  bool marginal = false;
  Index defect = 0;

  friend bool operator==(const StepSummary&, const StepSummary&) = default;
};

/// Scalar part of a commutativity certificate; JU and JW are kept as JSON
/// since their entries depend on the chosen bases.
struct CommutativitySummary {
  double norm_JU = 0.0;
  double norm_JW = 0.0;
  double sigma_min_JU = 0.0;
  double sigma_min_JW = 0.0;
  double image_residual_JU = 0.0;
  double image_residual_JW = 0.0;
  double intertwine_residual_E = 0.0;
  double intertwine_residual_A = 0.0;
  double residual_bound = 0.0;
  bool equivalent = false;
  bool obs_pivot_invertible = false;
  bool ctrl_obs_pivot_invertible = false;
  bool ctrl_pivot_invertible = false;
  bool obs_ctrl_pivot_invertible = false;
  Index ctrl_pivot_kernel = 0;
  Index obs_ctrl_pivot_kernel = 0;
  bool pivot_equivalences_hold = false;
  nlohmann::json JU;
  nlohmann::json JW;
  std::vector<DimensionCheck> dimension_checks;
};

struct OdeSummary {
  Index core_dim = 0;
  nlohmann::json ode_matrix;
  std::vector<Index> layer_sizes;
  std::vector<double> layer_pivot_sigma_min;
};

struct AnalysisReport {
  int schema_version = kReportSchemaVersion;
  std::string input_digest;
  Field field = Field::real;
  Index rows = 0;
  Index cols = 0;
  Tolerance tolerance;
  std::vector<StepSummary> chain;
  bool chain_exhausted = false;
  DefectProfile defects;
  NormalityDiagnostics normality;
  IndexOneResult index_one;
  CommutativitySummary commutativity;
  std::vector<ResolventSample> resolvent_samples;
  std::optional<std::vector<std::complex<double>>> core_spectrum;
  std::optional<OdeSummary> ode_extract;
  std::optional<InfSupResult> saddle;
  std::vector<std::string> warnings;
};

struct AnalysisOptions {
  Tolerance tol;
  std::optional<Index> max_steps;
  /// Random resolvent samples in addition to lambda = 0.
  std::size_t lambda_count = 20;
  std::uint64_t lambda_seed = 20240601;
  /// Extra user-chosen samples.
  std::vector<std::complex<double>> lambdas;
};

AnalysisReport analyze(const AnyPencil& p, const AnalysisOptions& opt = {});

nlohmann::json to_json(const AnalysisReport& r);
/// Inverse of to_json. Throws InputError on a malformed report or an
/// unsupported schema_version.
AnalysisReport report_from_json(const nlohmann::json& j);

nlohmann::json to_json(const DefectProfile& d);
nlohmann::json to_json(const NormalityDiagnostics& n);
nlohmann::json to_json(const CommutativitySummary& c);
nlohmann::json to_json(const ResolventSample& s);
nlohmann::json to_json(const InfSupResult& s);
nlohmann::json to_json(const StepSummary& s);
nlohmann::json complex_to_json(std::complex<double> z);
std::complex<double> complex_from_json(const nlohmann::json& j);

/// A default-constructed report (empty input_digest) saves as
/// {"schema_version": 1} only.
void save_report(const AnalysisReport& r, const std::filesystem::path& path);
AnalysisReport load_report(const std::filesystem::path& path);

/// Human-readable summary for the terminal.
std::string text_summary(const AnalysisReport& r);

} // namespace pencilkit
