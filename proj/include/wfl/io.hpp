#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "wfl/bounds.hpp"
#include "wfl/fundamental.hpp"
#include "wfl/lti.hpp"
#include "wfl/pe.hpp"
#include "wfl/structmat.hpp"
#include "wfl/sweep.hpp"

namespace wfl::io {

using Json = nlohmann::ordered_json;

/// {"n", "m", "p", "A", "B", "C", "D"} with row-major nested arrays.
Json system_to_json(const LtiSystem& sys);
/// Throws InputError on malformed documents or inconsistent dimensions.
LtiSystem system_from_json(const Json& doc);

/// CSV with header k,v0,...,v{q-1} and one sample per row.
std::string signal_to_csv(const Signal& s);
/// Accepts the layout above. Throws InputError on ragged or non-numeric rows.
Signal signal_from_csv(const std::string& text);

/// Row-major numeric CSV without header.
std::string matrix_to_csv(const Matrix& a);
Matrix matrix_from_csv(const std::string& text);

Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j, Eigen::Index rows, Eigen::Index cols);
Json vector_to_json(const Vector& v);

/// Record {name, kind, verdict, margin, tol, note, dims, seed, timings, chain}.
Json report_to_json(const BoundReport& report);
/// Adds lhs/rhs matrices to the record.
Json report_to_json_full(const BoundReport& report);
Json certificate_to_json(const PeCertificate& cert);
Json counterexample_to_json(const CounterexampleReport& report);

Json trial_to_json(const TrialRecord& trial);
/// Excludes timings so identical sweeps serialize byte-identically.
Json summary_to_json(const SweepConfig& config, const SweepResult& result);

/// Parses the structured-text mirror of SweepConfig. Throws InputError.
SweepConfig sweep_config_from_json(const Json& doc);
Json sweep_config_to_json(const SweepConfig& config);

/// Flat CSV rendering of report records: one row per report.
std::string reports_to_csv(const std::vector<BoundReport>& reports,
                           const std::string& prefix_header = {},
                           const std::string& prefix_values = {});

/// Structured matrices as name -> CSV text plus the metadata sidecar.
struct StructuredExport {
  std::map<std::string, std::string> csv;
  Json metadata;
};
StructuredExport export_structured(const StructuredSet& set, const LtiSystem& sys,
                                   std::optional<Eigen::Index> depth);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace wfl::io
