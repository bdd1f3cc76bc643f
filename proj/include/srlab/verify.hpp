#pragma once

// The check catalog: one numeric experiment per inequality, run from a
// serializable spec and summarized as a machine-readable report.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "srlab/gamma.hpp"
#include "srlab/metric.hpp"
#include "srlab/model.hpp"

namespace srlab {

inline constexpr const char* kReportVersion = "srlab-report/1";
inline constexpr const char* kLibraryVersion = "srlab 1.0.0";

enum class Verdict { Pass, Fail, Inconclusive };
std::string verdictName(Verdict v);  // "pass" | "fail" | "inconclusive"
Verdict verdictFromName(const std::string& s);

struct CheckInfo {
  std::string id;
  std::string summary;
  bool needsChart = false;    // grid solvers (heat FD, eikonal)
  bool needsGroup = false;    // left translation of samples / distances
  bool needsCompact = false;
  // Default options; a spec may override exactly these keys.
  nlohmann::json options;
};

// Every check, sorted by id.
const std::vector<CheckInfo>& checkRegistry();
const CheckInfo& checkInfo(const std::string& id);  // ConfigError when unknown

struct CheckSpec {
  std::string checkId;
  nlohmann::json model = "heisenberg";  // modelFromRef string or inline model JSON
  CDParams params;
  SamplerSpec sampler;  // cd and hypotheses
  EikonalConfig eikonal;
  nlohmann::json options = nlohmann::json::object();
  std::uint64_t seed = 42;

  nlohmann::json toJson() const;
  // ConfigError on unknown ids, unknown option keys or bad values.
  static CheckSpec fromJson(const nlohmann::json& j);
};

struct CheckReport {
  std::string checkId;
  std::string model;  // model name
  nlohmann::json params;
  nlohmann::json statistics = nlohmann::json::object();
  nlohmann::json witness;  // null when there is nothing to point at
  Verdict verdict = Verdict::Inconclusive;
  std::string message;
  std::string error;  // set when the check could not run
  // seed, model spec, sampler / grid settings, merged options, tolerances, version
  nlohmann::json provenance = nlohmann::json::object();
  double seconds = 0.0;  // wall time; never serialized

  nlohmann::json toJson() const;
  static CheckReport fromJson(const nlohmann::json& j);
};

// Spec with the check's default sampler, seeded from `seed`.
CheckSpec makeCheck(const std::string& id, nlohmann::json model = "heisenberg", CDParams params = {},
                    std::uint64_t seed = 42);

// Runs one check.  ConfigError when the model lacks what the check needs,
// ResourceError when a grid or path budget would be exceeded.
CheckReport runCheck(const CheckSpec& spec);

// Re-evaluates the witness of a cd or hypotheses report from its provenance
// and returns the residual it records.
double replayWitness(const CheckReport& r);

struct SuiteSummary {
  std::size_t pass = 0, fail = 0, inconclusive = 0, errors = 0;
  int exitCode() const { return fail > 0 ? 1 : (errors > 0 ? 2 : 0); }
  nlohmann::json toJson() const;
};

struct SuiteResult {
  std::vector<CheckReport> reports;  // stable-sorted by checkId
  SuiteSummary summary;
};

// Runs every spec; a check that throws is recorded as inconclusive with its
// error and the suite continues.  `threads` workers take checks from a
// queue (0: hardware concurrency).
SuiteResult runSuite(const std::vector<CheckSpec>& specs, int threads = 0);

// All checks on heisenberg, cd on sasakian(+-1), bonnet-myers on sasakian(1).
std::vector<CheckSpec> defaultSuite(std::uint64_t seed = 42);
// {"seed": s, "checks": [...]} or a bare array of specs; the document seed
// (or `seedOverride` when given) is used for specs without their own.
std::vector<CheckSpec> suiteFromJson(const nlohmann::json& j, const std::uint64_t* seedOverride = nullptr);

enum class ReportFormat { Json, Csv, Text };
ReportFormat reportFormatFromName(const std::string& s);

// {version, checks, summary}, plus "timestamp" when given.  Nothing else in
// the document depends on the wall clock.
nlohmann::json reportDocument(const SuiteResult& r, const std::string& timestamp = "");
// csv: one row per (check, statistic) with scalar statistics flattened to
// dotted keys; text: one "PASS cd heisenberg" style line per check.
void emitReport(const SuiteResult& r, ReportFormat format, std::ostream& out, const std::string& timestamp = "");
// Writes to a file; Error when it cannot be opened or written.
void emitReport(const SuiteResult& r, ReportFormat format, const std::string& path, const std::string& timestamp = "");

// Path budget, from SRLAB_MAX_PATHS (default 1e7).
std::size_t maxPaths();

}  // namespace srlab
