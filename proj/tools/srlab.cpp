// srlab: command-line front end to the check catalog.
//
//   srlab run [--spec suite.json] [--seed 42] [--out report.json] [--format json|csv|text] [--threads N]
//   srlab check cd --model heisenberg --rho1 0 --rho2 0.5 --kappa 1 --d 2 [--option key=json ...]
//   srlab model validate model.json
//   srlab list
//
// Exit codes: 0 all checks pass, 1 some check failed, 2 configuration error.

#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "srlab/error.hpp"
#include "srlab/model.hpp"
#include "srlab/parallel.hpp"
#include "srlab/verify.hpp"

using json = nlohmann::json;

namespace {

std::string utcTimestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json readJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw srlab::ConfigError("cannot open '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw srlab::ConfigError("cannot parse '" + path + "': " + e.what());
  }
}

json parseOptions(const std::vector<std::string>& kv) {
  json o = json::object();
  for (const auto& s : kv) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) throw srlab::ConfigError("option '" + s + "' is not key=value");
    const std::string key = s.substr(0, eq), value = s.substr(eq + 1);
    try {
      o[key] = json::parse(value);
    } catch (const json::exception&) {
      o[key] = value;
    }
  }
  return o;
}

int emit(const srlab::SuiteResult& r, const std::string& format, const std::string& out, bool stamp) {
  const srlab::ReportFormat f = srlab::reportFormatFromName(format);
  const std::string ts = stamp ? utcTimestamp() : "";
  if (out.empty() || out == "-") {
    srlab::emitReport(r, f, std::cout, ts);
  } else {
    srlab::emitReport(r, f, out, ts);
    srlab::emitReport(r, srlab::ReportFormat::Text, std::cerr);
  }
  return r.summary.exitCode();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sub-Riemannian curvature-dimension checks"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run a suite of checks (default bundle without --spec)");
  std::string specPath, outPath, format = "json";
  std::uint64_t seed = 42;
  int threads = 0;
  bool noStamp = false;
  run->add_option("--spec", specPath, "suite JSON: {\"seed\": .., \"checks\": [..]} or an array of checks");
  auto* seedOpt = run->add_option("--seed", seed, "seed for every check (overrides the suite)");
  run->add_option("--out", outPath, "output file (default stdout)");
  run->add_option("--format", format, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  run->add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
  run->add_flag("--no-timestamp", noStamp, "omit the timestamp field");

  auto* check = app.add_subcommand("check", "run one check");
  std::string checkId, modelRef = "heisenberg", checkFormat = "text", checkOut;
  srlab::CDParams params;
  std::string dimension;
  std::vector<std::string> options;
  std::uint64_t checkSeed = 42;
  check->add_option("id", checkId, "check id (see 'srlab list')")->required();
  check->add_option("--model", modelRef, "model reference or model JSON file");
  check->add_option("--rho1", params.rho1);
  check->add_option("--rho2", params.rho2);
  check->add_option("--kappa", params.kappa);
  check->add_option("--d", dimension, "dimension d (number or inf)");
  check->add_option("--seed", checkSeed);
  check->add_option("--option", options, "check option as key=value (value parsed as JSON when possible)");
  check->add_option("--format", checkFormat, "json | csv | text")->check(CLI::IsMember({"json", "csv", "text"}));
  check->add_option("--out", checkOut, "output file (default stdout)");
  check->add_option("--threads", threads)->check(CLI::NonNegativeNumber);

  auto* model = app.add_subcommand("model", "model utilities");
  model->require_subcommand(1);
  auto* validate = model->add_subcommand("validate", "validate a model JSON file or reference");
  std::string modelPath;
  int samples = 64;
  validate->add_option("model", modelPath, "model JSON file or reference")->required();
  validate->add_option("--samples", samples)->check(CLI::PositiveNumber);

  auto* list = app.add_subcommand("list", "list the checks and their default options");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*run) {
      std::vector<srlab::CheckSpec> specs;
      if (specPath.empty()) specs = srlab::defaultSuite(seed);
      else specs = srlab::suiteFromJson(readJsonFile(specPath), seedOpt->count() ? &seed : nullptr);
      if (threads > 0) srlab::setThreadCount(threads);
      return emit(srlab::runSuite(specs, threads), format, outPath, !noStamp);
    }
    if (*check) {
      json j = {{"checkId", checkId}, {"seed", checkSeed}, {"options", parseOptions(options)}};
      j["model"] = modelRef;
      json p = params.toJson();
      p.erase("D");
      if (!dimension.empty()) p["d"] = dimension == "inf" ? json("inf") : json(std::stod(dimension));
      j["params"] = p;
      if (threads > 0) srlab::setThreadCount(threads);
      // Single checks report their errors as configuration errors.
      const srlab::CheckSpec spec = srlab::CheckSpec::fromJson(j);
      srlab::SuiteResult r;
      r.reports.push_back(srlab::runCheck(spec));
      const auto& c = r.reports.back();
      if (c.verdict == srlab::Verdict::Pass) ++r.summary.pass;
      else if (c.verdict == srlab::Verdict::Fail) ++r.summary.fail;
      else ++r.summary.inconclusive;
      return emit(r, checkFormat, checkOut, false);
    }
    if (*validate) {
      const srlab::Model m = srlab::modelFromRef(modelPath);
      const srlab::ValidationReport v = srlab::validateModel(m, samples, 1);
      json out = v.toJson();
      out["name"] = m.name;
      std::cout << out.dump(2) << "\n";
      return v.ok ? 0 : 1;
    }
    if (*list) {
      for (const auto& c : srlab::checkRegistry())
        std::cout << c.id << "  " << c.summary << "\n    " << c.options.dump() << "\n";
      return 0;
    }
  } catch (const srlab::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const srlab::ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
