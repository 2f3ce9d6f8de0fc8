#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ppw/ast.hpp"

namespace ppw {

using Json = nlohmann::ordered_json;

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitParse = 1, kExitValidate = 2, kExitInference = 3 };

struct RunReport {
  std::string command;
  Json echo;  // file and effective arguments
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  Json result = Json::object();
  std::vector<Diagnostic> diagnostics;
  int exit_code = kExitOk;

  Json to_json() const;
  /// Human-readable rendering for --pretty.
  std::string pretty() const;
};

Json diagnostic_json(const Diagnostic& d);

struct QueryArgs {
  std::string file;
  std::string query;
  std::size_t samples = 10000;
  int horizon = 0;
  bool exact = false;
  std::vector<std::string> evidence;  // "pos(c) = 1.2", "alarm", "not alarm"
  unsigned threads = 1;
};

struct PlanArgs {
  std::string file;
  int horizon = 5;
  double discount = 0.95;
  std::size_t rollouts = 100;
  int max_depth = -1;
  std::size_t episodes = 1000;
};

struct RunArgs {
  std::string file;
  std::size_t particles = 10000;
  double theta = 0.999;
  int depth = 25;
  std::size_t member = 0;
  bool interval = false;
  std::vector<std::string> queries;  // formulas reported on the final belief
};

struct CheckArgs {
  std::string file;
};

RunReport cmd_query(const QueryArgs& args, std::uint64_t seed);
RunReport cmd_plan(const PlanArgs& args, std::uint64_t seed);
RunReport cmd_run(const RunArgs& args, std::uint64_t seed);
RunReport cmd_check(const CheckArgs& args, std::uint64_t seed);

}  // namespace ppw
