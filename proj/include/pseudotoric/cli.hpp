#pragma once

// Command-line front end: verify, numcheck, tables, walls, superpotential.

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pseudotoric/models.hpp"

namespace pseudotoric::cli {

enum ExitCode : int { pass = 0, check_failure = 1, config_error = 2, sampling_error = 3 };

enum class Format { json, csv, text };

struct RunConfig {
  std::string command;
  Family family = Family::flag;
  int size_min = 0;
  int size_max = -1;
  /// "all", "Sch", "Rie" or a decimal index.
  std::string divisor;
  int component = -1;
  std::uint64_t seed = 1;
  std::size_t samples = 0;
  double tol = 1e-6;
  double tol_solve = 1e-8;
  double guard = 1e-3;
  bool crosscheck = true;
  bool readings = false;
  unsigned threads = 1;
  bool timings = false;
  std::string output;
  Format format = Format::json;
};

/// Threads from the flag, then PSEUDOTORIC_THREADS, then available parallelism.
unsigned resolve_threads(std::optional<long long> flag, const char* env);

/// "3", "3..10". Throws ConfigurationError on malformed text.
std::pair<int, int> parse_size_range(const std::string& text);

/// Parses and validates; throws ConfigurationError. Returns nullopt after printing help.
std::optional<RunConfig> parse_arguments(const std::vector<std::string>& args, std::ostream& out);

int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parse, dispatch, map errors to exit codes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pseudotoric::cli
