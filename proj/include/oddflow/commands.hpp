#pragma once

// Subcommands of the oddflow tool. Every command reads an optional JSON
// config, writes its files below the output directory and returns a process
// exit status:
//   0 success, 1 a verification check failed, 2 configuration error,
//   3 file or directory error, 4 numerical failure (vacuum, CFL, NaN,
//   solver non-convergence), 5 any other library error.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace oddflow {

struct CommandOptions {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  std::vector<double> deltas;               // twin-stability
  std::optional<std::string> snapshots_dir;  // lp-analyze
  std::optional<double> s;                   // lp-analyze
  std::optional<std::string> q;              // lp-analyze: "1", "2" or "inf"
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;
inline constexpr int kExitOther = 5;

std::vector<std::string> subcommands();

/// Runs one subcommand, reporting errors on stderr.
int dispatch(const std::string& subcommand, const CommandOptions& options);

struct CsvSchema {
  std::string file;
  std::vector<std::pair<std::string, std::string>> columns;
};
/// Column documentation of every CSV file the tool writes.
std::vector<CsvSchema> csv_schemas();
/// Human-readable rendering of csv_schemas() for --help.
std::string csv_schema_help();
/// JSON rendering of csv_schemas(), as shipped in schema/columns.json.
std::string csv_schema_json();

}  // namespace oddflow
