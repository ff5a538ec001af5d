#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace cva::wb {

inline constexpr const char* kToolName = "cva_workbench";
inline constexpr const char* kToolVersion = "0.1.0";

/// Identifies the run that produced a file. No timestamps, so reruns are
/// byte-identical.
struct Provenance {
  std::string command;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

/// "# tool=cva_workbench version=0.1.0 command=... config_hash=<16 hex> seed=..."
std::string provenance_line(const Provenance& p);
nlohmann::ordered_json provenance_json(const Provenance& p);
std::string hex64(std::uint64_t v);

/// Shortest text that round-trips the double exactly ("%.17g").
std::string fmt(double v);

using Cell = std::variant<double, long long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  void add(std::vector<Cell> row);
};

/// CSV: provenance comment line, column line, then rows. Strings must not
/// contain commas or newlines; offending characters are replaced by ';' / ' '.
void write_csv(std::ostream& out, const Provenance& p, const Table& t);
/// JSON: {"provenance": {...}, "columns": [...], "rows": [[...], ...]}.
void write_json(std::ostream& out, const Provenance& p, const Table& t);

/// Writes `<dir>/<stem>.csv` or `<dir>/<stem>.json` by `format`; returns the path.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Provenance& p, const Table& t);

/// Pretty JSON document with a "provenance" member prepended.
std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& stem, const Provenance& p,
                                   const nlohmann::ordered_json& body);

}  // namespace cva::wb
