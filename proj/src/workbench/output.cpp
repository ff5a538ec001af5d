#include "cva/workbench/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace cva::wb {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string provenance_line(const Provenance& p) {
  return std::string("# tool=") + kToolName + " version=" + kToolVersion + " command=" + p.command +
         " config_hash=" + hex64(p.config_hash) + " seed=" + std::to_string(p.seed);
}

nlohmann::ordered_json provenance_json(const Provenance& p) {
  return {{"tool", kToolName},
          {"version", kToolVersion},
          {"command", p.command},
          {"config_hash", hex64(p.config_hash)},
          {"seed", p.seed}};
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row width does not match the columns");
  rows.push_back(std::move(row));
}

namespace {

std::string csv_text(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) return fmt(*d);
  if (const auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  std::string s = std::get<std::string>(c);
  for (char& ch : s) {
    if (ch == ',') ch = ';';
    if (ch == '\n' || ch == '\r') ch = ' ';
  }
  return s;
}

nlohmann::ordered_json json_value(const Cell& c) {
  if (const auto* d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return fmt(*d);  // JSON has no inf/nan
    return *d;
  }
  if (const auto* i = std::get_if<long long>(&c)) return *i;
  return std::get<std::string>(c);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

void write_csv(std::ostream& out, const Provenance& p, const Table& t) {
  out << provenance_line(p) << '\n';
  for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << t.columns[k];
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_text(row[k]);
    out << '\n';
  }
}

void write_json(std::ostream& out, const Provenance& p, const Table& t) {
  nlohmann::ordered_json doc;
  doc["provenance"] = provenance_json(p);
  doc["columns"] = t.columns;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    auto r = nlohmann::ordered_json::array();
    for (const auto& c : row) r.push_back(json_value(c));
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const std::string& format, const Provenance& p, const Table& t) {
  const auto path = dir / (stem + (format == "json" ? ".json" : ".csv"));
  auto out = open_out(path);
  if (format == "json")
    write_json(out, p, t);
  else
    write_csv(out, p, t);
  return path;
}

std::filesystem::path write_report(const std::filesystem::path& dir, const std::string& stem, const Provenance& p,
                                   const nlohmann::ordered_json& body) {
  const auto path = dir / (stem + ".json");
  nlohmann::ordered_json doc;
  doc["provenance"] = provenance_json(p);
  for (const auto& [k, v] : body.items()) doc[k] = v;
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
  return path;
}

}  // namespace cva::wb
