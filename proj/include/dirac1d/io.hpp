#pragma once

// JSON config ingestion and CSV / JSON row output.

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include <fmt/format.h>
#include <json.hpp>

#include "core.hpp"
#include "errors.hpp"
#include "matcher.hpp"

namespace dirac1d {

using System = std::variant<BarrierConfig, PotentialProfile>;

enum class Format { csv, json };

inline Format parse_format(const std::string &name) {
  if (name == "csv")
    return Format::csv;
  if (name == "json")
    return Format::json;
  throw invalid_config(fmt::format("unknown output format '{}' (expected csv or json)", name));
}

// {"V":, "S":, "a":, "m":} for a single barrier or
// {"segments": [{"x0":, "x1":, "V":, "S":}, ...], "m":} for a profile.
// Segments must tile a contiguous range.
inline System parse_system(const nlohmann::json &doc) {
  if (!doc.is_object())
    throw invalid_config("config must be a JSON object");
  try {
    if (doc.contains("segments")) {
      const auto &segs = doc.at("segments");
      if (!segs.is_array() || segs.empty())
        throw invalid_config("'segments' must be a non-empty array");
      std::vector<double> xs;
      std::vector<SegmentPotential> pots;
      for (const auto &s : segs) {
        const double x0 = s.at("x0").get<double>();
        const double x1 = s.at("x1").get<double>();
        if (!xs.empty() && x0 != xs.back())
          throw invalid_config(fmt::format("segment starting at {} does not continue from {}", x0, xs.back()));
        if (xs.empty())
          xs.push_back(x0);
        xs.push_back(x1);
        pots.push_back({s.at("V").get<double>(), s.at("S").get<double>()});
      }
      return PotentialProfile(std::move(xs), std::move(pots), doc.value("m", 1.0));
    }
    BarrierConfig cfg;
    cfg.V = doc.value("V", 0.0);
    cfg.S = doc.value("S", 0.0);
    cfg.a = doc.value("a", 1.0);
    cfg.m = doc.value("m", 1.0);
    return cfg;
  } catch (const nlohmann::json::exception &e) {
    throw invalid_config(fmt::format("malformed config: {}", e.what()));
  }
}

inline System read_system(std::istream &in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception &e) {
    throw invalid_config(fmt::format("config is not valid JSON: {}", e.what()));
  }
  return parse_system(doc);
}

// A one-segment profile starting at x = 0 is exactly the closed-form setup.
inline std::optional<BarrierConfig> as_single_barrier(const System &sys) {
  if (const auto *cfg = std::get_if<BarrierConfig>(&sys))
    return *cfg;
  const auto &prof = std::get<PotentialProfile>(sys);
  if (prof.size() == 1 && prof.left(0) == 0.0)
    return BarrierConfig{prof.segments()[0].V, prof.segments()[0].S, prof.right(0), prof.mass()};
  return std::nullopt;
}

inline double system_mass(const System &sys) {
  return std::visit(
      [](const auto &s) {
        if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BarrierConfig>)
          return s.m;
        else
          return s.mass();
      },
      sys);
}

inline std::string format_number(double x) { return fmt::format("{:.9g}", x); }

using Cell = std::variant<double, long long, bool, std::string>;

inline std::string format_cell(const Cell &cell, Format format) {
  return std::visit(
      [&](const auto &v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, double>)
          return format_number(v);
        else if constexpr (std::is_same_v<T, long long>)
          return fmt::format("{}", v);
        else if constexpr (std::is_same_v<T, bool>)
          return v ? "true" : "false";
        else
          return format == Format::json ? nlohmann::json(v).dump() : v;
      },
      cell);
}

// Named columns written as CSV (header + rows, LF line endings) or as a JSON
// array of objects keyed by column name.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void write(std::ostream &out, Format format) const {
    if (format == Format::csv) {
      for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? "," : "") << columns[c];
      out << '\n';
      for (const auto &row : rows) {
        for (std::size_t c = 0; c < row.size(); ++c)
          out << (c ? "," : "") << format_cell(row[c], format);
        out << '\n';
      }
      return;
    }
    out << "[";
    for (std::size_t r = 0; r < rows.size(); ++r) {
      out << (r ? ",\n " : "\n ") << "{";
      for (std::size_t c = 0; c < columns.size(); ++c)
        out << (c ? ", " : "") << '"' << columns[c] << "\": " << format_cell(rows[r][c], format);
      out << "}";
    }
    out << "\n]\n";
  }
};

} // namespace dirac1d
