#pragma once

// Tabular output shared by the command-line tool: a Table renders either as
// CSV (header row, one line per row, trailing "# summary" block) or as JSON
// with the same fields. Distributions round-trip through JSON.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "zcp/distributions.hpp"
#include "zcp/error.hpp"

namespace zcp::io {

/// std::monostate marks a field that does not apply: empty in CSV, null in JSON.
using Value = std::variant<std::monostate, double, std::int64_t, bool, std::string>;

/// Shortest form that round-trips: %.17g, with inf/-inf/nan spelled out.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_text(const Value& v) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(double d) const { return format_double(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

/// Non-finite doubles become the strings "inf", "-inf", "nan".
inline nlohmann::json to_json(const Value& v) {
  struct Visitor {
    nlohmann::json operator()(std::monostate) const { return nullptr; }
    nlohmann::json operator()(double d) const {
      return std::isfinite(d) ? nlohmann::json(d) : nlohmann::json(format_double(d));
    }
    nlohmann::json operator()(std::int64_t i) const { return i; }
    nlohmann::json operator()(bool b) const { return b; }
    nlohmann::json operator()(const std::string& s) const { return s; }
  };
  return std::visit(Visitor{}, v);
}

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  std::vector<std::pair<std::string, Value>> summary;

  void add_row(std::vector<Value> row) {
    zcp::detail::require(row.size() == columns.size(), "table row width does not match header");
    rows.push_back(std::move(row));
  }
  void add_summary(std::string key, Value v) { summary.emplace_back(std::move(key), std::move(v)); }
};

namespace detail {

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

inline void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    os << (i ? "," : "") << detail::csv_field(t.columns[i]);
  }
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      os << (i ? "," : "") << detail::csv_field(to_text(row[i]));
    }
    os << '\n';
  }
  if (!t.summary.empty()) {
    os << "# summary\n";
    for (const auto& [k, v] : t.summary) os << "# " << k << "=" << to_text(v) << '\n';
  }
}

inline nlohmann::json table_json(const Table& t) {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json obj = nlohmann::json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = to_json(row[i]);
    rows.push_back(std::move(obj));
  }
  nlohmann::json summary = nlohmann::json::object();
  for (const auto& [k, v] : t.summary) summary[k] = to_json(v);
  return {{"columns", t.columns}, {"rows", std::move(rows)}, {"summary", std::move(summary)}};
}

inline void write_json(std::ostream& os, const Table& t) { os << table_json(t).dump(2) << '\n'; }

inline nlohmann::json distribution_json(const DiscreteDistribution& d) {
  return {{"type", "discrete"},
          {"weights", std::vector<double>(d.weights().begin(), d.weights().end())},
          {"log_weights", [&] {
             nlohmann::json a = nlohmann::json::array();
             for (double lw : d.log_weights()) a.push_back(to_json(lw));
             return a;
           }()}};
}

inline nlohmann::json distribution_json(const GaussianMixturePair& g) {
  return {{"type", "gaussian_mixture"}, {"mu", g.mu}, {"sigma1", g.sigma1}, {"sigma2", g.sigma2}, {"p", g.p}};
}

/// Accepts {"type":"discrete","weights":[...]} or {"type":"discrete","log_weights":[...]}.
/// Log-weights take precedence when both are present, so instances whose
/// weights underflow survive a round trip.
inline DiscreteDistribution discrete_from_json(const nlohmann::json& j) {
  zcp::detail::require(j.is_object() && j.value("type", "") == "discrete",
                       "expected a JSON object with type \"discrete\"");
  if (j.contains("log_weights")) {
    std::vector<double> lw;
    for (const auto& v : j.at("log_weights")) {
      if (v.is_string()) {
        zcp::detail::require(v.get<std::string>() == "-inf", "log_weights: only \"-inf\" may be a string");
        lw.push_back(-std::numeric_limits<double>::infinity());
      } else {
        lw.push_back(v.get<double>());
      }
    }
    return DiscreteDistribution::from_log_weights(std::move(lw));
  }
  zcp::detail::require(j.contains("weights"), "discrete distribution needs weights");
  return DiscreteDistribution::from_weights(j.at("weights").get<std::vector<double>>());
}

inline GaussianMixturePair gaussian_from_json(const nlohmann::json& j) {
  zcp::detail::require(j.is_object() && j.value("type", "") == "gaussian_mixture",
                       "expected a JSON object with type \"gaussian_mixture\"");
  return GaussianMixturePair::make(j.at("mu").get<double>(), j.at("sigma1").get<double>(),
                                   j.at("sigma2").get<double>(), j.at("p").get<double>());
}

/// Writes `content` to a sibling temporary file and renames it over `path`.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    zcp::detail::require(static_cast<bool>(f), "cannot open " + tmp.string() + " for writing");
    f << content;
    f.flush();
    zcp::detail::require(static_cast<bool>(f), "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw ValidationError("cannot rename output into place: " + ec.message());
  }
}

}  // namespace zcp::io
