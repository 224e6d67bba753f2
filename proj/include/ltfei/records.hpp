#pragma once

// Flat per-trial records and their CSV / JSONL encodings. Reals are written
// with 17 significant digits, enough to reproduce every double exactly, so
// parse(emit(r)) == r.

#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ltfei/errors.hpp"

namespace ltfei {

struct ExperimentRecord {
  std::uint64_t n = 0;
  std::uint64_t trial_id = 0;
  std::uint64_t seed = 0;          ///< stream key the trial's weights were drawn from
  std::string distribution;
  std::string weights_digest;      ///< 16 hex digits hashing the bit patterns of w_0..w_n
  std::string path;                ///< "exact" or "estimate"
  std::optional<double> entropy_bits;
  std::optional<double> min_entropy_bits;
  double influence = 0.0;          ///< exact total influence, or its Monte Carlo estimate
  std::optional<double> influence_half_width;  ///< estimate path only
  std::vector<double> per_coordinate;          ///< exact path only
  bool exact_agreement = false;  ///< spectral, flip-count and interval-count influences agree (exact path)
  double khintchine_bound = 0.0;
  double khintchine_clamped = 0.0;
  double sum_lb_all_weights = 0.0;        ///< sum_i of clamped per-coordinate bounds
  double sum_lb_coordinates_only = 0.0;
  std::uint64_t large_weight_count = 0;   ///< #{i >= 1 : |w_i| >= alpha}
  double large_weight_influence = 0.0;    ///< sum of inf_i over those coordinates
  std::optional<double> large_weight_half_width;  ///< estimate path only
  double alpha = 0.0;
  double theta = 0.0;
  double certificate = 0.0;               ///< random-LTF lower bound transferred to f
  double certificate_success_probability = 0.0;
  double certificate_asymptotic = 0.0;
  std::optional<double> fei_ratio;        ///< entropy / influence, present iff influence > 0
  std::optional<double> fmei_ratio;
  double inf_over_sqrt_n = 0.0;
  bool tau_regular = false;               ///< tau = 2 / sqrt(n + 1)

  friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

namespace detail {

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not a number: \"" + s + "\"");
  }
  if (used != s.size()) throw ValidationError("trailing characters in number \"" + s + "\"");
  return v;
}

inline std::uint64_t parse_u64(const std::string& s) {
  std::size_t used = 0;
  std::uint64_t v = 0;
  try {
    v = std::stoull(s, &used);
  } catch (const std::exception&) {
    throw ValidationError("not an unsigned integer: \"" + s + "\"");
  }
  if (used != s.size()) throw ValidationError("trailing characters in integer \"" + s + "\"");
  return v;
}

inline std::string json_string(const std::string& s) { return nlohmann::json(s).dump(); }

enum class FieldKind { u64, text, real, optional_real, real_list, boolean };

/// One column: its name plus accessors converting to and from the CSV cell text
/// (JSONL reuses the same cells, typed by kind).
struct Field {
  const char* name;
  FieldKind kind;
  std::function<std::string(const ExperimentRecord&)> get;
  std::function<void(ExperimentRecord&, const std::string&)> set;
};

template <class T>
Field u64_field(const char* name, T ExperimentRecord::*m) {
  return {name, FieldKind::u64, [m](const ExperimentRecord& r) { return std::to_string(r.*m); },
          [m](ExperimentRecord& r, const std::string& s) { r.*m = parse_u64(s); }};
}
inline Field text_field(const char* name, std::string ExperimentRecord::*m) {
  return {name, FieldKind::text, [m](const ExperimentRecord& r) { return r.*m; },
          [m](ExperimentRecord& r, const std::string& s) { r.*m = s; }};
}
inline Field real_field(const char* name, double ExperimentRecord::*m) {
  return {name, FieldKind::real, [m](const ExperimentRecord& r) { return format_double(r.*m); },
          [m](ExperimentRecord& r, const std::string& s) { r.*m = parse_double(s); }};
}
inline Field optional_field(const char* name, std::optional<double> ExperimentRecord::*m) {
  return {name, FieldKind::optional_real,
          [m](const ExperimentRecord& r) { return (r.*m) ? format_double(*(r.*m)) : std::string(); },
          [m](ExperimentRecord& r, const std::string& s) {
            if (s.empty()) {
              r.*m = std::nullopt;
            } else {
              r.*m = parse_double(s);
            }
          }};
}
inline Field list_field(const char* name, std::vector<double> ExperimentRecord::*m) {
  return {name, FieldKind::real_list,
          [m](const ExperimentRecord& r) {
            std::string out;
            for (std::size_t k = 0; k < (r.*m).size(); ++k) {
              if (k) out += ';';
              out += format_double((r.*m)[k]);
            }
            return out;
          },
          [m](ExperimentRecord& r, const std::string& s) {
            (r.*m).clear();
            if (s.empty()) return;
            std::stringstream ss(s);
            std::string item;
            while (std::getline(ss, item, ';')) (r.*m).push_back(parse_double(item));
          }};
}
inline Field bool_field(const char* name, bool ExperimentRecord::*m) {
  return {name, FieldKind::boolean, [m](const ExperimentRecord& r) { return std::string(r.*m ? "1" : "0"); },
          [m](ExperimentRecord& r, const std::string& s) {
            if (s != "0" && s != "1") throw ValidationError("boolean cell must be 0 or 1");
            r.*m = s == "1";
          }};
}

}  // namespace detail

/// The fixed column order of the CSV output (and the key order of JSONL).
inline const std::vector<detail::Field>& record_fields() {
  using namespace detail;
  using R = ExperimentRecord;
  static const std::vector<Field> fields = {
      u64_field("n", &R::n),
      u64_field("trial_id", &R::trial_id),
      u64_field("seed", &R::seed),
      text_field("distribution", &R::distribution),
      text_field("weights_digest", &R::weights_digest),
      text_field("path", &R::path),
      optional_field("entropy_bits", &R::entropy_bits),
      optional_field("min_entropy_bits", &R::min_entropy_bits),
      real_field("influence", &R::influence),
      optional_field("influence_half_width", &R::influence_half_width),
      list_field("per_coordinate", &R::per_coordinate),
      bool_field("exact_agreement", &R::exact_agreement),
      real_field("khintchine_bound", &R::khintchine_bound),
      real_field("khintchine_clamped", &R::khintchine_clamped),
      real_field("sum_lb_all_weights", &R::sum_lb_all_weights),
      real_field("sum_lb_coordinates_only", &R::sum_lb_coordinates_only),
      u64_field("large_weight_count", &R::large_weight_count),
      real_field("large_weight_influence", &R::large_weight_influence),
      optional_field("large_weight_half_width", &R::large_weight_half_width),
      real_field("alpha", &R::alpha),
      real_field("theta", &R::theta),
      real_field("certificate", &R::certificate),
      real_field("certificate_success_probability", &R::certificate_success_probability),
      real_field("certificate_asymptotic", &R::certificate_asymptotic),
      optional_field("fei_ratio", &R::fei_ratio),
      optional_field("fmei_ratio", &R::fmei_ratio),
      real_field("inf_over_sqrt_n", &R::inf_over_sqrt_n),
      bool_field("tau_regular", &R::tau_regular),
  };
  return fields;
}

enum class OutputFormat { csv, jsonl };

inline OutputFormat parse_format(std::string_view s) {
  if (s == "csv") return OutputFormat::csv;
  if (s == "jsonl") return OutputFormat::jsonl;
  throw ValidationError("format must be csv or jsonl");
}

namespace detail {

inline std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    const char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cells.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  if (quoted) throw ValidationError("unterminated quote in CSV line");
  return cells;
}

}  // namespace detail

inline std::string csv_header() {
  std::string out;
  for (const auto& f : record_fields()) {
    if (!out.empty()) out += ',';
    out += f.name;
  }
  return out;
}

inline std::string to_csv_row(const ExperimentRecord& r) {
  std::string out;
  bool first = true;
  for (const auto& f : record_fields()) {
    if (!first) out += ',';
    first = false;
    out += detail::csv_cell(f.get(r));
  }
  return out;
}

/// One JSON object on a single line; missing optionals become null.
inline std::string to_jsonl_line(const ExperimentRecord& r) {
  std::string out = "{";
  bool first = true;
  for (const auto& f : record_fields()) {
    if (!first) out += ',';
    first = false;
    out += detail::json_string(f.name);
    out += ':';
    const std::string cell = f.get(r);
    switch (f.kind) {
      case detail::FieldKind::text:
        out += detail::json_string(cell);
        break;
      case detail::FieldKind::optional_real:
        out += cell.empty() ? "null" : cell;
        break;
      case detail::FieldKind::real_list: {
        std::string list = cell;
        for (char& c : list) {
          if (c == ';') c = ',';
        }
        out += "[" + list + "]";
        break;
      }
      case detail::FieldKind::boolean:
        out += cell == "1" ? "true" : "false";
        break;
      default:
        out += cell;
    }
  }
  return out + "}";
}

inline void emit(std::ostream& os, const std::vector<ExperimentRecord>& records, OutputFormat format) {
  if (format == OutputFormat::csv) os << csv_header() << '\n';
  for (const auto& r : records) os << (format == OutputFormat::csv ? to_csv_row(r) : to_jsonl_line(r)) << '\n';
  if (!os) throw IoError("failed writing records");
}

inline std::vector<ExperimentRecord> parse_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ValidationError("empty CSV input");
  if (line != csv_header()) throw ValidationError("CSV header does not match the record columns");
  const auto& fields = record_fields();
  std::vector<ExperimentRecord> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != fields.size()) throw ValidationError("CSV row has the wrong number of cells");
    ExperimentRecord r;
    for (std::size_t k = 0; k < fields.size(); ++k) fields[k].set(r, cells[k]);
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<ExperimentRecord> parse_jsonl(std::istream& is) {
  std::vector<ExperimentRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(std::string("bad JSONL line: ") + e.what());
    }
    ExperimentRecord r;
    for (const auto& f : record_fields()) {
      if (!j.contains(f.name)) throw ValidationError(std::string("JSONL record lacks \"") + f.name + "\"");
      const auto& v = j.at(f.name);
      std::string cell;
      switch (f.kind) {
        case detail::FieldKind::text:
          cell = v.get<std::string>();
          break;
        case detail::FieldKind::u64:
          cell = std::to_string(v.get<std::uint64_t>());
          break;
        case detail::FieldKind::real:
          cell = detail::format_double(v.get<double>());
          break;
        case detail::FieldKind::optional_real:
          cell = v.is_null() ? std::string() : detail::format_double(v.get<double>());
          break;
        case detail::FieldKind::real_list:
          for (std::size_t k = 0; k < v.size(); ++k) {
            if (k) cell += ';';
            cell += detail::format_double(v.at(k).get<double>());
          }
          break;
        case detail::FieldKind::boolean:
          cell = v.get<bool>() ? "1" : "0";
          break;
      }
      f.set(r, cell);
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace ltfei
