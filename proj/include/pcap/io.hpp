#pragma once

// JSON descriptors, CSV tables and atomic file output.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "pcap/ap_core.hpp"
#include "pcap/difference_eq.hpp"
#include "pcap/impulsive.hpp"
#include "pcap/pcap_function.hpp"

namespace pcap::io {

using nlohmann::json;

/// Shortest decimal that parses back to the same double.
std::string format_double(double x);
/// Inverse of format_double; throws InvalidInput naming `where`.
double parse_double(std::string_view text, const std::string& where);

/// Parses JSON text; syntax errors become InvalidInput with line and column.
json parse_json(const std::string& text, const std::string& source);
json read_json_file(const std::filesystem::path& path);

/// Field access with "path.to.field" diagnostics.
const json& field(const json& j, const std::string& key, const std::string& path);
double number_field(const json& j, const std::string& key, const std::string& path);
std::int64_t integer_field(const json& j, const std::string& key,
                           const std::string& path);

TrigPoly trig_poly_from_json(const json& j, const std::string& path);
TrigSeq trig_seq_from_json(const json& j, const std::string& path);
WexlerSeq wexler_from_json(const json& j, const std::string& path);
json to_json(const TrigPoly& p);
json to_json(const TrigSeq& s);
json to_json(const WexlerSeq& w);

/// Doubles that may be infinite ("inf" / "-inf" strings).
json number_json(double x);
json to_json(const Interval& w);
json to_json(const IndexRange& w);
json to_json(const AlmostPeriodReport& r);
json to_json(const PcapVerdict& v);
json to_json(const A2Report& r);

/// Impulsive system descriptor:
///   {"d", "g": [expr...], "b": [TrigSeq | {"telescoping": TrigSeq}...],
///    "tau": WexlerSeq, "y0": [...], "t0", "t_end", "step"}
struct SystemDescriptor {
  ImpulsiveSystem system;
  std::vector<double> y0;
  double t0 = 0.0;
  double t_end = 0.0;
  double step = 0.0;
};
SystemDescriptor system_from_json(const json& j);

/// Simple CSV: one header row, numeric body.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};
CsvTable read_csv(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace pcap::io
