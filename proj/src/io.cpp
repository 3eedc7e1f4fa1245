#include "pcap/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "pcap/errors.hpp"
#include "pcap/expression.hpp"

namespace pcap::io {
namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

std::string type_name(const json& j) { return j.type_name(); }

void line_col(const std::string& text, std::size_t offset, std::size_t& line,
              std::size_t& col) {
  line = 1;
  col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
}

std::vector<TrigTerm> terms_from_json(const json& j, const std::string& path) {
  std::vector<TrigTerm> terms;
  if (!j.contains("terms")) return terms;
  const json& arr = j.at("terms");
  const std::string tp = join(path, "terms");
  if (!arr.is_array()) throw InvalidInput("field '" + tp + "': expected array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string ip = tp + "[" + std::to_string(i) + "]";
    terms.push_back({number_field(arr[i], "amp", ip), number_field(arr[i], "freq", ip),
                     arr[i].contains("phase") ? number_field(arr[i], "phase", ip) : 0.0});
  }
  return terms;
}

json terms_to_json(const std::vector<TrigTerm>& terms) {
  json arr = json::array();
  for (const auto& t : terms) {
    arr.push_back({{"amp", t.amp}, {"freq", t.freq}, {"phase", t.phase}});
  }
  return arr;
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& where) {
  if (text == "inf") return std::numeric_limits<double>::infinity();
  if (text == "-inf") return -std::numeric_limits<double>::infinity();
  double x = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), x);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw InvalidInput(where + ": not a number: '" + std::string(text) + "'");
  }
  return x;
}

json parse_json(const std::string& text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 0;
    std::size_t col = 0;
    line_col(text, e.byte == 0 ? 0 : e.byte - 1, line, col);
    throw InvalidInput(source + ":" + std::to_string(line) + ":" +
                       std::to_string(col) + ": invalid JSON: " + e.what());
  }
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json(ss.str(), path.string());
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) {
    throw InvalidInput("field '" + (path.empty() ? std::string("<root>") : path) +
                       "': expected object, got " + type_name(j));
  }
  const auto it = j.find(key);
  if (it == j.end()) {
    throw InvalidInput("missing field '" + join(path, key) + "'");
  }
  return *it;
}

double number_field(const json& j, const std::string& key, const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number()) {
    throw InvalidInput("field '" + join(path, key) + "': expected number, got " +
                       type_name(v));
  }
  return v.get<double>();
}

std::int64_t integer_field(const json& j, const std::string& key,
                           const std::string& path) {
  const json& v = field(j, key, path);
  if (!v.is_number_integer()) {
    throw InvalidInput("field '" + join(path, key) + "': expected integer, got " +
                       type_name(v));
  }
  return v.get<std::int64_t>();
}

TrigPoly trig_poly_from_json(const json& j, const std::string& path) {
  try {
    return TrigPoly(number_field(j, "mean", path), terms_from_json(j, path));
  } catch (const InvalidInput&) {
    throw;
  } catch (const Error& e) {
    throw InvalidInput("field '" + path + "': " + e.what());
  }
}

TrigSeq trig_seq_from_json(const json& j, const std::string& path) {
  try {
    return TrigSeq(number_field(j, "mean", path), terms_from_json(j, path));
  } catch (const InvalidInput&) {
    throw;
  } catch (const Error& e) {
    throw InvalidInput("field '" + path + "': " + e.what());
  }
}

WexlerSeq wexler_from_json(const json& j, const std::string& path) {
  const double theta = number_field(j, "theta", path);
  TrigSeq c;
  if (j.contains("perturbation")) {
    c = trig_seq_from_json(j.at("perturbation"), join(path, "perturbation"));
  }
  try {
    return WexlerSeq(theta, c);
  } catch (const InvalidInput& e) {
    throw InvalidInput("field '" + path + "': " + e.what());
  }
}

json to_json(const TrigPoly& p) {
  return {{"mean", p.mean()}, {"terms", terms_to_json(p.terms())}};
}

json to_json(const TrigSeq& s) {
  return {{"mean", s.mean()}, {"terms", terms_to_json(s.terms())}};
}

json to_json(const WexlerSeq& w) {
  return {{"theta", w.theta()}, {"perturbation", to_json(w.perturbation())}};
}

json number_json(double x) {
  if (std::isfinite(x)) return x;
  return format_double(x);
}

json to_json(const Interval& w) { return json::array({w.lo, w.hi}); }
json to_json(const IndexRange& w) { return json::array({w.lo, w.hi}); }

json to_json(const AlmostPeriodReport& r) {
  json periods = json::array();
  for (double p : r.periods) periods.push_back(p);
  return {{"epsilon", r.epsilon},
          {"count", r.count()},
          {"max_gap", number_json(r.max_gap)},
          {"scan_window", to_json(r.scan_window)},
          {"translation_step", r.translation_step},
          {"sample_window", to_json(r.sample_window)},
          {"sample_step", r.sample_step},
          {"periods", periods}};
}

json to_json(const PcapVerdict& v) {
  const VerifyWindows& w = v.windows;
  json out;
  out["windows"] = {{"p_window", to_json(w.p_window)},
                    {"jk_window", to_json(w.jk_window)},
                    {"pieces", to_json(w.pieces)},
                    {"piece_step", w.piece_step},
                    {"translations", to_json(w.translations)},
                    {"translation_step", w.translation_step},
                    {"samples", to_json(w.samples)},
                    {"sample_step", w.sample_step}};
  json entries = json::array();
  for (const auto& e : v.entries) {
    entries.push_back({{"epsilon", e.epsilon},
                       {"equipotential", to_json(e.equipotential)},
                       {"delta", number_json(e.delta)},
                       {"almost_periods", to_json(e.almost_periods)}});
  }
  out["entries"] = entries;
  return out;
}

json to_json(const A2Report& r) {
  json comps = json::array();
  for (std::size_t i = 0; i < r.components.size(); ++i) {
    const auto& c = r.components[i];
    json u = json::array();
    if (!c.u.values.values.empty()) {
      for (std::int64_t n = c.u.window().lo; n <= c.u.window().hi; ++n) {
        u.push_back({n, c.u(n)});
      }
    }
    comps.push_back({{"component", i + 1},
                     {"pass", c.pass},
                     {"inf_abs_1_plus_b", number_json(c.inf_abs_1_plus_b)},
                     {"conditioning", number_json(c.conditioning)},
                     {"failure", c.failure},
                     {"scan", to_json(c.scan)},
                     {"u", u}});
  }
  return {{"pass", r.pass()}, {"window", to_json(r.window)}, {"components", comps}};
}

SystemDescriptor system_from_json(const json& j) {
  const int d = static_cast<int>(integer_field(j, "d", ""));
  if (d < 1) throw InvalidInput("field 'd': must be >= 1");
  const json& gj = field(j, "g", "");
  const json& bj = field(j, "b", "");
  const json& yj = field(j, "y0", "");
  if (!gj.is_array() || static_cast<int>(gj.size()) != d) {
    throw InvalidInput("field 'g': expected array of " + std::to_string(d) + " expressions");
  }
  if (!bj.is_array() || static_cast<int>(bj.size()) != d) {
    throw InvalidInput("field 'b': expected array of " + std::to_string(d) + " sequences");
  }
  if (!yj.is_array() || static_cast<int>(yj.size()) != d) {
    throw InvalidInput("field 'y0': expected array of " + std::to_string(d) + " numbers");
  }

  std::vector<VectorField> g;
  for (int i = 0; i < d; ++i) {
    const std::string p = "g[" + std::to_string(i) + "]";
    if (!gj[i].is_string()) throw InvalidInput("field '" + p + "': expected string");
    try {
      g.emplace_back(Expression::parse(gj[i].get<std::string>(), d));
    } catch (const InvalidInput& e) {
      throw InvalidInput("field '" + p + "': " + e.what());
    }
  }

  std::vector<Sequence> b;
  for (int i = 0; i < d; ++i) {
    const std::string p = "b[" + std::to_string(i) + "]";
    if (bj[i].is_object() && bj[i].contains("telescoping")) {
      // b(n) = exp(c(n) - c(n-1)) - 1
      const TrigSeq c = trig_seq_from_json(bj[i].at("telescoping"), p + ".telescoping");
      b.emplace_back(Sequence::Function(
          [c](std::int64_t n) { return std::exp(c(n) - c(n - 1)) - 1.0; }));
    } else {
      b.emplace_back(trig_seq_from_json(bj[i], p));
    }
  }

  std::vector<double> y0;
  for (int i = 0; i < d; ++i) {
    if (!yj[i].is_number()) {
      throw InvalidInput("field 'y0[" + std::to_string(i) + "]': expected number");
    }
    y0.push_back(yj[i].get<double>());
  }

  SystemDescriptor s{ImpulsiveSystem(std::move(g), std::move(b),
                                     wexler_from_json(field(j, "tau", ""), "tau")),
                     std::move(y0), 0.0, 0.0, 0.0};
  s.t0 = j.contains("t0") ? number_field(j, "t0", "") : 0.0;
  s.t_end = number_field(j, "t_end", "");
  s.step = j.contains("step") ? number_field(j, "step", "") : 1e-3;
  if (!(s.step > 0.0)) throw InvalidInput("field 'step': must be positive");
  if (!(s.t0 < s.t_end)) throw InvalidInput("field 't_end': must exceed t0");
  return s;
}

CsvTable read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path.string());
  CsvTable t;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
      const auto comma = s.find(',', start);
      out.push_back(s.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    return out;
  };
  if (!std::getline(in, line)) throw InvalidInput(path.string() + ": empty CSV");
  t.header = split(line);
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != t.header.size()) {
      throw InvalidInput(path.string() + ":" + std::to_string(lineno) + ": expected " +
                         std::to_string(t.header.size()) + " columns");
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidInput("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw InvalidInput("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace pcap::io
