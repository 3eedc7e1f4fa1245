#include "pcap/cli.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "pcap/errors.hpp"
#include "pcap/impulsive.hpp"
#include "pcap/io.hpp"
#include "pcap/pcap_function.hpp"

namespace pcap::cli {
namespace {

namespace fs = std::filesystem;
using io::format_double;
using io::json;

constexpr double kDefaultStep = 0.01;
constexpr IndexRange kDefaultPieces{-10, 10};

std::string dump(const json& j) { return j.dump(2) + "\n"; }

double step_of(const RunConfig& c, double fallback) {
  const double s = c.step.value_or(fallback);
  if (!(s > 0.0) || !std::isfinite(s)) throw InvalidInput("--step must be positive");
  return s;
}

std::int64_t as_index(double x, const char* what) {
  if (x != std::floor(x) || std::abs(x) > 1e15) {
    throw InvalidInput(std::string("--window ") + what + " must be an integer");
  }
  return static_cast<std::int64_t>(x);
}

IndexRange piece_window(const RunConfig& c, const json& j) {
  IndexRange w = kDefaultPieces;
  if (c.window) {
    w = {as_index(c.window->first, "lo"), as_index(c.window->second, "hi")};
  } else if (j.contains("window")) {
    const json& a = j.at("window");
    if (!a.is_array() || a.size() != 2 || !a[0].is_number_integer() ||
        !a[1].is_number_integer()) {
      throw InvalidInput("field 'window': expected [lo, hi] integers");
    }
    w = {a[0].get<std::int64_t>(), a[1].get<std::int64_t>()};
  }
  if (w.lo > w.hi) throw InvalidInput("window lo must not exceed hi");
  return w;
}

std::vector<double> epsilons_of(const RunConfig& c, const json& j) {
  std::vector<double> eps = c.epsilons;
  if (eps.empty() && j.contains("epsilons")) {
    const json& a = j.at("epsilons");
    if (!a.is_array()) throw InvalidInput("field 'epsilons': expected array");
    for (const auto& e : a) {
      if (!e.is_number()) throw InvalidInput("field 'epsilons': expected numbers");
      eps.push_back(e.get<double>());
    }
  }
  if (eps.empty()) eps.push_back(0.3);
  for (double e : eps) {
    if (!(e > 0.0)) throw InvalidInput("epsilons must be positive");
  }
  return eps;
}

// Uniform grid over [tau_n, tau_{n+1}] with spacing <= step.
std::vector<double> piece_grid(const WexlerSeq& tau, std::int64_t n, double step) {
  const double t0 = tau.tau(n);
  const double t1 = tau.tau(n + 1);
  const auto k = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::ceil((t1 - t0) / step - 1e-9)));
  std::vector<double> g;
  g.reserve(static_cast<std::size_t>(k + 1));
  for (std::int64_t i = 0; i < k; ++i) {
    g.push_back(t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(k));
  }
  g.push_back(t1);
  return g;
}

struct Loaded {
  PcapFunction h;
  IndexRange pieces;
  std::optional<Factored> reference;
  /// Per-piece sample times when read from a trace.
  std::vector<std::vector<double>> trace_times;
};

Loaded load_trace(const WexlerSeq& tau, const fs::path& path) {
  const io::CsvTable csv = io::read_csv(path);
  if (csv.header != std::vector<std::string>{"piece", "t", "h"}) {
    throw InvalidInput(path.string() + ": expected header piece,t,h");
  }
  std::vector<PieceSamples> pieces;
  std::int64_t first = 0;
  std::int64_t current = 0;
  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const std::string where = path.string() + ":" + std::to_string(r + 2);
    const double pn = io::parse_double(csv.rows[r][0], where);
    const auto n = static_cast<std::int64_t>(pn);
    if (static_cast<double>(n) != pn) throw InvalidInput(where + ": piece must be an integer");
    if (pieces.empty()) {
      first = current = n;
      pieces.emplace_back();
    } else if (n == current + 1) {
      current = n;
      pieces.emplace_back();
    } else if (n != current) {
      throw InvalidInput(where + ": pieces must be consecutive");
    }
    pieces.back().t.push_back(io::parse_double(csv.rows[r][1], where));
    pieces.back().h.push_back(io::parse_double(csv.rows[r][2], where));
  }
  if (pieces.empty()) throw InvalidInput(path.string() + ": no samples");
  std::vector<std::vector<double>> times;
  for (const auto& p : pieces) times.push_back(p.t);
  const IndexRange range{first, current};
  return {PcapFunction(tau, sampled_from_tables(first, std::move(pieces))), range,
          std::nullopt, std::move(times)};
}

// Either {"f", "u", "tau"} or {"tau", "trace": csv path}.
Loaded load_pcap(const RunConfig& c, const json& j) {
  const WexlerSeq tau = io::wexler_from_json(io::field(j, "tau", ""), "tau");
  if (j.contains("trace")) {
    const json& tr = j.at("trace");
    if (!tr.is_string()) throw InvalidInput("field 'trace': expected path string");
    fs::path p = tr.get<std::string>();
    if (p.is_relative()) p = c.input_path.parent_path() / p;
    return load_trace(tau, p);
  }
  Factored body{io::trig_poly_from_json(io::field(j, "f", ""), "f"),
                io::trig_seq_from_json(io::field(j, "u", ""), "u")};
  return {synthesize(body.f, body.u, tau), piece_window(c, j), body, {}};
}

VerifyWindows verify_windows(const PcapFunction& h, IndexRange pieces, double step,
                             const json& j) {
  VerifyWindows w;
  w.pieces = pieces;
  w.piece_step = step;
  w.translation_step = step;
  w.sample_step = step;
  w.samples = {h.tau().tau(pieces.lo), h.tau().tau(pieces.hi + 1)};
  if (j.contains("translations")) {
    const json& a = j.at("translations");
    if (!a.is_array() || a.size() != 2 || !a[0].is_number() || !a[1].is_number()) {
      throw InvalidInput("field 'translations': expected [lo, hi]");
    }
    w.translations = {a[0].get<double>(), a[1].get<double>()};
  }
  return w;
}

json metadata(const RunConfig& c) {
  return {{"command", command_name(c.command)},
          {"seed", c.seed},
          {"input", c.input_path.filename().string()}};
}

void write(const RunConfig& c, const std::string& name, const std::string& content) {
  io::write_atomic(c.output_dir / name, content);
}

int run_synth(const RunConfig& c, const json& j, std::ostream& out) {
  const Loaded in = load_pcap(c, j);
  if (!in.reference) throw InvalidInput("synth needs a factored descriptor {f, u, tau}");
  const double step = step_of(c, kDefaultStep);
  const WexlerSeq& tau = in.h.tau();

  std::string trace = "piece,t,h\n";
  for (std::int64_t n = in.pieces.lo; n <= in.pieces.hi; ++n) {
    for (double t : piece_grid(tau, n, step)) {
      trace += std::to_string(n) + "," + format_double(t) + "," +
               format_double(in.h.piece_value(n, t)) + "\n";
    }
  }
  std::string jumps = "n,tau,left,right\n";
  for (std::int64_t n = in.pieces.lo + 1; n <= in.pieces.hi; ++n) {
    jumps += std::to_string(n) + "," + format_double(tau.tau(n)) + "," +
             format_double(in.h.left_value(n)) + "," +
             format_double(in.h.right_limit(n)) + "\n";
  }

  const VerifyWindows w = verify_windows(in.h, in.pieces, step, j);
  const PcapVerdict verdict = verify_pcap(in.h, epsilons_of(c, j), w);
  json v = metadata(c);
  v["pieces"] = io::to_json(in.pieces);
  v["step"] = step;
  v["f"] = io::to_json(in.reference->f);
  v["u"] = io::to_json(*in.reference->u.trig());
  v["tau"] = io::to_json(tau);
  v["verdict"] = io::to_json(verdict);

  write(c, "h_trace.csv", trace);
  write(c, "jumps.csv", jumps);
  write(c, "verdict.json", dump(v));
  out << "synth: pieces [" << in.pieces.lo << ", " << in.pieces.hi << "]\n";
  for (const auto& e : verdict.entries) {
    out << "  eps " << format_double(e.epsilon) << ": almost periods "
        << e.almost_periods.count() << ", max_gap "
        << format_double(e.almost_periods.max_gap) << ", delta "
        << format_double(e.delta) << "\n";
  }
  return kExitOk;
}

int run_factor(const RunConfig& c, const json& j, std::ostream& out) {
  const Loaded in = load_pcap(c, j);
  const IndexRange window{in.pieces.lo + 1, in.pieces.hi};
  if (window.size() == 0) throw InvalidInput("factor needs at least two pieces");
  const std::int64_t n_ref = j.contains("n_ref") ? io::integer_field(j, "n_ref", "") : 0;
  const FactorizationResult r = factorize(in.h, window, n_ref);
  const double step = step_of(c, kDefaultStep);

  std::string ftrace = "piece,t,f\n";
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    const std::vector<double> times =
        in.trace_times.empty()
            ? piece_grid(in.h.tau(), n, step)
            : in.trace_times[static_cast<std::size_t>(n - in.pieces.lo)];
    for (double t : times) {
      ftrace += std::to_string(n) + "," + format_double(t) + "," +
                format_double(in.h.piece_value(n, t) / r.u(n)) + "\n";
    }
  }
  std::string utable = "n,u\n";
  for (std::int64_t n = window.lo; n <= window.hi; ++n) {
    utable += std::to_string(n) + "," + format_double(r.u(n)) + "\n";
  }

  json g = metadata(c);
  g["window"] = io::to_json(window);
  g["n_ref"] = r.n_ref;
  g["v_value"] = r.v_value;
  g["conditioning"] = io::number_json(r.conditioning);
  g["well_conditioned"] = r.well_conditioned;
  g["continuity_defect"] = r.continuity_defect;
  g["reconstruction_error"] = r.reconstruction_error;
  if (in.reference) {
    // Recovered pair against (f0 c, u0 / c) with c = u0(n_ref).
    const double c0 = in.reference->u(n_ref);
    double u_err = 0.0;
    for (std::int64_t n = window.lo; n <= window.hi; ++n) {
      const double want = in.reference->u(n) / c0;
      u_err = std::max(u_err, std::abs(r.u(n) - want) / std::abs(want));
    }
    g["reference"] = {{"gauge_constant", c0}, {"u_max_rel_error", u_err}};
  }
  write(c, "f_trace.csv", ftrace);
  write(c, "u_table.csv", utable);
  write(c, "gauge.json", dump(g));
  out << "factor: window [" << window.lo << ", " << window.hi << "], n_ref " << n_ref
      << ", conditioning " << format_double(r.conditioning)
      << (r.well_conditioned ? "" : " (ill-conditioned)") << "\n";
  return kExitOk;
}

int run_verify(const RunConfig& c, const json& j, std::ostream& out) {
  const Loaded in = load_pcap(c, j);
  const double step = step_of(c, kDefaultStep);
  const VerifyWindows w = verify_windows(in.h, in.pieces, step, j);
  const PcapVerdict verdict = verify_pcap(in.h, epsilons_of(c, j), w);
  json v = metadata(c);
  v["verdict"] = io::to_json(verdict);
  write(c, "verdict.json", dump(v));
  for (const auto& e : verdict.entries) {
    out << "verify: eps " << format_double(e.epsilon) << ": equipotential max_gap "
        << format_double(e.equipotential.max_gap) << ", delta "
        << format_double(e.delta) << ", almost-period max_gap "
        << format_double(e.almost_periods.max_gap) << "\n";
  }
  return kExitOk;
}

io::SystemDescriptor load_system(const RunConfig& c, const json& j) {
  io::SystemDescriptor s = io::system_from_json(j);
  if (c.step) s.step = step_of(c, s.step);
  if (c.window) {
    s.t0 = c.window->first;
    s.t_end = c.window->second;
    if (!(s.t0 < s.t_end)) throw InvalidInput("--window needs t0 < t_end");
  }
  return s;
}

std::string trajectory_csv(const Trajectory& tr) {
  std::string s = "t,side,piece";
  for (int i = 1; i <= tr.d; ++i) s += ",y" + std::to_string(i);
  s += "\n";
  for (const auto& p : tr.samples) {
    s += format_double(p.t) + (p.side == Side::kLeft ? ",L," : ",R,") +
         std::to_string(p.piece);
    for (double y : p.y) s += "," + format_double(y);
    s += "\n";
  }
  return s;
}

int run_simulate(const RunConfig& c, const json& j, std::ostream& out) {
  const io::SystemDescriptor s = load_system(c, j);
  const Trajectory tr = integrate_impulsive(s.system, s.y0, s.t0, s.t_end, s.step);
  write(c, "trajectory.csv", trajectory_csv(tr));
  out << "simulate: " << tr.samples.size() << " samples, " << tr.jumps.size()
      << " jumps\n";
  return kExitOk;
}

int run_roundtrip(const RunConfig& c, const json& j, std::ostream& out) {
  const io::SystemDescriptor s = load_system(c, j);
  const RoundtripReport r = roundtrip_check(s.system, s.y0, s.t0, s.t_end, s.step);
  json z_scans = json::array();
  for (const auto& scan : r.z_scans) z_scans.push_back(io::to_json(scan));
  json v = metadata(c);
  v["window"] = io::to_json(r.window);
  v["t0"] = s.t0;
  v["t_end"] = s.t_end;
  v["step"] = s.step;
  v["max_deviation"] = r.max_deviation;
  v["per_component"] = r.per_component;
  v["quotient_jump"] = r.quotient_jump;
  v["phi_nonzero_at_jumps"] = r.phi_nonzero_at_jumps;
  v["jumps"] = r.phi.jumps.size();
  v["z_scans"] = z_scans;
  write(c, "roundtrip.json", dump(v));
  out << "roundtrip: max |phi - psi z| = " << format_double(r.max_deviation)
      << ", quotient jump " << format_double(r.quotient_jump) << "\n";
  return kExitOk;
}

int run_a2check(const RunConfig& c, const json& j, std::ostream& out) {
  const io::SystemDescriptor s = io::system_from_json(j);
  IndexRange w;
  if (c.window || j.contains("window")) {
    w = piece_window(c, j);
  } else {
    w = {s.system.tau().piece_index(s.t0) - 1, s.system.tau().piece_index(s.t_end) + 1};
  }
  const A2Report r = check_a2(s.system, w);
  json v = metadata(c);
  v["report"] = io::to_json(r);
  write(c, "a2.json", dump(v));
  out << "a2check: " << (r.pass() ? "pass" : "FAIL") << "\n";
  for (const auto& comp : r.components) {
    if (!comp.pass) out << "  " << comp.failure << "\n";
  }
  return r.pass() ? kExitOk : kExitHypothesis;
}

}  // namespace

Command parse_command(const std::string& name) {
  if (name == "synth") return Command::kSynth;
  if (name == "factor") return Command::kFactor;
  if (name == "verify") return Command::kVerify;
  if (name == "simulate") return Command::kSimulate;
  if (name == "roundtrip") return Command::kRoundtrip;
  if (name == "a2check") return Command::kA2check;
  throw InvalidInput("unknown command '" + name + "'");
}

std::string command_name(Command c) {
  switch (c) {
    case Command::kSynth: return "synth";
    case Command::kFactor: return "factor";
    case Command::kVerify: return "verify";
    case Command::kSimulate: return "simulate";
    case Command::kRoundtrip: return "roundtrip";
    case Command::kA2check: return "a2check";
  }
  return "?";
}

std::pair<double, double> parse_window(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidInput("--window expects lo:hi");
  const double lo = io::parse_double(text.substr(0, colon), "--window");
  const double hi = io::parse_double(text.substr(colon + 1), "--window");
  if (!(lo < hi)) throw InvalidInput("--window expects lo < hi");
  return {lo, hi};
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (!fs::is_directory(config.output_dir)) {
      throw InvalidInput("cannot create output directory " + config.output_dir.string());
    }
    const json j = io::read_json_file(config.input_path);
    if (!j.is_object()) throw InvalidInput("descriptor must be a JSON object");
    switch (config.command) {
      case Command::kSynth: return run_synth(config, j, out);
      case Command::kFactor: return run_factor(config, j, out);
      case Command::kVerify: return run_verify(config, j, out);
      case Command::kSimulate: return run_simulate(config, j, out);
      case Command::kRoundtrip: return run_roundtrip(config, j, out);
      case Command::kA2check: return run_a2check(config, j, out);
    }
    return kExitInvalidInput;
  } catch (const HypothesisViolation& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const A2Failure& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const NoAlmostPeriod& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitHypothesis;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace pcap::cli
