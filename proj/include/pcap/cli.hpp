#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pcap::cli {

enum class Command { kSynth, kFactor, kVerify, kSimulate, kRoundtrip, kA2check };

Command parse_command(const std::string& name);
std::string command_name(Command c);

struct RunConfig {
  Command command = Command::kSynth;
  std::filesystem::path input_path;
  std::filesystem::path output_dir = ".";
  /// Trace / grid step for synth, factor, verify; integration step for
  /// simulate and roundtrip.
  std::optional<double> step;
  /// Piece window "lo:hi" for synth, factor, verify, a2check; time interval
  /// for simulate and roundtrip.
  std::optional<std::pair<double, double>> window;
  std::vector<double> epsilons;
  std::uint64_t seed = 0;
};

/// Parses "lo:hi".
std::pair<double, double> parse_window(const std::string& text);

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidInput = 1;
inline constexpr int kExitHypothesis = 2;

/// Runs one command; artifacts go to output_dir, a summary to `out`,
/// diagnostics to `err`. Returns the exit status.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace pcap::cli
