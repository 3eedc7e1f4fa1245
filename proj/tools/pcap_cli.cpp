#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pcap/cli.hpp"
#include "pcap/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Piecewise continuous almost periodic functions: synthesis, "
               "factorization, verification and impulsive simulation"};
  std::string command;
  std::string input;
  std::string out = ".";
  double step = 0.0;
  std::string window;
  std::vector<double> epsilons;
  std::uint64_t seed = 0;

  app.add_option("--command", command, "synth|factor|verify|simulate|roundtrip|a2check")
      ->required()
      ->check(CLI::IsMember({"synth", "factor", "verify", "simulate", "roundtrip",
                             "a2check"}));
  app.add_option("--input", input, "JSON descriptor")->required();
  app.add_option("--out", out, "output directory");
  auto* step_opt = app.add_option("--step", step, "trace, grid or integration step")
                       ->check(CLI::PositiveNumber);
  app.add_option("--window", window, "lo:hi (pieces, or times for simulate/roundtrip)");
  app.add_option("--epsilon", epsilons, "epsilon to test (repeatable)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "seed recorded in the output metadata");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pcap::cli::kExitInvalidInput;
  }

  pcap::cli::RunConfig config;
  try {
    config.command = pcap::cli::parse_command(command);
    config.input_path = input;
    config.output_dir = out;
    if (*step_opt) config.step = step;
    if (!window.empty()) config.window = pcap::cli::parse_window(window);
    config.epsilons = epsilons;
    config.seed = seed;
  } catch (const pcap::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return pcap::cli::kExitInvalidInput;
  }
  return pcap::cli::run(config, std::cout, std::cerr);
}
