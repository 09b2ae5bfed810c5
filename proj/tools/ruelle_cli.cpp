#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "ruelle/error.hpp"
#include "ruelle/harness/run.hpp"

using namespace ruelle;

int main(int argc, char** argv) {
  CLI::App app{"Transfer-operator experiments on rational maps"};
  std::string command = "all";
  std::string config_path, corpus, out_dir;
  std::uint64_t seed = 0;
  int threads = 0;
  std::vector<std::string> commands = harness::subcommands();
  commands.push_back("all");
  app.add_option("command", command, "Subcommand to run")->check(CLI::IsMember(commands));
  app.add_option("--config", config_path, "YAML experiment config");
  auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--out", out_dir, "Output directory (overrides the config and RUELLE_OUT)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--corpus", corpus, "Built-in corpus entry (overrides map, weight and observable)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return e.get_exit_code() == 0 ? app.exit(e) : (app.exit(e), harness::kConfigError);
  }

  harness::ExperimentConfig config;
  try {
    if (!config_path.empty()) config = harness::load_config(config_path);
    if (!corpus.empty()) harness::apply_corpus(config, corpus);
    if (*seed_opt) config.seed = seed;
    if (threads > 0) config.threads = threads;
    if (!out_dir.empty()) {
      config.output = out_dir;
    } else if (const char* env = std::getenv("RUELLE_OUT")) {
      config.output = env;
    }
    config.tests = {command};
  } catch (const InputError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return harness::kConfigError;
  }

  const harness::RunOutcome outcome = harness::run(config);
  for (const auto& r : outcome.reports) {
    std::cout << (r.pass ? "PASS " : "FAIL ") << r.test << " [" << r.route << "] statistic=" << r.statistic << '\n';
  }
  if (!outcome.error.empty()) std::cerr << "error: " << outcome.error << '\n';
  std::cout << "artifacts in " << config.output << '\n';
  return outcome.exit_code;
}
