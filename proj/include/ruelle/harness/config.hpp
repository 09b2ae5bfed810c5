#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ruelle/harness/corpus.hpp"
#include "ruelle/transfer.hpp"

namespace ruelle::harness {

struct MeshSpec {
  std::string kind = "circle";  ///< circle | sphere
  int resolution = 256;
};

struct SampleSpec {
  std::size_t chains = 10000;
  std::vector<int> n_values = {16, 64, 256, 1024, 2048};
  std::size_t lil_chains = 100;
  std::size_t lil_length = 100000;
  std::size_t asclt_length = 100000;
  std::size_t ldp_chains = 100000;
  int ldp_n = 50;
  std::vector<double> ldp_epsilon = {0.2};
  /// 0 skips the local limit check.
  std::size_t lclt_chains = 0;
  std::vector<int> lclt_n = {256, 4096};
  std::size_t burn_in = 64;
};

struct SpectralSpec {
  double theta_max = 1.0;
  int grid_size = 41;
  int gap_n_max = 12;
  int correlation_terms = 12;
};

/// Everything a run depends on. Every output byte is a function of this
/// record (threads and output only change where and how fast).
struct ExperimentConfig {
  std::string corpus;  ///< optional named entry; fills map/weight/observable
  std::string map = "z2";
  FieldSpec weight;
  FieldSpec observable{"cos_re", {}};
  MeshSpec mesh;
  int lambda_depth = 16;
  int rho_depth = 12;
  int measure_depth = 20;
  int atom_depth = 14;
  int base_points = 8;
  SampleSpec samples;
  SpectralSpec spectral;
  std::uint64_t seed = 1;
  std::string output = "out";
  std::vector<std::string> tests = {"all"};
  int threads = 1;

  TransferOptions transfer_options() const;
  /// Circle system whose weight and observable have finite Fourier expansions.
  bool oracle_backed() const;
};

/// Subcommands in execution order.
const std::vector<std::string>& subcommands();

/// Parses and validates a YAML config; unknown keys, wrong types and values
/// out of range raise ConfigError.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const std::string& yaml_text);

/// Replaces map, weight, observable and mesh kind by the corpus entry.
void apply_corpus(ExperimentConfig& config, const std::string& name);

/// Canonical YAML; `with_runtime` adds threads and output.
std::string to_yaml(const ExperimentConfig& config, bool with_runtime = true);

/// SHA-256 (hex) of the canonical YAML without runtime keys.
std::string config_hash(const ExperimentConfig& config);

}  // namespace ruelle::harness
