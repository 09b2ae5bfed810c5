#include "ruelle/harness/config.hpp"

#include <openssl/evp.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "ruelle/error.hpp"
#include "ruelle/harness/fourier_oracle.hpp"
#include "ruelle/io.hpp"

namespace ruelle::harness {

namespace {

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node.IsMap()) throw ConfigError(where + ": expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

std::string path_of(const std::string& where, const std::string& key) { return where.empty() ? key : where + "." + key; }

template <class T>
void read(const YAML::Node& node, const std::string& where, const std::string& key, T& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  if (!v.IsScalar()) throw ConfigError(path_of(where, key) + ": expected a scalar");
  try {
    out = v.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError(path_of(where, key) + ": cannot parse '" + v.Scalar() + "'");
  }
}

template <class T>
void read_list(const YAML::Node& node, const std::string& where, const std::string& key, std::vector<T>& out) {
  const YAML::Node v = node[key];
  if (!v) return;
  if (!v.IsSequence() || v.size() == 0) throw ConfigError(path_of(where, key) + ": expected a non-empty list");
  out.clear();
  for (const auto& item : v) {
    try {
      out.push_back(item.as<T>());
    } catch (const YAML::Exception&) {
      throw ConfigError(path_of(where, key) + ": bad list entry");
    }
  }
}

FieldSpec read_field(const YAML::Node& node, const std::string& where) {
  FieldSpec spec;
  if (node.IsScalar()) {
    spec.name = node.as<std::string>();
  } else {
    check_keys(node, where, {"name", "params"});
    read(node, where, "name", spec.name);
    if (const YAML::Node p = node["params"]) {
      if (!p.IsMap()) throw ConfigError(where + ".params: expected a mapping");
      for (const auto& kv : p) {
        const auto key = kv.first.as<std::string>();
        try {
          spec.params[key] = kv.second.as<double>();
        } catch (const YAML::Exception&) {
          throw ConfigError(where + ".params." + key + ": expected a number");
        }
      }
    }
  }
  const auto names = registered_fields();
  if (std::find(names.begin(), names.end(), spec.name) == names.end()) {
    throw ConfigError(where + ": unknown field '" + spec.name + "'");
  }
  return spec;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const ExperimentConfig& c) {
  builtin_map(c.map);
  require(c.mesh.kind == "circle" || c.mesh.kind == "sphere", "mesh.kind: expected circle or sphere");
  require(c.mesh.resolution >= 4 && c.mesh.resolution <= 4096, "mesh.resolution: expected 4..4096");
  for (int d : {c.lambda_depth, c.rho_depth, c.measure_depth, c.atom_depth}) {
    require(d >= 1 && d <= 40, "tree: depths must lie in 1..40");
  }
  require(c.base_points >= 1, "tree.base_points: expected >= 1");
  const auto& s = c.samples;
  require(s.chains >= 1 && s.lil_chains >= 1 && s.ldp_chains >= 1, "samples: chain counts must be positive");
  require(s.lil_length >= 16 && s.asclt_length >= 1, "samples: lil_length >= 16 and asclt_length >= 1");
  require(s.ldp_n >= 1, "samples.ldp_n: expected >= 1");
  for (int n : s.n_values) require(n >= 1, "samples.n_values: entries must be positive");
  for (int n : s.lclt_n) require(n >= 1, "samples.lclt_n: entries must be positive");
  for (double e : s.ldp_epsilon) require(e >= 0.0, "samples.ldp_epsilon: entries must be >= 0");
  require(c.spectral.theta_max > 0.0, "spectral.theta_max: expected > 0");
  require(c.spectral.grid_size >= 3 && c.spectral.grid_size % 2 == 1, "spectral.grid_size: expected odd >= 3");
  require(c.spectral.gap_n_max >= 6, "spectral.gap_n_max: expected >= 6");
  require(c.spectral.correlation_terms >= 1, "spectral.correlation_terms: expected >= 1");
  require(c.threads >= 1, "threads: expected >= 1");
  require(!c.tests.empty(), "tests: expected at least one subcommand");
  for (const auto& t : c.tests) {
    const auto& all = subcommands();
    require(t == "all" || std::find(all.begin(), all.end(), t) != all.end(), "tests: unknown subcommand '" + t + "'");
  }
}

void emit_field(YAML::Emitter& out, const char* key, const FieldSpec& f) {
  out << YAML::Key << key << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "name" << YAML::Value << f.name;
  out << YAML::Key << "params" << YAML::Value << YAML::BeginMap;
  for (const auto& [k, v] : f.params) out << YAML::Key << k << YAML::Value << format_double(v);
  out << YAML::EndMap << YAML::EndMap;
}

template <class T>
void emit_list(YAML::Emitter& out, const char* key, const std::vector<T>& xs) {
  out << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (const auto& x : xs) {
    if constexpr (std::is_floating_point_v<T>) {
      out << format_double(x);
    } else {
      out << x;
    }
  }
  out << YAML::EndSeq;
}

}  // namespace

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"pressure", "density", "measure", "gap", "spectrum", "stats", "ldp"};
  return names;
}

TransferOptions ExperimentConfig::transfer_options() const {
  TransferOptions o;
  o.lambda_depth = lambda_depth;
  o.rho_depth = rho_depth;
  o.measure_depth = measure_depth;
  o.atom_depth = atom_depth;
  o.base_points = base_points;
  o.seed = seed;
  return o;
}

bool ExperimentConfig::oracle_backed() const {
  if (map != "z2" || mesh.kind != "circle") return false;
  try {
    TrigPolynomial::from_spec(weight);
    TrigPolynomial::from_spec(observable);
  } catch (const ConfigError&) {
    return false;
  }
  return true;
}

ExperimentConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  ExperimentConfig c;
  if (!root || root.IsNull()) {
    validate(c);
    return c;
  }
  check_keys(root, "config",
             {"corpus", "map", "weight", "observable", "mesh", "tree", "samples", "spectral", "seed", "output",
              "tests", "threads"});
  read(root, "", "corpus", c.corpus);
  if (!c.corpus.empty()) apply_corpus(c, c.corpus);
  read(root, "", "map", c.map);
  if (root["weight"]) c.weight = read_field(root["weight"], "weight");
  if (root["observable"]) c.observable = read_field(root["observable"], "observable");
  if (const YAML::Node m = root["mesh"]) {
    check_keys(m, "mesh", {"kind", "resolution"});
    read(m, "mesh", "kind", c.mesh.kind);
    read(m, "mesh", "resolution", c.mesh.resolution);
  }
  if (const YAML::Node t = root["tree"]) {
    check_keys(t, "tree", {"lambda_depth", "rho_depth", "measure_depth", "atom_depth", "base_points"});
    read(t, "tree", "lambda_depth", c.lambda_depth);
    read(t, "tree", "rho_depth", c.rho_depth);
    read(t, "tree", "measure_depth", c.measure_depth);
    read(t, "tree", "atom_depth", c.atom_depth);
    read(t, "tree", "base_points", c.base_points);
  }
  if (const YAML::Node s = root["samples"]) {
    check_keys(s, "samples",
               {"chains", "n_values", "lil_chains", "lil_length", "asclt_length", "ldp_chains", "ldp_n",
                "ldp_epsilon", "lclt_chains", "lclt_n", "burn_in"});
    auto& o = c.samples;
    read(s, "samples", "chains", o.chains);
    read_list(s, "samples", "n_values", o.n_values);
    read(s, "samples", "lil_chains", o.lil_chains);
    read(s, "samples", "lil_length", o.lil_length);
    read(s, "samples", "asclt_length", o.asclt_length);
    read(s, "samples", "ldp_chains", o.ldp_chains);
    read(s, "samples", "ldp_n", o.ldp_n);
    read_list(s, "samples", "ldp_epsilon", o.ldp_epsilon);
    read(s, "samples", "lclt_chains", o.lclt_chains);
    read_list(s, "samples", "lclt_n", o.lclt_n);
    read(s, "samples", "burn_in", o.burn_in);
  }
  if (const YAML::Node s = root["spectral"]) {
    check_keys(s, "spectral", {"theta_max", "grid_size", "gap_n_max", "correlation_terms"});
    read(s, "spectral", "theta_max", c.spectral.theta_max);
    read(s, "spectral", "grid_size", c.spectral.grid_size);
    read(s, "spectral", "gap_n_max", c.spectral.gap_n_max);
    read(s, "spectral", "correlation_terms", c.spectral.correlation_terms);
  }
  read(root, "", "seed", c.seed);
  read(root, "", "output", c.output);
  if (const YAML::Node t = root["tests"]) {
    if (t.IsScalar()) {
      c.tests = {t.as<std::string>()};
    } else {
      read_list(root, "", "tests", c.tests);
    }
  }
  read(root, "", "threads", c.threads);
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_corpus(ExperimentConfig& config, const std::string& name) {
  const CorpusEntry e = corpus_entry(name);
  config.corpus = name;
  config.map = e.map;
  config.weight = e.weight;
  config.observable = e.observable;
  if (e.circle_system) {
    config.mesh.kind = "circle";
  } else if (config.mesh.kind == "circle") {
    config.mesh = MeshSpec{"sphere", 8};
  }
}

std::string to_yaml(const ExperimentConfig& c, bool with_runtime) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  if (!c.corpus.empty()) out << YAML::Key << "corpus" << YAML::Value << c.corpus;
  out << YAML::Key << "map" << YAML::Value << c.map;
  emit_field(out, "weight", c.weight);
  emit_field(out, "observable", c.observable);
  out << YAML::Key << "mesh" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "kind" << YAML::Value << c.mesh.kind;
  out << YAML::Key << "resolution" << YAML::Value << c.mesh.resolution;
  out << YAML::EndMap;
  out << YAML::Key << "tree" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "lambda_depth" << YAML::Value << c.lambda_depth;
  out << YAML::Key << "rho_depth" << YAML::Value << c.rho_depth;
  out << YAML::Key << "measure_depth" << YAML::Value << c.measure_depth;
  out << YAML::Key << "atom_depth" << YAML::Value << c.atom_depth;
  out << YAML::Key << "base_points" << YAML::Value << c.base_points;
  out << YAML::EndMap;
  const auto& s = c.samples;
  out << YAML::Key << "samples" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "chains" << YAML::Value << s.chains;
  emit_list(out, "n_values", s.n_values);
  out << YAML::Key << "lil_chains" << YAML::Value << s.lil_chains;
  out << YAML::Key << "lil_length" << YAML::Value << s.lil_length;
  out << YAML::Key << "asclt_length" << YAML::Value << s.asclt_length;
  out << YAML::Key << "ldp_chains" << YAML::Value << s.ldp_chains;
  out << YAML::Key << "ldp_n" << YAML::Value << s.ldp_n;
  emit_list(out, "ldp_epsilon", s.ldp_epsilon);
  out << YAML::Key << "lclt_chains" << YAML::Value << s.lclt_chains;
  emit_list(out, "lclt_n", s.lclt_n);
  out << YAML::Key << "burn_in" << YAML::Value << s.burn_in;
  out << YAML::EndMap;
  out << YAML::Key << "spectral" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "theta_max" << YAML::Value << format_double(c.spectral.theta_max);
  out << YAML::Key << "grid_size" << YAML::Value << c.spectral.grid_size;
  out << YAML::Key << "gap_n_max" << YAML::Value << c.spectral.gap_n_max;
  out << YAML::Key << "correlation_terms" << YAML::Value << c.spectral.correlation_terms;
  out << YAML::EndMap;
  out << YAML::Key << "seed" << YAML::Value << c.seed;
  emit_list(out, "tests", c.tests);
  if (with_runtime) {
    out << YAML::Key << "output" << YAML::Value << c.output;
    out << YAML::Key << "threads" << YAML::Value << c.threads;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  const std::string text = to_yaml(config, false);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("config_hash: SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

}  // namespace ruelle::harness
