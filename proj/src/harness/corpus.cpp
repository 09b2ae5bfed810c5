#include "ruelle/harness/corpus.hpp"

#include <yaml-cpp/yaml.h>

#include <fstream>

#include "ruelle/error.hpp"

namespace ruelle::harness {

std::vector<RationalMap> builtin_maps() {
  using c = cplx;
  return {
      RationalMap({c(0), c(0), c(1)}, {c(1), c(0), c(0)}, "z2"),
      RationalMap({c(-1), c(0), c(1)}, {c(1), c(0), c(0)}, "z2_minus_1"),
      RationalMap({c(0, 0.25), c(0), c(1)}, {c(1), c(0), c(0)}, "z2_plus_quarter_i"),
      RationalMap({c(1), c(0), c(1)}, {c(3), c(0), c(1)}, "rat_1_3"),
      RationalMap({c(0.5), c(0), c(1)}, {c(-0.3), c(0), c(1)}, "rat_half_m03"),
  };
}

RationalMap builtin_map(const std::string& label) {
  for (auto& m : builtin_maps()) {
    if (m.label() == label) return m;
  }
  throw ConfigError("unknown built-in map '" + label + "'");
}

std::map<std::string, FieldSpec> builtin_weights() {
  return {
      {"zero", FieldSpec{"zero", {}}},
      {"re03", FieldSpec{"cos_re", {{"amplitude", 0.3}}}},
      {"cos02", FieldSpec{"cos_re", {{"amplitude", 0.2}}}},
  };
}

std::vector<CorpusEntry> builtin_corpus() {
  std::vector<CorpusEntry> out;
  const FieldSpec cosine{"cos_re", {}};
  out.push_back({"doubling_cos", "z2", FieldSpec{"zero", {}}, cosine, true});
  out.push_back({"doubling_weighted", "z2", FieldSpec{"cos_re", {{"amplitude", 0.2}}}, cosine, true});
  for (const auto& m : builtin_maps()) {
    for (const auto& [wname, w] : builtin_weights()) {
      out.push_back({m.label() + ":" + wname, m.label(), w, cosine, m.label() == "z2"});
    }
  }
  return out;
}

CorpusEntry corpus_entry(const std::string& name) {
  for (auto& e : builtin_corpus()) {
    if (e.name == name) return e;
  }
  throw ConfigError("unknown corpus entry '" + name + "'");
}

namespace {

std::vector<cplx> read_coeffs(const YAML::Node& node) {
  std::vector<cplx> out;
  for (const auto& pair : node) {
    if (!pair.IsSequence() || pair.size() != 2) throw ConfigError("coefficient must be an [re, im] pair");
    out.emplace_back(pair[0].as<double>(), pair[1].as<double>());
  }
  return out;
}

YAML::Node write_coeffs(const std::vector<cplx>& c) {
  YAML::Node node(YAML::NodeType::Sequence);
  for (const auto& v : c) {
    YAML::Node pair(YAML::NodeType::Sequence);
    pair.push_back(v.real());
    pair.push_back(v.imag());
    pair.SetStyle(YAML::EmitterStyle::Flow);
    node.push_back(pair);
  }
  return node;
}

}  // namespace

std::vector<RationalMap> load_map_corpus(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot read map corpus '" + path + "': " + e.what());
  }
  std::vector<RationalMap> maps;
  for (const auto& entry : root) {
    try {
      const int degree = entry["degree"].as<int>();
      auto p = read_coeffs(entry["p_coeffs"]);
      auto q = read_coeffs(entry["q_coeffs"]);
      if (static_cast<int>(p.size()) != degree + 1 || static_cast<int>(q.size()) != degree + 1) {
        throw ConfigError("map corpus: coefficient count must be degree + 1");
      }
      maps.emplace_back(std::move(p), std::move(q), entry["label"] ? entry["label"].as<std::string>() : "");
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("map corpus: malformed entry: ") + e.what());
    }
  }
  return maps;
}

void save_map_corpus(const std::string& path, const std::vector<RationalMap>& maps) {
  YAML::Node root(YAML::NodeType::Sequence);
  for (const auto& m : maps) {
    YAML::Node e;
    e["label"] = m.label();
    e["degree"] = m.degree();
    e["p_coeffs"] = write_coeffs(m.p());
    e["q_coeffs"] = write_coeffs(m.q());
    root.push_back(e);
  }
  std::ofstream out(path);
  out << YAML::Dump(root) << "\n";
}

std::map<std::string, ScalarField> load_weight_corpus(const std::string& path) {
  YAML::Node root;
  try {
    root = YAML::LoadFile(path);
  } catch (const YAML::Exception& e) {
    throw ConfigError("cannot read weight corpus '" + path + "': " + e.what());
  }
  std::map<std::string, ScalarField> out;
  for (const auto& entry : root) {
    try {
      const auto label = entry["label"].as<std::string>();
      if (entry["mesh"]) {
        const auto kind = entry["mesh"]["kind"].as<std::string>();
        const int res = entry["mesh"]["resolution"].as<int>();
        auto mesh = kind == "circle" ? Mesh::circle(res) : Mesh::sphere(res);
        auto values = entry["values"].as<std::vector<double>>();
        out.emplace(label, ScalarField::sampled(mesh, std::move(values), label));
      } else {
        std::map<std::string, double> params;
        if (entry["params"]) params = entry["params"].as<std::map<std::string, double>>();
        out.emplace(label, make_field(entry["name"].as<std::string>(), params).with_label(label));
      }
    } catch (const YAML::Exception& e) {
      throw ConfigError(std::string("weight corpus: malformed entry: ") + e.what());
    }
  }
  return out;
}

void save_sampled_weight(const std::string& path, const std::string& label, const ScalarField& field) {
  if (field.kind() != ScalarField::Kind::mesh_sampled || field.is_complex()) {
    throw InputError("save_sampled_weight: field must be real and mesh-sampled");
  }
  YAML::Node root(YAML::NodeType::Sequence);
  YAML::Node e;
  e["label"] = label;
  e["mesh"]["kind"] = field.mesh()->kind() == Mesh::Kind::circle ? "circle" : "sphere_two_chart";
  e["mesh"]["resolution"] = field.mesh()->resolution();
  YAML::Node values(YAML::NodeType::Sequence);
  for (double v : field.real_samples()) values.push_back(v);
  values.SetStyle(YAML::EmitterStyle::Flow);
  e["values"] = values;
  root.push_back(e);
  YAML::Emitter emitter;
  emitter.SetDoublePrecision(17);
  emitter << root;
  std::ofstream out(path);
  out << emitter.c_str() << "\n";
}

}  // namespace ruelle::harness
