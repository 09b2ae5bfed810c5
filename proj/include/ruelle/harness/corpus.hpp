#pragma once

#include <map>
#include <string>
#include <vector>

#include "ruelle/rational_map.hpp"
#include "ruelle/scalar_field.hpp"

namespace ruelle::harness {

/// Closed-form field reference: registered name plus parameters.
struct FieldSpec {
  std::string name = "zero";
  std::map<std::string, double> params;

  ScalarField build() const { return make_field(name, params); }
};

/// Built-in maps: z2 (z^2), z2_minus_1, z2_plus_quarter_i, rat_1_3
/// ((z^2+1)/(z^2+3)), rat_half_m03 ((z^2+0.5)/(z^2-0.3)).
std::vector<RationalMap> builtin_maps();
RationalMap builtin_map(const std::string& label);

/// Built-in weights: zero, re03 (0.3 Re z), cos02 (0.2 cos angle). On the
/// unit circle Re z and cos angle coincide; off the circle both use the
/// bounded sphere coordinate X.
std::map<std::string, FieldSpec> builtin_weights();

/// A named experiment: map, weight, observable, and whether the exact
/// circle oracle applies (f = z^2 with circle-supported dynamics).
struct CorpusEntry {
  std::string name;
  std::string map;
  FieldSpec weight;
  FieldSpec observable;
  bool circle_system = false;
};

/// doubling_cos, doubling_weighted (phi = 0.2 cos), and "<map>:<weight>" for
/// every built-in map and weight.
std::vector<CorpusEntry> builtin_corpus();
CorpusEntry corpus_entry(const std::string& name);

/// Reads a map corpus file (YAML list of {label, degree, p_coeffs, q_coeffs}
/// with coefficients as [re, im] pairs).
std::vector<RationalMap> load_map_corpus(const std::string& path);
void save_map_corpus(const std::string& path, const std::vector<RationalMap>& maps);

/// Reads a weight corpus file: YAML list of {label, name, params} entries
/// for closed-form fields, or {label, mesh: {kind, resolution}, values: [...]}
/// for mesh-sampled fields.
std::map<std::string, ScalarField> load_weight_corpus(const std::string& path);
void save_sampled_weight(const std::string& path, const std::string& label, const ScalarField& field);

}  // namespace ruelle::harness
