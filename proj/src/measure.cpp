#include "ruelle/measure.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "ruelle/error.hpp"
#include "ruelle/io.hpp"
#include "ruelle/rng.hpp"

namespace ruelle {

double EmpiricalMeasure::total_weight() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

void EmpiricalMeasure::normalize() {
  const double total = total_weight();
  if (!(total > 0.0)) throw NumericalError("EmpiricalMeasure: total weight is not positive");
  for (auto& a : atoms) a.weight /= total;
  normalized = true;
}

double EmpiricalMeasure::expectation(const ScalarField& g) const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight * g(a.point);
  return normalized ? s : s / total_weight();
}

cplx EmpiricalMeasure::expectation_complex(const ScalarField& g) const {
  cplx s = 0.0;
  for (const auto& a : atoms) s += a.weight * g.complex_at(a.point);
  return normalized ? s : s / total_weight();
}

EmpiricalMeasure EmpiricalMeasure::resample(std::size_t count, std::uint64_t seed) const {
  if (count == 0 || atoms.empty()) throw PreconditionViolation("resample: empty measure or zero count");
  // Systematic resampling over a shuffled order: tree-ordered atoms are
  // periodic in their branch index and a fixed stride would alias with it.
  StreamRng rng(seed, 0);
  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  const double total = total_weight();
  const double step = total / static_cast<double>(count);
  double target = rng.uniform() * step;
  std::vector<std::size_t> picked;
  picked.reserve(count);
  double cumulative = 0.0;
  std::size_t i = 0;
  for (std::size_t k = 0; k < count; ++k) {
    while (i + 1 < order.size() && cumulative + atoms[order[i]].weight <= target) {
      cumulative += atoms[order[i]].weight;
      ++i;
    }
    picked.push_back(order[i]);
    target += step;
  }
  std::sort(picked.begin(), picked.end());
  EmpiricalMeasure out;
  out.atoms.reserve(count);
  out.raw_mass = raw_mass;
  out.normalized = normalized;
  for (std::size_t idx : picked) out.atoms.push_back({atoms[idx].point, step});
  return out;
}

void EmpiricalMeasure::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << "re,im,weight,chart_id\n";
  for (const auto& a : atoms) {
    const bool chart0 = std::abs(a.point.z0()) <= std::abs(a.point.z1());
    const cplx c = chart0 ? a.point.z0() / a.point.z1() : a.point.z1() / a.point.z0();
    out << format_double(c.real()) << ',' << format_double(c.imag()) << ',' << format_double(a.weight) << ','
        << (chart0 ? 0 : 1) << '\n';
  }
}

}  // namespace ruelle
