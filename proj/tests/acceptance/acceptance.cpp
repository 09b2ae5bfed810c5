// One line per acceptance criterion; exit status 1 if any criterion fails.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "ruelle/error.hpp"
#include "ruelle/harness/config.hpp"
#include "ruelle/harness/corpus.hpp"
#include "ruelle/harness/fourier_oracle.hpp"
#include "ruelle/harness/run.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/spectral.hpp"
#include "ruelle/stats/monte_carlo.hpp"
#include "ruelle/stats/operator_route.hpp"

using namespace ruelle;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

ScalarField cosine(double amplitude = 1.0) { return make_field("cos_re", {{"amplitude", amplitude}}); }

std::unique_ptr<TransferContext> doubling(double amplitude, int resolution, TransferOptions opts = {}) {
  auto ctx = std::make_unique<TransferContext>(harness::builtin_map("z2"),
                                               amplitude == 0.0 ? ScalarField() : cosine(amplitude),
                                               Mesh::circle(resolution), opts);
  ctx->calibrate();
  return ctx;
}

ScalarField doubling_coboundary() { return make_field("cos_mode", {{"m", 2}}) - make_field("cos_mode"); }

double sample_variance(const std::vector<double>& xs) {
  double m = 0.0, s = 0.0;
  for (double x : xs) m += x;
  m /= xs.size();
  for (double x : xs) s += (x - m) * (x - m);
  return s / (xs.size() - 1);
}

// 1. lambda = d and rho = 1 for phi = 0 at tree depth 10.
Verdict exact_thermodynamics() {
  TransferOptions o;
  o.lambda_depth = 10;
  o.rho_depth = 10;
  o.measure_depth = 10;
  o.atom_depth = 10;
  double lam = 0.0, rho = 0.0;
  for (const auto& f : harness::builtin_maps()) {
    const bool circle = f.label() == "z2";
    TransferContext ctx(f, ScalarField(), circle ? Mesh::circle(64) : Mesh::sphere(8), o);
    ctx.calibrate();
    lam = std::max(lam, std::abs(ctx.lambda() - f.degree()));
    for (const auto& p : ctx.mesh().nodes()) rho = std::max(rho, std::abs(ctx.rho()(p) - 1.0));
  }
  return {lam <= 1e-10 && rho <= 1e-10,
          "max|lambda - d| = " + fmt("%.2e", lam) + ", max|rho - 1| = " + fmt("%.2e", rho) + " over " + std::to_string(harness::builtin_maps().size()) + " maps"};
}

// 2. Depth-16 preimages of z^2 are uniform; weighted first moment matches the oracle.
Verdict preimage_equidistribution() {
  const auto flat = doubling(0.0, 64);
  const EmpiricalMeasure atoms = estimate_conformal_measure(*flat, SpherePoint::on_circle(0.3), 16);
  std::vector<double> angles;
  for (const auto& a : atoms.atoms) angles.push_back(a.point.angle());
  const double ks = stats::ks_distance(angles, [](double t) { return (t + kPi) / (2.0 * kPi); });

  const auto weighted = doubling(0.2, 64);
  const EmpiricalMeasure m = estimate_conformal_measure(*weighted, SpherePoint::on_circle(0.3), 16);
  const double moment = m.expectation(cosine());
  const harness::FourierOracle oracle(harness::TrigPolynomial::cosine(1, 0.2));
  const double expected =
      harness::oracle_spectrum(oracle, 0.0, harness::TrigPolynomial::constant(0.0)).conformal_moments[1].real();
  const double gap = std::abs(moment - expected);
  return {ks <= 0.01 && gap <= 1e-4, "KS = " + fmt("%.2e", ks) + " (<= 0.01), |<m,cos> - oracle| = " + fmt("%.2e", gap) +
                                         " (<= 1e-4)"};
}

// 3. Perturbed-operator and strong-coding identities on 50 random instances.
Verdict identities() {
  const auto ctx = doubling(0.2, 128);
  const PerturbedFamily fam(*ctx, cosine());
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> depth(1, 10);
  const ScalarField h = ScalarField::constant(1.0) + cosine(0.5);
  double worst_identity = 0.0, worst_coding = 0.0;
  for (int i = 0; i < 50; ++i) {
    const cplx theta(u(rng), u(rng));
    const int n = depth(rng);
    const SpherePoint y = SpherePoint::on_circle(kPi * u(rng));
    const cplx lhs = twisted_series(*ctx, fam.observable(), theta, h, y, n).back();
    worst_identity =
        std::max(worst_identity, perturbed_identity_check(fam, theta, h, y, n) / std::max(1.0, std::abs(lhs)));
  }
  for (int i = 0; i < 50; ++i) {
    std::vector<double> t(8);
    for (auto& x : t) x = u(rng);
    worst_coding = std::max(worst_coding, stats::asip_strong_coding_check(fam, t, 6).discrepancy);
  }
  return {worst_identity <= 1e-10 && worst_coding <= 1e-10,
          "perturbed identity " + fmt("%.2e", worst_identity) + ", strong coding " + fmt("%.2e", worst_coding) +
              " (<= 1e-10)"};
}

// 4. Green-Kubo, alpha'' and Var(S_n)/n agree on doubling + cos.
Verdict variance_triangle() {
  const auto ctx = doubling(0.0, 256);
  const double gk = stats::green_kubo_variance(*ctx, cosine(), 12).sigma2;
  const double a2 = alpha_derivatives(PerturbedFamily(*ctx, cosine())).alpha2;
  const auto s = stats::birkhoff_sums(*ctx, cosine(), {2048}, 10000, 1);
  const double mc = sample_variance(s.column(0)) / 2048.0;
  const bool ok = std::abs(gk - 0.5) <= 1e-6 && std::abs(a2 - 0.5) <= 0.005 && std::abs(mc - 0.5) <= 0.01;
  return {ok, "Green-Kubo " + fmt("%.10f", gk) + ", alpha'' " + fmt("%.6f", a2) + ", Var(S_2048)/2048 " +
                  fmt("%.4f", mc) + " (10^4 chains)"};
}

// 5. KS(2048) at 10^4 chains and the KS quadrupling ratio at 10^5 chains.
Verdict clt_berry_esseen() {
  const auto ctx = doubling(0.0, 256);
  const double sigma = std::sqrt(0.5);
  const auto s = stats::birkhoff_sums(*ctx, cosine(), {64, 256, 1024, 2048, 4096}, 100000, 5);
  const std::size_t k2048 = 3;
  std::vector<double> first;
  for (std::size_t c = 0; c < 10000; ++c) first.push_back(s.at(c, k2048) / std::sqrt(2048.0));
  const double ks2048 = stats::ks_normal(first, sigma);
  std::vector<double> ks;
  for (std::size_t k : {0, 1, 2, 4}) {
    auto col = s.column(k);
    const double scale = std::sqrt(static_cast<double>(s.n_values[k]));
    for (auto& x : col) x /= scale;
    ks.push_back(stats::ks_normal(col, sigma));
  }
  const double ratio = stats::median({ks[1] / ks[0], ks[2] / ks[1], ks[3] / ks[2]});
  return {ks2048 <= 0.02 && ratio >= 0.3 && ratio <= 0.8,
          "KS(2048) = " + fmt("%.4f", ks2048) + " (<= 0.02); median KS(4n)/KS(n) = " + fmt("%.3f", ratio) +
              " in [0.3, 0.8]; KS(64..4096) = " + fmt("%.4f", ks[0]) + "," + fmt("%.4f", ks[1]) + "," +
              fmt("%.4f", ks[2]) + "," + fmt("%.4f", ks[3])};
}

// 6. Sup-norm decay of the Lipschitz probes and of the dyadic tail.
Verdict spectral_gap() {
  double beta = 0.0, r2 = 1.0;
  for (double amp : {0.0, 0.1}) {
    const auto ctx = doubling(amp, 32);
    std::vector<ScalarField> family;
    for (const char* name : {"chord_to_one", "abs_sin", "pos_cos"}) family.push_back(center_conformal(*ctx, make_field(name)));
    const GapReport r = spectral_gap_rate(*ctx, family, 14);
    beta = std::max(beta, r.max_beta);
    r2 = std::min(r2, r.min_r_squared);
  }
  const auto ctx = doubling(0.0, 32);
  const GapReport d = spectral_gap_rate(*ctx, {center_conformal(*ctx, make_field("dyadic_tail", {{"terms", 24}}))}, 14);
  double oracle_gap = 0.0;
  for (int n = 1; n <= 10; ++n) {
    oracle_gap = std::max(oracle_gap, std::abs(d.observables[0].series[n] - std::pow(0.5, n) * (2.0 - std::pow(0.5, 23 - n))));
  }
  const bool ok = beta <= 0.8 && r2 >= 0.95 && std::abs(d.max_beta - 0.5) <= 0.05 && oracle_gap <= 1e-5;
  return {ok, "Lipschitz beta " + fmt("%.3f", beta) + " (<= 0.8), R^2 " + fmt("%.4f", r2) + " (>= 0.95); dyadic beta " +
                  fmt("%.4f", d.max_beta) + ", max deviation from exact decay " + fmt("%.1e", oracle_gap)};
}

// 7. Empirical large-deviation rate at eps = 0.2, n = 50, 10^6 chains.
Verdict large_deviations() {
  const auto ctx = doubling(0.0, 128);
  const harness::FourierOracle oracle(harness::TrigPolynomial::constant(0.0));
  const auto g = harness::TrigPolynomial::cosine(1);
  const double c02 = harness::oracle_legendre(oracle, g, 0.2);
  const double eps_max = harness::oracle_log_alpha(oracle, g, 2.0) / 2.0;
  const auto res = stats::ldp_empirical(
      *ctx, cosine(), [&](double e) { return harness::oracle_legendre(oracle, g, e); }, eps_max, {0.2}, 50, 1000000, 7);
  const PerturbedFamily fam(*ctx, cosine());
  const RateFunction rf = rate_function(fam, 1.0, 41);
  double min_second = INFINITY;
  for (std::size_t i = 1; i + 1 < rf.lambda.size(); ++i) {
    min_second = std::min(min_second, rf.lambda[i + 1] - 2.0 * rf.lambda[i] + rf.lambda[i - 1]);
  }
  const double c0 = std::abs(rf.legendre(0.0));
  const auto& p = res.points[0];
  const bool ok = p.relative_deviation <= 0.2 && c0 <= 1e-12 && min_second >= -1e-8;
  return {ok, "empirical rate " + fmt("%.5f", p.empirical_rate) + " vs -c(0.2) = " + fmt("%.5f", -c02) + " (relative " +
                  fmt("%.3f", p.relative_deviation) + ", <= 0.2); |c(0)| = " + fmt("%.1e", c0) +
                  ", min second difference " + fmt("%.2e", min_second)};
}

// 8. Local limit correction shrinks from n = 256 to n = 4096; coboundary rejected.
Verdict local_clt() {
  const auto ctx = doubling(0.0, 128);
  const PerturbedFamily fam(*ctx, cosine());
  const auto r = stats::lclt_statistic(fam, std::sqrt(0.5), {256, 4096}, {0.0, 1.0, 2.0}, 200000, 8);
  bool flagged = false;
  try {
    stats::lclt_statistic(PerturbedFamily(*ctx, doubling_coboundary()), 0.1, {256, 4096}, {0.0}, 10, 8);
  } catch (const CocycleFlagged&) {
    flagged = true;
  }
  return {r.report.statistic <= 0.5 && flagged,
          "max|A_4096| / max|A_256| = " + fmt("%.4f", r.max_abs[1]) + " / " + fmt("%.4f", r.max_abs[0]) + " = " +
              fmt("%.3f", r.report.statistic) + " (<= 0.5); coboundary " + (flagged ? "flagged" : "NOT flagged")};
}

// 9. Constructed coboundary round-trips and its cocycle does not contract.
Verdict coboundaries() {
  const auto ctx = doubling(0.0, 256);
  const ScalarField g = doubling_coboundary();
  const auto cb = stats::coboundary_solve(*ctx, g, 14);
  const double s2 = stats::green_kubo_variance(*ctx, g, 12).sigma2;
  const auto cocycle = cocycle_test(PerturbedFamily(*ctx, g), {1.0}, 40);
  const bool flagged = cocycle[0].verdict == CocycleVerdict::non_contracting;
  return {cb.is_coboundary && cb.residual <= 1e-6 && std::abs(s2) <= 1e-3 && flagged,
          "residual " + fmt("%.2e", cb.residual) + " (<= 1e-6), sigma^2 " + fmt("%.2e", s2) + " (<= 1e-3), cocycle rate " +
              fmt("%.4f", cocycle[0].rate) + " at t = 1 (" + to_string(cocycle[0].verdict) + ")"};
}

// 10. Gordin tail ratios against the fitted sup-norm rate.
Verdict gordin() {
  const auto ctx = doubling(0.0, 256);
  const ScalarField probe = center_equilibrium(*ctx, make_field("pos_cos")).field;
  const double beta = spectral_gap_rate(*ctx, {center_conformal(*ctx, make_field("pos_cos"))}, 14).max_beta;
  const auto tail = stats::gordin_tail(*ctx, probe, 14);
  const auto zero = stats::gordin_tail(*ctx, cosine(), 14);
  const bool ok = tail.convergent && tail.limiting_ratio <= beta * beta + 0.05 && zero.exact_zero;
  return {ok, "pos_cos ratio " + fmt("%.4f", tail.limiting_ratio) + " (<= beta^2 + 0.05 = " +
                  fmt("%.4f", beta * beta + 0.05) + "); doubling + cos terms " + (zero.exact_zero ? "exactly 0" : "NONZERO")};
}

// 11. LIL and ASCLT diagnostics at n = 10^6.
Verdict lil_asclt() {
  const auto ctx = doubling(0.0, 128);
  const double sigma = std::sqrt(0.5);
  const auto lil = stats::lil_diagnostic(*ctx, cosine(), sigma, 100, 16, 1000000, 11);
  std::vector<double> probes;
  for (double t : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) probes.push_back(t * sigma);
  const auto asclt = stats::asclt_diagnostic(*ctx, cosine(), sigma, probes, 1000000, 11);
  return {lil.report.pass && asclt.max_deviation <= 0.1,
          "LIL median " + fmt("%.3f", lil.median) + " in [0.6, 1.4]; ASCLT max deviation " +
              fmt("%.4f", asclt.max_deviation) + " (<= 0.1)"};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// 12. Same seed, different thread counts: byte-identical artifacts.
Verdict determinism() {
  auto a = harness::parse_config(
      "corpus: doubling_weighted\ntests: [pressure, density, spectrum, stats, ldp]\nmesh: {resolution: 64}\n"
      "samples: {chains: 2000, n_values: [16, 64, 256], lil_chains: 8, lil_length: 2000, asclt_length: 2000,"
      " ldp_chains: 20000, ldp_n: 10, ldp_epsilon: [0.1], lclt_chains: 2000, lclt_n: [16, 64]}\n"
      "spectral: {grid_size: 21, correlation_terms: 10}\nseed: 12");
  const fs::path root = fs::temp_directory_path() / "ruelle_acceptance_determinism";
  fs::remove_all(root);
  std::vector<harness::RunOutcome> outcomes;
  for (int threads : {1, 2, 4}) {
    auto c = a;
    c.threads = threads;
    c.output = (root / std::to_string(threads)).string();
    outcomes.push_back(harness::run(c));
  }
  std::size_t compared = 0, differing = 0;
  for (const auto& f : outcomes[0].artifacts) {
    if (f == "manifest.json") continue;
    const std::string ref = slurp(root / "1" / f);
    for (const char* t : {"2", "4"}) {
      ++compared;
      if (slurp(root / t / f) != ref) ++differing;
    }
  }
  const bool ran = outcomes[0].exit_code != harness::kNumericalFailure && !outcomes[0].artifacts.empty();
  fs::remove_all(root);
  return {ran && differing == 0, std::to_string(compared) + " artifact comparisons across 1/2/4 threads, " +
                                     std::to_string(differing) + " differing"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance checks"};
  std::set<int> only;
  int threads = 1;
  app.add_option("--only", only, "Run only these criteria (1-12)");
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);
  set_thread_count(threads);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"exact thermodynamics", exact_thermodynamics},
      {"preimage equidistribution", preimage_equidistribution},
      {"perturbed-operator and strong-coding identities", identities},
      {"variance triangle", variance_triangle},
      {"CLT and Berry-Esseen", clt_berry_esseen},
      {"spectral-gap proxy", spectral_gap},
      {"large deviations", large_deviations},
      {"local limit theorem", local_clt},
      {"coboundaries", coboundaries},
      {"Gordin condition", gordin},
      {"LIL and ASCLT diagnostics", lil_asclt},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && !only.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("criterion %2d %s  %s: %s [%.1f s]\n", id, v.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                v.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
