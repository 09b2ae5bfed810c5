#include "ruelle/harness/run.hpp"

#include <openssl/opensslv.h>
#include <yaml-cpp/yaml.h>

#include <Eigen/Core>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "ruelle/error.hpp"
#include "ruelle/harness/fourier_oracle.hpp"
#include "ruelle/io.hpp"
#include "ruelle/parallel.hpp"
#include "ruelle/rng.hpp"
#include "ruelle/spectral.hpp"
#include "ruelle/stats/monte_carlo.hpp"
#include "ruelle/stats/operator_route.hpp"

namespace ruelle::harness {

namespace fs = std::filesystem;
using stats::StatReport;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : out_(path) {
    if (!out_) throw Error("cannot write " + path.string());
    out_ << header << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

 private:
  static std::string cell(double v) { return format_double(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  std::ofstream out_;
};

StatReport make_report(const std::string& test, const std::string& route, double lower, double upper) {
  StatReport r;
  r.test = test;
  r.route = route;
  r.lower = lower;
  r.upper = upper;
  return r;
}

class Runner {
 public:
  Runner(const ExperimentConfig& c, RunOutcome& out) : c_(c), out_(out), dir_(c.output) {}

  void pressure() {
    const TransferContext& ctx = context();
    const auto& est = ctx.report().lambda;
    {
      CsvWriter csv(file("pressure.csv"), "method,lambda");
      if (est.ratio) csv.row(std::string("ratio"), *est.ratio);
      if (est.root) csv.row(std::string("root"), *est.root);
      if (est.mesh_power) csv.row(std::string("mesh_power"), *est.mesh_power);
      csv.row(std::string("reported"), est.value);
    }
    StatReport r = make_report("pressure", "tree", -INFINITY, INFINITY);
    r.add("lambda", ctx.lambda());
    r.add("pressure", pressure_of(ctx));
    if (oracle_) {
      const double lo = oracle_lambda(*oracle_);
      r.add("oracle_lambda", lo);
      r.upper = 1e-8;
      r.judge(std::abs(ctx.lambda() - lo) / lo);
    } else {
      r.judge(pressure_of(ctx));
    }
    push(r);
  }

  void density() {
    const TransferContext& ctx = context();
    const Mesh& mesh = ctx.mesh();
    double oracle_gap = 0.0;
    {
      CsvWriter csv(file("density.csv"), "node,x,y,height,rho");
      for (std::size_t j = 0; j < mesh.size(); ++j) {
        const SpherePoint& p = mesh.node(j);
        const double rho = ctx.rho()(p);
        csv.row(j, p.x(), p.y(), p.height(), rho);
        if (oracle_) oracle_gap = std::max(oracle_gap, std::abs(rho - oracle_density(*oracle_, p.angle())));
      }
    }
    StatReport r = make_report("density", "tree", 0.0, 1e-6);
    r.add("rho_residual", ctx.report().rho_residual);
    r.add("rho_mass", ctx.report().rho_mass);
    r.judge(ctx.report().normalization_defect);
    push(r);
    if (oracle_) {
      StatReport o = make_report("density_oracle", "tree", 0.0, 1e-6);
      o.judge(oracle_gap);
      push(o);
    }
  }

  void measure() {
    const TransferContext& ctx = context();
    ctx.conformal_measure().write_csv(file("measure.csv").string());
    const auto e = conformal_expectation(ctx, make_field("cos_re"));
    StatReport r = make_report("conformal_first_moment", "tree", -INFINITY, INFINITY);
    r.add("moment", e.value);
    r.add("change", e.change);
    if (oracle_) {
      const auto s = oracle_spectrum(*oracle_, 0.0, TrigPolynomial::constant(0.0));
      r.add("oracle_moment", s.conformal_moments[1].real());
      r.lower = 0.0;
      r.upper = 1e-4;
      r.judge(std::abs(e.value - s.conformal_moments[1].real()));
    } else {
      r.judge(e.value);
    }
    push(r);
  }

  void gap() {
    const TransferContext& ctx = context();
    std::vector<ScalarField> family;
    for (const char* name : {"chord_to_one", "abs_sin", "pos_cos"}) family.push_back(center_conformal(ctx, make_field(name)));
    const GapReport g = spectral_gap_rate(ctx, family, c_.spectral.gap_n_max);
    {
      CsvWriter csv(file("gap.csv"), "label,n,value");
      for (const auto& o : g.observables) {
        for (std::size_t n = 0; n < o.series.size(); ++n) csv.row(o.label, n, o.series[n]);
      }
    }
    StatReport r = make_report("spectral_gap", "tree", 0.0, 0.8);
    r.add("min_r_squared", g.min_r_squared);
    r.judge(g.max_beta);
    r.pass = r.pass && g.min_r_squared >= 0.95;
    push(r);
  }

  void spectrum() {
    const PerturbedFamily& fam = family();
    const AlphaDerivatives d = alpha_derivatives(fam);
    StatReport a = make_report("alpha2", "collocation", 0.0, INFINITY);
    a.add("alpha1", d.alpha1);
    a.add("richardson_error", d.richardson_error);
    if (oracle_) {
      const double s2 = oracle_spectrum(*oracle_, 0.0, oracle_observable()).sigma2;
      a.add("oracle_sigma2", s2);
      a.add("alpha2", d.alpha2);
      a.upper = 0.01;
      a.judge(std::abs(d.alpha2 - s2) / s2);
    } else {
      a.judge(d.alpha2);
    }
    push(a);

    const RateFunction rf = rate_function(fam, c_.spectral.theta_max, c_.spectral.grid_size);
    rf.write_csv(file("lambda.csv").string(), file("legendre.csv").string());
    artifacts({"lambda.csv", "legendre.csv"});
    double min_second = INFINITY;
    for (std::size_t i = 1; i + 1 < rf.lambda.size(); ++i) {
      min_second = std::min(min_second, rf.lambda[i + 1] - 2.0 * rf.lambda[i] + rf.lambda[i - 1]);
    }
    StatReport r = make_report("rate_function", "collocation", 0.0, 1e-12);
    r.add("min_second_difference", min_second);
    r.judge(std::abs(rf.legendre(0.0)));
    r.pass = r.pass && min_second >= -1e-8;
    push(r);
  }

  void stats_suite() {
    const TransferContext& ctx = context();
    const ScalarField g = centered_observable();
    const auto gk = stats::green_kubo_variance(ctx, g, c_.spectral.correlation_terms);
    push(gk.report);
    if (oracle_) {
      const double s2 = oracle_spectrum(*oracle_, 0.0, oracle_observable()).sigma2;
      StatReport o = make_report("green_kubo_oracle", "operator", 0.0, 1e-6);
      o.add("oracle_sigma2", s2);
      o.judge(std::abs(gk.sigma2 - s2));
      push(o);
    }
    const auto gordin = stats::gordin_tail(ctx, g, c_.spectral.correlation_terms);
    StatReport gr = make_report("gordin", "operator", 0.0, 1.0);
    gr.add("exact_zero", gordin.exact_zero ? 1.0 : 0.0);
    gr.judge(gordin.limiting_ratio);
    gr.pass = gr.pass && gordin.convergent;
    push(gr);

    if (!(gk.sigma2 > 1e-8)) {
      StatReport d = make_report("degenerate_variance", "operator", 1e-8, INFINITY);
      d.judge(gk.sigma2);
      push(d);
      return;
    }
    const double sigma = std::sqrt(gk.sigma2);
    const stats::ChainOptions chains{c_.samples.burn_in};
    const auto sample = stats::birkhoff_sums(ctx, g, c_.samples.n_values, c_.samples.chains, seed(1), chains);
    sample.write_csv(file("birkhoff.csv").string());
    push(stats::clt_test(sample, sigma));

    const std::vector<double> last = sample.column(sample.n_values.size() - 1);
    double m = 0.0, v = 0.0;
    for (double x : last) m += x;
    m /= last.size();
    for (double x : last) v += (x - m) * (x - m);
    v /= (last.size() - 1) * static_cast<double>(sample.n_values.back());
    StatReport var = make_report("variance_triangle", "monte_carlo", 0.0, 0.02);
    var.add("sample_variance", v);
    var.add("green_kubo", gk.sigma2);
    var.judge(std::abs(v - gk.sigma2) / gk.sigma2);
    push(var);

    try {
      push(stats::berry_esseen_rate(sample, sigma).report);
    } catch (const NoiseFloorReached& e) {
      StatReport be = make_report("berry_esseen", "monte_carlo", -0.75, -0.3);
      be.judge(NAN);
      be.add("noise_floor", 0.87 / std::sqrt(static_cast<double>(sample.num_chains)));
      push(be);
    } catch (const PreconditionViolation&) {
      // n-values too narrow for a rate; the CLT report above still applies.
    }

    push(stats::lil_diagnostic(ctx, g, sigma, c_.samples.lil_chains, 16, c_.samples.lil_length, seed(2), chains)
             .report);
    std::vector<double> probes;
    for (double t : {-1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 1.5}) probes.push_back(t * sigma);
    push(stats::asclt_diagnostic(ctx, g, sigma, probes, c_.samples.asclt_length, seed(3), 0, 0.1, chains).report);

    if (c_.samples.lclt_chains > 0) {
      stats::LcltOptions lo;
      lo.chains = chains;
      try {
        push(stats::lclt_statistic(family(), sigma, c_.samples.lclt_n, {0.0, 1.0, 2.0}, c_.samples.lclt_chains,
                                   seed(4), lo)
                 .report);
      } catch (const CocycleFlagged&) {
        StatReport l = make_report("lclt", "monte_carlo", 0.0, 0.5);
        l.add("cocycle_flagged", 1.0);
        l.judge(NAN);
        push(l);
      }
    }
  }

  void ldp() {
    const TransferContext& ctx = context();
    const ScalarField g = centered_observable();
    stats::LdpResult res;
    const stats::ChainOptions chains{c_.samples.burn_in};
    if (oracle_) {
      const TrigPolynomial go = oracle_observable();
      const double theta_max = c_.spectral.theta_max;
      const double eps_max = oracle_log_alpha(*oracle_, go, theta_max) / theta_max;
      const FourierOracle& o = *oracle_;
      res = stats::ldp_empirical(
          ctx, g, [&](double e) { return oracle_legendre(o, go, e, 4.0 * theta_max); }, eps_max,
          c_.samples.ldp_epsilon, c_.samples.ldp_n, c_.samples.ldp_chains, seed(5), 0.2, chains);
      res.report.route = "monte_carlo+oracle";
    } else {
      const RateFunction rf = rate_function(family(), c_.spectral.theta_max, c_.spectral.grid_size);
      res = stats::ldp_empirical(ctx, g, rf, c_.samples.ldp_epsilon, c_.samples.ldp_n, c_.samples.ldp_chains,
                                 seed(5), 0.2, chains);
    }
    {
      CsvWriter csv(file("ldp.csv"), "epsilon,probability,empirical_rate,predicted_rate");
      for (const auto& p : res.points) csv.row(p.epsilon, p.probability, p.empirical_rate, p.predicted_rate);
    }
    push(res.report);
  }

 private:
  const TransferContext& context() {
    if (!ctx_) {
      const auto mesh = c_.mesh.kind == "circle" ? Mesh::circle(c_.mesh.resolution) : Mesh::sphere(c_.mesh.resolution);
      ctx_ = std::make_unique<TransferContext>(builtin_map(c_.map), c_.weight.build(), mesh, c_.transfer_options());
      ctx_->calibrate();
      if (c_.oracle_backed()) oracle_.emplace(TrigPolynomial::from_spec(c_.weight));
    }
    return *ctx_;
  }

  const PerturbedFamily& family() {
    if (!fam_) fam_ = std::make_unique<PerturbedFamily>(context(), c_.observable.build());
    return *fam_;
  }

  ScalarField centered_observable() { return center_equilibrium(context(), c_.observable.build()).field; }
  TrigPolynomial oracle_observable() const { return TrigPolynomial::from_spec(c_.observable); }

  static double pressure_of(const TransferContext& ctx) { return std::log(ctx.lambda()); }

  std::uint64_t seed(std::uint64_t tag) const { return mix64(c_.seed ^ mix64(tag)); }

  fs::path file(const std::string& name) {
    artifacts({name});
    return dir_ / name;
  }

  void artifacts(std::initializer_list<std::string> names) {
    for (const auto& n : names) {
      if (std::find(out_.artifacts.begin(), out_.artifacts.end(), n) == out_.artifacts.end()) out_.artifacts.push_back(n);
    }
  }

  void push(const StatReport& r) { out_.reports.push_back(r); }

  const ExperimentConfig& c_;
  RunOutcome& out_;
  fs::path dir_;
  std::unique_ptr<TransferContext> ctx_;
  std::unique_ptr<PerturbedFamily> fam_;
  std::optional<FourierOracle> oracle_;
};

nlohmann::ordered_json versions() {
  nlohmann::ordered_json v;
  v["ruelle"] = "0.1.0";
  v["compiler"] = __VERSION__;
  v["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
               std::to_string(EIGEN_MINOR_VERSION);
  v["openssl"] = OPENSSL_VERSION_TEXT;
  v["nlohmann_json"] = std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                       "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH);
  return v;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

}  // namespace

nlohmann::ordered_json to_json(const StatReport& r) {
  nlohmann::ordered_json j;
  j["test"] = r.test;
  j["route"] = r.route;
  j["statistic"] = r.statistic;
  j["lower"] = std::isfinite(r.lower) ? nlohmann::ordered_json(r.lower) : nlohmann::ordered_json(nullptr);
  j["upper"] = std::isfinite(r.upper) ? nlohmann::ordered_json(r.upper) : nlohmann::ordered_json(nullptr);
  j["pass"] = r.pass;
  nlohmann::ordered_json values = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.values) values[k] = v;
  j["values"] = values;
  nlohmann::ordered_json sizes = nlohmann::ordered_json::object();
  for (const auto& [k, v] : r.sample_sizes) sizes[k] = v;
  j["sample_sizes"] = sizes;
  return j;
}

RunOutcome run(const ExperimentConfig& config) {
  RunOutcome out;
  const fs::path dir(config.output);
  fs::create_directories(dir);
  const int saved_threads = thread_count();
  set_thread_count(config.threads);

  std::vector<std::string> selected;
  for (const auto& name : subcommands()) {
    for (const auto& t : config.tests) {
      if (t == "all" || t == name) {
        selected.push_back(name);
        break;
      }
    }
  }

  Runner runner(config, out);
  const auto t_all = Clock::now();
  for (const auto& name : selected) {
    const auto t0 = Clock::now();
    try {
      if (name == "pressure") runner.pressure();
      if (name == "density") runner.density();
      if (name == "measure") runner.measure();
      if (name == "gap") runner.gap();
      if (name == "spectrum") runner.spectrum();
      if (name == "stats") runner.stats_suite();
      if (name == "ldp") runner.ldp();
    } catch (const ConfigError& e) {
      out.exit_code = kConfigError;
      out.error = name + ": " + e.what();
    } catch (const Error& e) {
      out.exit_code = kNumericalFailure;
      out.error = name + ": " + e.what();
    }
    out.timings[name] = seconds_since(t0);
    if (out.exit_code != kPass) break;
  }
  out.timings["total"] = seconds_since(t_all);
  set_thread_count(saved_threads);
  if (out.exit_code == kPass) {
    for (const auto& r : out.reports) {
      if (!r.pass) out.exit_code = kAcceptanceFailure;
    }
  }

  nlohmann::ordered_json report = nlohmann::ordered_json::array();
  for (const auto& r : out.reports) report.push_back(to_json(r));
  write_text(dir / "report.json", report.dump(2) + "\n");
  write_text(dir / "config.yaml", to_yaml(config, false));

  nlohmann::ordered_json manifest;
  manifest["config_sha256"] = config_hash(config);
  manifest["config"] = to_yaml(config, false);
  manifest["seed"] = config.seed;
  manifest["threads"] = config.threads;
  manifest["subcommands"] = selected;
  manifest["versions"] = versions();
  nlohmann::ordered_json timings;
  for (const auto& [k, v] : out.timings) timings[k] = v;
  for (const auto& r : out.reports) timings["report:" + r.test] = r.runtime_seconds;
  manifest["wall_seconds"] = timings;
  std::vector<std::string> files = out.artifacts;
  files.insert(files.end(), {"report.json", "config.yaml"});
  manifest["artifacts"] = files;
  manifest["exit_code"] = out.exit_code;
  if (!out.error.empty()) manifest["error"] = out.error;
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");
  return out;
}

}  // namespace ruelle::harness
