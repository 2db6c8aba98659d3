#include "tailcouple/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "tailcouple/bridge.hpp"
#include "tailcouple/coupled.hpp"
#include "tailcouple/error.hpp"
#include "tailcouple/format.hpp"
#include "tailcouple/parse.hpp"
#include "tailcouple/sample.hpp"
#include "tailcouple/sim_lab.hpp"
#include "tailcouple/tail_fit.hpp"

namespace tailcouple {

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

template <class T>
Json opt(const std::optional<T>& x) {
  return x ? num(*x) : Json(nullptr);
}

struct MeasureArgs {
  std::string measure1 = "mean";
  std::string transform1 = "identity";
  std::string measure2;
  std::string transform2 = "identity";
  std::string coupling = "first";
  std::string k = "auto";
  double alpha = 0.05;
  std::optional<double> b1, omega1, b2, omega2;
  std::string variance = "auto";
};

void add_measure_options(CLI::App* cmd, MeasureArgs& a) {
  cmd->add_option("--measure1,--measure", a.measure1, "mean | pht:rho=R | cte:t=T")
      ->capture_default_str();
  cmd->add_option("--transform1,--transform", a.transform1, "identity | power:beta=B")
      ->capture_default_str();
  cmd->add_option("--measure2", a.measure2, "second measure for two-argument couplings");
  cmd->add_option("--transform2", a.transform2)->capture_default_str();
  cmd->add_option("--coupling", a.coupling, "first | ratio | zenga:p=P")->capture_default_str();
  cmd->add_option("--k", a.k, "auto | <rank> | fraction:c=C | power:a=A | scan")
      ->capture_default_str();
  cmd->add_option("--alpha", a.alpha, "interval level")->capture_default_str();
  cmd->add_option("--b1", a.b1, "second-order scale for measure 1");
  cmd->add_option("--omega1", a.omega1, "second-order index for measure 1");
  cmd->add_option("--b2", a.b2, "second-order scale for measure 2");
  cmd->add_option("--omega2", a.omega2, "second-order index for measure 2");
  cmd->add_option("--variance", a.variance, "auto | closed | kernel")
      ->check(CLI::IsMember({"auto", "closed", "kernel"}))
      ->capture_default_str();
}

struct ResolvedMeasures {
  MeasureSpec spec1;
  std::optional<MeasureSpec> spec2;
  Coupling coupling = Coupling::first();
  KChoice k;
  EstimateOptions options;
};

ResolvedMeasures resolve(const MeasureArgs& a) {
  ResolvedMeasures r{parse_measure(a.measure1, a.transform1), std::nullopt,
                     parse_coupling(a.coupling), parse_k(a.k), {}};
  if (!a.measure2.empty()) r.spec2 = parse_measure(a.measure2, a.transform2);
  if (!(a.alpha > 0.0 && a.alpha < 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "--alpha must lie in (0, 1)");
  }
  r.options.alpha = a.alpha;
  if (a.b1 || a.omega1 || a.b2 || a.omega2) {
    r.options.bias = BiasInputs{a.b1.value_or(0.0), a.omega1.value_or(0.0),
                                a.b2.value_or(0.0), a.omega2.value_or(0.0)};
  }
  if (a.variance == "closed") r.options.variance_mode = VarianceMode::closed_form();
  if (a.variance == "kernel") r.options.variance_mode = VarianceMode::kernel_limit();
  return r;
}

Json measure_json(const LEstimate& l) {
  Json j;
  j["label"] = l.spec.label;
  j["gamma_hat"] = num(l.fit.gamma_hat);
  j["in_theory_range"] = l.fit.in_theory_range;
  j["trunc"] = num(l.trunc_part);
  j["tail"] = num(l.tail_part);
  j["total"] = num(l.total);
  j["d_hat"] = num(l.d_hat);
  j["sqrt_nk_D"] = num(l.sqrt_nk_d());
  return j;
}

Json estimate_json(const Sample& s, const ResolvedMeasures& m, const std::string& k_text,
                   const std::string& input) {
  const std::size_t k = m.k.resolve(s, m.spec1.h);
  const auto est = estimate_coupled(s, m.spec1, m.spec2, m.coupling, k, m.options);
  Json j;
  j["schema"] = 1;
  j["command"] = "estimate";
  j["input"] = input;
  j["n"] = s.size();
  j["k"] = k;
  j["k_policy"] = k_text;
  j["alpha"] = num(est.alpha);
  j["measure1"] = measure_json(est.l1);
  j["measure2"] = est.l2 ? measure_json(*est.l2) : Json(nullptr);
  Json c;
  c["coupling"] = m.coupling.describe();
  c["point"] = num(est.point);
  c["delta_hat"] = num(est.delta_hat);
  c["hx"] = num(est.partials.hx);
  c["hy"] = num(est.partials.hy);
  c["sigma2"] = opt(est.sigma2);
  c["lambda"] = num(est.lambda);
  c["ci_low"] = est.ci ? num(est.ci->lo) : Json(nullptr);
  c["ci_high"] = est.ci ? num(est.ci->hi) : Json(nullptr);
  c["warnings"] = est.warnings;
  j["coupled"] = std::move(c);
  return j;
}

Json summary_json(const Summary& s) {
  return Json{{"mean", num(s.mean)}, {"sd", num(s.sd)}, {"min", num(s.min)}, {"max", num(s.max)}};
}

Json report_json(const ExperimentReport& r, const std::string& k_text) {
  Json j;
  j["schema"] = 1;
  j["command"] = "simulate";
  j["model"] = r.model;
  j["measure1"] = r.measure1;
  j["measure2"] = r.measure2.empty() ? Json(nullptr) : Json(r.measure2);
  j["coupling"] = r.coupling;
  j["k_policy"] = k_text;
  j["alpha"] = num(r.alpha);
  j["n"] = r.n;
  j["reps"] = r.replicates;
  j["seed"] = r.seed;
  j["true_value"] = num(r.true_value);
  j["mean_point"] = num(r.mean_point);
  j["bias"] = num(r.bias);
  j["rmse"] = num(r.rmse);
  j["median_abs_rel_error"] = num(r.median_abs_rel_error);
  j["ci_count"] = r.ci_count;
  j["ci_coverage"] = num(r.ci_coverage);
  j["ci_coverage_all"] = num(r.ci_coverage_all);
  j["mean_ci_width"] = num(r.mean_ci_width);
  j["mean_k"] = num(r.mean_k);
  j["failures"] = r.failures;
  j["failure_fraction"] = num(r.failure_fraction);
  j["gamma_hat1"] = summary_json(r.gamma_hat1);
  j["gamma_hat2"] = r.gamma_hat2 ? summary_json(*r.gamma_hat2) : Json(nullptr);
  return j;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw Error(ErrorCode::IoError, "write to '" + path + "' failed");
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  return s;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupled L-functional estimation for heavy-tailed losses", "tailcouple"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tailcouple 0.1.0");
  // Config values live under a [simulate] table; unknown keys are an error.
  app.set_config("--config", "", "TOML file; simulate reads keys from a [simulate] table");
  app.allow_config_extras(CLI::config_extras_mode::error);

  // estimate
  auto* est = app.add_subcommand("estimate", "estimate a coupled measure from a CSV sample");
  std::string est_input;
  std::string est_output;
  MeasureArgs est_args;
  est->add_option("--input", est_input, "one-column CSV of losses")->required();
  est->add_option("--output", est_output, "write JSON here instead of stdout");
  add_measure_options(est, est_args);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Monte Carlo study on a synthetic model");
  sim->fallthrough();
  std::string sim_model;
  std::string sim_output;
  std::string sim_emit;
  std::size_t sim_n = 10000;
  std::size_t sim_reps = 500;
  std::uint64_t sim_seed = 1;
  MeasureArgs sim_args;
  sim->add_option("--model", sim_model, "pareto:gamma=G | burr:lambda=L,tau=T | frechet:gamma=G")
      ->required();
  sim->add_option("--n", sim_n, "sample size")->capture_default_str();
  sim->add_option("--reps", sim_reps, "replicates")->capture_default_str();
  sim->add_option("--seed", sim_seed, "master seed")->envname("TAILCOUPLE_SEED")->capture_default_str();
  sim->add_option("--emit-sample", sim_emit, "write the first replicate's sample as CSV");
  sim->add_option("--output", sim_output, "write JSON here instead of stdout");
  add_measure_options(sim, sim_args);

  // scan-k
  auto* scan = app.add_subcommand("scan-k", "Hill estimates over a range of k as CSV");
  std::string scan_input;
  std::string scan_output;
  std::string scan_transform = "identity";
  std::size_t scan_from = 10;
  std::size_t scan_to = 200;
  scan->add_option("--input", scan_input, "one-column CSV of losses")->required();
  scan->add_option("--transform", scan_transform)->capture_default_str();
  scan->add_option("--from", scan_from)->capture_default_str();
  scan->add_option("--to", scan_to)->capture_default_str();
  scan->add_option("--output", scan_output, "write CSV here instead of stdout");

  // bridge-check
  auto* bridge = app.add_subcommand("bridge-check", "simulated vs analytic bridge moments");
  double br_gamma = 0.6;
  double br_rho = 1.0;
  BridgeSimConfig br_cfg;
  std::string br_output;
  bridge->add_option("--gamma", br_gamma)->capture_default_str();
  bridge->add_option("--rho", br_rho)->capture_default_str();
  bridge->add_option("--k-over-n", br_cfg.k_over_n)->capture_default_str();
  bridge->add_option("--grid", br_cfg.grid)->capture_default_str();
  bridge->add_option("--reps", br_cfg.reps)->capture_default_str();
  bridge->add_option("--seed", br_cfg.seed)->envname("TAILCOUPLE_SEED")->capture_default_str();
  bridge->add_option("--output", br_output, "write JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ConfigError& e) {
    err << "error: config file: " << one_line(e.what())
        << " (simulate keys belong under a [simulate] table)\n";
    return kExitInvalid;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitInvalid;
  }

  try {
    if (est->parsed()) {
      const auto m = resolve(est_args);
      const Sample s = read_sample_csv(est_input);
      emit(estimate_json(s, m, est_args.k, est_input).dump(2) + "\n", est_output, out);
    } else if (sim->parsed()) {
      const auto m = resolve(sim_args);
      const auto model = parse_model(sim_model);
      if (!sim_emit.empty()) {
        std::ostringstream csv;
        write_sample_csv(csv, replicate_sample(model, sim_n, sim_seed, 0).values());
        emit(csv.str(), sim_emit, out);
      }
      ExperimentConfig cfg{m.spec1, m.spec2, m.coupling, m.k.policy, m.k.fixed, m.options};
      const auto report = run_experiment(model, cfg, sim_n, sim_reps, sim_seed);
      emit(report_json(report, sim_args.k).dump(2) + "\n", sim_output, out);
    } else if (scan->parsed()) {
      const Sample s = read_sample_csv(scan_input);
      const auto h = parse_transform(scan_transform);
      if (scan_from < 1 || scan_to > s.size() - 1 || scan_from > scan_to) {
        throw Error(ErrorCode::RankOutOfRange,
                    "k range must satisfy 1 <= from <= to <= n-1 (n = " +
                        std::to_string(s.size()) + ")");
      }
      std::ostringstream csv;
      csv << "k,gamma_hat,in_theory_range\n";
      for (const auto& fit : hill_trajectory(s, h, scan_from, scan_to)) {
        csv << fit.k << ',' << format_double(fit.gamma_hat) << ','
            << (fit.in_theory_range ? "true" : "false") << '\n';
      }
      emit(csv.str(), scan_output, out);
    } else if (bridge->parsed()) {
      const W1Index w1{br_gamma, br_rho};
      const std::vector<W1Index> basis{w1};
      const auto sim_m = simulate_bridge_moments(basis, br_cfg);
      const auto exact = finite_moments(basis, br_cfg.k_over_n);
      std::optional<MomentMatrix> limit;
      try {
        limit = limit_moments(basis);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::VarianceUndefined) throw;
      }
      const auto& mm = sim_m.mean;
      struct Entry {
        const char* name;
        std::size_t i, j;
      };
      const Entry entries[] = {{"E[W1^2]", 0, 0}, {"E[W2^2]", mm.w2(), mm.w2()},
                               {"E[W3^2]", mm.w3(), mm.w3()},   {"E[W1W2]", 0, mm.w2()},
                               {"E[W1W3]", 0, mm.w3()},  {"E[W2W3]", mm.w2(), mm.w3()}};
      Json j;
      j["schema"] = 1;
      j["command"] = "bridge-check";
      j["gamma"] = br_gamma;
      j["rho"] = br_rho;
      j["k_over_n"] = br_cfg.k_over_n;
      j["grid"] = br_cfg.grid;
      j["reps"] = br_cfg.reps;
      j["seed"] = br_cfg.seed;
      Json rows = Json::array();
      for (const auto& e : entries) {
        const double emp = sim_m.mean(e.i, e.j);
        const double se = sim_m.stderr_(e.i, e.j);
        const double lim = limit ? (*limit)(e.i, e.j) : std::nan("");
        Json row;
        row["moment"] = e.name;
        row["analytic"] = num(lim);
        row["finite_exact"] = num(exact(e.i, e.j));
        row["empirical"] = num(emp);
        row["stderr"] = num(se);
        row["z_analytic"] = num((emp - lim) / se);
        row["z_finite"] = num((emp - exact(e.i, e.j)) / se);
        rows.push_back(std::move(row));
      }
      j["moments"] = std::move(rows);
      emit(j.dump(2) + "\n", br_output, out);
    }
  } catch (const Error& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return e.code() == ErrorCode::TailDivergence ? kExitDivergence : kExitInvalid;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return kExitInvalid;
  }
  return kExitOk;
}

}  // namespace tailcouple
