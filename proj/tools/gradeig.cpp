// gradeig: command-line front end.
//
//   gradeig optimize   --config FILE [--seed S] [--out DIR] [--threads N]
//   gradeig grad       --config FILE [--design a,b,...]
//   gradeig eig        --config FILE [--design a,b,...]
//   gradeig entropy    --config FILE [--design a,b,... | --trajectory trajectory.csv]
//   gradeig bias-study --config FILE
//   gradeig selftest   [--seed S]
//
// Every run writes run_meta.json next to its CSV outputs.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gradeig/config.hpp"
#include "gradeig/csv.hpp"
#include "gradeig/eig_est.hpp"
#include "gradeig/grad_est.hpp"
#include "gradeig/optim.hpp"
#include "gradeig/parallel.hpp"
#include "gradeig/selftest.hpp"
#include "gradeig/simd/kernels.hpp"
#include "gradeig/validate.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using namespace gradeig;

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
  std::vector<double> design;
  std::string trajectory;
};

struct Run {
  ExperimentConfig cfg;
  std::unique_ptr<Model> model;
  fs::path out;
};

Run prepare(const Options& o) {
  Run r;
  r.cfg = load_config(o.config);
  if (o.seed) {
    r.cfg.seed = *o.seed;
    r.cfg.optim.seed = *o.seed;
  }
  if (o.out) r.cfg.out_dir = *o.out;
  if (o.threads) r.cfg.threads = *o.threads;
  set_num_threads(r.cfg.threads);
  r.model = make_model(r.cfg.model);
  r.out = r.cfg.out_dir;
  fs::create_directories(r.out);
  return r;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_meta(const fs::path& dir, const std::string& command, const Options& o, const ExperimentConfig* cfg,
                std::uint64_t seed, nlohmann::json extra = nlohmann::json::object()) {
  nlohmann::json j;
  j["command"] = command;
  j["gradeig_version"] = GRADEIG_VERSION;
  j["compiler"] = __VERSION__;
  j["simd"] = std::string(simd::isa_name(simd::kernels().isa));
  j["seed"] = seed;
  j["started_utc"] = utc_now();
  if (cfg) {
    j["config_path"] = o.config;
    j["config_hash"] = content_hash(cfg->source_text);
    j["model"] = cfg->model.kind;
    j["threads"] = cfg->threads;
  }
  for (auto& [k, v] : extra.items()) j[k] = v;
  std::ofstream(dir / "run_meta.json") << j.dump(2) << '\n';
}

std::vector<std::string> numbered(const std::string& prefix, std::size_t n) {
  std::vector<std::string> v;
  for (std::size_t k = 0; k < n; ++k) v.push_back(prefix + std::to_string(k));
  return v;
}

std::vector<double> design_for(const Run& r, const Options& o) {
  std::vector<double> d;
  if (!o.design.empty()) {
    d = o.design;
  } else if (r.cfg.design) {
    d = *r.cfg.design;
  } else {
    throw std::runtime_error("no design given: set `design:` in the config or pass --design");
  }
  const Box box = r.model->design_box();
  if (d.size() != box.dim()) {
    throw std::runtime_error("design has " + std::to_string(d.size()) + " values, model " + r.model->name() +
                             " expects " + std::to_string(box.dim()));
  }
  if (!box.contains(d)) throw std::runtime_error("design lies outside the model's design box");
  return d;
}

// Last row of a trajectory.csv: the lambda_* columns.
std::vector<double> final_row_of(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open trajectory " + path.string());
  std::string header, line, last;
  std::getline(in, header);
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) last = line;
  }
  if (last.empty()) throw std::runtime_error(path.string() + ": no data rows");
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::vector<std::string> names, cells;
  for (std::string* s : {&header, &last}) {
    std::stringstream ss(*s);
    std::string cell;
    auto& dst = s == &header ? names : cells;
    while (std::getline(ss, cell, ',')) dst.push_back(cell);
  }
  std::vector<double> d;
  for (std::size_t k = 0; k < names.size() && k < cells.size(); ++k) {
    if (names[k].rfind("lambda_", 0) == 0) d.push_back(std::stod(cells[k]));
  }
  if (d.empty()) throw std::runtime_error(path.string() + ": no lambda_* columns");
  return d;
}

int cmd_optimize(const Options& o) {
  Run r = prepare(o);
  const Design start =
      r.cfg.init ? Design(*r.cfg.init, r.model->design_box()) : initial_design(*r.model, r.cfg.seed);
  const Trajectory t = optimize(*r.model, start, r.cfg.optim);
  const std::size_t d = start.dim();

  CsvWriter traj(r.out / "trajectory.csv");
  traj.field("step").fields(numbered("lambda_", d)).field("grad_norm").field("forward_evals").field("wall_ms");
  traj.end_row();
  for (const auto& rec : t.records) {
    traj.field(static_cast<std::uint64_t>(rec.step))
        .fields(rec.lambda)
        .field(rec.grad_norm)
        .field(rec.forward_evals)
        .field(rec.wall_ms);
    traj.end_row();
  }
  CsvWriter fin(r.out / "final_design.csv");
  fin.fields(numbered("lambda_", d));
  fin.end_row();
  fin.fields(t.final_design());
  fin.end_row();

  for (const auto& f : t.failures) std::cerr << "warning: step " << f.step << " skipped: " << f.message << '\n';
  std::cout << "steps " << t.records.size() - 1 << ", forward evals " << t.records.back().forward_evals
            << ", final design";
  for (double v : t.final_design()) std::cout << ' ' << format_real(v);
  std::cout << '\n';
  write_meta(r.out, "optimize", o, &r.cfg, r.cfg.seed,
             {{"estimator", to_string(r.cfg.estimator.kind)},
              {"steps", t.records.size() - 1},
              {"skipped_steps", t.failures.size()}});
  return 0;
}

int cmd_grad(const Options& o) {
  Run r = prepare(o);
  const auto lambda = design_for(r, o);
  const auto& e = r.cfg.estimator;
  const GradientSource source = make_gradient_source(*r.model, e, r.cfg.seed);
  SimBudget budget;
  const GradEstimate g = source(lambda, 0, budget);

  CsvWriter csv(r.out / "grad.csv");
  csv.field("estimator").fields(numbered("lambda_", lambda.size())).fields(numbered("grad_", lambda.size()));
  csv.field("forward_evals");
  csv.end_row();
  csv.field(to_string(e.kind)).fields(lambda).fields(g.gradient).field(g.forward_evals_used);
  csv.end_row();

  std::cout << to_string(e.kind) << " gradient";
  for (double v : g.gradient) std::cout << ' ' << format_real(v);
  std::cout << "\nforward evals " << g.forward_evals_used << '\n';
  write_meta(r.out, "grad", o, &r.cfg, r.cfg.seed, {{"estimator", to_string(e.kind)}});
  return 0;
}

int cmd_eig(const Options& o) {
  Run r = prepare(o);
  const auto lambda = design_for(r, o);
  const std::size_t M = r.cfg.validate.nmc_M, N = r.cfg.validate.nmc_N;
  const RngStream root = RngStream(r.cfg.seed).child("eig");
  struct Row {
    const char* name;
    EigEstimate est;
  };
  std::vector<Row> rows;
  {
    SimBudget b;
    rows.push_back({"nmc", nmc_value(*r.model, lambda, M, N, root.child("nmc"), b)});
  }
  {
    SimBudget b;
    rows.push_back({"srnmc", srnmc_value(*r.model, lambda, M, root.child("srnmc"), b)});
  }
  {
    SimBudget b;
    rows.push_back({"pce", pce_value(*r.model, lambda, M, N, root.child("pce"), b)});
  }
  CsvWriter csv(r.out / "eig.csv");
  csv.field("estimator").field("value").field("se").field("M").field("N").field("forward_evals");
  csv.end_row();
  for (const auto& row : rows) {
    csv.field(row.name)
        .field(row.est.value)
        .field(row.est.std_error)
        .field(static_cast<std::uint64_t>(row.est.M))
        .field(static_cast<std::uint64_t>(row.est.N))
        .field(row.est.forward_evals_used);
    csv.end_row();
    std::printf("%-6s %.6f +- %.6f  (M=%zu N=%zu, %llu evals)\n", row.name, row.est.value, row.est.std_error,
                row.est.M, row.est.N, static_cast<unsigned long long>(row.est.forward_evals_used));
  }
  write_meta(r.out, "eig", o, &r.cfg, r.cfg.seed);
  return 0;
}

int cmd_entropy(const Options& o) {
  Run r = prepare(o);
  const std::vector<double> lambda = o.trajectory.empty() ? design_for(r, o) : final_row_of(o.trajectory);
  if (!r.model->design_box().contains(lambda) || lambda.size() != r.model->design_box().dim()) {
    throw std::runtime_error("design from trajectory does not fit the model's design box");
  }
  const auto& v = r.cfg.validate;
  const EntropyReport rep =
      posterior_entropy(*r.model, lambda, v.trials, v.sampler, v.kde_n, RngStream(r.cfg.seed).child("entropy"));

  CsvWriter csv(r.out / "entropy.csv");
  csv.field("trial").field("entropy");
  csv.end_row();
  for (std::size_t t = 0; t < rep.entropies.size(); ++t) {
    csv.field(static_cast<std::uint64_t>(t)).field(rep.entropies[t]);
    csv.end_row();
  }
  csv.field("mean").field(rep.mean_entropy);
  csv.end_row();
  csv.field("se").field(rep.std_error);
  csv.end_row();

  const char* space = rep.space == EntropySpace::log ? "log" : "raw";
  std::printf("posterior entropy %.6f +- %.6f (%zu trials, %zu KDE samples, %s space)\n", rep.mean_entropy,
              rep.std_error, rep.trials, rep.kde_samples, space);
  write_meta(r.out, "entropy", o, &r.cfg, r.cfg.seed, {{"design", lambda}, {"entropy_space", space}});
  return 0;
}

int cmd_bias_study(const Options& o) {
  Run r = prepare(o);
  const BiasReport rep = bias_study(r.cfg.bias, RngStream(r.cfg.seed).child("bias"));
  const std::size_t d = r.cfg.bias.design_dim;

  CsvWriter csv(r.out / "bias.csv");
  csv.field("design_id").fields(numbered("lambda_", d)).fields(numbered("oracle_grad_", d)).field("est");
  csv.fields(numbered("mean_grad_", d)).field("bias_norm").field("se");
  csv.end_row();
  for (const auto& row : rep.rows) {
    csv.field(static_cast<std::uint64_t>(row.design_id))
        .fields(row.lambda)
        .fields(row.oracle_grad)
        .field(row.estimator)
        .fields(row.mean_grad)
        .field(row.bias_norm)
        .field(row.se);
    csv.end_row();
  }
  std::printf("%zu rows written to %s\n", rep.rows.size(), (r.out / "bias.csv").string().c_str());
  write_meta(r.out, "bias-study", o, &r.cfg, r.cfg.seed);
  return 0;
}

int cmd_selftest(const Options& o) {
  const std::uint64_t seed = o.seed.value_or(1);
  if (o.threads) set_num_threads(*o.threads);
  const auto results = run_selftest(seed);
  int failed = 0;
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : results) {
    std::printf("%s  %s: %s\n", c.passed ? "PASS" : "FAIL", c.name.c_str(), c.detail.c_str());
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    if (!c.passed) ++failed;
  }
  if (o.out) {
    fs::create_directories(*o.out);
    write_meta(*o.out, "selftest", o, nullptr, seed, {{"checks", checks}});
  }
  std::printf("%zu checks, %d failed\n", results.size(), failed);
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gradient-based Bayesian experimental design"};
  app.require_subcommand(1);
  Options o;

  auto common = [&](CLI::App* sub, bool needs_config) {
    auto* c = sub->add_option("--config", o.config, "experiment config (YAML)")->check(CLI::ExistingFile);
    if (needs_config) c->required();
    sub->add_option("--seed", o.seed, "64-bit seed (overrides the config)");
    sub->add_option("--out", o.out, "output directory (overrides the config)");
    sub->add_option("--threads", o.threads, "worker threads; never changes results")->check(CLI::PositiveNumber);
  };
  auto with_design = [&](CLI::App* sub) {
    sub->add_option("--design", o.design, "design values (overrides the config)")->delimiter(',');
  };

  auto* opt = app.add_subcommand("optimize", "run projected stochastic gradient ascent");
  common(opt, true);
  auto* grad = app.add_subcommand("grad", "one EIG-gradient estimate at a design");
  common(grad, true);
  with_design(grad);
  auto* eig = app.add_subcommand("eig", "NMC, srNMC and PCE estimates at a design");
  common(eig, true);
  with_design(eig);
  auto* ent = app.add_subcommand("entropy", "posterior-entropy score of a design");
  common(ent, true);
  with_design(ent);
  ent->add_option("--trajectory", o.trajectory, "score the last design of a trajectory.csv")
      ->check(CLI::ExistingFile)
      ->excludes("--design");
  auto* bias = app.add_subcommand("bias-study", "estimator bias on the linear model");
  common(bias, true);
  auto* self = app.add_subcommand("selftest", "quick invariant checks");
  common(self, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (opt->parsed()) return cmd_optimize(o);
    if (grad->parsed()) return cmd_grad(o);
    if (eig->parsed()) return cmd_eig(o);
    if (ent->parsed()) return cmd_entropy(o);
    if (bias->parsed()) return cmd_bias_study(o);
    if (self->parsed()) return cmd_selftest(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
