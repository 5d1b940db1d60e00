#include "gradeig/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <type_traits>

#include "gradeig/models/linear.hpp"
#include "gradeig/models/toy.hpp"

namespace gradeig {

namespace {

std::string location(const std::string& origin, const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.line < 0) return origin;
  return origin + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1);
}

class Section {
 public:
  Section(YAML::Node node, std::string path, const std::string& origin)
      : node_(std::move(node)), path_(std::move(path)), origin_(origin) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) fail(node_, path_.empty() ? "<root>" : path_, "expected a mapping");
  }

  bool present() const { return node_ && node_.IsMap(); }

  void allow(std::initializer_list<const char*> keys) const {
    if (!present()) return;
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!ok.count(key)) {
        std::string list;
        for (const auto& k : ok) list += (list.empty() ? "" : ", ") + k;
        fail(kv.first, field(key), "unknown key (allowed: " + list + ")");
      }
    }
  }

  bool has(const char* key) const { return present() && node_[key]; }

  Section sub(const char* key) const { return Section(has(key) ? node_[key] : YAML::Node(), field(key), origin_); }

  template <class T>
  void read(const char* key, T& out, std::type_identity_t<std::function<bool(const T&)>> ok = nullptr, const char* rule = "") const {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    T v;
    try {
      v = n.as<T>();
    } catch (const YAML::Exception&) {
      fail(n, field(key), "cannot parse value '" + scalar_text(n) + "'");
    }
    if (ok && !ok(v)) fail(n, field(key), std::string("must be ") + rule);
    out = v;
  }

  void read_u64(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    const std::string s = scalar_text(n);
    try {
      std::size_t pos = 0;
      if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
      out = std::stoull(s, &pos, 0);
      if (pos != s.size()) throw std::invalid_argument(s);
    } catch (const std::exception&) {
      fail(n, field(key), "expected an unsigned 64-bit integer, got '" + s + "'");
    }
  }

  void read_count(const char* key, std::size_t& out, std::size_t min) const {
    if (!has(key)) return;
    std::uint64_t v = 0;
    read_u64(key, v);
    if (v < min) fail(node_[key], field(key), "must be >= " + std::to_string(min));
    out = static_cast<std::size_t>(v);
  }

  void read_positive(const char* key, double& out) const {
    read<double>(key, out, [](const double& v) { return v > 0.0 && std::isfinite(v); }, "> 0");
  }

  void read_vector(const char* key, std::optional<std::vector<double>>& out) const {
    if (!has(key)) return;
    const YAML::Node n = node_[key];
    if (!n.IsSequence()) fail(n, field(key), "expected a list of numbers");
    std::vector<double> v;
    for (const auto& e : n) {
      try {
        v.push_back(e.as<double>());
      } catch (const YAML::Exception&) {
        fail(e, field(key), "cannot parse list element '" + scalar_text(e) + "'");
      }
    }
    out = std::move(v);
  }

  [[noreturn]] void fail(const YAML::Node& at, const std::string& fieldpath, const std::string& what) const {
    throw ConfigError(location(origin_, at) + ": " + fieldpath + ": " + what);
  }
  [[noreturn]] void fail_key(const char* key, const std::string& what) const {
    fail(has(key) ? node_[key] : node_, field(key), what);
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

 private:
  static std::string scalar_text(const YAML::Node& n) {
    if (n.IsScalar()) return n.Scalar();
    std::ostringstream os;
    os << n;
    return os.str();
  }

  YAML::Node node_;
  std::string path_;
  const std::string& origin_;
};

template <class F>
void parse_enum(const Section& s, const char* key, F parse) {
  if (!s.has(key)) return;
  std::string v;
  s.read(key, v);
  try {
    parse(v);
  } catch (const std::invalid_argument& e) {
    s.fail_key(key, e.what());
  }
}

void read_sampler(const Section& s, SamplerConfig& cfg) {
  s.allow({"kind", "thinning", "n_samples", "slice_width", "slice_max_stepout", "mh_adapt_start"});
  parse_enum(s, "kind", [&](const std::string& v) { cfg.kind = parse_sampler_kind(v); });
  s.read_count("thinning", cfg.thinning, 1);
  s.read_count("n_samples", cfg.n_samples, 1);
  s.read<double>("slice_width", cfg.slice_width, [](const double& v) { return std::isfinite(v); }, "finite");
  s.read_count("slice_max_stepout", cfg.slice_max_stepout, 0);
  s.read_count("mh_adapt_start", cfg.mh_adapt_start, 1);
}

void read_model(const Section& s, ModelConfig& m, const std::filesystem::path& base_dir) {
  if (!s.present()) s.fail_key("kind", "model section is required");
  if (!s.has("kind")) s.fail_key("kind", "required (linear, toy, pk or stat5)");
  s.read("kind", m.kind);
  if (m.kind == "linear") {
    s.allow({"kind", "n", "sigma2"});
    s.read_count("n", m.linear_n, 1);
    if (m.linear_n > kMaxTangents) s.fail_key("n", "must be <= " + std::to_string(kMaxTangents));
    s.read_positive("sigma2", m.linear_sigma2);
  } else if (m.kind == "toy") {
    s.allow({"kind", "sigma"});
    s.read_positive("sigma", m.toy_sigma);
  } else if (m.kind == "pk") {
    s.allow({"kind", "sigma_mul", "sigma_add", "n_times", "t_max"});
    s.read<double>("sigma_mul", m.pk_noise.sigma_mul, [](const double& v) { return v >= 0.0 && std::isfinite(v); },
                   ">= 0");
    s.read_positive("sigma_add", m.pk_noise.sigma_add);
    s.read_count("n_times", m.pk_n_times, 1);
    if (m.pk_n_times > kMaxTangents) s.fail_key("n_times", "must be <= " + std::to_string(kMaxTangents));
    s.read_positive("t_max", m.pk_t_max);
  } else if (m.kind == "stat5") {
    s.allow({"kind", "sigma", "n_times", "t_end", "step", "epo_csv"});
    s.read_positive("sigma", m.stat5.sigma);
    s.read_count("n_times", m.stat5.n_times, 1);
    if (m.stat5.n_times > kMaxTangents) s.fail_key("n_times", "must be <= " + std::to_string(kMaxTangents));
    s.read_positive("t_end", m.stat5.t_end);
    s.read_positive("step", m.stat5.step);
    if (s.has("epo_csv")) {
      std::string p;
      s.read("epo_csv", p);
      std::filesystem::path path(p);
      if (path.is_relative() && !base_dir.empty()) path = base_dir / path;
      if (!std::filesystem::exists(path)) s.fail_key("epo_csv", "file not found: " + path.string());
      m.epo_csv = path;
    }
  } else {
    s.fail_key("kind", "unknown model '" + m.kind + "' (expected linear, toy, pk or stat5)");
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text, const std::string& origin,
                              const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) +
                      ": YAML syntax error: " + e.msg);
  }
  ExperimentConfig cfg;
  cfg.source_text = text;
  const Section top(root, "", origin);
  top.allow({"seed", "out_dir", "threads", "model", "estimator", "sampler", "optim", "validate", "bias", "design"});
  top.read_u64("seed", cfg.seed);
  if (top.has("out_dir")) {
    std::string d;
    top.read("out_dir", d);
    cfg.out_dir = d;
  }
  if (top.has("threads")) {
    std::size_t t = 1;
    top.read_count("threads", t, 1);
    cfg.threads = static_cast<unsigned>(t);
  }
  top.read_vector("design", cfg.design);

  read_model(top.sub("model"), cfg.model, base_dir);

  const Section sampler = top.sub("sampler");
  read_sampler(sampler, cfg.estimator.sampler);
  cfg.validate.sampler = cfg.estimator.sampler;

  const Section est = top.sub("estimator");
  est.allow({"kind", "M", "N", "fixed_atoms", "chain_cost"});
  parse_enum(est, "kind", [&](const std::string& v) { cfg.estimator.kind = parse_estimator_kind(v); });
  est.read_count("M", cfg.estimator.M, 1);
  est.read_count("N", cfg.estimator.N, 0);
  est.read("fixed_atoms", cfg.estimator.fixed_atoms);
  parse_enum(est, "chain_cost", [&](const std::string& v) { cfg.estimator.chain_cost = parse_chain_cost(v); });
  if (cfg.estimator.kind == EstimatorKind::beeg_ap && cfg.estimator.M < 2) est.fail_key("M", "BEEG-AP needs M >= 2");

  const Section opt = top.sub("optim");
  opt.allow({"step_rule", "learning_rate", "adam_betas", "adam_eps", "max_forward_evals", "max_steps",
             "record_wall_time", "init"});
  parse_enum(opt, "step_rule", [&](const std::string& v) { cfg.optim.step_rule = parse_step_rule(v); });
  opt.read_positive("learning_rate", cfg.optim.learning_rate);
  if (opt.has("adam_betas")) {
    std::optional<std::vector<double>> b;
    opt.read_vector("adam_betas", b);
    if (b->size() != 2 || !((*b)[0] >= 0.0 && (*b)[0] < 1.0) || !((*b)[1] >= 0.0 && (*b)[1] < 1.0)) {
      opt.fail_key("adam_betas", "must be two numbers in [0, 1)");
    }
    cfg.optim.adam_beta1 = (*b)[0];
    cfg.optim.adam_beta2 = (*b)[1];
  }
  opt.read_positive("adam_eps", cfg.optim.adam_eps);
  if (opt.has("max_forward_evals")) {
    opt.read_u64("max_forward_evals", cfg.optim.max_forward_evals);
    if (cfg.optim.max_forward_evals == 0) opt.fail_key("max_forward_evals", "must be >= 1");
  }
  opt.read_count("max_steps", cfg.optim.max_steps, 1);
  opt.read("record_wall_time", cfg.optim.record_wall_time);
  opt.read_vector("init", cfg.init);

  const Section val = top.sub("validate");
  val.allow({"trials", "kde_n", "nmc_M", "nmc_N", "sampler"});
  val.read_count("trials", cfg.validate.trials, 1);
  val.read_count("kde_n", cfg.validate.kde_n, 2);
  val.read_count("nmc_M", cfg.validate.nmc_M, 1);
  val.read_count("nmc_N", cfg.validate.nmc_N, 1);
  if (val.has("sampler")) read_sampler(val.sub("sampler"), cfg.validate.sampler);

  const Section bias = top.sub("bias");
  bias.allow({"sigma2", "design_dim", "n_designs", "replicates", "beeg_M", "ueeg_exact_M", "ueeg_exact_N",
              "include_slice", "ueeg_slice_M", "ueeg_slice_sampler", "pce_M", "pce_N"});
  bias.read_positive("sigma2", cfg.bias.sigma2);
  bias.read_count("design_dim", cfg.bias.design_dim, 1);
  bias.read_count("n_designs", cfg.bias.n_designs, 1);
  bias.read_count("replicates", cfg.bias.replicates, 2);
  bias.read_count("beeg_M", cfg.bias.beeg_M, 2);
  bias.read_count("ueeg_exact_M", cfg.bias.ueeg_exact_M, 1);
  bias.read_count("ueeg_exact_N", cfg.bias.ueeg_exact_N, 1);
  bias.read("include_slice", cfg.bias.include_slice);
  bias.read_count("ueeg_slice_M", cfg.bias.ueeg_slice_M, 1);
  if (bias.has("ueeg_slice_sampler")) read_sampler(bias.sub("ueeg_slice_sampler"), cfg.bias.ueeg_slice_sampler);
  bias.read_count("pce_M", cfg.bias.pce_M, 1);
  bias.read_count("pce_N", cfg.bias.pce_N, 0);

  cfg.optim.estimator = cfg.estimator;
  cfg.optim.seed = cfg.seed;

  // Cross-field checks need the model's dimensions.
  std::unique_ptr<Model> model;
  try {
    model = make_model(cfg.model);
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": model: " + e.what());
  }
  const Box box = model->design_box();
  auto check_design = [&](const Section& s, const char* key, const std::optional<std::vector<double>>& d) {
    if (!d) return;
    if (d->size() != box.dim()) {
      s.fail_key(key, "expected " + std::to_string(box.dim()) + " values for model " + cfg.model.kind);
    }
    if (!box.contains(*d)) s.fail_key(key, "outside the design box");
  };
  check_design(top, "design", cfg.design);
  check_design(opt, "init", cfg.init);
  if (cfg.estimator.kind == EstimatorKind::ueeg_mcmc && cfg.estimator.sampler.kind == SamplerKind::exact &&
      !model->has_exact_posterior()) {
    sampler.fail_key("kind", "exact sampling is only available for the linear model");
  }
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string(), path.parent_path());
}

std::unique_ptr<Model> make_model(const ModelConfig& cfg) {
  if (cfg.kind == "linear") return std::make_unique<models::LinearModel>(cfg.linear_n, cfg.linear_sigma2);
  if (cfg.kind == "toy") return std::make_unique<models::ToyModel>(cfg.toy_sigma);
  if (cfg.kind == "pk") return std::make_unique<models::PkModel>(cfg.pk_noise, cfg.pk_n_times, cfg.pk_t_max);
  if (cfg.kind == "stat5") {
    auto epo = cfg.epo_csv.empty() ? models::synthetic_epo_pulse() : models::load_epo_csv(cfg.epo_csv);
    return std::make_unique<models::Stat5Model>(cfg.stat5, std::move(epo));
  }
  throw ConfigError("unknown model kind '" + cfg.kind + "'");
}

std::string content_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gradeig
