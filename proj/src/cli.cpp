#include "impure/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "impure/alpha_estimation.hpp"
#include "impure/densities.hpp"
#include "impure/kernel_density.hpp"
#include "impure/measures.hpp"
#include "impure/partitions.hpp"
#include "impure/prevalence.hpp"
#include "impure/report.hpp"
#include "impure/sampling.hpp"

namespace impure::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::input:
    case ErrorKind::range:
    case ErrorKind::parse:
    case ErrorKind::region_choice:
      return 2;
    case ErrorKind::numeric:
    case ErrorKind::degenerate_point:
    case ErrorKind::disjointness:
    case ErrorKind::conditioning:
      return 3;
    case ErrorKind::linear_dependence:
      return 4;
    case ErrorKind::io:
      return 5;
  }
  return 1;
}

json default_config() {
  return json::parse(R"({
    "model": {"name": "gaussian"},
    "alpha": {"low": 0.2, "high": 0.8},
    "populations": [
      {"name": "low", "size": 500, "seed": 1},
      {"name": "high", "size": 500, "seed": 2}
    ],
    "grid": {"start": 0.05, "stop": 0.95, "step": 0.05},
    "z": 2.0,
    "engine": "quad:64:1e-8",
    "partition": "oracle",
    "wilson": "standard",
    "sampling": "exact_count",
    "tie": "positive",
    "alpha_source": "estimate",
    "exact_bounds": false,
    "prevalence": {"region_delta": 0.5, "separation": 0.05, "clamp": false},
    "trace_resolution": 100
  })");
}

namespace {

struct Overrides {
  std::optional<double> alpha_low;
  std::optional<double> alpha_high;
  std::optional<double> grid_step;
  std::optional<double> z;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> engine;
  std::optional<std::string> low;
  std::optional<std::string> high;
  std::optional<std::string> test;
  std::optional<std::string> data;
  std::optional<double> q;
  std::optional<double> delta;
};

const std::set<std::string>& allowed_keys() {
  static const std::set<std::string> keys{
      "model", "alpha", "populations", "grid", "z", "engine", "partition", "wilson",
      "sampling", "tie", "alpha_source", "exact_bounds", "prevalence", "trace_resolution",
      "inputs", "command", "outputs", "q", "delta"};
  return keys;
}

void require_choice(const json& cfg, const std::string& key,
                    std::initializer_list<const char*> choices) {
  const auto v = cfg.at(key).get<std::string>();
  for (const char* c : choices) {
    if (v == c) return;
  }
  std::string msg = "config '" + key + "' must be one of:";
  for (const char* c : choices) msg += std::string(" ") + c;
  throw InputError(msg + " (got '" + v + "')");
}

json read_json_file(const fs::path& path) {
  if (!fs::exists(path)) throw IoError("no such file: '" + path.string() + "'");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_json_file(const fs::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

/// Merges the config file over the defaults, applies flag overrides, and
/// validates. The result is what the manifest records.
json resolve_config(const std::optional<std::string>& config_path, const Overrides& ov) {
  json cfg = default_config();
  if (config_path) {
    const json file = read_json_file(*config_path);
    if (!file.is_object()) throw InputError("config must be a JSON object");
    for (const auto& [key, _] : file.items()) {
      if (!allowed_keys().count(key)) throw InputError("unknown config key '" + key + "'");
    }
    cfg.merge_patch(file);
  }
  if (ov.alpha_low) cfg["alpha"]["low"] = *ov.alpha_low;
  if (ov.alpha_high) cfg["alpha"]["high"] = *ov.alpha_high;
  if (ov.grid_step) cfg["grid"]["step"] = *ov.grid_step;
  if (ov.z) cfg["z"] = *ov.z;
  if (ov.engine) cfg["engine"] = *ov.engine;
  if (ov.seed) {
    std::uint64_t i = 0;
    for (auto& p : cfg["populations"]) p["seed"] = *ov.seed + i++;
  }
  if (ov.low) cfg["inputs"]["low"] = *ov.low;
  if (ov.high) cfg["inputs"]["high"] = *ov.high;
  if (ov.test) cfg["inputs"]["test"] = *ov.test;
  if (ov.data) cfg["inputs"]["data"] = *ov.data;
  if (ov.q) {
    cfg["q"] = *ov.q;
    cfg.erase("delta");
  }
  if (ov.delta) {
    cfg["delta"] = *ov.delta;
    if (!ov.q) cfg.erase("q");
  }

  const auto& model = cfg.at("model");
  require_choice(model, "name", {"gaussian", "uniform_overlap", "external"});
  if (model.at("name") == "uniform_overlap") {
    json& m = cfg["model"];
    const json defaults{{"a", 0.0}, {"b", 2.0}, {"c", 1.0}, {"d", 3.0}};
    for (const auto& [k, v] : defaults.items()) {
      if (!m.contains(k)) m[k] = v;
    }
  }
  for (const char* side : {"low", "high"}) {
    const auto& a = cfg.at("alpha").at(side);
    if (!a.is_null() && !(a.get<double>() >= 0.0 && a.get<double>() <= 1.0)) {
      throw InputError(std::string("alpha.") + side + " must lie in [0,1]");
    }
  }
  for (auto& p : cfg.at("populations")) {
    if (!p.contains("name")) throw InputError("every population needs a name");
    if (!p.contains("size") || p.at("size").get<long long>() < 1) {
      throw InputError("population '" + p.at("name").get<std::string>() +
                       "' needs a size of at least 1");
    }
    if (!p.contains("seed")) {
      throw InputError("population '" + p.at("name").get<std::string>() + "' needs a seed");
    }
    if (!p.contains("prevalence") || p.at("prevalence").is_null()) {
      const auto name = p.at("name").get<std::string>();
      if ((name == "low" || name == "high") && !cfg.at("alpha").at(name).is_null()) {
        p["prevalence"] = cfg.at("alpha").at(name);
      } else {
        p["prevalence"] = nullptr;
      }
    }
  }
  const auto& g = cfg.at("grid");
  if (!(g.at("step").get<double>() > 0.0)) throw InputError("grid step must be positive");
  if (!(cfg.at("z").get<double>() > 0.0)) throw InputError("z must be positive");
  require_choice(cfg, "partition", {"oracle", "kde"});
  require_choice(cfg, "wilson", {"standard", "verbatim"});
  require_choice(cfg, "sampling", {"exact_count", "bernoulli"});
  require_choice(cfg, "tie", {"positive", "negative"});
  require_choice(cfg, "alpha_source", {"estimate", "config"});
  if (cfg.at("trace_resolution").get<long long>() < 2) {
    throw InputError("trace_resolution must be at least 2");
  }
  if (cfg.contains("q") && cfg.contains("delta")) {
    throw InputError("give either q or delta, not both");
  }
  return cfg;
}

/// Everything a command needs, derived from the resolved config.
class Context {
 public:
  Context(json config, fs::path out_dir) : cfg_(std::move(config)), out_(std::move(out_dir)) {
    const auto& model = cfg_.at("model");
    const auto name = model.at("name").get<std::string>();
    if (name == "gaussian") {
      pn_ = gaussian_example_densities();
    } else if (name == "uniform_overlap") {
      pn_ = uniform_overlap_densities(model.at("a").get<double>(), model.at("b").get<double>(),
                                      model.at("c").get<double>(), model.at("d").get<double>());
    }
  }

  const json& config() const { return cfg_; }
  json& config() { return cfg_; }
  const fs::path& out() const { return out_; }
  bool builtin() const { return pn_.has_value(); }

  TieRule tie() const {
    return cfg_.at("tie") == "positive" ? TieRule::positive : TieRule::negative;
  }
  double z() const { return cfg_.at("z").get<double>(); }
  std::vector<double> grid_values() const {
    const auto& g = cfg_.at("grid");
    return DeltaGrid::range(g.at("start").get<double>(), g.at("stop").get<double>(),
                            g.at("step").get<double>());
  }
  BayesianOptions bayes() const {
    BayesianOptions o;
    o.wilson = cfg_.at("wilson") == "verbatim" ? WilsonVariant::verbatim : WilsonVariant::standard;
    return o;
  }
  std::optional<double> alpha(const char* side) const {
    const auto& a = cfg_.at("alpha").at(side);
    if (a.is_null()) return std::nullopt;
    return a.get<double>();
  }

  /// Loads the population for `role` from inputs, or samples it from the
  /// builtin model when no file is given.
  EmpiricalPopulation population(const std::string& role) {
    if (cfg_.contains("inputs") && cfg_.at("inputs").contains(role)) {
      return load_population(cfg_.at("inputs").at(role).get<std::string>());
    }
    for (const auto& p : cfg_.at("populations")) {
      if (p.at("name") != role) continue;
      if (!builtin()) {
        throw InputError("no data file for the '" + role +
                         "' population and the model is external");
      }
      return simulate(p);
    }
    throw InputError("no data for the '" + role + "' population (pass --" + role + ")");
  }

  EmpiricalPopulation simulate(const json& spec) const {
    if (spec.at("prevalence").is_null()) {
      throw InputError("population '" + spec.at("name").get<std::string>() +
                       "' has unknown prevalence and cannot be simulated");
    }
    const auto mode = cfg_.at("sampling") == "bernoulli" ? SamplingMode::bernoulli
                                                         : SamplingMode::exact_count;
    return sample_population(pn_->first, pn_->second, spec.at("prevalence").get<double>(),
                             spec.at("size").get<std::size_t>(),
                             spec.at("seed").get<std::uint64_t>(), mode);
  }

  /// Q_l and Q_h used to build impure partitions: the true mixtures (oracle)
  /// or kernel estimates from the training populations.
  std::pair<Density, Density> impure_densities(const EmpiricalPopulation* low,
                                               const EmpiricalPopulation* high) const {
    if (cfg_.at("partition") == "oracle") {
      if (!builtin()) throw InputError("oracle partitions need a builtin model");
      const auto a_l = alpha("low");
      const auto a_h = alpha("high");
      if (!a_l || !a_h) throw InputError("oracle partitions need alpha.low and alpha.high");
      const MixturePair pair(pn_->first, pn_->second, *a_l, *a_h);
      return {pair.low().as_density(), pair.high().as_density()};
    }
    if (!low || !high) throw InputError("kernel partitions need the low and high populations");
    return {kernel_density(*low, "kde_low"), kernel_density(*high, "kde_high")};
  }

  Box bounds(const std::pair<Density, Density>& q) const {
    if (builtin()) return Box::hull(pn_->first.support(), pn_->second.support());
    return Box::hull(q.first.support(), q.second.support());
  }

  const std::pair<Density, Density>& pure() const { return *pn_; }

 private:
  json cfg_;
  fs::path out_;
  std::optional<std::pair<Density, Density>> pn_;
};

/// Label at r, or nullopt where the partition is undefined.
std::optional<Label> safe_label(const Partition& u, PointView r) {
  try {
    return u(r);
  } catch (const DegeneratePointError&) {
    return std::nullopt;
  }
}

/// Refines a label change between a and b (same point except along `axis`).
double bisect_change(const Partition& u, Point p, std::size_t axis, double a, double b,
                     Label at_a) {
  for (int i = 0; i < 40; ++i) {
    p[axis] = 0.5 * (a + b);
    const auto l = safe_label(u, p);
    if (l && *l == at_a) {
      a = p[axis];
    } else {
      b = p[axis];
    }
  }
  return 0.5 * (a + b);
}

/// Sampled decision-boundary points for each grid partition: rows of
/// delta, x0[, x1]. In 2-D the boundary is located along x1 for each column x0.
void write_boundary_trace(const fs::path& path, const DeltaGrid& grid, const Box& box,
                          std::size_t resolution) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::size_t dim = box.dim();
  out << "delta,x0" << (dim == 2 ? ",x1" : "") << '\n';
  if (dim > 2) return;
  out << std::setprecision(17);
  const std::size_t axis = dim - 1;
  const double lo = box.lower[axis];
  const double hi = box.upper[axis];
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& u = grid.partition(k);
    const std::size_t columns = dim == 2 ? resolution : 1;
    for (std::size_t c = 0; c < columns; ++c) {
      Point p(dim);
      if (dim == 2) {
        p[0] = box.lower[0] +
               (box.upper[0] - box.lower[0]) * static_cast<double>(c) /
                   static_cast<double>(resolution - 1);
      }
      std::optional<Label> prev;
      double prev_t = lo;
      for (std::size_t i = 0; i < resolution; ++i) {
        const double t =
            lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution - 1);
        p[axis] = t;
        const auto l = safe_label(u, p);
        if (l && prev && *l != *prev) {
          const double root = bisect_change(u, p, axis, prev_t, t, *prev);
          out << grid.value(k) << ',';
          if (dim == 2) out << p[0] << ',';
          out << root << '\n';
        }
        if (l) {
          prev = l;
          prev_t = t;
        }
      }
    }
  }
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

json manifest(const Context& ctx, const std::string& command, const json& outputs) {
  json m = ctx.config();
  m["command"] = command;
  m["outputs"] = outputs;
  return m;
}

DeltaGrid make_grid(const Context& ctx, const std::pair<Density, Density>& q) {
  return DeltaGrid(ctx.grid_values(), q.first, q.second, ctx.tie());
}

int cmd_simulate(Context& ctx, std::ostream& out) {
  if (!ctx.builtin()) throw InputError("simulate needs a builtin model");
  json outputs = json::array();
  for (const auto& spec : ctx.config().at("populations")) {
    const auto pop = ctx.simulate(spec);
    const auto name = spec.at("name").get<std::string>() + ".csv";
    save_population(pop, ctx.out() / name, FileFormat::csv);
    outputs.push_back(name);
    out << "wrote " << (ctx.out() / name).string() << " (" << pop.size() << " points)\n";
  }
  outputs.push_back("manifest.json");
  write_json_file(ctx.out() / "manifest.json", manifest(ctx, "simulate", outputs));
  return 0;
}

int cmd_estimate_alpha(Context& ctx, std::ostream& out, std::ostream& err) {
  const auto low = ctx.population("low");
  const auto high = ctx.population("high");
  const auto q = ctx.impure_densities(&low, &high);
  const DeltaGrid grid = make_grid(ctx, q);
  const auto est = bayesian_alpha_estimate(low, high, grid, ctx.z(), ctx.bayes());

  json report = alpha_report(est, grid);
  report["partition"] = ctx.config().at("partition");
  report["sample_sizes"] = {{"low", low.size()}, {"high", high.size()}};
  if (ctx.config().at("exact_bounds").get<bool>() && ctx.config().at("partition") == "oracle") {
    const MixturePair pair(ctx.pure().first, ctx.pure().second, *ctx.alpha("low"),
                           *ctx.alpha("high"));
    const auto engine = MeasureEngine::parse(ctx.config().at("engine").get<std::string>(),
                                             ctx.bounds(q));
    try {
      const auto b = exact_delta_bounds(pair, engine, grid);
      report["exact_bounds"] = {{"delta_low", b.delta_low},
                                {"delta_high", b.delta_high},
                                {"residual_low", b.residual_low},
                                {"residual_high", b.residual_high}};
    } catch (const DisjointnessError& e) {
      report["exact_bounds"] = {{"error", e.what()}};
    }
  }
  for (const auto* s : {&est.low, &est.high}) {
    for (const auto& w : s->warnings) err << "warning: " << w << '\n';
  }

  write_json_file(ctx.out() / "report_alpha.json", report);
  write_boundary_trace(ctx.out() / "boundary_trace.csv", grid, ctx.bounds(q),
                       ctx.config().at("trace_resolution").get<std::size_t>());
  write_json_file(ctx.out() / "manifest.json",
                  manifest(ctx, "estimate-alpha",
                           {"report_alpha.json", "boundary_trace.csv", "manifest.json"}));
  out << std::setprecision(4) << "alpha_low  = " << est.alpha_low.point << " ["
      << est.alpha_low.lower << ", " << est.alpha_low.upper << "]\n"
      << "alpha_high = " << est.alpha_high.point << " [" << est.alpha_high.lower << ", "
      << est.alpha_high.upper << "]\n";
  return 0;
}

int cmd_estimate_prevalence(Context& ctx, std::ostream& out) {
  const auto low = ctx.population("low");
  const auto high = ctx.population("high");
  const auto test = ctx.population("test");
  const auto q = ctx.impure_densities(&low, &high);

  json alpha_info;
  double a_l = 0.0;
  double a_h = 0.0;
  if (ctx.config().at("alpha_source") == "config") {
    const auto l = ctx.alpha("low");
    const auto h = ctx.alpha("high");
    if (!l || !h) throw InputError("alpha_source 'config' needs alpha.low and alpha.high");
    a_l = *l;
    a_h = *h;
    alpha_info = {{"source", "config"}, {"low", a_l}, {"high", a_h}};
  } else {
    const DeltaGrid grid = make_grid(ctx, q);
    const auto est = bayesian_alpha_estimate(low, high, grid, ctx.z(), ctx.bayes());
    a_l = est.alpha_low.point;
    a_h = est.alpha_high.point;
    alpha_info = {{"source", "estimate"},
                  {"low", a_l},
                  {"high", a_h},
                  {"low_interval", {est.alpha_low.lower, est.alpha_low.upper}},
                  {"high_interval", {est.alpha_high.lower, est.alpha_high.upper}}};
  }

  const auto& pcfg = ctx.config().at("prevalence");
  const double region_delta = pcfg.at("region_delta").get<double>();
  if (!(region_delta > 0.0 && region_delta < 1.0)) {
    throw RangeError("prevalence.region_delta must lie in (0,1)");
  }
  Region region{optimal_partition_impure(q.first, q.second, region_delta, ctx.tie()),
                Label::positive, ""};
  region.descriptor = "positive region of " + region.partition.provenance().description +
                      " (" + ctx.config().at("partition").get<std::string>() + ")";
  PrevalenceOptions opts;
  opts.separation = pcfg.at("separation").get<double>();
  opts.clamp = pcfg.at("clamp").get<bool>();
  const auto est = estimate_prevalence_impure(test, region, low, high, a_l, a_h, opts);

  json report = prevalence_report(est, region.descriptor);
  report["alpha"] = alpha_info;
  write_json_file(ctx.out() / "report_prevalence.json", report);
  write_json_file(ctx.out() / "manifest.json",
                  manifest(ctx, "estimate-prevalence", {"report_prevalence.json", "manifest.json"}));
  out << std::setprecision(6) << "q_hat = " << est.estimate.q_hat << '\n';
  return 0;
}

int cmd_classify(Context& ctx, std::ostream& out) {
  const auto& cfg = ctx.config();
  const auto a_l = ctx.alpha("low");
  const auto a_h = ctx.alpha("high");
  double delta = 0.0;
  if (cfg.contains("delta")) {
    delta = cfg.at("delta").get<double>();
  } else if (cfg.contains("q")) {
    if (!a_l || !a_h) throw InputError("classifying at q needs alpha.low and alpha.high");
    delta = delta_of_q(cfg.at("q").get<double>(), *a_l, *a_h);
  } else {
    throw InputError("classify needs --delta or --q");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    std::ostringstream msg;
    msg << "delta = " << delta << " is outside (0,1)";
    throw RangeError(msg.str());
  }

  auto data = ctx.population("data");
  std::optional<EmpiricalPopulation> low;
  std::optional<EmpiricalPopulation> high;
  if (cfg.at("partition") == "kde") {
    low = ctx.population("low");
    high = ctx.population("high");
  }
  const auto q = ctx.impure_densities(low ? &*low : nullptr, high ? &*high : nullptr);
  const Partition u = optimal_partition_impure(q.first, q.second, delta, ctx.tie());

  std::vector<std::uint8_t> labels;
  labels.reserve(data.size());
  std::size_t positives = 0;
  for (const auto& r : data.points) {
    const bool pos = u(r) == Label::positive;
    labels.push_back(pos ? 1 : 0);
    positives += pos;
  }
  data.hidden_labels = std::move(labels);
  save_population(data, ctx.out() / "labeled.csv", FileFormat::csv);

  json implied_q = nullptr;
  if (a_l && a_h) {
    try {
      implied_q = q_of_delta(delta, *a_l, *a_h);
    } catch (const RangeError&) {
      // delta outside [delta_low, delta_high] has no pure counterpart.
    }
  }
  json report = {{"delta", delta},
                 {"implied_q", implied_q},
                 {"partition", u.provenance().description + " (" +
                                   cfg.at("partition").get<std::string>() + ")"},
                 {"positives", positives},
                 {"negatives", data.size() - positives}};
  write_json_file(ctx.out() / "report_classify.json", report);
  write_json_file(ctx.out() / "manifest.json",
                  manifest(ctx, "classify",
                           {"labeled.csv", "report_classify.json", "manifest.json"}));
  out << std::setprecision(6) << "delta = " << delta << ", implied q = "
      << (implied_q.is_null() ? std::string("n/a") : implied_q.dump()) << ", " << positives
      << "/" << data.size() << " positive\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Class prevalence estimation and classification from impure training data",
               "impure"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  Overrides ov;
  double alpha_low = 0, alpha_high = 0, grid_step = 0, z = 0, q = 0, delta = 0;
  std::uint64_t seed = 0;
  std::string engine, low, high, test, data;
  std::vector<std::pair<CLI::Option*, std::function<void()>>> bindings;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON experiment config");
    sub->add_option("--out", out_dir, "output directory")->capture_default_str();
    auto bind = [&](CLI::Option* opt, std::function<void()> apply) {
      bindings.emplace_back(opt, std::move(apply));
    };
    bind(sub->add_option("--alpha-low", alpha_low, "training prevalence of the low population"),
         [&] { ov.alpha_low = alpha_low; });
    bind(sub->add_option("--alpha-high", alpha_high,
                         "training prevalence of the high population"),
         [&] { ov.alpha_high = alpha_high; });
    bind(sub->add_option("--grid-step", grid_step, "delta grid step"),
         [&] { ov.grid_step = grid_step; });
    bind(sub->add_option("--z", z, "z-score for Wilson bounds and credible intervals"),
         [&] { ov.z = z; });
    bind(sub->add_option("--seed", seed, "base seed; population i gets seed + i"),
         [&] { ov.seed = seed; });
    bind(sub->add_option("--engine", engine, "quad:<res>:<tol> or mc:<samples>:<seed>"),
         [&] { ov.engine = engine; });
  };
  auto data_opt = [&](CLI::App* sub, const char* name, std::string& target,
                      std::optional<std::string> Overrides::*field, const char* help) {
    bindings.emplace_back(sub->add_option(name, target, help),
                          [&ov, &target, field] { ov.*field = target; });
  };

  auto* simulate = app.add_subcommand("simulate", "draw synthetic populations");
  common(simulate);

  auto* est_alpha = app.add_subcommand("estimate-alpha", "estimate training prevalences");
  common(est_alpha);
  data_opt(est_alpha, "--low", low, &Overrides::low, "low population file");
  data_opt(est_alpha, "--high", high, &Overrides::high, "high population file");

  auto* est_prev = app.add_subcommand("estimate-prevalence", "estimate a test prevalence");
  common(est_prev);
  data_opt(est_prev, "--low", low, &Overrides::low, "low population file");
  data_opt(est_prev, "--high", high, &Overrides::high, "high population file");
  data_opt(est_prev, "--test", test, &Overrides::test, "test population file");

  auto* classify = app.add_subcommand("classify", "label points with an impure partition");
  common(classify);
  data_opt(classify, "--data", data, &Overrides::data, "points to label");
  data_opt(classify, "--low", low, &Overrides::low, "low population file (kde partitions)");
  data_opt(classify, "--high", high, &Overrides::high, "high population file (kde partitions)");
  bindings.emplace_back(classify->add_option("--q", q, "test prevalence (needs alpha)"),
                        [&] { ov.q = q; });
  bindings.emplace_back(classify->add_option("--delta", delta, "pseudoprevalence"),
                        [&] { ov.delta = delta; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    for (auto& [opt, apply] : bindings) {
      if (opt->count() > 0) apply();
    }
    std::optional<std::string> cfg_path;
    if (!config_path.empty()) cfg_path = config_path;
    const json cfg = resolve_config(cfg_path, ov);

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec || !fs::is_directory(out_dir)) {
      throw IoError("cannot create output directory '" + out_dir + "'");
    }
    Context ctx(cfg, out_dir);
    if (simulate->parsed()) return cmd_simulate(ctx, out);
    if (est_alpha->parsed()) return cmd_estimate_alpha(ctx, out, err);
    if (est_prev->parsed()) return cmd_estimate_prevalence(ctx, out);
    if (classify->parsed()) return cmd_classify(ctx, out);
    return 1;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const json::exception& e) {
    err << "error (input): invalid config value: " << e.what() << '\n';
    return exit_code(ErrorKind::input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace impure::cli
