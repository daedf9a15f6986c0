#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

#include "json.hpp"

#include "impure/cli.hpp"
#include "impure/densities.hpp"
#include "impure/partitions.hpp"
#include "impure/sampling.hpp"

using namespace impure;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("impure_cli_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "impure");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

void write_text(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

}  // namespace

TEST_CASE("exit codes by error class") {
  CHECK(cli::exit_code(ErrorKind::input) == 2);
  CHECK(cli::exit_code(ErrorKind::range) == 2);
  CHECK(cli::exit_code(ErrorKind::parse) == 2);
  CHECK(cli::exit_code(ErrorKind::numeric) == 3);
  CHECK(cli::exit_code(ErrorKind::conditioning) == 3);
  CHECK(cli::exit_code(ErrorKind::linear_dependence) == 4);
  CHECK(cli::exit_code(ErrorKind::io) == 5);
}

TEST_CASE("simulate writes reproducible populations") {
  TempDir a, b, c;
  REQUIRE(run_cli({"simulate", "--out", a.path.string()}).code == 0);
  REQUIRE(run_cli({"simulate", "--out", b.path.string()}).code == 0);
  for (const char* f : {"low.csv", "high.csv"}) {
    CHECK(line_count(a / f) == 501);
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto low = load_population(a / "low.csv");
  CHECK(low.size() == 500);
  CHECK(low.dim == 2);
  const auto& labels = *low.hidden_labels;
  CHECK(std::count(labels.begin(), labels.end(), 1) == 100);

  const auto m = read_json(a / "manifest.json");
  CHECK(m.at("command") == "simulate");
  CHECK(m.at("populations").at(0).at("seed") == 1);
  CHECK(m.at("populations").at(1).at("prevalence") == 0.8);

  // The manifest alone reproduces the run.
  REQUIRE(run_cli({"simulate", "--config", a / "manifest.json", "--out", c.path.string()}).code == 0);
  CHECK(slurp(a / "low.csv") == slurp(c / "low.csv"));
  CHECK(slurp(a / "high.csv") == slurp(c / "high.csv"));
}

TEST_CASE("simulate overrides and the uniform model") {
  TempDir a, b;
  write_text(a / "cfg.json", R"({"model": {"name": "uniform_overlap"}})");
  REQUIRE(run_cli({"simulate", "--config", a / "cfg.json", "--out", a.path.string()}).code == 0);
  for (const char* f : {"low.csv", "high.csv"}) {
    const auto pop = load_population(a / f);
    CHECK(pop.dim == 1);
    for (const auto& p : pop.points) {
      CHECK(p[0] >= 0.0);
      CHECK(p[0] <= 3.0);
    }
  }
  REQUIRE(run_cli({"simulate", "--seed", "40", "--alpha-low", "0.1", "--out", b.path.string()})
              .code == 0);
  const auto m = read_json(b / "manifest.json");
  CHECK(m.at("populations").at(0).at("seed") == 40);
  CHECK(m.at("populations").at(1).at("seed") == 41);
  CHECK(m.at("populations").at(0).at("prevalence") == 0.1);
  const auto low = load_population(b / "low.csv");
  CHECK(std::count(low.hidden_labels->begin(), low.hidden_labels->end(), 1) == 50);
}

TEST_CASE("estimate-alpha report and boundary trace") {
  TempDir d;
  const auto r = run_cli({"estimate-alpha", "--out", d.path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("alpha_low") != std::string::npos);
  const auto rep = read_json(d / "report_alpha.json");
  for (const char* side : {"low", "high"}) {
    const auto& s = rep.at(side);
    for (const char* key : {"side", "z", "grid", "admissible_set", "posterior", "point",
                            "interval", "alpha_point", "alpha_interval", "cells"}) {
      CHECK_MESSAGE(s.contains(key), side << " lacks " << key);
    }
    CHECK(s.at("grid").size() == 19);
    CHECK(s.at("cells").size() == 19);
    double total = 0.0;
    for (const auto& c : s.at("posterior")) total += c.at("weight").get<double>();
    CHECK(total == doctest::Approx(1.0));
  }
  const double a_l = rep.at("low").at("alpha_point").get<double>();
  const double a_h = rep.at("high").at("alpha_point").get<double>();
  CHECK(a_l < a_h);
  CHECK(std::abs(a_l - 0.2) < 0.2);
  CHECK(std::abs(a_h - 0.8) < 0.2);

  std::ifstream trace(d / "boundary_trace.csv");
  std::string header;
  std::getline(trace, header);
  CHECK(header == "delta,x0,x1");
  CHECK(line_count(d / "boundary_trace.csv") > 100);
  CHECK(read_json(d / "manifest.json").at("command") == "estimate-alpha");
}

TEST_CASE("estimate-alpha on files, pure negatives and identical populations") {
  TempDir d;
  REQUIRE(run_cli({"simulate", "--alpha-low", "0", "--out", d.path.string()}).code == 0);
  const auto r = run_cli({"estimate-alpha", "--alpha-low", "0", "--low", d / "low.csv", "--high",
                          d / "high.csv", "--out", d.path.string()});
  REQUIRE(r.code == 0);
  const auto rep = read_json(d / "report_alpha.json");
  CHECK(rep.at("low").at("sentinel") == true);
  CHECK(rep.at("low").at("alpha_point") == 0.0);
  CHECK(rep.at("sample_sizes").at("low") == 500);

  const auto same = run_cli({"estimate-alpha", "--low", d / "high.csv", "--high", d / "high.csv",
                             "--out", d.path.string()});
  CHECK(same.code == 4);
  CHECK(same.err.find("linear_dependence") != std::string::npos);
}

TEST_CASE("estimate-prevalence") {
  TempDir d;
  write_text(d / "cfg.json", R"({
    "alpha_source": "config",
    "populations": [
      {"name": "low", "size": 2000, "seed": 1},
      {"name": "high", "size": 2000, "seed": 2},
      {"name": "test", "size": 5000, "seed": 3, "prevalence": 0.3}
    ]})");
  const auto r = run_cli({"estimate-prevalence", "--config", d / "cfg.json", "--out", d.path.string()});
  REQUIRE(r.code == 0);
  const auto rep = read_json(d / "report_prevalence.json");
  for (const char* key : {"q_hat", "region_descriptor", "P_D", "N_D", "sample_sizes", "clamped"}) {
    CHECK_MESSAGE(rep.contains(key), "missing " << key);
  }
  CHECK(std::abs(rep.at("q_hat").get<double>() - 0.3) < 0.05);
  CHECK(rep.at("alpha").at("source") == "config");

  // Test population equal to the low training population returns alpha_low.
  REQUIRE(run_cli({"simulate", "--out", d.path.string()}).code == 0);
  const auto self = run_cli({"estimate-prevalence", "--low", d / "low.csv", "--high",
                             d / "high.csv", "--test", d / "low.csv", "--config", d / "cfg.json",
                             "--out", d.path.string()});
  REQUIRE(self.code == 0);
  CHECK(read_json(d / "report_prevalence.json").at("q_hat").get<double>() ==
        doctest::Approx(0.2).epsilon(1e-12));

  // Estimated alphas.
  const auto est = run_cli({"estimate-prevalence", "--low", d / "low.csv", "--high",
                            d / "high.csv", "--test", d / "low.csv", "--out", d.path.string()});
  REQUIRE(est.code == 0);
  const auto rep2 = read_json(d / "report_prevalence.json");
  CHECK(rep2.at("alpha").at("source") == "estimate");
  CHECK(rep2.at("q_hat").get<double>() ==
        doctest::Approx(rep2.at("alpha").at("low").get<double>()).epsilon(1e-9));

  const auto missing = run_cli({"estimate-prevalence", "--low", d / "low.csv", "--high",
                                d / "high.csv", "--test", d / "nope.csv", "--out",
                                d.path.string()});
  CHECK(missing.code == 5);
}

TEST_CASE("classify") {
  TempDir d;
  const auto [P, N] = gaussian_example_densities();
  auto pts = sample_population(P, N, 0.5, 400, 5);
  pts.hidden_labels.reset();
  save_population(pts, d / "pts.csv", FileFormat::csv);

  SUBCASE("delta = 1/2 agrees with the pure q = 1/2 classifier") {
    REQUIRE(run_cli({"classify", "--data", d / "pts.csv", "--delta", "0.5", "--out",
                     d.path.string()})
                .code == 0);
    const auto labeled = load_population(d / "labeled.csv");
    REQUIRE(labeled.hidden_labels);
    const auto pure = optimal_partition_pure(P, N, 0.5);
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      CHECK(labeled.points[i] == pts.points[i]);
      CHECK(((*labeled.hidden_labels)[i] == 1) == (pure(pts.points[i]) == Label::positive));
    }
    const auto rep = read_json(d / "report_classify.json");
    CHECK(rep.at("delta") == 0.5);
    CHECK(rep.at("implied_q").get<double>() == doctest::Approx(0.5));
  }

  SUBCASE("classifying at q matches the pure classifier at q") {
    REQUIRE(run_cli({"classify", "--data", d / "pts.csv", "--q", "0.3", "--out", d.path.string()})
                .code == 0);
    const auto labeled = load_population(d / "labeled.csv");
    const auto pure = optimal_partition_pure(P, N, 0.3);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < labeled.size(); ++i) {
      agree += ((*labeled.hidden_labels)[i] == 1) == (pure(pts.points[i]) == Label::positive);
    }
    CHECK(agree == labeled.size());
    CHECK(read_json(d / "report_classify.json").at("implied_q").get<double>() ==
          doctest::Approx(0.3).epsilon(1e-12));
  }

  SUBCASE("q = 0 labels everything negative") {
    REQUIRE(run_cli({"classify", "--data", d / "pts.csv", "--q", "0", "--out", d.path.string()})
                .code == 0);
    CHECK(read_json(d / "report_classify.json").at("positives") == 0);
  }

  SUBCASE("delta outside (0,1)") {
    CHECK(run_cli({"classify", "--data", d / "pts.csv", "--delta", "1.5", "--out",
                   d.path.string()})
              .code == 2);
    CHECK(run_cli({"classify", "--data", d / "pts.csv", "--out", d.path.string()}).code == 2);
  }
}

TEST_CASE("configuration errors") {
  TempDir d;
  write_text(d / "unknown.json", R"({"modle": {"name": "gaussian"}})");
  CHECK(run_cli({"simulate", "--config", d / "unknown.json", "--out", d.path.string()}).code == 2);
  write_text(d / "broken.json", R"({"z": )");
  CHECK(run_cli({"simulate", "--config", d / "broken.json", "--out", d.path.string()}).code == 2);
  write_text(d / "typed.json", R"({"z": "two"})");
  CHECK(run_cli({"simulate", "--config", d / "typed.json", "--out", d.path.string()}).code == 2);
  CHECK(run_cli({"simulate", "--grid-step", "0", "--out", d.path.string()}).code == 2);
  CHECK(run_cli({"simulate", "--alpha-low", "1.5", "--out", d.path.string()}).code == 2);
  CHECK(run_cli({"simulate", "--config", d / "absent.json", "--out", d.path.string()}).code == 5);
  CHECK(run_cli({"frobnicate"}).code == 2);
  CHECK(run_cli({}).code == 2);
  const auto equal = run_cli({"estimate-alpha", "--alpha-low", "0.5", "--alpha-high", "0.5",
                              "--out", d.path.string()});
  CHECK(equal.code == 4);
}

TEST_CASE("the executable reports the same exit codes") {
  TempDir d;
  const std::string bin = IMPURE_BINARY;
  auto status = [](const std::string& cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " simulate --out " + d.path.string()) == 0);
  CHECK(fs::exists(d.path / "low.csv"));
  CHECK(status(bin + " classify --data " + (d / "low.csv") + " --delta 2 --out " +
               d.path.string()) == 2);
  CHECK(status(bin + " estimate-alpha --low " + (d / "missing.csv") + " --out " +
               d.path.string()) == 5);
}
