#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "cli.hpp"
#include "eulerlab/asymconst.hpp"
#include "eulerlab/density.hpp"
#include "eulerlab/saddle.hpp"

using namespace eulerlab;
using nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

double num(const std::string& s) { return std::strtod(s.c_str(), nullptr); }

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

}  // namespace

TEST_CASE("constants round-trip through JSON") {
  const auto out = cli::run({"constants", "--sigma", "0.75"});
  REQUIRE(out.status == cli::kOk);
  const auto j = json::parse(out.artifacts.at(0).content);
  const auto& t = asymconst::expansion_constants(0.75);
  CHECK(j.at("A_sigma").get<double>() == t.A_sigma);
  CHECK(j.at("g")[0][1].get<double>() == t.g[0][1]);
  CHECK(j.at("A1").at("intercept_printed").get<double>() == t.A1_intercept_printed);
  const auto one = json::parse(cli::run({"constants", "--sigma", "1"}).artifacts.at(0).content);
  CHECK(one.at("A").get<double>() == asymconst::expansion_constants(1.0).A);
}

TEST_CASE("density CSV is lossless") {
  const auto out = cli::run({"density", "--sigma", "0.8", "--tau", "6", "--points", "21", "--format", "csv"});
  REQUIRE(out.status == cli::kOk);
  const auto rows = parse_csv(out.artifacts.at(0).content);
  REQUIRE(rows.size() == 22);
  CHECK(rows[0] == std::vector<std::string>{"x", "n_inversion", "n_gaussian", "log_m"});
  const auto cfg = saddle::config_for_tau(0.8, 6.0);
  const density::Inversion inv(cfg, 6.0);
  const auto curve = density::tilted_density(cfg, 6.0, density::standard_grid(inv.variance(), 8.0, 21));
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    CHECK(same(num(rows[i + 1][0]), curve.grid[i].x));
    CHECK(same(num(rows[i + 1][1]), curve.grid[i].n_inversion));
    CHECK(same(num(rows[i + 1][2]), curve.grid[i].n_gaussian));
    CHECK(same(num(rows[i + 1][3]), curve.grid[i].log_m));
  }
}

TEST_CASE("record CSV flattens and round-trips") {
  const json j = {{"a", 0.1}, {"b", {{"c", 1.0 / 3}, {"d", "x,y"}}}, {"e", nullptr}};
  const auto rows = parse_csv(cli::json_to_csv(j));
  CHECK(rows[0] == std::vector<std::string>{"key", "value"});
  CHECK(num(rows[1][1]) == 0.1);
  CHECK(rows[2][0] == "/b/c");
  CHECK(num(rows[2][1]) == 1.0 / 3);
  CHECK(cli::json_to_csv(j).find("\"x,y\"") != std::string::npos);
  CHECK(cli::format_number(std::nan("")) == "nan");
  CHECK(cli::format_number(0.1) == "0.10000000000000001");
}

TEST_CASE("tail reports every method and a Monte Carlo cross-check") {
  const auto out = cli::run({"tail", "--sigma", "1", "--t", "5", "--methods", "all", "--n", "20000"});
  REQUIRE(out.status == cli::kOk);
  const auto j = json::parse(out.artifacts.at(0).content);
  for (const char* k : {"log_phi_saddle", "log_phi_integrated", "log_phi_asymptotic"})
    CHECK(std::isfinite(j.at(k).get<double>()));
  CHECK(std::abs(j.at("log_phi_saddle").get<double>() / j.at("log_phi_integrated").get<double>() - 1) < 1e-3);
  const auto& mc = j.at("monte_carlo");
  REQUIRE(mc.contains("z"));
  CHECK(std::abs(mc.at("z").get<double>()) < 4);
}

TEST_CASE("saddle output") {
  const auto j = json::parse(cli::run({"saddle", "--sigma", "0.75", "--tau", "30"}).artifacts.at(0).content);
  CHECK(std::abs(j.at("f1").get<double>() - 30) <= 1e-9 * 30);
  CHECK(j.at("guess_source") == "asymptotic");
  CHECK(!j.at("trace").empty());
}

TEST_CASE("exit statuses") {
  CHECK(cli::run({}).status == cli::kUsage);
  CHECK(cli::run({"frobnicate"}).status == cli::kUsage);
  CHECK(cli::run({"saddle", "--sigma", "0.8", "--bogus", "1"}).status == cli::kUsage);
  CHECK(cli::run({"saddle", "--sigma", "1.5", "--tau", "3"}).status == cli::kUsage);
  CHECK(cli::run({"saddle", "--sigma", "0.8"}).status == cli::kUsage);
  CHECK(cli::run({"saddle", "--sigma", "0.8", "--t", "3"}).status == cli::kUsage);
  const auto bad = cli::run({"saddle", "--sigma", "1", "--tau", "20"});
  CHECK(bad.status == cli::kFailure);
  CHECK(bad.artifacts.empty());
  CHECK(!bad.diagnostic.empty());
  const auto help = cli::run({"tail", "--help"});
  CHECK(help.status == cli::kOk);
  CHECK(help.artifacts.at(0).content.find("--methods") != std::string::npos);
}

TEST_CASE("scan: empty range, per-row failures, monotone tail") {
  const auto empty = cli::run({"scan", "--sigma", "0.8", "--tau-min", "5", "--tau-max", "4"});
  CHECK(empty.status == cli::kOk);
  CHECK(parse_csv(empty.artifacts.at(0).content).size() == 1);

  const auto out = cli::run({"scan", "--sigma", "1", "--tau-min", "4.5", "--tau-max", "20", "--tau-step", "2.5",
                             "--order", "1"});
  REQUIRE(out.status == cli::kOk);
  const auto rows = parse_csv(out.artifacts.at(0).content);
  REQUIRE(rows.size() == 8);
  const auto& head = rows[0];
  const auto col = [&](const std::string& name) {
    return std::size_t(std::find(head.begin(), head.end(), name) - head.begin());
  };
  double prev_phi = INFINITY, prev_dev = INFINITY;
  int failed = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!rows[i][col("error")].empty()) {
      ++failed;
      continue;
    }
    const double phi = num(rows[i][col("log_phi_saddle")]);
    const double dev = std::abs(num(rows[i][col("saddle_over_asymptotic")]) - 1);
    CHECK(phi < prev_phi);
    CHECK(dev < prev_dev);
    prev_phi = phi;
    prev_dev = dev;
  }
  CHECK(failed >= 1);  // sigma = 1, tau near 20 has no representable model
  CHECK(failed < 7);
}

TEST_CASE("sample writes summary and raw rows") {
  const auto out = cli::run({"sample", "--sigma", "0.9", "--n", "500", "--seed", "4", "--raw", "samples.csv"});
  REQUIRE(out.status == cli::kOk);
  REQUIRE(out.artifacts.size() == 2);
  CHECK(out.artifacts[1].name == "samples.csv");
  CHECK(parse_csv(out.artifacts[1].content).size() == 501);
  const auto j = json::parse(out.artifacts[0].content);
  CHECK(j.at("n") == 500);
  CHECK(j.at("truncation_bias_bound").is_null());  // infinite bound serialises as null
}

TEST_CASE("manifest digests and replay") {
  const std::vector<std::string> args = {"sample", "--sigma", "1", "--n", "2000", "--seed", "12", "--kappa", "3"};
  const auto out = cli::run(args);
  const auto m = cli::make_manifest(args, out, 0.5);
  CHECK(m.at("command") == "sample");
  CHECK(m.at("seed") == 12);
  CHECK(m.at("config").at("prime_cutoff") == 1000);
  CHECK(m.at("outputs")[0].at("sha256") == cli::sha256_hex(out.artifacts[0].content));
  CHECK(m.at("versions").contains("eulerlab"));
  std::string report;
  setenv("EULERLAB_THREADS", "3", 1);
  CHECK(cli::replay(json::parse(m.dump()), report));
  unsetenv("EULERLAB_THREADS");
  CHECK(report.find("match") == 0);

  auto tampered = m;
  tampered["outputs"][0]["sha256"] = cli::sha256_hex("something else");
  report.clear();
  CHECK_FALSE(cli::replay(tampered, report));
}

TEST_CASE("sha256 test vector") {
  CHECK(cli::sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
