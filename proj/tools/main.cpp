#include <chrono>
#include <fstream>
#include <iostream>

#include "cli.hpp"

namespace {

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  return bool(f);
}

int do_replay(const std::vector<std::string>& args) {
  if (args.size() != 2) {
    std::cerr << "usage: eulerlab replay <manifest.json>\n";
    return eulerlab::cli::kUsage;
  }
  std::ifstream f(args[1]);
  if (!f) {
    std::cerr << "replay: cannot open " << args[1] << "\n";
    return eulerlab::cli::kUsage;
  }
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(f);
  } catch (const std::exception& e) {
    std::cerr << "replay: " << e.what() << "\n";
    return eulerlab::cli::kUsage;
  }
  std::string report;
  const bool ok = eulerlab::cli::replay(m, report);
  std::cout << report;
  return ok ? eulerlab::cli::kOk : eulerlab::cli::kFailure;
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  if (!args.empty() && args[0] == "replay") return do_replay(args);

  const auto start = std::chrono::steady_clock::now();
  const auto outcome = eulerlab::cli::run(args);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  int status = outcome.status;
  std::string primary;
  for (const auto& a : outcome.artifacts) {
    if (a.name == "stdout") {
      std::cout << a.content << std::flush;
    } else if (!write_file(a.name, a.content)) {
      std::cerr << "cannot write " << a.name << "\n";
      status = eulerlab::cli::kFailure;
    } else if (primary.empty()) {
      primary = a.name;
    }
  }
  if (!outcome.diagnostic.empty()) std::cerr << outcome.diagnostic << "\n";
  if (outcome.status == eulerlab::cli::kUsage || outcome.command.empty()) return status;

  const std::string manifest = eulerlab::cli::make_manifest(args, outcome, wall).dump(2) + "\n";
  if (!primary.empty() && outcome.artifacts.front().name == primary) {
    if (!write_file(primary + ".manifest.json", manifest)) {
      std::cerr << "cannot write " << primary << ".manifest.json\n";
      status = eulerlab::cli::kFailure;
    }
  } else {
    std::cerr << manifest;
  }
  return status;
}
