#include <openssl/evp.h>
#include <openssl/opensslv.h>

#include <cstdio>
#include <stdexcept>

#include "CLI11.hpp"
#include "cli.hpp"
#include "eulerlab/parallel.hpp"

namespace eulerlab::cli {

using nlohmann::json;

std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256: digest failed");
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

json make_manifest(const std::vector<std::string>& args, const Outcome& outcome, double wall_seconds) {
  json outputs = json::array();
  for (const auto& a : outcome.artifacts)
    outputs.push_back({{"name", a.name}, {"bytes", a.content.size()}, {"sha256", sha256_hex(a.content)}});
  return {{"command", outcome.command},
          {"argv", args},
          {"config", outcome.config},
          {"seed", outcome.seed},
          {"status", outcome.status},
          {"versions",
           {{"eulerlab", EULERLAB_VERSION},
            {"compiler", __VERSION__},
            {"cli11", CLI11_VERSION},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                  std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
            {"openssl", OPENSSL_VERSION_TEXT}}},
          {"threads", thread_count()},
          {"wall_seconds", wall_seconds},
          {"outputs", outputs}};
}

bool replay(const json& manifest, std::string& report) {
  const auto args = manifest.at("argv").get<std::vector<std::string>>();
  const Outcome again = run(args);
  const auto& want = manifest.at("outputs");
  bool ok = again.status == manifest.value("status", 0) && again.artifacts.size() == want.size();
  if (again.artifacts.size() != want.size())
    report += "output count " + std::to_string(again.artifacts.size()) + " vs " + std::to_string(want.size()) + "\n";
  for (std::size_t i = 0; i < std::min(again.artifacts.size(), want.size()); ++i) {
    const std::string got = sha256_hex(again.artifacts[i].content);
    const std::string exp = want[i].at("sha256").get<std::string>();
    const bool same = got == exp;
    ok = ok && same;
    report += (same ? "match    " : "MISMATCH ") + want[i].at("name").get<std::string>() + " " + got + "\n";
  }
  return ok;
}

}  // namespace eulerlab::cli
