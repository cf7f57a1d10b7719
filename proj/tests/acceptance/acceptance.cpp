#include <cstdio>

#include "eulerlab/verification.hpp"

int main() {
  using namespace eulerlab::verification;
  const Report rep = run_all([](const CriterionResult& r) {
    for (const auto& d : r.details) std::printf("   %s\n", d.c_str());
    std::printf("%s\n", format_line(r).c_str());
    std::fflush(stdout);
  });
  return rep.all_pass() ? 0 : 1;
}
