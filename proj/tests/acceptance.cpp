// Acceptance runner: executes every verification suite and prints one
// pass/fail line per criterion.
#include <cstdio>
#include "wavetank/selftest.hpp"

int main() {
  std::vector<wavetank::SelfTestResult> results = wavetank::run_selftests();
  int failures = 0;
  for (const wavetank::SelfTestResult& r : results) {
    std::printf("%s %-18s %6.1fs  %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.seconds,
                r.detail.c_str());
    if (!r.pass) ++failures;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - failures, results.size());
  return failures == 0 ? 0 : 1;
}
