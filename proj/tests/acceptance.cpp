// Acceptance suite: criteria 1-8 at full counts, criterion 9 through the CLI.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#include <sys/wait.h>

#include "bsdpi/campaigns.hpp"

namespace {

bsdpi::campaigns::CriterionResult selftest_criterion()
{
  const std::string cmd = std::string("\"") + BSDPI_CLI + "\" selftest > \"" + BSDPI_SELFTEST_LOG + "\" 2>&1";
  const auto start = std::chrono::steady_clock::now();
  const int status = std::system(cmd.c_str());
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const bool ok = code == 0 && secs < 120.0;
  std::string detail = "exit code " + std::to_string(code) + ", limit 120 s, log " + BSDPI_SELFTEST_LOG;
  return {9, "selftest at reduced counts", ok, detail, secs};
}

} // namespace

int main(int argc, char** argv)
{
  std::uint64_t seed = 1;
  if (argc > 1) {
    seed = std::strtoull(argv[1], nullptr, 10);
  }
  int failed = 0;
  auto report = [&](const bsdpi::campaigns::CriterionResult& r) {
    failed += r.pass ? 0 : 1;
    std::printf("%s\n", bsdpi::campaigns::line(r).c_str());
    std::fflush(stdout);
  };
  bsdpi::campaigns::run_all(bsdpi::campaigns::Counts::full(), seed, report);
  report(selftest_criterion());
  std::printf("acceptance: %d of 9 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
