// Runs the acceptance suite and prints one line per criterion.
//   acceptance_main [report.json]
// FINCAP_GRID / FINCAP_COARSE_GRID override the grids (defaults 96 / 48).

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include "fincap/acceptance.hpp"
#include "fincap/error.hpp"

int main(int argc, char** argv) {
  fincap::acceptance::SuiteOptions opts;
  if (const char* g = std::getenv("FINCAP_GRID")) opts.grid = std::atoi(g);
  if (const char* g = std::getenv("FINCAP_COARSE_GRID")) opts.coarse_grid = std::atoi(g);
  opts.log = [](const std::string& s) { std::cerr << s << std::endl; };
  try {
    const auto res = fincap::acceptance::run_suite(opts);
    for (const auto& c : res.criteria) std::cout << fincap::acceptance::format_line(c) << '\n';
    std::cout << (res.pass() ? "ACCEPTANCE PASSED" : "ACCEPTANCE FAILED") << std::endl;
    if (argc > 1) std::ofstream(argv[1]) << res.report.dump(2) << '\n';
    return res.pass() ? 0 : 1;
  } catch (const fincap::Error& e) {
    std::cerr << "acceptance aborted: " << e.what() << '\n';
    return 2;
  }
}
