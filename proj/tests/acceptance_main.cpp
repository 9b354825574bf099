// Acceptance gate: one line per criterion, exit status 0 only if all pass.

#include <cstdlib>
#include <iostream>
#include <string>

#include "mslab/acceptance.hpp"

int main(int argc, char** argv) {
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 7;
  const mslab::AcceptanceRun first = mslab::run_acceptance(seed);
  const mslab::AcceptanceRun second = mslab::run_acceptance(seed);
  mslab::AcceptanceRun run = first;
  run.results.push_back(
      mslab::determinism_criterion(mslab::results_json(first).dump(2), mslab::results_json(second).dump(2)));
  for (const auto& r : run.results) std::cout << mslab::format_line(r) << "\n";
  for (const auto& r : run.properties)
    std::cout << "       " << (r.passed ? "[pass] " : "[FAIL] ") << r.name << ": " << r.summary << "\n";
  for (const auto& [id, s] : first.seconds) std::cout << "       criterion " << id << ": " << s << " s\n";
  return run.all_passed() ? 0 : 1;
}
