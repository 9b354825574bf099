#ifndef MSLAB_ACCEPTANCE_HPP
#define MSLAB_ACCEPTANCE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "mslab/anomaly_ledger.hpp"
#include "mslab/random.hpp"

namespace mslab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string summary;
  nlohmann::json details;
};

struct AcceptanceRun {
  std::uint64_t seed = 0;
  std::vector<CriterionResult> results;
  std::vector<CriterionResult> properties;  // supplementary assertions
  std::map<std::string, double> seconds;     // wall time per criterion

  bool all_passed() const;
};

// Criteria 1-8. Wall-time limits are part of the pass conditions, but the
// measured times are kept out of results_json so that it is reproducible.
AcceptanceRun run_acceptance(std::uint64_t seed);

// Criterion 9: byte comparison of two serialized runs.
CriterionResult determinism_criterion(const std::string& first, const std::string& second);

nlohmann::json results_json(const AcceptanceRun& run);
nlohmann::json run_info_json(const AcceptanceRun& run);
std::string format_line(const CriterionResult& r);

// Random channel set: 1-8 channels at small integer positions (1D or 2D),
// random chirality and charge in {1, -1, 2}, 1-4 generators mixing
// polynomial, plane and tabulated modulations with random strengths, and
// random region labels.
ChannelSet random_channel_set(Engine& eng);

}  // namespace mslab

#endif  // MSLAB_ACCEPTANCE_HPP
