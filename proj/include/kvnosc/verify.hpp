#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "kvnosc/ermakov.hpp"
#include "kvnosc/freq.hpp"

namespace kvnosc {

/// One identity measured against its tolerance. A normal check passes when
/// residual < tolerance. An expected-fail check is a sensitivity control: it
/// passes when residual > tolerance, i.e. when the identity visibly breaks.
struct Check {
  std::string name;
  std::string parameter;
  double residual = 0.0;
  double tolerance = 0.0;
  bool expected_fail = false;

  bool passed() const;
};

enum class Depth { quick, full };

struct Report {
  Depth depth = Depth::quick;
  std::vector<Check> checks;
  double wall_seconds = 0.0;

  bool all_passed() const;
  std::string to_text() const;
  std::string to_json() const;
};

/// Profiles and initial data the identities are quantified over.
struct SweepCase {
  std::string label;
  FrequencyProfile profile;
  InitialData initial;
  double xc0, pc0;
};
std::vector<SweepCase> verification_sweep();

Report run_verification(Depth depth);

/// Compares centre.csv with centre_oracle.csv in `dir` and in each immediate
/// subdirectory that holds them. Throws ConfigError when the two files of a
/// pair carry different scenario hashes or time columns.
Report compare_centre_files(const std::filesystem::path& dir);

}  // namespace kvnosc
