#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rgrade/bounds.hpp"
#include "rgrade/grade.hpp"
#include "rgrade/harmonic.hpp"

namespace rgrade {

struct CheckResult {
  std::string name;
  double measured = 0.0;
  double threshold = 0.0;
  std::string comparator = "<=";
  bool pass = false;
};

struct SuiteResult {
  std::string suite;
  std::vector<CheckResult> checks;
  double elapsed_s = 0.0;

  bool pass() const;
  std::string summary_line() const;
};

// Memoized profiles, envelopes, and grade solves shared by the verification
// suites, so one run computes each expensive object once.
class VerifyContext {
 public:
  const HarmonicProfile& profile_1d();
  const HarmonicProfile& profile_2d();
  const HarmonicProfile& profile_3d();
  const EnvelopePair& envelope_1d();
  const EnvelopePair& envelope_2d();
  const EnvelopePair& envelope_3d();

  // d = 1 exactness solves run with tightened tolerances.
  const GradeSolution& grade_1d(int x0);
  // d >= 2 solves use the integral upper bound as the bisection bracket.
  const GradeSolution& grade(int d, const Point& x0, int L);

 private:
  std::optional<HarmonicProfile> prof1_, prof2_, prof3_;
  std::optional<EnvelopePair> env1_, env2_, env3_;
  std::map<std::string, GradeSolution> solutions_;
};

// Verification suites. The names accepted by the CLI `verify` command are
// the six in verify_suite_names(); run_suite additionally understands
// "threshold" and "mc-optimality", which the acceptance binary drives.
std::vector<std::string> verify_suite_names();
SuiteResult run_suite(const std::string& name, VerifyContext& ctx);

}  // namespace rgrade
