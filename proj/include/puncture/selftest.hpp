/*
 * Copyright 2026 The puncture authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

// Acceptance suite shared by the `acceptance` test binary and `puncture selftest`.
namespace puncture::selftest {

struct CriterionResult {
  std::string id;
  bool pass = false;
  // A failure that is the documented, expected outcome (e.g. a false claim in
  // the source material); it is reported as FAIL but does not fail the run.
  bool known_defect = false;
  std::string detail;
  double seconds = 0.0;
  double budget_seconds = 0.0;
};

struct Summary {
  std::vector<CriterionResult> results;
  int passed = 0;
  int failed = 0;
  int known_defects = 0;
  bool ok() const { return failed == 0; }
};

// Runs every criterion, printing one PASS/FAIL line each as it completes.
// `only` restricts the run to criteria whose id contains the substring.
Summary run(std::ostream& out, const std::string& only = {});

std::vector<std::string> criterion_ids();

}  // namespace puncture::selftest
